#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "facekit/linalg.hpp"
#include "facekit/motion.hpp"

namespace facekit {

/// Number of retained low-frequency DFT bins, DC included.
struct SpectralConfig {
    std::size_t bins = 20;
};

/// How retained bin count follows sequence length: min(bins, floor(T/2)+1).
std::size_t retained_bins(std::size_t frames, const SpectralConfig& cfg);

/// Standard deviation over time (population, 1/T) of the per-frame
/// Euclidean norms of one vertex's displacement.
double dyn(const MotionSequence& seq, std::size_t vertex);

/// dyn applied to every vertex.
std::vector<double> std_vector(const MotionSequence& seq);

/// Per-channel DFT magnitude features. Channels are vertex-major then
/// x,y,z (3N rows); row c holds |X_k|/T for k = 0..m-1 of that channel's
/// scalar time series. Requires T >= 2.
Matrix frequency_matrix(const MotionSequence& seq, const SpectralConfig& cfg);

enum class CompositeMode { Mean, Max };

/// Temporal statistics of a [T][d] feature series, concatenated as
/// [aggregate; std; diff-std] (length 3d). aggregate is the per-dimension
/// mean or max; std is population std over time; diff-std is population
/// std of the T-1 first-order differences. Requires T >= 2.
std::vector<double> composite_stats(const Matrix& series, CompositeMode mode);

/// Per-frame Euclidean distance between two absolute vertex positions
/// (template + displacement).
std::vector<double> lip_distance_trace(const MotionSequence& seq, const FaceTemplate& tpl,
                                       std::size_t upper_lip, std::size_t lower_lip);

// Feature CSV export, one row per channel/vertex, header row included.
void write_std_csv(std::ostream& out, const std::vector<double>& values);
void write_frequency_csv(std::ostream& out, const Matrix& magnitudes);
void write_composite_csv(std::ostream& out, const std::vector<double>& stats,
                         std::size_t dims, CompositeMode mode);

}  // namespace facekit
