#pragma once

// Plain serial implementations of the numeric kernels, kept alongside the
// OpenMP versions. Tests check the parallel kernels against these; the
// benchmark target times the two side by side. Written as straight loops,
// no shared helpers with the production kernels.

#include <vector>

#include "facekit/linalg.hpp"
#include "facekit/losses.hpp"
#include "facekit/motion.hpp"
#include "facekit/spectral.hpp"

namespace facekit::reference {

double dyn(const MotionSequence& seq, std::size_t vertex);
std::vector<double> std_vector(const MotionSequence& seq);
Matrix frequency_matrix(const MotionSequence& seq, const SpectralConfig& cfg);

double lve(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask);
double fve(const MotionSequence& pred, const MotionSequence& gt);
double fdtw(const MotionSequence& pred, const MotionSequence& gt);
double fdd(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask);
double ffe(const MotionSequence& pred, const MotionSequence& gt, const SpectralConfig& cfg);

SequenceLoss rec_loss(const MotionSequence& pred, const MotionSequence& gt);
SequenceLoss trend_loss(const MotionSequence& pred, const MotionSequence& gt,
                        const TrendConfig& cfg);
ContrastiveLoss local_contrastive_loss(const Matrix& audio, const Matrix& motion,
                                       const Matrix& align, const ContrastiveConfig& cfg);

Matrix infuse_style(const Matrix& features, const Matrix& w, std::span<const double> b);

}  // namespace facekit::reference
