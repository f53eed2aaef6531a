#pragma once

#include <optional>
#include <string>
#include <vector>

#include "facekit/motion.hpp"
#include "facekit/spectral.hpp"

namespace facekit {

/// Lip vertex error: mean over frames of the max over lip vertices of the
/// squared Euclidean displacement error.
double lve(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask);

/// Face vertex error: mean over frames and vertices of the squared
/// Euclidean displacement error.
double fve(const MotionSequence& pred, const MotionSequence& gt);

/// Dynamic-time-warping cost between the two frame sequences. Local cost is
/// the per-vertex-mean Euclidean frame distance; steps are insert/delete/
/// match; the accumulated optimal cost is divided by (T_pred + T_gt).
double fdtw(const MotionSequence& pred, const MotionSequence& gt);

/// Upper-face dynamics deviation: signed mean over upper-face vertices of
/// dyn(gt) - dyn(pred). Positive and negative deviations cancel.
double fdd(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask);

/// Fourier frequency error: mean over the 3N channels of the squared
/// Euclidean distance between retained DFT magnitude rows. Requires equal T.
double ffe(const MotionSequence& pred, const MotionSequence& gt, const SpectralConfig& cfg);

struct MetricSelection {
    bool lve = true;
    bool fve = true;
    bool fdtw = true;
    bool fdd = true;
    bool ffe = true;
};

struct SequenceMetrics {
    std::string id;
    std::optional<double> lve;
    std::optional<double> fve;
    std::optional<double> fdtw;
    std::optional<double> fdd;
    std::optional<double> ffe;
};

struct MetricsReport {
    std::vector<SequenceMetrics> sequences;
    SequenceMetrics mean;  // id empty; per-metric mean over sequences
};

SequenceMetrics evaluate_pair(const std::string& id, const MotionSequence& pred,
                              const MotionSequence& gt, const RegionMask& mask,
                              const MetricSelection& selection, const SpectralConfig& cfg);

MetricsReport make_report(std::vector<SequenceMetrics> sequences);

/// Report JSON with fixed key order (id, lve, fve, fdtw, fdd, ffe) and
/// 17-significant-digit numbers.
std::string report_to_json(const MetricsReport& report);

}  // namespace facekit
