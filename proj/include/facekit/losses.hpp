#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "facekit/linalg.hpp"
#include "facekit/motion.hpp"

namespace facekit {

struct TrendConfig {
    std::size_t max_order = 5;  // R
};

struct ContrastiveConfig {
    double temperature = 0.1;      // tau
    std::size_t window = 5;        // k, softmax candidates are |i-t| <= k
    double direction_weight = 0.5; // lambda, audio-to-motion share

    void validate() const;
};

struct LossWeights {
    double rec = 1.0;
    double s = 0.001;
    double tre = 1.0;
    double lcon = 0.001;

    void validate() const;
};

struct LossParts {
    double rec = 0.0;
    double s = 0.0;
    double tre = 0.0;
    double lcon = 0.0;
};

/// Loss value together with its gradient w.r.t. the prediction, laid out
/// like the sequence values ([T][N][3] flattened).
struct SequenceLoss {
    double value = 0.0;
    std::vector<double> grad;
};

/// Sum over frames of the squared Frobenius frame error; grad = 2(pred - gt).
SequenceLoss rec_loss(const MotionSequence& pred, const MotionSequence& gt);

/// ||pred_style - gt_style||^2 + ||speaker_style - mean_style||^2.
double style_loss(std::span<const double> pred_style, std::span<const double> gt_style,
                  std::span<const double> speaker_style, std::span<const double> mean_style);

/// Mean over orders r = 1..R of the summed squared differences between
/// predicted and ground-truth r-step frame deltas. Requires R < T.
SequenceLoss trend_loss(const MotionSequence& pred, const MotionSequence& gt,
                        const TrendConfig& cfg);

struct ContrastiveLoss {
    double value = 0.0;
    Matrix grad_align;   // d_a x d_m, includes the l1 subgradient
    Matrix grad_motion;  // T x d_m
};

/// Windowed InfoNCE alignment of audio rows against projected motion rows,
/// both directions, plus the l1 norm of the alignment map. Cosine logits are
/// scaled by 1/tau; softmax candidates for anchor t are indices within the
/// window |i-t| <= k. Every audio row and every projected motion row must
/// have norm > 1e-12.
ContrastiveLoss local_contrastive_loss(const Matrix& audio, const Matrix& motion,
                                       const Matrix& align, const ContrastiveConfig& cfg);

/// Weighted sum of the four parts. Rejects non-finite parts.
double total_loss(const LossParts& parts, const LossWeights& weights);

}  // namespace facekit
