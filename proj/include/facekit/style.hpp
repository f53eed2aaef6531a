#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "facekit/linalg.hpp"

namespace facekit {

/// Parameters of the speaker/audio style fusion: bias map over the
/// concatenated styles plus the blend factor alpha.
struct FusionParams {
    Matrix w;               // d_s x 2*d_s
    std::vector<double> b;  // d_s
    double alpha = 0.1;

    void validate() const;
    std::size_t dim() const { return b.size(); }
};

struct Primitive {
    Matrix w;               // d_m x d_m
    std::vector<double> b;  // d_m
};

/// e affine primitives plus the attention map that scores them from a style
/// vector. Aggregation is a convex combination selected by softmax.
struct PrimitiveBank {
    Matrix attn_w;               // e x d_s
    std::vector<double> attn_b;  // e
    std::vector<Primitive> primitives;

    void validate() const;
    std::size_t count() const { return primitives.size(); }
    std::size_t style_dim() const { return attn_w.cols; }
    std::size_t motion_dim() const { return primitives.empty() ? 0 : primitives.front().b.size(); }
};

struct FusedStyle {
    std::vector<double> style;  // S_r + alpha * bias
    std::vector<double> bias;
};

FusedStyle fuse_style(std::span<const double> speaker_style,
                      std::span<const double> audio_style, const FusionParams& params);

/// softmax(attn_w * style + attn_b), computed with max-logit subtraction.
/// Entries are in [0,1] and sum to 1.
std::vector<double> primitive_attention(std::span<const double> style,
                                        const PrimitiveBank& bank);

/// Convex combination of the bank's primitives, summed in index order.
Primitive aggregate_primitives(std::span<const double> attention, const PrimitiveBank& bank);

/// Applies z_t -> W z_t + b to every row of the [T][d_m] feature series.
Matrix infuse_style(const Matrix& features, const Matrix& w, std::span<const double> b);

/// fuse -> attention -> aggregate -> infuse.
Matrix style_pipeline(std::span<const double> speaker_style,
                      std::span<const double> audio_style, const FusionParams& params,
                      const PrimitiveBank& bank, const Matrix& features);

/// Loads {"d_s":..,"alpha":..,"W_s":[[..]],"b_s":[..]}; dimensions checked.
FusionParams load_fusion_params(const std::filesystem::path& path);

/// Loads {"d_s":..,"d_m":..,"e":..,"attn_W":[[..]],"attn_b":[..],
/// "primitives":[{"W":[[..]],"b":[..]},..]}; dimensions checked.
PrimitiveBank load_primitive_bank(const std::filesystem::path& path);

}  // namespace facekit
