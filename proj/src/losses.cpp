#include "facekit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace facekit {

namespace {

void check_same_shape(const MotionSequence& pred, const MotionSequence& gt) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
}

double l1_norm(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.values) acc += std::abs(v);
    return acc;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void ContrastiveConfig::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw Error(ErrorKind::BadConfig, "temperature must be positive");
    }
    if (direction_weight < 0.0 || direction_weight > 1.0) {
        throw Error(ErrorKind::BadConfig, "direction weight must be in [0,1]");
    }
}

void LossWeights::validate() const {
    for (double w : {rec, s, tre, lcon}) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorKind::BadConfig, "loss weights must be non-negative");
        }
    }
}

SequenceLoss rec_loss(const MotionSequence& pred, const MotionSequence& gt) {
    check_same_shape(pred, gt);
    const std::size_t frames = pred.frame_count();
    const std::size_t per_frame = pred.vertex_count() * 3;

    SequenceLoss out;
    out.grad.resize(frames * per_frame);
    std::vector<double> frame_sum(frames);
    const auto nt = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        const auto p = pred.frame(t);
        const auto g = gt.frame(t);
        double acc = 0.0;
        for (std::size_t e = 0; e < per_frame; ++e) {
            const double d = p[e] - g[e];
            acc += d * d;
            out.grad[t * per_frame + e] = 2.0 * d;
        }
        frame_sum[t] = acc;
    }
    for (double v : frame_sum) out.value += v;
    return out;
}

double style_loss(std::span<const double> pred_style, std::span<const double> gt_style,
                  std::span<const double> speaker_style, std::span<const double> mean_style) {
    require_same_dim(pred_style.size(), gt_style.size(), "pred vs gt style dim");
    require_same_dim(speaker_style.size(), mean_style.size(), "speaker vs mean style dim");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred_style.size(); ++i) {
        const double d = pred_style[i] - gt_style[i];
        acc += d * d;
    }
    for (std::size_t i = 0; i < speaker_style.size(); ++i) {
        const double d = speaker_style[i] - mean_style[i];
        acc += d * d;
    }
    return acc;
}

SequenceLoss trend_loss(const MotionSequence& pred, const MotionSequence& gt,
                        const TrendConfig& cfg) {
    check_same_shape(pred, gt);
    if (cfg.max_order == 0) throw Error(ErrorKind::BadConfig, "trend order R must be >= 1");
    const std::size_t frames = pred.frame_count();
    if (cfg.max_order >= frames) {
        throw Error(ErrorKind::OrderTooLarge, "trend order R = " + std::to_string(cfg.max_order) +
                                                  " needs T > R, got T = " +
                                                  std::to_string(frames));
    }
    const std::size_t per_frame = pred.vertex_count() * 3;
    const std::size_t max_order = cfg.max_order;
    const double inv_r = 1.0 / static_cast<double>(max_order);

    // Residual of the order-r delta starting at frame t, one component.
    auto residual = [&](std::size_t t, std::size_t r, std::size_t e) {
        const double dp = pred.values()[(t + r) * per_frame + e] - pred.values()[t * per_frame + e];
        const double dg = gt.values()[(t + r) * per_frame + e] - gt.values()[t * per_frame + e];
        return dp - dg;
    };

    SequenceLoss out;
    out.grad.resize(frames * per_frame);
    std::vector<double> frame_sum(frames, 0.0);
    const auto nt = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        double acc = 0.0;
        for (std::size_t r = 1; r <= max_order; ++r) {
            if (t + r >= frames) break;
            for (std::size_t e = 0; e < per_frame; ++e) {
                const double d = residual(t, r, e);
                acc += d * d;
            }
        }
        frame_sum[t] = acc;

        // Each frame owns its gradient slot; terms touching frame t have it
        // as either the upper index (t = s + r) or the lower index.
        for (std::size_t e = 0; e < per_frame; ++e) {
            double g = 0.0;
            for (std::size_t r = 1; r <= max_order; ++r) {
                if (t + r < frames) g -= 2.0 * residual(t, r, e);
                if (t >= r) g += 2.0 * residual(t - r, r, e);
            }
            out.grad[t * per_frame + e] = g * inv_r;
        }
    }
    double total = 0.0;
    for (double v : frame_sum) total += v;
    out.value = total * inv_r;
    return out;
}

ContrastiveLoss local_contrastive_loss(const Matrix& audio, const Matrix& motion,
                                       const Matrix& align, const ContrastiveConfig& cfg) {
    cfg.validate();
    require_same_dim(audio.rows, motion.rows, "audio vs motion T");
    require_same_dim(audio.cols, align.rows, "audio dim vs alignment rows");
    require_same_dim(motion.cols, align.cols, "motion dim vs alignment cols");
    const std::size_t frames = audio.rows;
    const std::size_t d_a = audio.cols;
    const std::size_t d_m = motion.cols;
    if (frames == 0) throw Error(ErrorKind::TooShort, "contrastive loss needs T >= 1");

    const double inv_tau = 1.0 / cfg.temperature;
    const double lam = cfg.direction_weight;
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(cfg.window);
    const std::ptrdiff_t nt = static_cast<std::ptrdiff_t>(frames);
    auto window_lo = [&](std::ptrdiff_t t) { return std::max<std::ptrdiff_t>(0, t - k); };
    auto window_hi = [&](std::ptrdiff_t t) { return std::min<std::ptrdiff_t>(nt - 1, t + k); };

    // Projected motion rows p_t = W z_t and both families of norms.
    Matrix projected(frames, d_a);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        auto row = projected.row(t);
        const auto z = motion.row(t);
        for (std::size_t r = 0; r < d_a; ++r) {
            double acc = 0.0;
            const double* w = align.values.data() + r * d_m;
            for (std::size_t c = 0; c < d_m; ++c) acc += w[c] * z[c];
            row[r] = acc;
        }
    }
    std::vector<double> audio_norm(frames), proj_norm(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        audio_norm[t] = std::sqrt(squared_norm(audio.row(t)));
        proj_norm[t] = std::sqrt(squared_norm(projected.row(t)));
        if (audio_norm[t] <= 1e-12) {
            throw Error(ErrorKind::ZeroNorm, "audio row " + std::to_string(t) + " has zero norm");
        }
        if (proj_norm[t] <= 1e-12) {
            throw Error(ErrorKind::ZeroNorm,
                        "projected motion row " + std::to_string(t) + " has zero norm");
        }
    }

    // cosine(t, i) = <a_t, p_i> / (|a_t||p_i|); band |t-i| <= k is all we read.
    Matrix cosine(frames, frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        for (std::ptrdiff_t ii = window_lo(ti); ii <= window_hi(ti); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            cosine(t, i) = dot(audio.row(t), projected.row(i)) / (audio_norm[t] * proj_norm[i]);
        }
    }

    // Windowed softmax per anchor, both directions. soft_am(t, i) softmaxes
    // cosine(t, .) over the window; soft_ma(t, i) softmaxes cosine(., t).
    Matrix soft_am(frames, frames), soft_ma(frames, frames);
    std::vector<double> per_anchor(frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        const std::ptrdiff_t lo = window_lo(ti);
        const std::ptrdiff_t hi = window_hi(ti);
        double anchor_value = 0.0;
        for (int dir = 0; dir < 2; ++dir) {
            Matrix& soft = dir == 0 ? soft_am : soft_ma;
            auto logit = [&](std::ptrdiff_t i) {
                return (dir == 0 ? cosine(t, static_cast<std::size_t>(i))
                                 : cosine(static_cast<std::size_t>(i), t)) *
                       inv_tau;
            };
            double top = logit(lo);
            for (std::ptrdiff_t i = lo + 1; i <= hi; ++i) top = std::max(top, logit(i));
            double denom = 0.0;
            for (std::ptrdiff_t i = lo; i <= hi; ++i) denom += std::exp(logit(i) - top);
            const double lse = top + std::log(denom);
            for (std::ptrdiff_t i = lo; i <= hi; ++i) {
                soft(t, static_cast<std::size_t>(i)) = std::exp(logit(i) - lse);
            }
            const double loss_t = lse - logit(ti);
            anchor_value += (dir == 0 ? lam : 1.0 - lam) * loss_t;
        }
        per_anchor[t] = anchor_value;
    }

    ContrastiveLoss out;
    double acc = 0.0;
    for (double v : per_anchor) acc += v;
    out.value = acc / static_cast<double>(frames) + l1_norm(align);

    // d value / d cosine(t, i), merging both directions.
    const double am_scale = lam * inv_tau / static_cast<double>(frames);
    const double ma_scale = (1.0 - lam) * inv_tau / static_cast<double>(frames);
    Matrix cos_grad(frames, frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        for (std::ptrdiff_t ii = window_lo(ti); ii <= window_hi(ti); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            const double delta = ti == ii ? 1.0 : 0.0;
            cos_grad(t, i) = am_scale * (soft_am(t, i) - delta) +
                             ma_scale * (soft_ma(i, t) - delta);
        }
    }

    // d value / d p_i through every windowed cosine involving p_i.
    Matrix proj_grad(frames, d_a);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < nt; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        auto gp = proj_grad.row(i);
        const auto p = projected.row(i);
        for (std::ptrdiff_t ti = window_lo(ii); ti <= window_hi(ii); ++ti) {
            const auto t = static_cast<std::size_t>(ti);
            const double g = cos_grad(t, i);
            if (g == 0.0) continue;
            const auto a = audio.row(t);
            const double inv_ap = 1.0 / (audio_norm[t] * proj_norm[i]);
            const double cos_over_p2 = cosine(t, i) / (proj_norm[i] * proj_norm[i]);
            for (std::size_t e = 0; e < d_a; ++e) {
                gp[e] += g * (a[e] * inv_ap - cos_over_p2 * p[e]);
            }
        }
    }

    out.grad_motion = Matrix(frames, d_m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        auto gz = out.grad_motion.row(t);
        const auto gp = proj_grad.row(t);
        for (std::size_t r = 0; r < d_a; ++r) {
            const double coef = gp[r];
            if (coef == 0.0) continue;
            const double* w = align.values.data() + r * d_m;
            for (std::size_t c = 0; c < d_m; ++c) gz[c] += coef * w[c];
        }
    }

    out.grad_align = Matrix(d_a, d_m);
    const auto nr = static_cast<std::ptrdiff_t>(d_a);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ri = 0; ri < nr; ++ri) {
        const auto r = static_cast<std::size_t>(ri);
        auto gw = out.grad_align.row(r);
        for (std::size_t t = 0; t < frames; ++t) {
            const double coef = proj_grad(t, r);
            if (coef == 0.0) continue;
            const auto z = motion.row(t);
            for (std::size_t c = 0; c < d_m; ++c) gw[c] += coef * z[c];
        }
        for (std::size_t c = 0; c < d_m; ++c) gw[c] += sign(align(r, c));
    }
    return out;
}

double total_loss(const LossParts& parts, const LossWeights& weights) {
    weights.validate();
    for (double p : {parts.rec, parts.s, parts.tre, parts.lcon}) {
        if (!std::isfinite(p)) {
            throw Error(ErrorKind::NonFiniteValue, "loss parts must be finite");
        }
    }
    return weights.rec * parts.rec + weights.s * parts.s + weights.tre * parts.tre +
           weights.lcon * parts.lcon;
}

}  // namespace facekit
