#include "facekit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace facekit::reference {

namespace {

double vertex_norm(const MotionSequence& seq, std::size_t t, std::size_t v) {
    const double x = seq.at(t, v, 0);
    const double y = seq.at(t, v, 1);
    const double z = seq.at(t, v, 2);
    return std::sqrt(x * x + y * y + z * z);
}

double std_pop(const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(x.size()));
}

}  // namespace

double dyn(const MotionSequence& seq, std::size_t vertex) {
    if (vertex >= seq.vertex_count()) {
        throw Error(ErrorKind::IndexOutOfRange, "vertex out of range");
    }
    std::vector<double> norms(seq.frame_count());
    for (std::size_t t = 0; t < norms.size(); ++t) norms[t] = vertex_norm(seq, t, vertex);
    return std_pop(norms);
}

std::vector<double> std_vector(const MotionSequence& seq) {
    std::vector<double> out(seq.vertex_count());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = reference::dyn(seq, v);
    return out;
}

Matrix frequency_matrix(const MotionSequence& seq, const SpectralConfig& cfg) {
    const std::size_t frames = seq.frame_count();
    if (frames < 2) throw Error(ErrorKind::TooShort, "frequency matrix needs T >= 2");
    const std::size_t bins = retained_bins(frames, cfg);
    Matrix mags(seq.vertex_count() * 3, bins);
    for (std::size_t c = 0; c < mags.rows; ++c) {
        for (std::size_t k = 0; k < bins; ++k) {
            double re = 0.0, im = 0.0;
            for (std::size_t t = 0; t < frames; ++t) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) *
                                     static_cast<double>(t) / static_cast<double>(frames);
                const double x = seq.at(t, c / 3, c % 3);
                re += x * std::cos(angle);
                im -= x * std::sin(angle);
            }
            mags(c, k) = std::sqrt(re * re + im * im) / static_cast<double>(frames);
        }
    }
    return mags;
}

double lve(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    mask.validate(pred.vertex_count());
    if (mask.lip.empty()) throw Error(ErrorKind::EmptyRegion, "empty lip set");
    double acc = 0.0;
    for (std::size_t t = 0; t < pred.frame_count(); ++t) {
        double best = 0.0;
        for (std::uint32_t v : mask.lip) {
            double sq = 0.0;
            for (std::size_t a = 0; a < 3; ++a) {
                const double d = pred.at(t, v, a) - gt.at(t, v, a);
                sq += d * d;
            }
            best = std::max(best, sq);
        }
        acc += best;
    }
    return acc / static_cast<double>(pred.frame_count());
}

double fve(const MotionSequence& pred, const MotionSequence& gt) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    double acc = 0.0;
    for (std::size_t t = 0; t < pred.frame_count(); ++t) {
        for (std::size_t v = 0; v < pred.vertex_count(); ++v) {
            for (std::size_t a = 0; a < 3; ++a) {
                const double d = pred.at(t, v, a) - gt.at(t, v, a);
                acc += d * d;
            }
        }
    }
    return acc / static_cast<double>(pred.frame_count() * pred.vertex_count());
}

double fdtw(const MotionSequence& pred, const MotionSequence& gt) {
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    const std::size_t tp = pred.frame_count();
    const std::size_t tg = gt.frame_count();
    auto local = [&](std::size_t i, std::size_t j) {
        double acc = 0.0;
        for (std::size_t v = 0; v < pred.vertex_count(); ++v) {
            double sq = 0.0;
            for (std::size_t a = 0; a < 3; ++a) {
                const double d = pred.at(i, v, a) - gt.at(j, v, a);
                sq += d * d;
            }
            acc += std::sqrt(sq);
        }
        return acc / static_cast<double>(pred.vertex_count());
    };
    std::vector<std::vector<double>> dp(tp, std::vector<double>(tg, 0.0));
    dp[0][0] = local(0, 0);
    for (std::size_t i = 1; i < tp; ++i) dp[i][0] = dp[i - 1][0] + local(i, 0);
    for (std::size_t j = 1; j < tg; ++j) dp[0][j] = dp[0][j - 1] + local(0, j);
    for (std::size_t i = 1; i < tp; ++i) {
        for (std::size_t j = 1; j < tg; ++j) {
            dp[i][j] = std::min({dp[i - 1][j - 1], dp[i - 1][j], dp[i][j - 1]}) + local(i, j);
        }
    }
    return dp[tp - 1][tg - 1] / static_cast<double>(tp + tg);
}

double fdd(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    mask.validate(pred.vertex_count());
    if (mask.upper.empty()) throw Error(ErrorKind::EmptyRegion, "empty upper set");
    double acc = 0.0;
    for (std::uint32_t v : mask.upper) acc += reference::dyn(gt, v) - reference::dyn(pred, v);
    return acc / static_cast<double>(mask.upper.size());
}

double ffe(const MotionSequence& pred, const MotionSequence& gt, const SpectralConfig& cfg) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    const Matrix fp = reference::frequency_matrix(pred, cfg);
    const Matrix fg = reference::frequency_matrix(gt, cfg);
    double acc = 0.0;
    for (std::size_t e = 0; e < fg.values.size(); ++e) {
        const double d = fg.values[e] - fp.values[e];
        acc += d * d;
    }
    return acc / static_cast<double>(fg.rows);
}

SequenceLoss rec_loss(const MotionSequence& pred, const MotionSequence& gt) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    SequenceLoss out;
    out.grad.resize(pred.values().size());
    for (std::size_t e = 0; e < pred.values().size(); ++e) {
        const double d = pred.values()[e] - gt.values()[e];
        out.value += d * d;
        out.grad[e] = 2.0 * d;
    }
    return out;
}

SequenceLoss trend_loss(const MotionSequence& pred, const MotionSequence& gt,
                        const TrendConfig& cfg) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    const std::size_t frames = pred.frame_count();
    if (cfg.max_order == 0) throw Error(ErrorKind::BadConfig, "R must be >= 1");
    if (cfg.max_order >= frames) throw Error(ErrorKind::OrderTooLarge, "R >= T");
    const std::size_t per_frame = pred.vertex_count() * 3;

    SequenceLoss out;
    out.grad.assign(frames * per_frame, 0.0);
    for (std::size_t r = 1; r <= cfg.max_order; ++r) {
        for (std::size_t t = 0; t + r < frames; ++t) {
            for (std::size_t e = 0; e < per_frame; ++e) {
                const double dp =
                    pred.values()[(t + r) * per_frame + e] - pred.values()[t * per_frame + e];
                const double dg =
                    gt.values()[(t + r) * per_frame + e] - gt.values()[t * per_frame + e];
                const double d = dp - dg;
                out.value += d * d;
                out.grad[(t + r) * per_frame + e] += 2.0 * d;
                out.grad[t * per_frame + e] -= 2.0 * d;
            }
        }
    }
    out.value /= static_cast<double>(cfg.max_order);
    for (double& g : out.grad) g /= static_cast<double>(cfg.max_order);
    return out;
}

ContrastiveLoss local_contrastive_loss(const Matrix& audio, const Matrix& motion,
                                       const Matrix& align, const ContrastiveConfig& cfg) {
    cfg.validate();
    require_same_dim(audio.rows, motion.rows, "audio vs motion T");
    require_same_dim(audio.cols, align.rows, "audio dim vs alignment rows");
    require_same_dim(motion.cols, align.cols, "motion dim vs alignment cols");
    const std::ptrdiff_t frames = static_cast<std::ptrdiff_t>(audio.rows);
    if (frames == 0) throw Error(ErrorKind::TooShort, "needs T >= 1");
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(cfg.window);
    const double lam = cfg.direction_weight;

    auto project = [&](std::ptrdiff_t t) {
        std::vector<double> p(align.rows, 0.0);
        for (std::size_t r = 0; r < align.rows; ++r) {
            for (std::size_t c = 0; c < align.cols; ++c) {
                p[r] += align(r, c) * motion(static_cast<std::size_t>(t), c);
            }
        }
        return p;
    };
    std::vector<std::vector<double>> proj(audio.rows);
    for (std::ptrdiff_t t = 0; t < frames; ++t) proj[static_cast<std::size_t>(t)] = project(t);

    auto norm = [](std::span<const double> v) { return std::sqrt(squared_norm(v)); };
    auto cosine = [&](std::ptrdiff_t t, std::ptrdiff_t i) {
        const auto a = audio.row(static_cast<std::size_t>(t));
        const auto& p = proj[static_cast<std::size_t>(i)];
        const double na = norm(a);
        const double np = norm(p);
        if (na <= 1e-12 || np <= 1e-12) throw Error(ErrorKind::ZeroNorm, "zero norm");
        return dot(a, p) / (na * np);
    };

    ContrastiveLoss out;
    out.grad_align = Matrix(align.rows, align.cols);
    out.grad_motion = Matrix(motion.rows, motion.cols);
    Matrix cos_grad(audio.rows, audio.rows);

    double value = 0.0;
    for (std::ptrdiff_t t = 0; t < frames; ++t) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - k);
        const std::ptrdiff_t hi = std::min(frames - 1, t + k);
        for (int dir = 0; dir < 2; ++dir) {
            std::vector<double> logits;
            for (std::ptrdiff_t i = lo; i <= hi; ++i) {
                logits.push_back((dir == 0 ? cosine(t, i) : cosine(i, t)) / cfg.temperature);
            }
            const double top = *std::max_element(logits.begin(), logits.end());
            double denom = 0.0;
            for (double s : logits) denom += std::exp(s - top);
            const double lse = top + std::log(denom);
            value += (dir == 0 ? lam : 1.0 - lam) *
                     (lse - logits[static_cast<std::size_t>(t - lo)]);
            const double scale =
                (dir == 0 ? lam : 1.0 - lam) / (cfg.temperature * static_cast<double>(frames));
            for (std::ptrdiff_t i = lo; i <= hi; ++i) {
                const double soft = std::exp(logits[static_cast<std::size_t>(i - lo)] - lse);
                const double g = scale * (soft - (i == t ? 1.0 : 0.0));
                if (dir == 0) {
                    cos_grad(static_cast<std::size_t>(t), static_cast<std::size_t>(i)) += g;
                } else {
                    cos_grad(static_cast<std::size_t>(i), static_cast<std::size_t>(t)) += g;
                }
            }
        }
    }
    double l1 = 0.0;
    for (double v : align.values) l1 += std::abs(v);
    out.value = value / static_cast<double>(frames) + l1;

    // Chain through the cosine, the projection, and the alignment map.
    for (std::ptrdiff_t t = 0; t < frames; ++t) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - k);
        const std::ptrdiff_t hi = std::min(frames - 1, t + k);
        for (std::ptrdiff_t i = lo; i <= hi; ++i) {
            const double g = cos_grad(static_cast<std::size_t>(t), static_cast<std::size_t>(i));
            if (g == 0.0) continue;
            const auto a = audio.row(static_cast<std::size_t>(t));
            const auto& p = proj[static_cast<std::size_t>(i)];
            const double na = norm(a);
            const double np = norm(p);
            const double c = cosine(t, i);
            for (std::size_t r = 0; r < align.rows; ++r) {
                const double dp = g * (a[r] / (na * np) - c * p[r] / (np * np));
                for (std::size_t col = 0; col < align.cols; ++col) {
                    out.grad_align(r, col) += dp * motion(static_cast<std::size_t>(i), col);
                    out.grad_motion(static_cast<std::size_t>(i), col) += dp * align(r, col);
                }
            }
        }
    }
    for (std::size_t e = 0; e < align.values.size(); ++e) {
        const double w = align.values[e];
        out.grad_align.values[e] += w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
    }
    return out;
}

Matrix infuse_style(const Matrix& features, const Matrix& w, std::span<const double> b) {
    require_same_dim(features.cols, w.cols, "features dim vs weights");
    require_same_dim(w.rows, b.size(), "weights rows vs bias");
    Matrix out(features.rows, w.rows);
    for (std::size_t t = 0; t < features.rows; ++t) {
        for (std::size_t r = 0; r < w.rows; ++r) {
            double acc = b[r];
            for (std::size_t c = 0; c < w.cols; ++c) acc += w(r, c) * features(t, c);
            out(t, r) = acc;
        }
    }
    return out;
}

}  // namespace facekit::reference
