#include "facekit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "facekit/format.hpp"

namespace facekit {

namespace {

void check_same_frames_vertices(const MotionSequence& pred, const MotionSequence& gt) {
    require_same_dim(pred.frame_count(), gt.frame_count(), "pred vs gt T");
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
}

double squared_vertex_error(const MotionSequence& pred, const MotionSequence& gt,
                            std::size_t t, std::size_t v) {
    double acc = 0.0;
    for (std::size_t axis = 0; axis < 3; ++axis) {
        const double d = pred.at(t, v, axis) - gt.at(t, v, axis);
        acc += d * d;
    }
    return acc;
}

// Mean per-vertex Euclidean distance between frame i of a and frame j of b.
double frame_distance(const MotionSequence& a, const MotionSequence& b,
                      std::size_t i, std::size_t j) {
    const std::size_t vertices = a.vertex_count();
    double acc = 0.0;
    for (std::size_t v = 0; v < vertices; ++v) {
        double sq = 0.0;
        for (std::size_t axis = 0; axis < 3; ++axis) {
            const double d = a.at(i, v, axis) - b.at(j, v, axis);
            sq += d * d;
        }
        acc += std::sqrt(sq);
    }
    return acc / static_cast<double>(vertices);
}

}  // namespace

double lve(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask) {
    check_same_frames_vertices(pred, gt);
    mask.validate(pred.vertex_count());
    if (mask.lip.empty()) throw Error(ErrorKind::EmptyRegion, "lve needs a non-empty lip set");

    const std::size_t frames = pred.frame_count();
    std::vector<double> frame_max(frames);
    const auto nt = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        double best = 0.0;
        for (std::uint32_t v : mask.lip) {
            best = std::max(best, squared_vertex_error(pred, gt, t, v));
        }
        frame_max[t] = best;
    }
    double acc = 0.0;
    for (double v : frame_max) acc += v;
    return acc / static_cast<double>(frames);
}

double fve(const MotionSequence& pred, const MotionSequence& gt) {
    check_same_frames_vertices(pred, gt);
    const std::size_t frames = pred.frame_count();
    const std::size_t vertices = pred.vertex_count();
    std::vector<double> frame_sum(frames);
    const auto nt = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        double acc = 0.0;
        for (std::size_t v = 0; v < vertices; ++v) {
            acc += squared_vertex_error(pred, gt, t, v);
        }
        frame_sum[t] = acc;
    }
    double acc = 0.0;
    for (double v : frame_sum) acc += v;
    return acc / static_cast<double>(frames * vertices);
}

double fdtw(const MotionSequence& pred, const MotionSequence& gt) {
    require_same_dim(pred.vertex_count(), gt.vertex_count(), "pred vs gt N");
    const std::size_t tp = pred.frame_count();
    const std::size_t tg = gt.frame_count();

    // Local costs are independent cells; the DP itself stays serial.
    Matrix cost(tp, tg);
    const auto cells = static_cast<std::ptrdiff_t>(tp * tg);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < cells; ++idx) {
        const auto i = static_cast<std::size_t>(idx) / tg;
        const auto j = static_cast<std::size_t>(idx) % tg;
        cost(i, j) = frame_distance(pred, gt, i, j);
    }

    Matrix dp(tp, tg);
    dp(0, 0) = cost(0, 0);
    for (std::size_t i = 1; i < tp; ++i) dp(i, 0) = dp(i - 1, 0) + cost(i, 0);
    for (std::size_t j = 1; j < tg; ++j) dp(0, j) = dp(0, j - 1) + cost(0, j);
    for (std::size_t i = 1; i < tp; ++i) {
        for (std::size_t j = 1; j < tg; ++j) {
            const double best =
                std::min(dp(i - 1, j - 1), std::min(dp(i - 1, j), dp(i, j - 1)));
            dp(i, j) = best + cost(i, j);
        }
    }
    return dp(tp - 1, tg - 1) / static_cast<double>(tp + tg);
}

double fdd(const MotionSequence& pred, const MotionSequence& gt, const RegionMask& mask) {
    check_same_frames_vertices(pred, gt);
    mask.validate(pred.vertex_count());
    if (mask.upper.empty()) throw Error(ErrorKind::EmptyRegion, "fdd needs a non-empty upper set");

    const std::size_t count = mask.upper.size();
    std::vector<double> deviation(count);
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::uint32_t v = mask.upper[static_cast<std::size_t>(i)];
        deviation[static_cast<std::size_t>(i)] = dyn(gt, v) - dyn(pred, v);
    }
    double acc = 0.0;
    for (double d : deviation) acc += d;
    return acc / static_cast<double>(count);
}

double ffe(const MotionSequence& pred, const MotionSequence& gt, const SpectralConfig& cfg) {
    check_same_frames_vertices(pred, gt);
    const Matrix fp = frequency_matrix(pred, cfg);
    const Matrix fg = frequency_matrix(gt, cfg);
    double acc = 0.0;
    for (std::size_t c = 0; c < fg.rows; ++c) {
        double channel = 0.0;
        for (std::size_t k = 0; k < fg.cols; ++k) {
            const double d = fg(c, k) - fp(c, k);
            channel += d * d;
        }
        acc += channel;
    }
    return acc / static_cast<double>(fg.rows);
}

SequenceMetrics evaluate_pair(const std::string& id, const MotionSequence& pred,
                              const MotionSequence& gt, const RegionMask& mask,
                              const MetricSelection& selection, const SpectralConfig& cfg) {
    SequenceMetrics out;
    out.id = id;
    if (selection.lve) out.lve = lve(pred, gt, mask);
    if (selection.fve) out.fve = fve(pred, gt);
    if (selection.fdtw) out.fdtw = fdtw(pred, gt);
    if (selection.fdd) out.fdd = fdd(pred, gt, mask);
    if (selection.ffe) out.ffe = ffe(pred, gt, cfg);
    return out;
}

MetricsReport make_report(std::vector<SequenceMetrics> sequences) {
    MetricsReport report;
    report.sequences = std::move(sequences);
    const double n = static_cast<double>(report.sequences.size());
    auto mean_of = [&](std::optional<double> SequenceMetrics::*field) -> std::optional<double> {
        double acc = 0.0;
        for (const auto& s : report.sequences) {
            if (!(s.*field).has_value()) return std::nullopt;
            acc += *(s.*field);
        }
        return report.sequences.empty() ? std::nullopt : std::optional<double>(acc / n);
    };
    report.mean.lve = mean_of(&SequenceMetrics::lve);
    report.mean.fve = mean_of(&SequenceMetrics::fve);
    report.mean.fdtw = mean_of(&SequenceMetrics::fdtw);
    report.mean.fdd = mean_of(&SequenceMetrics::fdd);
    report.mean.ffe = mean_of(&SequenceMetrics::ffe);
    return report;
}

namespace {

void append_metrics(std::string& out, const SequenceMetrics& m, bool with_id) {
    out.push_back('{');
    bool first = true;
    auto emit = [&](const char* name, const std::optional<double>& value) {
        if (!value) return;
        if (!first) out.push_back(',');
        first = false;
        out += json_quote(name);
        out.push_back(':');
        out += format_g17(*value);
    };
    if (with_id) {
        out += json_quote("id");
        out.push_back(':');
        out += json_quote(m.id);
        first = false;
    }
    emit("lve", m.lve);
    emit("fve", m.fve);
    emit("fdtw", m.fdtw);
    emit("fdd", m.fdd);
    emit("ffe", m.ffe);
    out.push_back('}');
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
    std::string out = "{\"sequences\":[";
    for (std::size_t i = 0; i < report.sequences.size(); ++i) {
        if (i > 0) out.push_back(',');
        append_metrics(out, report.sequences[i], true);
    }
    out += "],\"mean\":";
    append_metrics(out, report.mean, false);
    out += "}";
    return out;
}

}  // namespace facekit
