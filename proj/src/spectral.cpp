#include "facekit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "facekit/format.hpp"

namespace facekit {

namespace {

// Population (1/n) standard deviation, two-pass.
double population_std(std::span<const double> x) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) {
        const double d = v - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(n));
}

void check_vertex(const MotionSequence& seq, std::size_t vertex) {
    if (vertex >= seq.vertex_count()) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "vertex " + std::to_string(vertex) + " >= N = " +
                        std::to_string(seq.vertex_count()));
    }
}

}  // namespace

std::size_t retained_bins(std::size_t frames, const SpectralConfig& cfg) {
    if (cfg.bins == 0) throw Error(ErrorKind::BadConfig, "bins must be >= 1");
    return std::min(cfg.bins, frames / 2 + 1);
}

double dyn(const MotionSequence& seq, std::size_t vertex) {
    check_vertex(seq, vertex);
    const std::size_t frames = seq.frame_count();
    std::vector<double> norms(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        const double x = seq.at(t, vertex, 0);
        const double y = seq.at(t, vertex, 1);
        const double z = seq.at(t, vertex, 2);
        norms[t] = std::sqrt(x * x + y * y + z * z);
    }
    return population_std(norms);
}

std::vector<double> std_vector(const MotionSequence& seq) {
    const std::size_t vertices = seq.vertex_count();
    std::vector<double> out(vertices);
    const auto n = static_cast<std::ptrdiff_t>(vertices);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t v = 0; v < n; ++v) {
        out[static_cast<std::size_t>(v)] = dyn(seq, static_cast<std::size_t>(v));
    }
    return out;
}

Matrix frequency_matrix(const MotionSequence& seq, const SpectralConfig& cfg) {
    const std::size_t frames = seq.frame_count();
    if (frames < 2) throw Error(ErrorKind::TooShort, "frequency matrix needs T >= 2");
    const std::size_t bins = retained_bins(frames, cfg);
    const std::size_t channels = seq.vertex_count() * 3;
    const double inv_t = 1.0 / static_cast<double>(frames);
    const double step = 2.0 * std::numbers::pi * inv_t;

    Matrix mags(channels, bins);
    const auto nc = static_cast<std::ptrdiff_t>(channels);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ci = 0; ci < nc; ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        const std::size_t vertex = c / 3;
        const std::size_t axis = c % 3;
        double* row = mags.values.data() + c * bins;
        for (std::size_t k = 0; k < bins; ++k) {
            const double w = step * static_cast<double>(k);
            double re = 0.0;
            double im = 0.0;
            for (std::size_t t = 0; t < frames; ++t) {
                const double angle = w * static_cast<double>(t);
                const double x = seq.at(t, vertex, axis);
                re += x * std::cos(angle);
                im -= x * std::sin(angle);
            }
            row[k] = std::sqrt(re * re + im * im) * inv_t;
        }
    }
    return mags;
}

std::vector<double> composite_stats(const Matrix& series, CompositeMode mode) {
    const std::size_t frames = series.rows;
    const std::size_t dims = series.cols;
    if (frames < 2) throw Error(ErrorKind::TooShort, "composite stats need T >= 2");

    std::vector<double> out(3 * dims);
    const auto nd = static_cast<std::ptrdiff_t>(dims);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t di = 0; di < nd; ++di) {
        const auto d = static_cast<std::size_t>(di);
        double sum = 0.0;
        double top = series(0, d);
        for (std::size_t t = 0; t < frames; ++t) {
            const double v = series(t, d);
            sum += v;
            top = std::max(top, v);
        }
        const double mean = sum / static_cast<double>(frames);
        double var = 0.0;
        for (std::size_t t = 0; t < frames; ++t) {
            const double dev = series(t, d) - mean;
            var += dev * dev;
        }

        double diff_sum = 0.0;
        for (std::size_t t = 0; t + 1 < frames; ++t) {
            diff_sum += series(t + 1, d) - series(t, d);
        }
        const double diff_mean = diff_sum / static_cast<double>(frames - 1);
        double diff_var = 0.0;
        for (std::size_t t = 0; t + 1 < frames; ++t) {
            const double dev = (series(t + 1, d) - series(t, d)) - diff_mean;
            diff_var += dev * dev;
        }

        out[d] = mode == CompositeMode::Mean ? mean : top;
        out[dims + d] = std::sqrt(var / static_cast<double>(frames));
        out[2 * dims + d] = std::sqrt(diff_var / static_cast<double>(frames - 1));
    }
    return out;
}

std::vector<double> lip_distance_trace(const MotionSequence& seq, const FaceTemplate& tpl,
                                       std::size_t upper_lip, std::size_t lower_lip) {
    require_same_dim(seq.vertex_count(), tpl.vertex_count(), "sequence vs template N");
    check_vertex(seq, upper_lip);
    check_vertex(seq, lower_lip);
    const std::size_t frames = seq.frame_count();
    std::vector<double> trace(frames);
    const auto nt = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        double acc = 0.0;
        for (std::size_t axis = 0; axis < 3; ++axis) {
            const double a = tpl.at(upper_lip, axis) + seq.at(t, upper_lip, axis);
            const double b = tpl.at(lower_lip, axis) + seq.at(t, lower_lip, axis);
            const double d = a - b;
            acc += d * d;
        }
        trace[t] = std::sqrt(acc);
    }
    return trace;
}

void write_std_csv(std::ostream& out, const std::vector<double>& values) {
    out << "vertex,std\n";
    for (std::size_t v = 0; v < values.size(); ++v) {
        out << v << ',' << format_g17(values[v]) << '\n';
    }
}

void write_frequency_csv(std::ostream& out, const Matrix& magnitudes) {
    out << "channel";
    for (std::size_t k = 0; k < magnitudes.cols; ++k) out << ",bin" << k;
    out << '\n';
    for (std::size_t c = 0; c < magnitudes.rows; ++c) {
        out << c;
        for (std::size_t k = 0; k < magnitudes.cols; ++k) {
            out << ',' << format_g17(magnitudes(c, k));
        }
        out << '\n';
    }
}

void write_composite_csv(std::ostream& out, const std::vector<double>& stats,
                         std::size_t dims, CompositeMode mode) {
    out << "channel," << (mode == CompositeMode::Mean ? "mean" : "max") << ",std,diff_std\n";
    for (std::size_t d = 0; d < dims; ++d) {
        out << d << ',' << format_g17(stats[d]) << ',' << format_g17(stats[dims + d]) << ','
            << format_g17(stats[2 * dims + d]) << '\n';
    }
}

}  // namespace facekit
