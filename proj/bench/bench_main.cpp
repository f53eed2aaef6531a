// Times the OpenMP kernels against the plain serial reference on a batch of
// synthetic sequences. Not a correctness gate (the tests own that); prints a
// table of serial vs parallel timings plus the max observed deviation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "facekit/losses.hpp"
#include "facekit/metrics.hpp"
#include "facekit/motion.hpp"
#include "facekit/reference.hpp"
#include "facekit/spectral.hpp"
#include "facekit/synth.hpp"
#include "facekit/threading.hpp"

using facekit::Matrix;
using facekit::MotionSequence;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

MotionSequence random_sequence(facekit::SplitMix64& rng, std::size_t frames,
                               std::size_t vertices) {
    std::vector<double> values(frames * vertices * 3);
    for (double& v : values) v = 2.0 * rng.next_unit() - 1.0;
    return MotionSequence(frames, vertices, 25.0, std::move(values));
}

struct Timing {
    double serial_s = 0.0;
    double parallel_s = 0.0;
    double max_dev = 0.0;
};

template <typename Serial, typename Parallel, typename Deviation>
Timing time_pair(int repeats, Serial&& serial, Parallel&& parallel, Deviation&& deviation) {
    Timing t;
    const double s0 = now_seconds();
    for (int i = 0; i < repeats; ++i) serial();
    t.serial_s = (now_seconds() - s0) / repeats;
    const double p0 = now_seconds();
    for (int i = 0; i < repeats; ++i) parallel();
    t.parallel_s = (now_seconds() - p0) / repeats;
    t.max_dev = deviation();
    return t;
}

void report(const char* name, const Timing& t) {
    std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   max dev %.2e\n",
                name, t.serial_s * 1e3, t.parallel_s * 1e3,
                t.parallel_s > 0 ? t.serial_s / t.parallel_s : 0.0, t.max_dev);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t frames = argc > 1 ? std::stoul(argv[1]) : 200;
    const std::size_t vertices = argc > 2 ? std::stoul(argv[2]) : 400;
    const int repeats = argc > 3 ? std::stoi(argv[3]) : 5;

    std::printf("facekit kernel benchmark: T=%zu N=%zu, %d repeats, %d threads\n", frames,
                vertices, repeats, facekit::max_threads());

    facekit::SplitMix64 rng(99);
    const auto pred = random_sequence(rng, frames, vertices);
    const auto gt = random_sequence(rng, frames, vertices);
    const facekit::SpectralConfig spectral{20};

    {
        Matrix serial_out, parallel_out;
        auto t = time_pair(
            repeats,
            [&] { serial_out = facekit::reference::frequency_matrix(pred, spectral); },
            [&] { parallel_out = facekit::frequency_matrix(pred, spectral); },
            [&] { return max_abs_diff(serial_out.values, parallel_out.values); });
        report("frequency_matrix", t);
    }
    {
        std::vector<double> serial_out, parallel_out;
        auto t = time_pair(
            repeats, [&] { serial_out = facekit::reference::std_vector(pred); },
            [&] { parallel_out = facekit::std_vector(pred); },
            [&] { return max_abs_diff(serial_out, parallel_out); });
        report("std_vector", t);
    }
    {
        double serial_out = 0.0, parallel_out = 0.0;
        auto t = time_pair(
            repeats, [&] { serial_out = facekit::reference::fve(pred, gt); },
            [&] { parallel_out = facekit::fve(pred, gt); },
            [&] { return std::abs(serial_out - parallel_out); });
        report("fve", t);
    }
    {
        const facekit::RegionMask mask{{0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11}};
        double serial_out = 0.0, parallel_out = 0.0;
        auto t = time_pair(
            repeats, [&] { serial_out = facekit::reference::lve(pred, gt, mask); },
            [&] { parallel_out = facekit::lve(pred, gt, mask); },
            [&] { return std::abs(serial_out - parallel_out); });
        report("lve", t);
    }
    {
        double serial_out = 0.0, parallel_out = 0.0;
        auto t = time_pair(
            repeats, [&] { serial_out = facekit::reference::ffe(pred, gt, spectral); },
            [&] { parallel_out = facekit::ffe(pred, gt, spectral); },
            [&] { return std::abs(serial_out - parallel_out); });
        report("ffe", t);
    }
    {
        // DTW is quadratic in T; trim the frame count so the benchmark stays
        // responsive at large N.
        const std::size_t dtw_frames = std::min<std::size_t>(frames, 80);
        facekit::SplitMix64 rng2(7);
        const auto a = random_sequence(rng2, dtw_frames, vertices);
        const auto b = random_sequence(rng2, dtw_frames, vertices);
        double serial_out = 0.0, parallel_out = 0.0;
        auto t = time_pair(
            repeats, [&] { serial_out = facekit::reference::fdtw(a, b); },
            [&] { parallel_out = facekit::fdtw(a, b); },
            [&] { return std::abs(serial_out - parallel_out); });
        report("fdtw", t);
    }
    {
        facekit::SequenceLoss serial_out, parallel_out;
        const facekit::TrendConfig cfg{5};
        auto t = time_pair(
            repeats, [&] { serial_out = facekit::reference::trend_loss(pred, gt, cfg); },
            [&] { parallel_out = facekit::trend_loss(pred, gt, cfg); },
            [&] {
                return std::max(std::abs(serial_out.value - parallel_out.value),
                                max_abs_diff(serial_out.grad, parallel_out.grad));
            });
        report("trend_loss", t);
    }
    {
        const std::size_t d = 64;
        facekit::SplitMix64 rng3(13);
        Matrix audio(frames, d), motion(frames, d), align(d, d);
        for (double& v : audio.values) v = rng3.next_unit() + 0.1;
        for (double& v : motion.values) v = rng3.next_unit() + 0.1;
        for (double& v : align.values) v = 0.1 + rng3.next_unit();
        const facekit::ContrastiveConfig cfg;
        facekit::ContrastiveLoss serial_out, parallel_out;
        auto t = time_pair(
            repeats,
            [&] {
                serial_out = facekit::reference::local_contrastive_loss(audio, motion, align, cfg);
            },
            [&] { parallel_out = facekit::local_contrastive_loss(audio, motion, align, cfg); },
            [&] {
                return std::max(std::abs(serial_out.value - parallel_out.value),
                                max_abs_diff(serial_out.grad_motion.values,
                                             parallel_out.grad_motion.values));
            });
        report("local_contrastive", t);
    }
    return 0;
}
