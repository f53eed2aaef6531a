#include <doctest.h>

#include <cmath>
#include <vector>

#include "facekit/losses.hpp"
#include "facekit/reference.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using facekit::ContrastiveConfig;
using facekit::ErrorKind;
using facekit::Matrix;
using facekit::MotionSequence;
using facekit::TrendConfig;
using testsupport::error_kind_of;

namespace {

// Alignment map with entries kept away from the l1 kink.
Matrix safe_align(oracle::Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix w(rows, cols);
    for (double& v : w.values) {
        const double mag = 0.1 + 0.9 * rng.uniform(0.0, 1.0);
        v = rng.uniform(0.0, 1.0) < 0.5 ? -mag : mag;
    }
    return w;
}

}  // namespace

TEST_CASE("rec_loss value and gradient") {
    const auto zeros = MotionSequence::zeros(2, 2, 25.0);
    const auto same = facekit::rec_loss(zeros, zeros);
    CHECK(same.value == 0.0);
    for (double g : same.grad) CHECK(g == 0.0);

    std::vector<double> values(2 * 2 * 3, 0.0);
    values[4] = 0.5;
    const MotionSequence pred(2, 2, 25.0, values);
    const auto off = facekit::rec_loss(pred, zeros);
    CHECK(off.value == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(off.grad[4] == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(error_kind_of([&] {
              facekit::rec_loss(zeros, MotionSequence::zeros(3, 2, 25.0));
          }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("rec_loss gradient matches finite differences") {
    oracle::Rng rng(71);
    auto pred_values = rng.uniform_vector(4 * 2 * 3, -1.0, 1.0);
    const auto gt = rng.sequence(4, 2, 25.0);
    const auto analytic =
        facekit::rec_loss(MotionSequence(4, 2, 25.0, pred_values), gt);
    auto eval = [&] {
        return facekit::rec_loss(MotionSequence(4, 2, 25.0, pred_values), gt).value;
    };
    for (std::size_t i = 0; i < pred_values.size(); ++i) {
        const double fd = oracle::central_diff(eval, pred_values, i);
        CHECK(oracle::rel_err(analytic.grad[i], fd) < 1e-6);
    }
}

TEST_CASE("style_loss") {
    const std::vector<double> a{1.0, 2.0};
    CHECK(facekit::style_loss(a, a, a, a) == 0.0);

    const std::vector<double> shifted{2.0, 2.0};
    CHECK(facekit::style_loss(shifted, a, a, a) == doctest::Approx(1.0).epsilon(1e-15));

    // The two squared terms commute.
    oracle::Rng rng(73);
    const auto p = rng.uniform_vector(3, -1, 1);
    const auto q = rng.uniform_vector(3, -1, 1);
    const auto r = rng.uniform_vector(3, -1, 1);
    const auto s = rng.uniform_vector(3, -1, 1);
    CHECK(facekit::style_loss(p, q, r, s) ==
          doctest::Approx(facekit::style_loss(r, s, p, q)).epsilon(1e-15));

    CHECK(error_kind_of([&] { facekit::style_loss(p, q, r, std::vector<double>{1.0}); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("trend_loss values") {
    const TrendConfig r1{1};
    const auto zeros = MotionSequence::zeros(3, 1, 25.0);
    CHECK(facekit::trend_loss(zeros, zeros, r1).value == 0.0);

    // gt {0,0,0}, pred {0,1,0} on one scalar channel, R = 1: residuals 1, -1.
    std::vector<double> values(3 * 3, 0.0);
    values[1 * 3] = 1.0;
    const MotionSequence pred(3, 1, 25.0, values);
    CHECK(facekit::trend_loss(pred, zeros, r1).value == doctest::Approx(2.0).epsilon(1e-15));

    CHECK(error_kind_of([&] { facekit::trend_loss(zeros, zeros, TrendConfig{3}); }) ==
          ErrorKind::OrderTooLarge);
}

TEST_CASE("trend_loss ignores constant frame offsets") {
    oracle::Rng rng(79);
    const std::size_t frames = 9;
    const auto gt = rng.sequence(frames, 2, 25.0);
    const auto pred = rng.sequence(frames, 2, 25.0);
    const TrendConfig cfg{4};
    const double base = facekit::trend_loss(pred, gt, cfg).value;

    auto offset_all = [&](const MotionSequence& seq, double c) {
        std::vector<double> values(seq.values().begin(), seq.values().end());
        for (double& v : values) v += c;
        return MotionSequence(frames, 2, 25.0, std::move(values));
    };
    CHECK(std::abs(facekit::trend_loss(offset_all(pred, 0.7), gt, cfg).value - base) < 1e-12);
    CHECK(std::abs(facekit::trend_loss(offset_all(pred, 0.7), offset_all(gt, -0.3), cfg).value -
                   base) < 1e-12);
}

TEST_CASE("trend_loss gradient matches finite differences and the reference") {
    oracle::Rng rng(83);
    const std::size_t frames = 8;
    auto pred_values = rng.uniform_vector(frames * 1 * 3, -1.0, 1.0);
    const auto gt = rng.sequence(frames, 1, 25.0);
    const TrendConfig cfg{5};

    const auto analytic = facekit::trend_loss(MotionSequence(frames, 1, 25.0, pred_values), gt, cfg);
    const auto ref =
        facekit::reference::trend_loss(MotionSequence(frames, 1, 25.0, pred_values), gt, cfg);
    CHECK(std::abs(analytic.value - ref.value) < 1e-12);
    for (std::size_t i = 0; i < analytic.grad.size(); ++i) {
        CHECK(std::abs(analytic.grad[i] - ref.grad[i]) < 1e-12);
    }

    auto eval = [&] {
        return facekit::trend_loss(MotionSequence(frames, 1, 25.0, pred_values), gt, cfg).value;
    };
    for (std::size_t i = 0; i < pred_values.size(); ++i) {
        const double fd = oracle::central_diff(eval, pred_values, i);
        CHECK(oracle::rel_err(analytic.grad[i], fd) < 1e-6);
    }
}

TEST_CASE("local_contrastive_loss degenerate windows reduce to the l1 term") {
    oracle::Rng rng(89);
    const Matrix w = safe_align(rng, 3, 3);
    double l1 = 0.0;
    for (double v : w.values) l1 += std::abs(v);

    // T = 1: the softmax has a single candidate in both directions.
    const auto single = facekit::local_contrastive_loss(rng.matrix(1, 3, 0.5, 1.5),
                                                        rng.matrix(1, 3, 0.5, 1.5), w, {});
    CHECK(single.value == doctest::Approx(l1).epsilon(1e-12));

    // k = 0: every anchor sees only itself.
    ContrastiveConfig k0;
    k0.window = 0;
    const auto tight = facekit::local_contrastive_loss(rng.matrix(3, 3, 0.5, 1.5),
                                                       rng.matrix(3, 3, 0.5, 1.5), w, k0);
    CHECK(tight.value == doctest::Approx(l1).epsilon(1e-12));
}

TEST_CASE("local_contrastive_loss matches the worked two-frame case") {
    Matrix audio(2, 2), motion(2, 2);
    audio(0, 0) = 1.0;
    audio(1, 1) = 1.0;
    motion(0, 0) = 1.0;
    motion(1, 1) = 1.0;
    Matrix identity(2, 2);
    identity(0, 0) = identity(1, 1) = 1.0;

    const auto got = facekit::local_contrastive_loss(audio, motion, identity, {});
    const double expected = std::log(1.0 + std::exp(-10.0)) + 2.0;
    CHECK(got.value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(got.value == doctest::Approx(2.0000454).epsilon(1e-7));
}

TEST_CASE("local_contrastive_loss rejects zero norms and mismatched shapes") {
    oracle::Rng rng(97);
    const Matrix w = safe_align(rng, 2, 2);
    Matrix audio = rng.matrix(2, 2, 0.5, 1.5);
    Matrix motion = rng.matrix(2, 2, 0.5, 1.5);

    Matrix zero_audio = audio;
    zero_audio(1, 0) = zero_audio(1, 1) = 0.0;
    CHECK(error_kind_of([&] { facekit::local_contrastive_loss(zero_audio, motion, w, {}); }) ==
          ErrorKind::ZeroNorm);

    Matrix zero_motion = motion;
    zero_motion(0, 0) = zero_motion(0, 1) = 0.0;
    CHECK(error_kind_of([&] { facekit::local_contrastive_loss(audio, zero_motion, w, {}); }) ==
          ErrorKind::ZeroNorm);

    CHECK(error_kind_of([&] {
              facekit::local_contrastive_loss(rng.matrix(3, 2, 0.5, 1.5), motion, w, {});
          }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("local_contrastive_loss is invariant to rescaling one audio row") {
    oracle::Rng rng(101);
    const Matrix w = safe_align(rng, 3, 4);
    Matrix audio = rng.matrix(5, 3, 0.5, 1.5);
    const Matrix motion = rng.matrix(5, 4, 0.5, 1.5);
    const double base = facekit::local_contrastive_loss(audio, motion, w, {}).value;
    for (std::size_t c = 0; c < audio.cols; ++c) audio(2, c) *= 3.7;
    CHECK(std::abs(facekit::local_contrastive_loss(audio, motion, w, {}).value - base) < 1e-9);
    CHECK(base >= 0.0);
}

TEST_CASE("local_contrastive_loss gradients match finite differences") {
    oracle::Rng rng(103);
    const std::size_t frames = 6, d_a = 3, d_m = 4;
    Matrix audio = rng.matrix(frames, d_a, 0.2, 1.2);
    Matrix motion = rng.matrix(frames, d_m, 0.2, 1.2);
    Matrix align = safe_align(rng, d_a, d_m);
    ContrastiveConfig cfg;
    cfg.window = 2;

    const auto analytic = facekit::local_contrastive_loss(audio, motion, align, cfg);
    const auto ref = facekit::reference::local_contrastive_loss(audio, motion, align, cfg);
    CHECK(std::abs(analytic.value - ref.value) < 1e-12);
    for (std::size_t i = 0; i < analytic.grad_motion.values.size(); ++i) {
        CHECK(std::abs(analytic.grad_motion.values[i] - ref.grad_motion.values[i]) < 1e-10);
    }
    for (std::size_t i = 0; i < analytic.grad_align.values.size(); ++i) {
        CHECK(std::abs(analytic.grad_align.values[i] - ref.grad_align.values[i]) < 1e-10);
    }

    auto eval_motion = [&] {
        return facekit::local_contrastive_loss(audio, motion, align, cfg).value;
    };
    for (std::size_t i = 0; i < motion.values.size(); ++i) {
        const double fd = oracle::central_diff(eval_motion, motion.values, i);
        CHECK(oracle::rel_err(analytic.grad_motion.values[i], fd) < 1e-6);
    }
    for (std::size_t i = 0; i < align.values.size(); ++i) {
        const double fd = oracle::central_diff(eval_motion, align.values, i);
        CHECK(oracle::rel_err(analytic.grad_align.values[i], fd) < 1e-6);
    }
}

TEST_CASE("total_loss") {
    CHECK(facekit::total_loss({}, {}) == 0.0);
    CHECK(facekit::total_loss({1.0, 1.0, 1.0, 1.0}, {}) ==
          doctest::Approx(2.002).epsilon(1e-15));
    CHECK(facekit::total_loss({3.0, -2.0, 5.0, 7.0}, {0.0, 0.0, 0.0, 0.0}) == 0.0);

    facekit::LossParts bad;
    bad.rec = std::numeric_limits<double>::infinity();
    CHECK(error_kind_of([&] { facekit::total_loss(bad, {}); }) == ErrorKind::NonFiniteValue);

    facekit::LossWeights negative;
    negative.rec = -1.0;
    CHECK(error_kind_of([&] { facekit::total_loss({}, negative); }) == ErrorKind::BadConfig);
}
