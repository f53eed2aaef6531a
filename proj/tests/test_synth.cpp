#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "facekit/spectral.hpp"
#include "facekit/synth.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using facekit::CorpusConfig;
using facekit::ErrorKind;
using facekit::SpeakerProfile;
using testsupport::error_kind_of;
using testsupport::TempDir;

namespace {

SpeakerProfile flat_profile(const std::string& id, std::vector<std::uint32_t> bins,
                            std::size_t vertices, double amplitude, double sigma) {
    SpeakerProfile p;
    p.id = id;
    p.bins = std::move(bins);
    p.amplitudes.assign(vertices * 3 * p.bins.size(), amplitude);
    p.noise_sigma = sigma;
    return p;
}

}  // namespace

TEST_CASE("splitmix64 reference vector") {
    // Hand-stepped oracle for the first output from seed 0.
    std::uint64_t state = 0;
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    CHECK(z == 0xE220A8397B1DCDAFULL);

    const auto [value, next_state] = facekit::splitmix64_next(0);
    CHECK(value == 0xE220A8397B1DCDAFULL);
    CHECK(next_state == 0x9E3779B97F4A7C15ULL);

    facekit::SplitMix64 a(123), b(123);
    for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());

    facekit::SplitMix64 c(0);
    const auto first = c.next();
    CHECK(first != c.next());
}

TEST_CASE("splitmix64 derived draws stay in range") {
    facekit::SplitMix64 rng(99);
    for (int i = 0; i < 256; ++i) {
        const double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 64; ++i) CHECK(std::isfinite(rng.next_gaussian()));
}

TEST_CASE("generate_corpus pure tone lands on its bin") {
    CorpusConfig cfg;
    cfg.speakers = 1;
    cfg.sequences_per_speaker = 1;
    cfg.frames = 32;
    cfg.vertices = 1;
    cfg.seed = 5;

    // Unit amplitude only on the x channel of the single vertex.
    SpeakerProfile p = flat_profile("solo", {3}, 1, 0.0, 0.0);
    p.amplitudes[0] = 1.0;
    const auto corpus = facekit::generate_corpus(cfg, {p});
    REQUIRE(corpus.size() == 1);

    const auto mags = facekit::frequency_matrix(corpus[0].sequence, {20});
    for (std::size_t k = 0; k < mags.cols; ++k) {
        if (k == 3) {
            CHECK(mags(0, k) == doctest::Approx(0.5).epsilon(1e-9));
        } else {
            CHECK(mags(0, k) < 1e-9);
        }
    }
    // The untouched channels stay silent.
    for (std::size_t c = 1; c < 3; ++c) {
        for (std::size_t k = 0; k < mags.cols; ++k) CHECK(mags(c, k) == 0.0);
    }
}

TEST_CASE("generate_corpus is bit-reproducible") {
    CorpusConfig cfg;
    cfg.speakers = 2;
    cfg.sequences_per_speaker = 3;
    cfg.frames = 20;
    cfg.vertices = 4;
    cfg.seed = 77;
    const std::vector<SpeakerProfile> profiles{flat_profile("a", {2, 4}, 4, 1.0, 0.3),
                                               flat_profile("b", {6, 8}, 4, 1.0, 0.3)};

    const auto first = facekit::generate_corpus(cfg, profiles);
    const auto second = facekit::generate_corpus(cfg, profiles);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].speaker == second[i].speaker);
        const auto va = first[i].sequence.values();
        const auto vb = second[i].sequence.values();
        REQUIRE(va.size() == vb.size());
        CHECK(std::memcmp(va.data(), vb.data(), va.size() * sizeof(double)) == 0);
    }

    // The same bytes land on disk.
    TempDir dir("corpus_bytes");
    facekit::write_fmot(first[0].sequence, dir.file("a.fmot"));
    facekit::write_fmot(second[0].sequence, dir.file("b.fmot"));
    CHECK(testsupport::read_file_bytes(dir.file("a.fmot")) ==
          testsupport::read_file_bytes(dir.file("b.fmot")));
}

TEST_CASE("generate_corpus zero config yields zero motion") {
    CorpusConfig cfg;
    cfg.speakers = 1;
    cfg.sequences_per_speaker = 2;
    cfg.frames = 8;
    cfg.vertices = 2;
    cfg.seed = 1;
    const auto corpus = facekit::generate_corpus(cfg, {flat_profile("z", {2}, 2, 0.0, 0.0)});
    for (const auto& entry : corpus) {
        for (double v : entry.sequence.values()) CHECK(v == 0.0);
    }
}

TEST_CASE("generate_corpus validates profiles") {
    CorpusConfig cfg;
    cfg.speakers = 2;
    cfg.sequences_per_speaker = 1;
    cfg.frames = 16;
    cfg.vertices = 2;
    cfg.seed = 0;

    CHECK(error_kind_of([&] {
              facekit::generate_corpus(cfg, {flat_profile("only", {2}, 2, 1.0, 0.0)});
          }) == ErrorKind::ConfigMismatch);

    // Bin at floor(T/2) is out of range.
    CHECK(error_kind_of([&] {
              facekit::generate_corpus(cfg, {flat_profile("a", {8}, 2, 1.0, 0.0),
                                             flat_profile("b", {2}, 2, 1.0, 0.0)});
          }) == ErrorKind::ConfigMismatch);

    auto short_amp = flat_profile("a", {2}, 2, 1.0, 0.0);
    short_amp.amplitudes.pop_back();
    CHECK(error_kind_of([&] {
              facekit::generate_corpus(cfg, {short_amp, flat_profile("b", {3}, 2, 1.0, 0.0)});
          }) == ErrorKind::ConfigMismatch);
}

TEST_CASE("nearest_centroid_accuracy") {
    using Features = std::vector<std::vector<double>>;

    // Well-separated constant clusters classify perfectly.
    const std::vector<std::string> labels{"a", "a", "b", "b"};
    CHECK(facekit::nearest_centroid_accuracy(labels, Features{{0.0}, {0.1}, {10.0}, {10.1}}) ==
          1.0);

    // All-identical features tie everywhere; the first speaker wins all.
    CHECK(facekit::nearest_centroid_accuracy(labels, Features{{1.0}, {1.0}, {1.0}, {1.0}}) ==
          0.5);

    // Leave-one-out moves the own-class centroid: {0,4} vs {2.5,2.5}. With
    // the tested vector excluded both "a" vectors land nearer to "b".
    CHECK(facekit::nearest_centroid_accuracy(labels, Features{{0.0}, {4.0}, {2.5}, {2.5}}) ==
          0.5);

    // A single class is degenerate but classified trivially.
    CHECK(facekit::nearest_centroid_accuracy({"a", "a", "a"}, Features{{0.0}, {1.0}, {2.0}}) ==
          1.0);

    CHECK(error_kind_of([&] {
              facekit::nearest_centroid_accuracy({"a", "a", "b"}, Features{{0.0}, {1.0}, {2.0}});
          }) == ErrorKind::TooFewSamples);
    CHECK(error_kind_of([&] {
              facekit::nearest_centroid_accuracy(labels, Features{{0.0}, {1.0}, {2.0}, {1.0, 2.0}});
          }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("discriminability experiment separates spectra but not deviations") {
    CorpusConfig cfg;
    cfg.speakers = 3;
    cfg.sequences_per_speaker = 6;
    cfg.frames = 64;
    cfg.vertices = 4;
    cfg.seed = 2024;
    // Disjoint bins, equal amplitudes, no noise: the std feature carries no
    // speaker information while spectra split perfectly.
    const std::vector<SpeakerProfile> profiles{flat_profile("s0", {3, 9}, 4, 1.0, 0.0),
                                               flat_profile("s1", {5, 11}, 4, 1.0, 0.0),
                                               flat_profile("s2", {7, 13}, 4, 1.0, 0.0)};
    const auto result = facekit::discriminability_experiment(cfg, profiles, {20});
    CHECK(result.freq_accuracy == 1.0);
    CHECK(result.std_accuracy <= 1.0 / 3.0 + 0.1);
    CHECK(result.std_accuracy >= 0.0);

    const auto again = facekit::discriminability_experiment(cfg, profiles, {20});
    CHECK(again.freq_accuracy == result.freq_accuracy);
    CHECK(again.std_accuracy == result.std_accuracy);
}

TEST_CASE("synth spec loader") {
    TempDir dir("synth_spec");
    testsupport::write_text_file(dir.file("ok.json"), R"({
        "speakers":1,"sequences_per_speaker":2,"T":16,"N":2,"seed":9,
        "profiles":[{"id":"a","bins":[2,4],"amplitude":0.5,"noise_sigma":0.1}]})");
    const auto spec = facekit::load_synth_spec(dir.file("ok.json"));
    CHECK(spec.config.frames == 16);
    CHECK(spec.profiles.size() == 1);
    CHECK(spec.profiles[0].amplitudes.size() == 2 * 3 * 2);
    CHECK(spec.profiles[0].amplitudes[0] == 0.5);

    testsupport::write_text_file(dir.file("explicit.json"), R"({
        "speakers":1,"sequences_per_speaker":1,"T":16,"N":1,"seed":9,
        "profiles":[{"id":"a","bins":[2],
                     "amplitudes":[[[1.0],[2.0],[3.0]]]}]})");
    const auto explicit_spec = facekit::load_synth_spec(dir.file("explicit.json"));
    CHECK(explicit_spec.profiles[0].amplitudes == std::vector<double>{1.0, 2.0, 3.0});

    testsupport::write_text_file(dir.file("missing.json"), R"({"speakers":1})");
    CHECK(error_kind_of([&] { facekit::load_synth_spec(dir.file("missing.json")); }) ==
          ErrorKind::MissingKey);

    testsupport::write_text_file(dir.file("mismatch.json"), R"({
        "speakers":2,"sequences_per_speaker":1,"T":16,"N":1,"seed":9,
        "profiles":[{"id":"a","bins":[2],"amplitude":1.0}]})");
    CHECK(error_kind_of([&] { facekit::load_synth_spec(dir.file("mismatch.json")); }) ==
          ErrorKind::ConfigMismatch);
}

TEST_CASE("manifest round trip") {
    TempDir dir("manifest");
    const std::vector<facekit::ManifestEntry> entries{{"a_000.fmot", "a"}, {"b_000.fmot", "b"}};
    facekit::write_manifest(dir.file("manifest.json"), entries);
    const auto back = facekit::read_manifest(dir.file("manifest.json"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].file == "a_000.fmot");
    CHECK(back[1].speaker == "b");
}
