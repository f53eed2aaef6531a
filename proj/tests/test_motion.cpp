#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "facekit/motion.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using facekit::ErrorKind;
using facekit::MotionSequence;
using facekit::RegionMask;
using testsupport::error_kind_of;
using testsupport::TempDir;

namespace {

// Byte-level FMOT builder, independent of write_fmot.
void push_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void push_f32(std::string& buf, float v) { push_u32(buf, std::bit_cast<std::uint32_t>(v)); }

std::string fmot_bytes(std::uint32_t frames, std::uint32_t vertices, float fps,
                       const std::vector<float>& payload, const char* magic = "FMOT",
                       std::uint32_t version = 1) {
    std::string buf(magic, 4);
    push_u32(buf, version);
    push_u32(buf, frames);
    push_u32(buf, vertices);
    push_f32(buf, fps);
    for (float v : payload) push_f32(buf, v);
    return buf;
}

}  // namespace

TEST_CASE("read_fmot parses a minimal file") {
    TempDir dir("fmot_min");
    // Header is 5 fields of 4 bytes, payload T*N*3 floats: 20 + 12 = 32.
    const auto bytes = fmot_bytes(1, 1, 25.0f, {0.0f, 0.0f, 0.0f});
    CHECK(bytes.size() == 32);
    testsupport::write_text_file(dir.file("a.fmot"), bytes);

    const auto seq = facekit::read_fmot(dir.file("a.fmot"));
    CHECK(seq.frame_count() == 1);
    CHECK(seq.vertex_count() == 1);
    CHECK(seq.fps() == 25.0);
    for (double v : seq.values()) CHECK(v == 0.0);
}

TEST_CASE("read_fmot rejects malformed files") {
    TempDir dir("fmot_bad");
    auto write_and_kind = [&](const std::string& bytes) {
        testsupport::write_text_file(dir.file("x.fmot"), bytes);
        return error_kind_of([&] { facekit::read_fmot(dir.file("x.fmot")); });
    };

    CHECK(write_and_kind(fmot_bytes(1, 1, 25.0f, {0, 0, 0}, "XMOT")) == ErrorKind::BadMagic);
    CHECK(write_and_kind(fmot_bytes(1, 1, 25.0f, {0, 0, 0}, "FMOT", 2)) == ErrorKind::BadVersion);
    CHECK(write_and_kind(fmot_bytes(0, 1, 25.0f, {})) == ErrorKind::ZeroDims);
    CHECK(write_and_kind(fmot_bytes(1, 0, 25.0f, {})) == ErrorKind::ZeroDims);

    // Header promises 2*3*3 = 18 values (92 bytes total), file carries 9 (56).
    const auto truncated = fmot_bytes(2, 3, 25.0f, std::vector<float>(9, 1.0f));
    CHECK(truncated.size() == 56);
    CHECK(20 + 18 * 4 == 92);
    CHECK(write_and_kind(truncated) == ErrorKind::TruncatedFile);

    const auto nan_payload =
        fmot_bytes(1, 1, 25.0f, {std::numeric_limits<float>::quiet_NaN(), 0.0f, 0.0f});
    CHECK(write_and_kind(nan_payload) == ErrorKind::NonFinite);

    CHECK(error_kind_of([&] { facekit::read_fmot(dir.file("missing.fmot")); }) ==
          ErrorKind::IoError);
}

TEST_CASE("write_fmot emits the exact layout") {
    TempDir dir("fmot_write");
    facekit::write_fmot(MotionSequence::zeros(1, 1, 25.0), dir.file("z.fmot"));
    const auto bytes = testsupport::read_file_bytes(dir.file("z.fmot"));
    CHECK(bytes.size() == 32);
    CHECK(bytes == fmot_bytes(1, 1, 25.0f, {0, 0, 0}));
}

TEST_CASE("fmot round-trip is bit-exact at storage precision") {
    TempDir dir("fmot_rt");
    oracle::Rng rng(7);
    const auto seq = rng.sequence(10, 4, 30.0);
    facekit::write_fmot(seq, dir.file("a.fmot"));
    const auto back = facekit::read_fmot(dir.file("a.fmot"));

    REQUIRE(back.values().size() == seq.values().size());
    for (std::size_t i = 0; i < seq.values().size(); ++i) {
        CHECK(back.values()[i] == static_cast<double>(static_cast<float>(seq.values()[i])));
    }

    // Writing what was read reproduces the payload bytes.
    facekit::write_fmot(back, dir.file("b.fmot"));
    CHECK(testsupport::read_file_bytes(dir.file("a.fmot")) ==
          testsupport::read_file_bytes(dir.file("b.fmot")));
}

TEST_CASE("sequences reject invalid construction") {
    CHECK(error_kind_of([] { MotionSequence::zeros(0, 1, 25.0); }) == ErrorKind::ZeroDims);
    CHECK(error_kind_of([] { MotionSequence::zeros(1, 1, 0.0); }) == ErrorKind::BadConfig);
    CHECK(error_kind_of([] {
              MotionSequence(1, 1, 25.0, {0.0, std::numeric_limits<double>::quiet_NaN(), 0.0});
          }) == ErrorKind::NonFinite);
    CHECK(error_kind_of([] { MotionSequence(2, 1, 25.0, {0.0, 0.0, 0.0}); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("write_fmot rejects values that overflow 32-bit storage") {
    TempDir dir("fmot_overflow");
    const MotionSequence seq(1, 1, 25.0, {1e300, 0.0, 0.0});
    CHECK(error_kind_of([&] { facekit::write_fmot(seq, dir.file("x.fmot")); }) ==
          ErrorKind::NonFinite);
}

TEST_CASE("ftpl round-trip") {
    TempDir dir("ftpl");
    const facekit::FaceTemplate tpl(2, {0.0, 1.0, 2.0, -1.0, 0.5, 0.25});
    facekit::write_ftpl(tpl, dir.file("t.ftpl"));
    const auto back = facekit::read_ftpl(dir.file("t.ftpl"));
    REQUIRE(back.vertex_count() == 2);
    for (std::size_t i = 0; i < tpl.positions().size(); ++i) {
        CHECK(back.positions()[i] == static_cast<double>(static_cast<float>(tpl.positions()[i])));
    }
}

TEST_CASE("read_mask validates content") {
    TempDir dir("mask");
    auto mask_kind = [&](const std::string& json, std::size_t n) {
        testsupport::write_text_file(dir.file("m.json"), json);
        return error_kind_of([&] { facekit::read_mask(dir.file("m.json"), n); });
    };

    testsupport::write_text_file(dir.file("ok.json"), R"({"lip":[0,1],"upper":[2]})");
    const auto mask = facekit::read_mask(dir.file("ok.json"), 4);
    CHECK(mask.lip == std::vector<std::uint32_t>{0, 1});
    CHECK(mask.upper == std::vector<std::uint32_t>{2});

    CHECK(mask_kind(R"({"lip":[5],"upper":[]})", 4) == ErrorKind::IndexOutOfRange);
    CHECK(mask_kind(R"({"lip":[1,1],"upper":[0]})", 4) == ErrorKind::DuplicateIndex);
    CHECK(mask_kind(R"({"lip":[2,1],"upper":[0]})", 4) == ErrorKind::UnsortedIndex);
    CHECK(mask_kind(R"({"lip":[0]})", 4) == ErrorKind::MissingKey);
    CHECK(mask_kind(R"({"lip":[0],"upper":[-1]})", 4) == ErrorKind::BadJson);
    CHECK(mask_kind("not json", 4) == ErrorKind::BadJson);
}

TEST_CASE("region mask validate flags empty-compatible but out-of-range sets") {
    RegionMask mask{{0, 1}, {3}};
    CHECK(error_kind_of([&] { mask.validate(3); }) == ErrorKind::IndexOutOfRange);
    mask.validate(4);  // fine
}
