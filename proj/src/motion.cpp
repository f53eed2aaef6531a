#include "facekit/motion.hpp"

#include "facekit/linalg.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace facekit {

namespace {

constexpr char kFmotMagic[4] = {'F', 'M', 'O', 'T'};
constexpr char kFtplMagic[4] = {'F', 'T', 'P', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

// All multi-byte fields are little-endian regardless of host order.
void put_u32(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& buf, float v) {
    put_u32(buf, std::bit_cast<std::uint32_t>(v));
}

class Reader {
public:
    Reader(const std::filesystem::path& path) : path_(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorKind::IoError, "cannot open " + path_);
        data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        if (in.bad()) throw Error(ErrorKind::IoError, "read failed: " + path_);
    }

    std::uint32_t u32() {
        need(4);
        const auto* p = reinterpret_cast<const unsigned char*>(data_.data() + pos_);
        pos_ += 4;
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }

    float f32() { return std::bit_cast<float>(u32()); }

    void magic(const char expected[4]) {
        need(4);
        if (std::memcmp(data_.data() + pos_, expected, 4) != 0) {
            throw Error(ErrorKind::BadMagic,
                        path_ + ": expected magic \"" + std::string(expected, 4) + "\"");
        }
        pos_ += 4;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    const std::string& path() const { return path_; }

private:
    void need(std::size_t n) {
        if (remaining() < n) throw Error(ErrorKind::TruncatedFile, path_ + ": truncated");
    }

    std::string path_;
    std::string data_;
    std::size_t pos_ = 0;
};

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::vector<double> read_payload(Reader& r, std::size_t count) {
    if (r.remaining() < count * 4) {
        throw Error(ErrorKind::TruncatedFile,
                    r.path() + ": payload holds " + std::to_string(r.remaining() / 4) +
                        " values, header promises " + std::to_string(count));
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const float v = r.f32();
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFinite, r.path() + ": non-finite stored value");
        }
        values[i] = static_cast<double>(v);
    }
    return values;
}

}  // namespace

MotionSequence::MotionSequence(std::size_t frames, std::size_t vertices, double fps,
                               std::vector<double> values)
    : frames_(frames), vertices_(vertices), fps_(fps), values_(std::move(values)) {
    if (frames_ == 0 || vertices_ == 0) {
        throw Error(ErrorKind::ZeroDims, "motion sequence needs T >= 1 and N >= 1");
    }
    if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
        throw Error(ErrorKind::BadConfig, "fps must be positive and finite");
    }
    if (values_.size() != frames_ * vertices_ * 3) {
        throw Error(ErrorKind::DimensionMismatch,
                    "motion sequence value count does not match T*N*3");
    }
    require_finite(values_, "motion sequence");
}

MotionSequence MotionSequence::zeros(std::size_t frames, std::size_t vertices, double fps) {
    return MotionSequence(frames, vertices, fps, std::vector<double>(frames * vertices * 3, 0.0));
}

FaceTemplate::FaceTemplate(std::size_t vertices, std::vector<double> positions)
    : vertices_(vertices), positions_(std::move(positions)) {
    if (vertices_ == 0) throw Error(ErrorKind::ZeroDims, "template needs N >= 1");
    if (positions_.size() != vertices_ * 3) {
        throw Error(ErrorKind::DimensionMismatch, "template value count does not match N*3");
    }
    require_finite(positions_, "face template");
}

void RegionMask::validate(std::size_t n_vertices) const {
    for (const auto* list : {&lip, &upper}) {
        for (std::size_t i = 0; i < list->size(); ++i) {
            if ((*list)[i] >= n_vertices) {
                throw Error(ErrorKind::IndexOutOfRange,
                            "mask index " + std::to_string((*list)[i]) + " >= N = " +
                                std::to_string(n_vertices));
            }
            if (i > 0) {
                if ((*list)[i] == (*list)[i - 1]) {
                    throw Error(ErrorKind::DuplicateIndex,
                                "mask index " + std::to_string((*list)[i]) + " repeated");
                }
                if ((*list)[i] < (*list)[i - 1]) {
                    throw Error(ErrorKind::UnsortedIndex, "mask indices must be ascending");
                }
            }
        }
    }
}

MotionSequence read_fmot(const std::filesystem::path& path) {
    Reader r(path);
    r.magic(kFmotMagic);
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw Error(ErrorKind::BadVersion,
                    path.string() + ": FMOT version " + std::to_string(version));
    }
    const std::uint32_t frames = r.u32();
    const std::uint32_t vertices = r.u32();
    const float fps = r.f32();
    if (frames == 0 || vertices == 0) {
        throw Error(ErrorKind::ZeroDims, path.string() + ": zero T or N in header");
    }
    auto values = read_payload(r, static_cast<std::size_t>(frames) * vertices * 3);
    return MotionSequence(frames, vertices, static_cast<double>(fps), std::move(values));
}

void write_fmot(const MotionSequence& seq, const std::filesystem::path& path) {
    std::string buf;
    buf.reserve(20 + seq.values().size() * 4);
    buf.append(kFmotMagic, 4);
    put_u32(buf, kFormatVersion);
    put_u32(buf, static_cast<std::uint32_t>(seq.frame_count()));
    put_u32(buf, static_cast<std::uint32_t>(seq.vertex_count()));
    put_f32(buf, static_cast<float>(seq.fps()));
    for (double v : seq.values()) {
        const float stored = static_cast<float>(v);
        if (!std::isfinite(stored)) {
            throw Error(ErrorKind::NonFinite, "value does not fit 32-bit storage");
        }
        put_f32(buf, stored);
    }
    write_file(path, buf);
}

FaceTemplate read_ftpl(const std::filesystem::path& path) {
    Reader r(path);
    r.magic(kFtplMagic);
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw Error(ErrorKind::BadVersion,
                    path.string() + ": FTPL version " + std::to_string(version));
    }
    const std::uint32_t vertices = r.u32();
    if (vertices == 0) throw Error(ErrorKind::ZeroDims, path.string() + ": zero N in header");
    auto values = read_payload(r, static_cast<std::size_t>(vertices) * 3);
    return FaceTemplate(vertices, std::move(values));
}

void write_ftpl(const FaceTemplate& tpl, const std::filesystem::path& path) {
    std::string buf;
    buf.append(kFtplMagic, 4);
    put_u32(buf, kFormatVersion);
    put_u32(buf, static_cast<std::uint32_t>(tpl.vertex_count()));
    for (double v : tpl.positions()) {
        const float stored = static_cast<float>(v);
        if (!std::isfinite(stored)) {
            throw Error(ErrorKind::NonFinite, "value does not fit 32-bit storage");
        }
        put_f32(buf, stored);
    }
    write_file(path, buf);
}

RegionMask read_mask(const std::filesystem::path& path, std::size_t n_vertices) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadJson, path.string() + ": " + e.what());
    }
    RegionMask mask;
    for (auto [key, list] : {std::pair{"lip", &mask.lip}, std::pair{"upper", &mask.upper}}) {
        if (!doc.contains(key)) {
            throw Error(ErrorKind::MissingKey, path.string() + ": missing \"" + key + "\"");
        }
        const auto& arr = doc.at(key);
        if (!arr.is_array()) {
            throw Error(ErrorKind::BadJson, path.string() + ": \"" + std::string(key) +
                                                "\" must be an array");
        }
        for (const auto& item : arr) {
            if (!item.is_number_unsigned()) {
                throw Error(ErrorKind::BadJson,
                            path.string() + ": mask indices must be non-negative integers");
            }
            list->push_back(item.get<std::uint32_t>());
        }
    }
    mask.validate(n_vertices);
    return mask;
}

}  // namespace facekit
