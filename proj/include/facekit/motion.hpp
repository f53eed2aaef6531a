#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "facekit/error.hpp"

namespace facekit {

/// A facial motion sequence: T frames of per-vertex xyz displacements (mm)
/// over a neutral template, at a fixed frame rate. Values live in doubles;
/// file storage is 32-bit. Immutable once constructed; construction
/// validates T >= 1, N >= 1, fps > 0 and that every value is finite.
class MotionSequence {
public:
    MotionSequence(std::size_t frames, std::size_t vertices, double fps,
                   std::vector<double> values);

    static MotionSequence zeros(std::size_t frames, std::size_t vertices, double fps);

    std::size_t frame_count() const noexcept { return frames_; }
    std::size_t vertex_count() const noexcept { return vertices_; }
    double fps() const noexcept { return fps_; }

    /// Displacement component, axis in {0,1,2} = {x,y,z}.
    double at(std::size_t frame, std::size_t vertex, std::size_t axis) const {
        return values_[(frame * vertices_ + vertex) * 3 + axis];
    }

    /// N*3 contiguous values of one frame, vertex-major.
    std::span<const double> frame(std::size_t t) const {
        return std::span<const double>(values_.data() + t * vertices_ * 3, vertices_ * 3);
    }

    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t frames_;
    std::size_t vertices_;
    double fps_;
    std::vector<double> values_;
};

/// Neutral-face template: N vertex positions (mm). Displacements from a
/// MotionSequence add onto these to give absolute positions.
class FaceTemplate {
public:
    FaceTemplate(std::size_t vertices, std::vector<double> positions);

    std::size_t vertex_count() const noexcept { return vertices_; }
    double at(std::size_t vertex, std::size_t axis) const {
        return positions_[vertex * 3 + axis];
    }
    std::span<const double> positions() const noexcept { return positions_; }

private:
    std::size_t vertices_;
    std::vector<double> positions_;
};

/// Vertex index sets for the lip region and the upper-face region.
/// Lists are sorted ascending with no duplicates; they may overlap.
struct RegionMask {
    std::vector<std::uint32_t> lip;
    std::vector<std::uint32_t> upper;

    /// Throws unless both lists are sorted, duplicate-free and < n_vertices.
    void validate(std::size_t n_vertices) const;
};

// FMOT binary format v1 (little-endian):
//   bytes 0..3   ASCII "FMOT"
//   u32          version = 1
//   u32          T (frames)
//   u32          N (vertices)
//   f32          fps
//   T*N*3 f32    displacements, frame-major, vertex-major within frame,
//                x,y,z within vertex
// FTPL template format v1: "FTPL", u32 version = 1, u32 N, N*3 f32 positions.

MotionSequence read_fmot(const std::filesystem::path& path);
void write_fmot(const MotionSequence& seq, const std::filesystem::path& path);

FaceTemplate read_ftpl(const std::filesystem::path& path);
void write_ftpl(const FaceTemplate& tpl, const std::filesystem::path& path);

/// Reads a mask JSON object {"lip":[...],"upper":[...]} of 0-based indices
/// and validates it against n_vertices.
RegionMask read_mask(const std::filesystem::path& path, std::size_t n_vertices);

}  // namespace facekit
