#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "facekit/motion.hpp"
#include "facekit/spectral.hpp"

namespace facekit {

/// One SplitMix64 step. Returns the output value and the advanced state.
std::pair<std::uint64_t, std::uint64_t> splitmix64_next(std::uint64_t state);

/// Deterministic random stream used by the corpus generator. The mapping
/// from raw 64-bit outputs to doubles is part of the format contract:
///   unit:     (x >> 11) * 2^-53                  in [0,1)
///   gaussian: two consecutive outputs, u1 = ((x1 >> 11)+1) * 2^-53 in (0,1],
///             u2 from x2 as unit; z = sqrt(-2 ln u1) * cos(2 pi u2).
/// Each gaussian consumes exactly two raw draws; the sine companion is
/// discarded.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double next_unit();
    double next_gaussian();

private:
    std::uint64_t state_;
};

/// Per-speaker synthesis recipe: sinusoids at the given integer bins
/// (cycles per sequence) with per-(vertex,axis,bin) amplitudes, plus white
/// Gaussian noise.
struct SpeakerProfile {
    std::string id;
    std::vector<std::uint32_t> bins;  // distinct, each >= 1 and < floor(T/2)
    std::vector<double> amplitudes;   // [N][3][B] flattened, B = bins.size()
    double noise_sigma = 0.0;

    double amplitude(std::size_t vertex, std::size_t axis, std::size_t bin) const {
        return amplitudes[(vertex * 3 + axis) * bins.size() + bin];
    }
};

struct CorpusConfig {
    std::size_t speakers = 1;
    std::size_t sequences_per_speaker = 1;
    std::size_t frames = 4;   // T
    std::size_t vertices = 1; // N
    std::uint64_t seed = 0;
    double fps = 25.0;

    void validate() const;
};

struct CorpusEntry {
    std::string speaker;
    MotionSequence sequence;
};

/// Generates speakers * sequences_per_speaker sequences from one SplitMix64
/// stream seeded with cfg.seed. Draw order is fixed: speaker-major, then
/// sequence; within a sequence first one unit draw per (vertex, axis, bin)
/// row-major for the phases, then one gaussian (two raw draws) per
/// (frame, vertex, axis) row-major for the noise. Noise draws are consumed
/// even when noise_sigma is 0. Sample values are
///   x[t][v][c] = sum_b amp[v][c][b] * sin(2 pi f_b t / T + phase) + sigma * z
/// with t 0-based. Bit-reproducible for identical (cfg, profiles).
std::vector<CorpusEntry> generate_corpus(const CorpusConfig& cfg,
                                         const std::vector<SpeakerProfile>& profiles);

/// Leave-one-out nearest-centroid accuracy. Each vector is classified by the
/// Euclidean-nearest per-speaker centroid, its own class centroid computed
/// without it; ties go to the smallest speaker index (order of first
/// appearance in `labels`). Every class needs at least two vectors.
double nearest_centroid_accuracy(const std::vector<std::string>& labels,
                                 const std::vector<std::vector<double>>& features);

struct DiscriminabilityResult {
    double std_accuracy = 0.0;
    double freq_accuracy = 0.0;
};

/// Generates the corpus and classifies it twice: once on flattened per-vertex
/// dyn std vectors, once on flattened frequency matrices.
DiscriminabilityResult discriminability_experiment(const CorpusConfig& cfg,
                                                   const std::vector<SpeakerProfile>& profiles,
                                                   const SpectralConfig& spectral);

/// Same classification applied to an already-materialized corpus.
DiscriminabilityResult discriminability_from_corpus(const std::vector<CorpusEntry>& corpus,
                                                    const SpectralConfig& spectral);

struct SynthSpec {
    CorpusConfig config;
    std::vector<SpeakerProfile> profiles;
};

/// Loads the synth config JSON. Profile amplitudes are either a scalar
/// "amplitude" broadcast over [N][3][B] or an explicit "amplitudes" array.
SynthSpec load_synth_spec(const std::filesystem::path& path);

struct ManifestEntry {
    std::string file;
    std::string speaker;
};

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace facekit
