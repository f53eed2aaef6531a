#include "facekit/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include "facekit/format.hpp"

namespace facekit {

std::pair<std::uint64_t, std::uint64_t> splitmix64_next(std::uint64_t state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return {z ^ (z >> 31), state};
}

std::uint64_t SplitMix64::next() {
    auto [value, next_state] = splitmix64_next(state_);
    state_ = next_state;
    return value;
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_gaussian() {
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void CorpusConfig::validate() const {
    if (speakers == 0 || sequences_per_speaker == 0 || vertices == 0) {
        throw Error(ErrorKind::BadConfig, "corpus counts must be >= 1");
    }
    if (frames < 4) throw Error(ErrorKind::BadConfig, "corpus needs T >= 4");
    if (!(fps > 0.0) || !std::isfinite(fps)) {
        throw Error(ErrorKind::BadConfig, "fps must be positive");
    }
}

namespace {

void check_profiles(const CorpusConfig& cfg, const std::vector<SpeakerProfile>& profiles) {
    if (profiles.size() != cfg.speakers) {
        throw Error(ErrorKind::ConfigMismatch, "expected " + std::to_string(cfg.speakers) +
                                                   " profiles, got " +
                                                   std::to_string(profiles.size()));
    }
    for (const auto& p : profiles) {
        if (p.bins.empty()) {
            throw Error(ErrorKind::ConfigMismatch, "profile " + p.id + " has no bins");
        }
        std::set<std::uint32_t> seen;
        for (std::uint32_t bin : p.bins) {
            if (bin < 1 || bin >= cfg.frames / 2) {
                throw Error(ErrorKind::ConfigMismatch,
                            "profile " + p.id + ": bin " + std::to_string(bin) +
                                " outside [1, floor(T/2))");
            }
            if (!seen.insert(bin).second) {
                throw Error(ErrorKind::ConfigMismatch,
                            "profile " + p.id + ": duplicate bin " + std::to_string(bin));
            }
        }
        if (p.amplitudes.size() != cfg.vertices * 3 * p.bins.size()) {
            throw Error(ErrorKind::ConfigMismatch,
                        "profile " + p.id + ": amplitudes must be N*3*B values");
        }
        require_finite(p.amplitudes, "profile amplitudes");
        if (!(p.noise_sigma >= 0.0) || !std::isfinite(p.noise_sigma)) {
            throw Error(ErrorKind::ConfigMismatch, "profile " + p.id + ": bad noise sigma");
        }
    }
}

}  // namespace

std::vector<CorpusEntry> generate_corpus(const CorpusConfig& cfg,
                                         const std::vector<SpeakerProfile>& profiles) {
    cfg.validate();
    check_profiles(cfg, profiles);

    const std::size_t frames = cfg.frames;
    const std::size_t vertices = cfg.vertices;
    const double two_pi = 2.0 * std::numbers::pi;

    SplitMix64 rng(cfg.seed);
    std::vector<CorpusEntry> corpus;
    corpus.reserve(cfg.speakers * cfg.sequences_per_speaker);

    for (const SpeakerProfile& profile : profiles) {
        const std::size_t n_bins = profile.bins.size();
        for (std::size_t s = 0; s < cfg.sequences_per_speaker; ++s) {
            // Draw order is part of the format: phases first, then noise,
            // both row-major; noise is drawn even when sigma is zero.
            std::vector<double> phases(vertices * 3 * n_bins);
            for (double& phi : phases) phi = two_pi * rng.next_unit();
            std::vector<double> noise(frames * vertices * 3);
            for (double& n : noise) n = profile.noise_sigma * rng.next_gaussian();

            std::vector<double> values(frames * vertices * 3);
            const auto nt = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
                const auto t = static_cast<std::size_t>(ti);
                for (std::size_t v = 0; v < vertices; ++v) {
                    for (std::size_t c = 0; c < 3; ++c) {
                        const std::size_t channel = v * 3 + c;
                        double x = 0.0;
                        for (std::size_t b = 0; b < n_bins; ++b) {
                            const double freq = static_cast<double>(profile.bins[b]);
                            const double phase = phases[channel * n_bins + b];
                            x += profile.amplitude(v, c, b) *
                                 std::sin(two_pi * freq * static_cast<double>(t) /
                                              static_cast<double>(frames) +
                                          phase);
                        }
                        values[(t * vertices + v) * 3 + c] = x + noise[(t * vertices + v) * 3 + c];
                    }
                }
            }
            corpus.push_back(
                {profile.id, MotionSequence(frames, vertices, cfg.fps, std::move(values))});
        }
    }
    return corpus;
}

double nearest_centroid_accuracy(const std::vector<std::string>& labels,
                                 const std::vector<std::vector<double>>& features) {
    require_same_dim(labels.size(), features.size(), "labels vs features count");
    if (features.empty()) throw Error(ErrorKind::TooFewSamples, "no feature vectors");
    const std::size_t dim = features.front().size();
    for (const auto& f : features) {
        require_same_dim(f.size(), dim, "feature dimensions");
    }

    // Speaker index = order of first appearance.
    std::vector<std::string> speaker_of;
    std::vector<std::size_t> class_of(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::find(speaker_of.begin(), speaker_of.end(), labels[i]);
        if (it == speaker_of.end()) {
            speaker_of.push_back(labels[i]);
            class_of[i] = speaker_of.size() - 1;
        } else {
            class_of[i] = static_cast<std::size_t>(it - speaker_of.begin());
        }
    }
    const std::size_t n_classes = speaker_of.size();

    std::vector<std::vector<double>> sums(n_classes, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        counts[class_of[i]] += 1;
        for (std::size_t e = 0; e < dim; ++e) sums[class_of[i]][e] += features[i][e];
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (counts[c] < 2) {
            throw Error(ErrorKind::TooFewSamples,
                        "speaker " + speaker_of[c] + " needs at least 2 feature vectors");
        }
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        std::size_t best_class = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < n_classes; ++c) {
            // Leave-one-out: drop sample i from its own centroid.
            const double denom =
                static_cast<double>(c == class_of[i] ? counts[c] - 1 : counts[c]);
            double dist = 0.0;
            for (std::size_t e = 0; e < dim; ++e) {
                const double centroid =
                    (sums[c][e] - (c == class_of[i] ? features[i][e] : 0.0)) / denom;
                const double d = features[i][e] - centroid;
                dist += d * d;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best_class = c;
            }
        }
        if (best_class == class_of[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(features.size());
}

DiscriminabilityResult discriminability_from_corpus(const std::vector<CorpusEntry>& corpus,
                                                    const SpectralConfig& spectral) {
    if (corpus.empty()) throw Error(ErrorKind::TooFewSamples, "empty corpus");
    std::vector<std::string> labels;
    labels.reserve(corpus.size());
    std::vector<std::vector<double>> std_features(corpus.size());
    std::vector<std::vector<double>> freq_features(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        labels.push_back(corpus[i].speaker);
        std_features[i] = std_vector(corpus[i].sequence);
        freq_features[i] = frequency_matrix(corpus[i].sequence, spectral).values;
    }
    DiscriminabilityResult out;
    out.std_accuracy = nearest_centroid_accuracy(labels, std_features);
    out.freq_accuracy = nearest_centroid_accuracy(labels, freq_features);
    return out;
}

DiscriminabilityResult discriminability_experiment(const CorpusConfig& cfg,
                                                   const std::vector<SpeakerProfile>& profiles,
                                                   const SpectralConfig& spectral) {
    return discriminability_from_corpus(generate_corpus(cfg, profiles), spectral);
}

namespace {

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    try {
        nlohmann::json doc;
        in >> doc;
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadJson, path.string() + ": " + e.what());
    }
}

}  // namespace

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    const auto doc = load_json(path);
    const std::string ctx = path.string();
    auto require = [&](const char* key) -> const nlohmann::json& {
        if (!doc.contains(key)) {
            throw Error(ErrorKind::MissingKey, ctx + ": missing \"" + key + "\"");
        }
        return doc.at(key);
    };

    SynthSpec spec;
    try {
        spec.config.speakers = require("speakers").get<std::size_t>();
        spec.config.sequences_per_speaker = require("sequences_per_speaker").get<std::size_t>();
        spec.config.frames = require("T").get<std::size_t>();
        spec.config.vertices = require("N").get<std::size_t>();
        spec.config.seed = require("seed").get<std::uint64_t>();
        if (doc.contains("fps")) spec.config.fps = doc.at("fps").get<double>();

        for (const auto& p : require("profiles")) {
            SpeakerProfile profile;
            profile.id = p.at("id").get<std::string>();
            for (const auto& bin : p.at("bins")) {
                profile.bins.push_back(bin.get<std::uint32_t>());
            }
            if (p.contains("noise_sigma")) {
                profile.noise_sigma = p.at("noise_sigma").get<double>();
            }
            const std::size_t flat = spec.config.vertices * 3 * profile.bins.size();
            if (p.contains("amplitudes")) {
                // Explicit [N][3][B] array.
                for (const auto& per_vertex : p.at("amplitudes")) {
                    for (const auto& per_axis : per_vertex) {
                        for (const auto& a : per_axis) {
                            profile.amplitudes.push_back(a.get<double>());
                        }
                    }
                }
                if (profile.amplitudes.size() != flat) {
                    throw Error(ErrorKind::ConfigMismatch,
                                ctx + ": profile " + profile.id + " amplitudes shape");
                }
            } else if (p.contains("amplitude")) {
                profile.amplitudes.assign(flat, p.at("amplitude").get<double>());
            } else {
                throw Error(ErrorKind::MissingKey,
                            ctx + ": profile " + profile.id + " needs amplitude(s)");
            }
            spec.profiles.push_back(std::move(profile));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadJson, ctx + ": " + e.what());
    }
    spec.config.validate();
    check_profiles(spec.config, spec.profiles);
    return spec;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out << "[";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0) out << ",";
        out << "\n  {\"file\":" << json_quote(entries[i].file)
            << ",\"speaker\":" << json_quote(entries[i].speaker) << "}";
    }
    out << "\n]\n";
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    const auto doc = load_json(path);
    if (!doc.is_array()) {
        throw Error(ErrorKind::BadJson, path.string() + ": manifest must be an array");
    }
    std::vector<ManifestEntry> entries;
    for (const auto& item : doc) {
        if (!item.contains("file") || !item.contains("speaker")) {
            throw Error(ErrorKind::MissingKey,
                        path.string() + ": manifest entries need file and speaker");
        }
        entries.push_back({item.at("file").get<std::string>(),
                           item.at("speaker").get<std::string>()});
    }
    return entries;
}

}  // namespace facekit
