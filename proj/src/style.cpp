#include "facekit/style.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace facekit {

namespace {

void require_finite_matrix(const Matrix& m, const char* what) {
    require_finite(m.values, what);
}

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

const nlohmann::json& field(const nlohmann::json& doc, const char* key,
                            const std::string& context) {
    if (!doc.contains(key)) {
        throw Error(ErrorKind::MissingKey, context + ": missing \"" + key + "\"");
    }
    return doc.at(key);
}

std::vector<double> parse_vector(const nlohmann::json& node, const std::string& context) {
    if (!node.is_array()) throw Error(ErrorKind::BadJson, context + ": expected an array");
    std::vector<double> out;
    out.reserve(node.size());
    for (const auto& item : node) {
        if (!item.is_number()) throw Error(ErrorKind::BadJson, context + ": expected numbers");
        out.push_back(item.get<double>());
    }
    return out;
}

Matrix parse_matrix(const nlohmann::json& node, const std::string& context) {
    if (!node.is_array() || node.empty()) {
        throw Error(ErrorKind::BadJson, context + ": expected a non-empty 2d array");
    }
    Matrix m;
    m.rows = node.size();
    m.cols = node.front().is_array() ? node.front().size() : 0;
    m.values.reserve(m.rows * m.cols);
    for (const auto& row : node) {
        if (!row.is_array() || row.size() != m.cols) {
            throw Error(ErrorKind::BadJson, context + ": ragged 2d array");
        }
        for (const auto& item : row) {
            if (!item.is_number()) throw Error(ErrorKind::BadJson, context + ": expected numbers");
            m.values.push_back(item.get<double>());
        }
    }
    return m;
}

}  // namespace

void FusionParams::validate() const {
    const std::size_t d = b.size();
    if (d == 0) throw Error(ErrorKind::BadConfig, "fusion params need d_s >= 1");
    if (w.rows != d || w.cols != 2 * d) {
        throw Error(ErrorKind::DimensionMismatch, "fusion map must be d_s x 2*d_s");
    }
    if (!std::isfinite(alpha)) throw Error(ErrorKind::NonFinite, "alpha must be finite");
    require_finite_matrix(w, "fusion map");
    require_finite(b, "fusion bias");
}

void PrimitiveBank::validate() const {
    if (primitives.empty()) throw Error(ErrorKind::BadConfig, "bank needs e >= 1 primitives");
    const std::size_t e = primitives.size();
    if (attn_w.rows != e || attn_b.size() != e) {
        throw Error(ErrorKind::DimensionMismatch, "attention map must have e rows");
    }
    const std::size_t d_m = primitives.front().b.size();
    for (const auto& p : primitives) {
        if (p.w.rows != d_m || p.w.cols != d_m || p.b.size() != d_m) {
            throw Error(ErrorKind::DimensionMismatch, "primitives must share d_m x d_m shape");
        }
        require_finite_matrix(p.w, "primitive weights");
        require_finite(p.b, "primitive bias");
    }
    require_finite_matrix(attn_w, "attention weights");
    require_finite(attn_b, "attention bias");
}

FusedStyle fuse_style(std::span<const double> speaker_style,
                      std::span<const double> audio_style, const FusionParams& params) {
    params.validate();
    const std::size_t d = params.dim();
    require_same_dim(speaker_style.size(), d, "speaker style dim");
    require_same_dim(audio_style.size(), d, "audio style dim");

    std::vector<double> stacked(2 * d);
    std::copy(speaker_style.begin(), speaker_style.end(), stacked.begin());
    std::copy(audio_style.begin(), audio_style.end(), stacked.begin() + static_cast<std::ptrdiff_t>(d));

    FusedStyle out;
    out.bias = matvec(params.w, stacked);
    for (std::size_t i = 0; i < d; ++i) out.bias[i] += params.b[i];
    out.style.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        out.style[i] = speaker_style[i] + params.alpha * out.bias[i];
    }
    return out;
}

std::vector<double> primitive_attention(std::span<const double> style,
                                        const PrimitiveBank& bank) {
    bank.validate();
    require_same_dim(style.size(), bank.style_dim(), "style dim vs attention map");
    std::vector<double> logits = matvec(bank.attn_w, style);
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += bank.attn_b[i];

    double top = logits[0];
    for (double v : logits) top = std::max(top, v);
    double denom = 0.0;
    for (double v : logits) denom += std::exp(v - top);
    std::vector<double> attention(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        attention[i] = std::exp(logits[i] - top) / denom;
    }
    return attention;
}

Primitive aggregate_primitives(std::span<const double> attention, const PrimitiveBank& bank) {
    bank.validate();
    require_same_dim(attention.size(), bank.count(), "attention length vs e");
    const std::size_t d_m = bank.motion_dim();
    Primitive out{Matrix(d_m, d_m), std::vector<double>(d_m, 0.0)};
    for (std::size_t i = 0; i < bank.count(); ++i) {
        const double pi = attention[i];
        const Primitive& p = bank.primitives[i];
        for (std::size_t e = 0; e < out.w.values.size(); ++e) {
            out.w.values[e] += pi * p.w.values[e];
        }
        for (std::size_t e = 0; e < d_m; ++e) out.b[e] += pi * p.b[e];
    }
    return out;
}

Matrix infuse_style(const Matrix& features, const Matrix& w, std::span<const double> b) {
    require_same_dim(features.cols, w.cols, "features dim vs weights");
    require_same_dim(w.rows, b.size(), "weights rows vs bias");
    Matrix out(features.rows, w.rows);
    const auto nt = static_cast<std::ptrdiff_t>(features.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        const auto z = features.row(t);
        auto dst = out.row(t);
        for (std::size_t r = 0; r < w.rows; ++r) {
            double acc = 0.0;
            const double* row = w.values.data() + r * w.cols;
            for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * z[c];
            dst[r] = acc + b[r];
        }
    }
    return out;
}

Matrix style_pipeline(std::span<const double> speaker_style,
                      std::span<const double> audio_style, const FusionParams& params,
                      const PrimitiveBank& bank, const Matrix& features) {
    const FusedStyle fused = fuse_style(speaker_style, audio_style, params);
    const std::vector<double> attention = primitive_attention(fused.style, bank);
    const Primitive mixed = aggregate_primitives(attention, bank);
    return infuse_style(features, mixed.w, mixed.b);
}

FusionParams load_fusion_params(const std::filesystem::path& path) {
    const auto doc = load_json(path);
    const std::string ctx = path.string();
    FusionParams params;
    params.w = parse_matrix(field(doc, "W_s", ctx), ctx + ": W_s");
    params.b = parse_vector(field(doc, "b_s", ctx), ctx + ": b_s");
    if (doc.contains("alpha")) {
        if (!doc.at("alpha").is_number()) throw Error(ErrorKind::BadJson, ctx + ": bad alpha");
        params.alpha = doc.at("alpha").get<double>();
    }
    if (doc.contains("d_s")) {
        const auto d = doc.at("d_s").get<std::size_t>();
        if (d != params.b.size()) {
            throw Error(ErrorKind::BadConfig, ctx + ": d_s does not match b_s length");
        }
    }
    params.validate();
    return params;
}

PrimitiveBank load_primitive_bank(const std::filesystem::path& path) {
    const auto doc = load_json(path);
    const std::string ctx = path.string();
    PrimitiveBank bank;
    bank.attn_w = parse_matrix(field(doc, "attn_W", ctx), ctx + ": attn_W");
    bank.attn_b = parse_vector(field(doc, "attn_b", ctx), ctx + ": attn_b");
    const auto& prims = field(doc, "primitives", ctx);
    if (!prims.is_array()) throw Error(ErrorKind::BadJson, ctx + ": primitives must be an array");
    for (const auto& p : prims) {
        Primitive prim;
        prim.w = parse_matrix(field(p, "W", ctx), ctx + ": primitive W");
        prim.b = parse_vector(field(p, "b", ctx), ctx + ": primitive b");
        bank.primitives.push_back(std::move(prim));
    }
    if (doc.contains("e")) {
        const auto e = doc.at("e").get<std::size_t>();
        if (e != bank.primitives.size()) {
            throw Error(ErrorKind::BadConfig, ctx + ": e does not match primitives length");
        }
    }
    if (doc.contains("d_s")) {
        const auto d = doc.at("d_s").get<std::size_t>();
        if (d != bank.attn_w.cols) {
            throw Error(ErrorKind::BadConfig, ctx + ": d_s does not match attn_W columns");
        }
    }
    if (doc.contains("d_m")) {
        const auto d = doc.at("d_m").get<std::size_t>();
        if (bank.primitives.empty() || d != bank.primitives.front().b.size()) {
            throw Error(ErrorKind::BadConfig, ctx + ": d_m does not match primitive shapes");
        }
    }
    bank.validate();
    return bank;
}

}  // namespace facekit
