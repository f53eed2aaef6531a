// facekit command-line front end: evaluation metrics, feature extraction,
// losses, style math, synthetic corpus generation and the discriminability
// experiment. All structured output is JSON with 17-significant-digit
// numbers; exit codes are 0 (ok), 2 (input/format), 3 (dimension/contract),
// 4 (numerical domain).

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "facekit/format.hpp"
#include "facekit/losses.hpp"
#include "facekit/metrics.hpp"
#include "facekit/motion.hpp"
#include "facekit/spectral.hpp"
#include "facekit/style.hpp"
#include "facekit/synth.hpp"
#include "facekit/threading.hpp"

namespace fs = std::filesystem;
using facekit::Error;
using facekit::ErrorKind;
using facekit::Matrix;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::string json_array(std::span<const double> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += facekit::format_g17(values[i]);
    }
    out.push_back(']');
    return out;
}

std::string json_matrix(const Matrix& m) {
    std::string out = "[";
    for (std::size_t r = 0; r < m.rows; ++r) {
        if (r > 0) out.push_back(',');
        out += json_array(m.row(r));
    }
    out.push_back(']');
    return out;
}

nlohmann::json load_json(const fs::path& path) {
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

std::vector<double> json_to_vector(const nlohmann::json& node, const std::string& what) {
    if (!node.is_array()) throw Error(ErrorKind::BadJson, what + ": expected an array");
    std::vector<double> out;
    for (const auto& item : node) {
        if (!item.is_number()) throw Error(ErrorKind::BadJson, what + ": expected numbers");
        out.push_back(item.get<double>());
    }
    return out;
}

Matrix json_to_matrix(const nlohmann::json& node, const std::string& what) {
    if (!node.is_array() || node.empty()) {
        throw Error(ErrorKind::BadJson, what + ": expected a non-empty 2d array");
    }
    Matrix m;
    m.rows = node.size();
    m.cols = node.front().is_array() ? node.front().size() : 0;
    for (const auto& row : node) {
        if (!row.is_array() || row.size() != m.cols) {
            throw Error(ErrorKind::BadJson, what + ": ragged 2d array");
        }
        for (const auto& item : row) {
            if (!item.is_number()) throw Error(ErrorKind::BadJson, what + ": expected numbers");
            m.values.push_back(item.get<double>());
        }
    }
    return m;
}

const nlohmann::json& need_key(const nlohmann::json& doc, const char* key,
                               const std::string& what) {
    if (!doc.contains(key)) throw Error(ErrorKind::MissingKey, what + ": missing \"" + key + "\"");
    return doc.at(key);
}

/// Feature series CSV: one header row, then one row per frame, every column
/// numeric. Returns a [T][d] matrix.
Matrix read_series_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::BadConfig, path.string() + ": empty CSV");
    }
    Matrix m;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error(ErrorKind::BadConfig,
                            path.string() + ": bad numeric cell \"" + cell + "\"");
            }
        }
        if (m.rows == 0) {
            m.cols = row.size();
        } else if (row.size() != m.cols) {
            throw Error(ErrorKind::BadConfig, path.string() + ": ragged CSV row");
        }
        m.rows += 1;
        m.values.insert(m.values.end(), row.begin(), row.end());
    }
    if (m.rows == 0) throw Error(ErrorKind::BadConfig, path.string() + ": CSV has no data rows");
    return m;
}

int cmd_info(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + file);
    char magic[4] = {};
    in.read(magic, 4);
    const std::string tag(magic, in.gcount() > 4 ? 4 : static_cast<std::size_t>(in.gcount()));
    in.close();
    if (tag == "FMOT") {
        const auto seq = facekit::read_fmot(file);
        std::cout << "{\"format\":\"FMOT\",\"frames\":" << seq.frame_count()
                  << ",\"vertices\":" << seq.vertex_count()
                  << ",\"fps\":" << facekit::format_g17(seq.fps()) << "}\n";
        return 0;
    }
    if (tag == "FTPL") {
        const auto tpl = facekit::read_ftpl(file);
        std::cout << "{\"format\":\"FTPL\",\"vertices\":" << tpl.vertex_count() << "}\n";
        return 0;
    }
    throw Error(ErrorKind::BadMagic, file + ": not an FMOT or FTPL file");
}

int cmd_eval(const std::string& pred_arg, const std::string& gt_arg, const std::string& mask_path,
             const std::string& metrics_arg, std::size_t bins, const std::string& out_path) {
    const auto preds = split_list(pred_arg);
    const auto gts = split_list(gt_arg);
    if (preds.empty() || preds.size() != gts.size()) {
        throw Error(ErrorKind::BadArgument, "--pred and --gt need the same number of files");
    }

    facekit::MetricSelection selection;
    if (!metrics_arg.empty()) {
        selection = {false, false, false, false, false};
        for (const auto& name : split_list(metrics_arg)) {
            if (name == "lve") selection.lve = true;
            else if (name == "fve") selection.fve = true;
            else if (name == "fdtw") selection.fdtw = true;
            else if (name == "fdd") selection.fdd = true;
            else if (name == "ffe") selection.ffe = true;
            else throw Error(ErrorKind::BadArgument, "unknown metric \"" + name + "\"");
        }
    }
    const facekit::SpectralConfig cfg{bins};

    std::vector<facekit::SequenceMetrics> rows;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto pred = facekit::read_fmot(preds[i]);
        const auto gt = facekit::read_fmot(gts[i]);
        const auto mask = facekit::read_mask(mask_path, pred.vertex_count());
        rows.push_back(facekit::evaluate_pair(fs::path(preds[i]).stem().string(), pred, gt, mask,
                                              selection, cfg));
    }
    write_text(out_path, facekit::report_to_json(facekit::make_report(std::move(rows))) + "\n");
    return 0;
}

int cmd_features(const std::string& in_path, const std::string& kind, std::size_t bins,
                 const std::string& out_path) {
    const auto seq = facekit::read_fmot(in_path);
    std::ostringstream csv;
    if (kind == "std") {
        facekit::write_std_csv(csv, facekit::std_vector(seq));
    } else if (kind == "freq") {
        facekit::write_frequency_csv(csv, facekit::frequency_matrix(seq, {bins}));
    } else if (kind == "composite-mean" || kind == "composite-max") {
        const auto mode = kind == "composite-mean" ? facekit::CompositeMode::Mean
                                                   : facekit::CompositeMode::Max;
        // Treat the sequence as a [T][3N] series, one column per channel.
        Matrix series(seq.frame_count(), seq.vertex_count() * 3);
        std::copy(seq.values().begin(), seq.values().end(), series.values.begin());
        facekit::write_composite_csv(csv, facekit::composite_stats(series, mode), series.cols,
                                     mode);
    } else {
        throw Error(ErrorKind::BadArgument,
                    "unknown kind \"" + kind +
                        "\" (expected std|freq|composite-mean|composite-max)");
    }
    write_text(out_path, csv.str());
    return 0;
}

int cmd_loss(const std::string& pred_path, const std::string& gt_path,
             const std::string& config_path, const std::string& out_path) {
    const auto doc = load_json(config_path);
    const fs::path base = fs::path(config_path).parent_path();
    const std::string ctx = config_path;

    facekit::TrendConfig trend_cfg;
    facekit::ContrastiveConfig con_cfg;
    facekit::LossWeights weights;
    if (doc.contains("R")) trend_cfg.max_order = doc.at("R").get<std::size_t>();
    if (doc.contains("tau")) con_cfg.temperature = doc.at("tau").get<double>();
    if (doc.contains("k")) con_cfg.window = doc.at("k").get<std::size_t>();
    if (doc.contains("lambda")) con_cfg.direction_weight = doc.at("lambda").get<double>();
    if (doc.contains("weights")) {
        const auto& w = doc.at("weights");
        if (w.contains("rec")) weights.rec = w.at("rec").get<double>();
        if (w.contains("s")) weights.s = w.at("s").get<double>();
        if (w.contains("tre")) weights.tre = w.at("tre").get<double>();
        if (w.contains("lcon")) weights.lcon = w.at("lcon").get<double>();
    }

    const auto pred = facekit::read_fmot(pred_path);
    const auto gt = facekit::read_fmot(gt_path);

    facekit::LossParts parts;
    bool have_style = false;
    bool have_contrastive = false;
    parts.rec = facekit::rec_loss(pred, gt).value;
    parts.tre = facekit::trend_loss(pred, gt, trend_cfg).value;

    if (doc.contains("style")) {
        const auto& s = doc.at("style");
        parts.s = facekit::style_loss(json_to_vector(need_key(s, "pred", ctx), ctx),
                                      json_to_vector(need_key(s, "gt", ctx), ctx),
                                      json_to_vector(need_key(s, "speaker", ctx), ctx),
                                      json_to_vector(need_key(s, "mean", ctx), ctx));
        have_style = true;
    }
    if (doc.contains("contrastive")) {
        const auto& c = doc.at("contrastive");
        const auto audio = read_series_csv(base / need_key(c, "audio", ctx).get<std::string>());
        const auto motion = read_series_csv(base / need_key(c, "motion", ctx).get<std::string>());
        const auto wdoc = load_json(base / need_key(c, "w_l", ctx).get<std::string>());
        const Matrix align = json_to_matrix(need_key(wdoc, "W_l", ctx), ctx + ": W_l");
        parts.lcon = facekit::local_contrastive_loss(audio, motion, align, con_cfg).value;
        have_contrastive = true;
    }

    const double value = facekit::total_loss(parts, weights);
    std::string out = "{\"value\":" + facekit::format_g17(value) + ",\"parts\":{";
    out += "\"rec\":" + facekit::format_g17(parts.rec);
    if (have_style) out += ",\"s\":" + facekit::format_g17(parts.s);
    out += ",\"tre\":" + facekit::format_g17(parts.tre);
    if (have_contrastive) out += ",\"lcon\":" + facekit::format_g17(parts.lcon);
    out += "}}\n";
    write_text(out_path, out);
    return 0;
}

int cmd_style(const std::string& op, const std::string& params_path,
              const std::string& bank_path, const std::string& in_path,
              const std::string& out_path) {
    const auto doc = load_json(in_path);
    const std::string ctx = in_path;
    std::string out;
    if (op == "fuse") {
        if (params_path.empty()) throw Error(ErrorKind::BadArgument, "fuse needs --params");
        const auto params = facekit::load_fusion_params(params_path);
        const auto fused = facekit::fuse_style(json_to_vector(need_key(doc, "S_r", ctx), ctx),
                                               json_to_vector(need_key(doc, "S_a", ctx), ctx),
                                               params);
        out = "{\"S_g_hat\":" + json_array(fused.style) + ",\"S_bias\":" + json_array(fused.bias) +
              "}\n";
    } else if (op == "infuse") {
        const Matrix features = json_to_matrix(need_key(doc, "Z", ctx), ctx + ": Z");
        const Matrix w = json_to_matrix(need_key(doc, "W", ctx), ctx + ": W");
        const auto b = json_to_vector(need_key(doc, "b", ctx), ctx + ": b");
        out = "{\"Z_s\":" + json_matrix(facekit::infuse_style(features, w, b)) + "}\n";
    } else if (op == "pipeline") {
        if (params_path.empty() || bank_path.empty()) {
            throw Error(ErrorKind::BadArgument, "pipeline needs --params and --bank");
        }
        const auto params = facekit::load_fusion_params(params_path);
        const auto bank = facekit::load_primitive_bank(bank_path);
        const Matrix features = json_to_matrix(need_key(doc, "Z", ctx), ctx + ": Z");
        const Matrix infused = facekit::style_pipeline(
            json_to_vector(need_key(doc, "S_r", ctx), ctx),
            json_to_vector(need_key(doc, "S_a", ctx), ctx), params, bank, features);
        out = "{\"Z_s\":" + json_matrix(infused) + "}\n";
    } else {
        throw Error(ErrorKind::BadArgument,
                    "unknown op \"" + op + "\" (expected fuse|infuse|pipeline)");
    }
    write_text(out_path, out);
    return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    const auto spec = facekit::load_synth_spec(config_path);
    const auto corpus = facekit::generate_corpus(spec.config, spec.profiles);

    fs::create_directories(out_dir);
    std::vector<facekit::ManifestEntry> manifest;
    std::size_t index = 0;
    std::string last_speaker;
    for (const auto& entry : corpus) {
        if (entry.speaker != last_speaker) {
            last_speaker = entry.speaker;
            index = 0;
        }
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "_%03zu.fmot", index++);
        const std::string name = entry.speaker + suffix;
        facekit::write_fmot(entry.sequence, fs::path(out_dir) / name);
        manifest.push_back({name, entry.speaker});
    }
    facekit::write_manifest(fs::path(out_dir) / "manifest.json", manifest);
    return 0;
}

int cmd_experiment(const std::string& manifest_path, std::size_t bins,
                   const std::string& out_path) {
    const auto entries = facekit::read_manifest(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();
    std::vector<facekit::CorpusEntry> corpus;
    corpus.reserve(entries.size());
    for (const auto& e : entries) {
        corpus.push_back({e.speaker, facekit::read_fmot(base / e.file)});
    }
    const auto result = facekit::discriminability_from_corpus(corpus, {bins});
    write_text(out_path, "{\"std_accuracy\":" + facekit::format_g17(result.std_accuracy) +
                             ",\"freq_accuracy\":" + facekit::format_g17(result.freq_accuracy) +
                             "}\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"facial motion metrics, losses, style math and synthetic benchmark"};
    app.require_subcommand(1);

    std::string file, pred, gt, mask, metrics, out, in, kind, config, op, params, bank;
    std::string manifest, out_dir;
    std::size_t bins = 20;
    int threads = 0;

    auto* info = app.add_subcommand("info", "describe an FMOT/FTPL file");
    info->add_option("file", file)->required();

    auto* eval = app.add_subcommand("eval", "evaluate metrics on sequence pairs");
    eval->add_option("--pred", pred, "prediction file(s), comma separated")->required();
    eval->add_option("--gt", gt, "ground-truth file(s), comma separated")->required();
    eval->add_option("--mask", mask, "region mask JSON")->required();
    eval->add_option("--metrics", metrics, "subset of lve,fve,fdtw,fdd,ffe");
    eval->add_option("--bins", bins, "retained DFT bins");
    eval->add_option("--threads", threads, "thread cap");
    eval->add_option("--out", out)->required();

    auto* features = app.add_subcommand("features", "export feature CSV");
    features->add_option("--in", in)->required();
    features->add_option("--kind", kind, "std|freq|composite-mean|composite-max")->required();
    features->add_option("--bins", bins, "retained DFT bins");
    features->add_option("--threads", threads, "thread cap");
    features->add_option("--out", out)->required();

    auto* loss = app.add_subcommand("loss", "compute training losses");
    loss->add_option("--pred", pred)->required();
    loss->add_option("--gt", gt)->required();
    loss->add_option("--config", config)->required();
    loss->add_option("--threads", threads, "thread cap");
    loss->add_option("--out", out)->required();

    auto* style = app.add_subcommand("style", "style fusion / infusion");
    style->add_option("--op", op, "fuse|infuse|pipeline")->required();
    style->add_option("--params", params, "fusion params JSON");
    style->add_option("--bank", bank, "primitive bank JSON");
    style->add_option("--in", in)->required();
    style->add_option("--threads", threads, "thread cap");
    style->add_option("--out", out)->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--config", config)->required();
    synth->add_option("--out-dir", out_dir)->required();

    auto* experiment = app.add_subcommand("experiment", "style discriminability experiment");
    experiment->add_option("--manifest", manifest)->required();
    experiment->add_option("--bins", bins, "retained DFT bins");
    experiment->add_option("--threads", threads, "thread cap");
    experiment->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (threads > 0) facekit::set_thread_cap(threads);
        if (info->parsed()) return cmd_info(file);
        if (eval->parsed()) return cmd_eval(pred, gt, mask, metrics, bins, out);
        if (features->parsed()) return cmd_features(in, kind, bins, out);
        if (loss->parsed()) return cmd_loss(pred, gt, config, out);
        if (style->parsed()) return cmd_style(op, params, bank, in, out);
        if (synth->parsed()) return cmd_synth(config, out_dir);
        if (experiment->parsed()) return cmd_experiment(manifest, bins, out);
    } catch (const Error& e) {
        std::cerr << "error [" << facekit::error_kind_name(e.kind()) << "]: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
