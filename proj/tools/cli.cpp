#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "skinbench/skinbench.hpp"
#include "skinbench/parallel.hpp"

namespace skinbench::cli {
namespace {

namespace fs = std::filesystem;

struct InputItem {
    fs::path image;
    std::string id;
};

struct InputOptions {
    std::string manifest;
    std::string input_dir;
};

std::vector<InputItem> list_inputs(const InputOptions& in) {
    std::vector<InputItem> items;
    if (!in.manifest.empty()) {
        for (const auto& e : DatasetManifest::load(in.manifest).entries) items.push_back({e.image, e.id()});
    } else {
        if (!fs::is_directory(in.input_dir)) throw UsageError("input directory does not exist: " + in.input_dir);
        for (const auto& de : fs::directory_iterator(in.input_dir)) {
            if (!de.is_regular_file()) continue;
            std::string ext = de.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
            if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") items.push_back({de.path(), de.path().stem().string()});
        }
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.image < b.image; });
    }
    if (items.empty()) throw UsageError("no input images");
    return items;
}

std::string seconds_since(std::chrono::steady_clock::time_point start) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << s << "s";
    return ss.str();
}

ModelSet load_models(const std::vector<std::string>& paths) {
    ModelSet models;
    for (const auto& p : paths) models.add_file(p);
    return models;
}

std::map<std::string, fs::path> parse_map_dirs(const std::vector<std::string>& specs) {
    std::map<std::string, fs::path> out;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
            throw UsageError("--map expects name=DIR, got '" + s + "'");
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

int parse_preset(const std::string& name) {
    if (name.size() == 5 && name.rfind("vote", 0) == 0 && name[4] >= '1' && name[4] <= '4') return name[4] - '0';
    throw UsageError("unknown preset '" + name + "' (expected vote1..vote4)");
}

std::vector<double> parse_taus(const std::string& list) {
    std::vector<double> taus;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            taus.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("bad threshold list '" + list + "'");
        }
    }
    if (taus.empty()) throw UsageError("empty threshold list");
    return taus;
}

// Runs fn(i) per input with results kept in input order. Failures are
// reported per image and counted.
template <class Fn>
int for_each_image(const std::vector<InputItem>& items, int workers, std::ostream& err, Fn&& fn) {
    std::vector<std::string> errors(items.size());
    parallel_for(items.size(), workers, [&](std::size_t i) {
        try {
            fn(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    int failed = 0;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (!errors[i].empty()) {
            ++failed;
            err << "error: " << items[i].image.string() << ": " << errors[i] << '\n';
        }
    return failed;
}

struct TrainArgs {
    std::string method;
    std::string manifest;
    std::string output;
    int bins = HistogramModel::default_bins;
    int components = 16;
    std::uint64_t seed = 0;
    std::size_t max_samples = 50000;
    double mass = 0.95;
    std::string base;
    std::vector<std::string> models;
    std::size_t stride = 16;
    int workers = 1;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const DatasetManifest manifest = DatasetManifest::load(a.manifest);
    if (a.method == "bayes" || a.method == "spl") {
        HistogramModel m = train_histogram(manifest, a.bins, a.workers);
        save_model_file(m, a.output);
        out << "trained " << a.method << ": pixels=" << m.skin_total() + m.nonskin_total() << " skin=" << m.skin_total()
            << " bins=" << m.bins() << " duration=" << seconds_since(start) << '\n';
    } else if (a.method == "gmm") {
        const auto [skin, nonskin] = collect_samples(manifest, a.max_samples, a.seed);
        GmmOptions opt;
        opt.components = a.components;
        opt.seed = a.seed;
        GmmModel m = train_gmm(skin, nonskin, opt);
        save_model_file(m, a.output);
        out << "trained gmm: samples=" << skin.size() + nonskin.size() << " K=" << a.components
            << " duration=" << seconds_since(start) << '\n';
    } else if (a.method == "cheddad") {
        CheddadModel m = train_cheddad(manifest, a.mass);
        save_model_file(m, a.output);
        out << "trained cheddad: interval=[" << m.e_lo << "," << m.e_hi << "] mean=" << m.e_mean << " std=" << m.e_std
            << " duration=" << seconds_since(start) << '\n';
    } else if (a.method == "lda") {
        if (a.base.empty()) throw UsageError("train lda needs --base <bayes|gmm|spl|cheddad>");
        const auto base = parse_method(a.base);
        if (!base) throw UsageError("unknown base method '" + a.base + "'");
        const ModelSet models = load_models(a.models);
        const LdaFit fit = train_lda_from_manifest(manifest, DetectorSettings::with_defaults(*base), models, a.stride);
        save_model_file(fit.model, a.output);
        out << "trained lda: base=" << a.base << " separation=" << fit.separation << " duration=" << seconds_since(start)
            << '\n';
        if (fit.low_separation) out << "warning: classes are barely separable in feature space\n";
    } else {
        throw UsageError("cannot train '" + a.method + "' (expected bayes, spl, gmm, cheddad or lda)");
    }
    return kExitOk;
}

struct DetectArgs {
    std::string method;
    InputOptions input;
    std::string output;
    std::vector<std::string> models;
    std::optional<double> tau;
    std::string base = "bayes";
    std::string dump_maps;
    int seed_threshold = 230;
    bool chen_flip = false;
    std::vector<int> chen_bounds;
    std::optional<double> dyc_quantile;
    std::optional<double> dyc_delta;
    int workers = 1;
};

int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
    const auto method = parse_method(a.method);
    if (!method) throw UsageError("unknown method '" + a.method + "'");
    const auto base = parse_method(a.base);
    if (!base) throw UsageError("unknown base method '" + a.base + "'");
    DetectorSettings s = DetectorSettings::with_defaults(*method);
    if (a.tau) s.tau = *a.tau;
    s.base = *base;
    s.seed_threshold = Threshold8(a.seed_threshold);
    s.chen.sign_flip = a.chen_flip;
    if (!a.chen_bounds.empty()) {
        if (a.chen_bounds.size() != 6) throw UsageError("--chen-bounds expects six integers");
        const auto& b = a.chen_bounds;
        s.chen.lo_r = b[0], s.chen.hi_r = b[1], s.chen.lo_g = b[2], s.chen.hi_g = b[3], s.chen.lo_b = b[4],
        s.chen.hi_b = b[5];
    }
    if (a.dyc_quantile) s.dyc.quantile = *a.dyc_quantile;
    if (a.dyc_delta) s.dyc.delta = *a.dyc_delta;
    s.chen.validate();
    s.dyc.validate();

    const ModelSet models = load_models(a.models);
    require_models(s, models);
    const auto items = list_inputs(a.input);
    fs::create_directories(a.output);
    if (!a.dump_maps.empty()) fs::create_directories(a.dump_maps);

    const int failed = for_each_image(items, a.workers, err, [&](std::size_t i) {
        const Image img = load_image(items[i].image);
        save_mask(detect(s, img, models), fs::path(a.output) / (items[i].id + ".png"));
        if (!a.dump_maps.empty())
            save_probability_map(probability_map(s, img, models), fs::path(a.dump_maps) / (items[i].id + ".png"));
    });
    out << "detect " << a.method << ": " << items.size() - static_cast<std::size_t>(failed) << "/" << items.size()
        << " images\n";
    return failed == 0 ? kExitOk : kExitFailure;
}

struct EnsembleArgs {
    std::string config;
    std::string preset;
    std::optional<double> wtau;
    std::vector<std::string> maps;
    InputOptions input;
    std::string output;
    std::vector<std::string> models;
    int workers = 1;
};

int cmd_ensemble(const EnsembleArgs& a, std::ostream& out, std::ostream& err) {
    if (a.config.empty() == a.preset.empty()) throw UsageError("ensemble needs exactly one of --config or --preset");
    EnsembleConfig cfg = a.config.empty() ? vote_preset(parse_preset(a.preset), a.wtau, parse_map_dirs(a.maps))
                                          : EnsembleConfig::load(a.config);
    if (!a.config.empty()) {
        if (a.wtau) cfg.wtau = *a.wtau;
        for (const auto& [name, dir] : parse_map_dirs(a.maps))
            for (auto& m : cfg.members)
                if (m.name == name) m.map_dir = dir;
    }
    cfg.validate();
    const ModelSet models = load_models(a.models);
    if (const auto missing = missing_models(cfg, models); !missing.empty()) {
        std::string msg = "ensemble members need model(s):";
        for (const auto& m : missing) msg += " " + m;
        throw UsageError(msg);
    }
    const auto items = list_inputs(a.input);
    fs::create_directories(a.output);
    const int failed = for_each_image(items, a.workers, err, [&](std::size_t i) {
        const Image img = load_image(items[i].image);
        save_mask(run_ensemble(cfg, img, items[i].id, models), fs::path(a.output) / (items[i].id + ".png"));
    });
    out << "ensemble: " << items.size() - static_cast<std::size_t>(failed) << "/" << items.size() << " images\n";
    return failed == 0 ? kExitOk : kExitFailure;
}

struct EvalArgs {
    std::string pred;
    std::string manifest;
    std::string method;
    std::string dataset;
    bool group_average = false;
    std::string sweep;
    bool ap = false;
    std::string report;
    int workers = 1;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    const DatasetManifest manifest = DatasetManifest::load(a.manifest);
    if (manifest.empty()) throw UsageError("manifest is empty");
    std::vector<fs::path> preds;
    std::string missing;
    for (const auto& e : manifest.entries) {
        preds.push_back(fs::path(a.pred) / (e.id() + ".png"));
        if (!fs::exists(preds.back())) missing += (missing.empty() ? "" : ", ") + e.id();
    }
    if (!missing.empty()) throw MissingPrediction("no prediction for: " + missing);

    ReportRow proto;
    proto.method = a.method.empty() ? fs::path(a.pred).filename().string() : a.method;
    proto.dataset = a.dataset.empty() ? fs::path(a.manifest).stem().string() : a.dataset;
    std::vector<ReportRow> rows;
    const std::size_t n = manifest.size();

    auto need_masks = [&] {
        for (const auto& e : manifest.entries)
            if (e.mask.empty()) throw UsageError("manifest entry without a ground-truth mask: " + e.image.string());
    };

    if (a.ap) {
        std::vector<ApSample> samples(n);
        parallel_for(n, a.workers, [&](std::size_t i) {
            const auto& g = manifest.entries[i].group;
            if (g != "face" && g != "nonface")
                throw UsageError("--ap needs group 'face' or 'nonface' for " + manifest.entries[i].image.string());
            samples[i] = {g == "face", skin_fraction(load_mask(preds[i]))};
        });
        ReportRow r = proto;
        r.ap = average_precision(samples);
        rows.push_back(r);
    } else if (!a.sweep.empty()) {
        need_masks();
        const auto taus = parse_taus(a.sweep);
        std::vector<ProbabilityMap> maps;
        std::vector<LabelMask> truth;
        std::vector<std::optional<ProbabilityMap>> map_slots(n);
        std::vector<std::optional<LabelMask>> truth_slots(n);
        parallel_for(n, a.workers, [&](std::size_t i) {
            map_slots[i] = load_probability_map(preds[i]);
            truth_slots[i] = load_mask(manifest.entries[i].mask);
        });
        for (std::size_t i = 0; i < n; ++i) {
            maps.push_back(std::move(*map_slots[i]));
            truth.push_back(std::move(*truth_slots[i]));
        }
        std::vector<Threshold8> t8;
        for (double t : taus) {
            if (t != std::round(t) || t < 0 || t > 255) throw UsageError("sweep thresholds must be integers in [0,255]");
            t8.emplace_back(static_cast<int>(t));
        }
        for (const auto& s : threshold_sweep(maps, truth, t8)) {
            ReportRow r = proto;
            r.tau = s.tau;
            r.metrics = s.metrics;
            rows.push_back(r);
        }
    } else {
        need_masks();
        std::vector<ConfusionCounts> counts(n);
        parallel_for(n, a.workers,
                     [&](std::size_t i) { counts[i] = confusion(load_mask(preds[i]), load_mask(manifest.entries[i].mask)); });
        ReportRow r = proto;
        if (a.group_average) {
            std::vector<GroupedCounts> grouped;
            for (std::size_t i = 0; i < n; ++i) grouped.push_back({manifest.entries[i].group, counts[i]});
            r.metrics = group_average(grouped);
        } else {
            r.metrics = aggregate_pixel_level(counts);
        }
        if (r.metrics->degenerate) err << "warning: some metric had a zero denominator and was set to 0\n";
        rows.push_back(r);
    }

    if (a.report.empty()) {
        write_report_csv(out, rows);
    } else {
        std::ofstream f(a.report);
        if (!f) throw IoError("cannot write report " + a.report);
        write_report_csv(f, rows);
        out << "wrote " << rows.size() << " row(s) to " << a.report << '\n';
    }
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& reports, const std::string& output, std::ostream& out) {
    std::vector<ReportRow> rows;
    for (const auto& p : reports) {
        std::ifstream in(p);
        if (!in) throw IoError("cannot open report " + p);
        auto r = read_report_csv(in);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const Comparison c = compare_reports(rows);
    if (output.empty()) {
        write_comparison_csv(out, c);
    } else {
        std::ofstream f(output);
        if (!f) throw IoError("cannot write " + output);
        write_comparison_csv(f, c);
        out << "ranked " << c.methods.size() << " method(s) over " << c.datasets.size() << " dataset(s)\n";
    }
    return kExitOk;
}

int cmd_preset(const std::string& name, std::optional<double> wtau, const std::vector<std::string>& maps,
               const std::string& output, std::ostream& out) {
    const EnsembleConfig cfg = vote_preset(parse_preset(name), wtau, parse_map_dirs(maps));
    const std::string text = "# " + name + "\n" + cfg.to_text();
    if (output.empty()) {
        out << text;
    } else {
        std::ofstream f(output);
        if (!f) throw IoError("cannot write " + output);
        f << text;
    }
    return kExitOk;
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
    auto* m = cmd->add_option("--manifest", in.manifest, "Manifest listing the input images");
    auto* d = cmd->add_option("--input-dir", in.input_dir, "Directory of PNG/JPEG images");
    m->excludes(d);
    d->excludes(m);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Skin detector toolkit and comparison harness", "skinbench"};
    app.require_subcommand(1);
    const int default_worker_count = default_workers();

    TrainArgs train;
    train.workers = default_worker_count;
    auto* t = app.add_subcommand("train", "Train a detector model from a labelled manifest");
    t->add_option("method", train.method, "bayes, spl, gmm, cheddad or lda")->required();
    t->add_option("--manifest", train.manifest, "Training manifest")->required();
    t->add_option("-o,--output", train.output, "Model file to write")->required();
    t->add_option("--bins", train.bins, "Histogram bins per channel (power of two)");
    t->add_option("--components", train.components, "GMM components per class");
    t->add_option("--seed", train.seed, "Seed for GMM initialisation and sampling");
    t->add_option("--max-samples", train.max_samples, "GMM samples kept per class");
    t->add_option("--mass", train.mass, "Cheddad interval mass");
    t->add_option("--base", train.base, "Probability detector whose maps feed the LDA");
    t->add_option("--model", train.models, "Model file for the LDA base detector (repeatable)");
    t->add_option("--stride", train.stride, "LDA: keep every n-th labelled pixel");
    t->add_option("--workers", train.workers, "Worker threads");

    DetectArgs det;
    det.workers = default_worker_count;
    auto* d = app.add_subcommand("detect", "Run one detector over a set of images");
    d->add_option("method", det.method, "gmm, bayes, spl, cheddad, chen, sa1, sa2, sa3 or dyc")->required();
    add_input_options(d, det.input);
    d->add_option("-o,--output", det.output, "Output directory for masks")->required();
    d->add_option("--model", det.models, "Model file (repeatable)");
    d->add_option("--tau", det.tau, "Decision threshold");
    d->add_option("--base", det.base, "Probability source for sa1/sa2/sa3");
    d->add_option("--dump-maps", det.dump_maps, "Also write 8-bit probability maps here");
    d->add_option("--seed-threshold", det.seed_threshold, "Fixed seed threshold (0-255) for sa1/sa2");
    d->add_flag("--chen-flip", det.chen_flip, "Negate the Chen channel differences");
    d->add_option("--chen-bounds", det.chen_bounds, "loR hiR loG hiG loB hiB")->expected(6);
    d->add_option("--dyc-quantile", det.dyc_quantile, "DYC dynamic range quantile");
    d->add_option("--dyc-delta", det.dyc_delta, "DYC correlation tolerance");
    d->add_option("--workers", det.workers, "Worker threads");

    EnsembleArgs ens;
    ens.workers = default_worker_count;
    auto* e = app.add_subcommand("ensemble", "Fuse detectors with the weighted vote rule");
    e->add_option("--config", ens.config, "Ensemble config file");
    e->add_option("--preset", ens.preset, "vote1..vote4");
    e->add_option("--wtau", ens.wtau, "Vote sensitivity divisor");
    e->add_option("--map", ens.maps, "External member maps as name=DIR (repeatable)");
    add_input_options(e, ens.input);
    e->add_option("-o,--output", ens.output, "Output directory for masks")->required();
    e->add_option("--model", ens.models, "Model file (repeatable)");
    e->add_option("--workers", ens.workers, "Worker threads");

    EvalArgs ev;
    ev.workers = default_worker_count;
    auto* v = app.add_subcommand("eval", "Score predictions against a manifest");
    v->add_option("--pred", ev.pred, "Directory of predicted masks (or maps with --sweep)")->required();
    v->add_option("--manifest", ev.manifest, "Evaluation manifest")->required();
    v->add_option("--method", ev.method, "Method name for the report");
    v->add_option("--dataset", ev.dataset, "Dataset name for the report");
    v->add_flag("--group-average", ev.group_average, "Average pixel-level metrics over manifest groups");
    v->add_option("--sweep", ev.sweep, "Comma-separated thresholds applied to probability maps");
    v->add_flag("--ap", ev.ap, "Face/non-face average precision (groups 'face'/'nonface')");
    v->add_option("-o,--report", ev.report, "CSV report path (stdout when omitted)");
    v->add_option("--workers", ev.workers, "Worker threads");

    std::vector<std::string> reports;
    std::string compare_out;
    auto* c = app.add_subcommand("compare", "Merge reports into a ranked table");
    c->add_option("reports", reports, "Report CSV files")->required();
    c->add_option("-o,--output", compare_out, "Ranked table CSV (stdout when omitted)");

    std::string preset_name, preset_out;
    std::optional<double> preset_wtau;
    std::vector<std::string> preset_maps;
    auto* p = app.add_subcommand("preset", "Print a built-in ensemble configuration");
    p->add_option("name", preset_name, "vote1..vote4")->required();
    p->add_option("--wtau", preset_wtau, "Vote sensitivity divisor");
    p->add_option("--map", preset_maps, "External member maps as name=DIR (repeatable)");
    p->add_option("-o,--output", preset_out, "Write the config here (stdout when omitted)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*t) return cmd_train(train, out);
        if (*d) return cmd_detect(det, out, err);
        if (*e) return cmd_ensemble(ens, out, err);
        if (*v) return cmd_eval(ev, out, err);
        if (*c) return cmd_compare(reports, compare_out, out);
        if (*p) return cmd_preset(preset_name, preset_wtau, preset_maps, preset_out, out);
    } catch (const UsageError& ex) {
        err << "usage error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& ex) {
        err << "config error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace skinbench::cli
