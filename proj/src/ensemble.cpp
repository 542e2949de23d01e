#include "skinbench/ensemble.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace skinbench {
namespace {

double parse_number(const std::string& s, int line, const std::string& key) {
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) throw ConfigError("bad number for " + key + ": '" + s + "'", line);
    return v;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

LabelMask vote(std::span<const LabelMask> masks, std::span<const double> weights, double wtau) {
    if (masks.empty()) throw EmptyEnsemble("vote needs at least one member mask");
    if (masks.size() != weights.size()) throw std::invalid_argument("one weight per member mask is required");
    if (!(wtau > 0)) throw std::invalid_argument("wtau must be positive");
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0)) throw std::invalid_argument("vote weights must be non-negative");
        total += w;
    }
    if (!(total > 0)) throw EmptyEnsemble("total vote weight is zero");
    for (const auto& m : masks) {
        if (!m.same_shape(masks[0])) throw DimensionMismatch("member masks differ in size");
        if (m.has_dont_care()) throw std::invalid_argument("member masks must not contain don't-care labels");
    }

    const double threshold = total / wtau;
    LabelMask out(masks[0].width(), masks[0].height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double score = 0;
        for (std::size_t k = 0; k < masks.size(); ++k)
            if (masks[k][i] == Label::Skin) score += weights[k];
        out[i] = score > threshold ? Label::Skin : Label::NonSkin;
    }
    return out;
}

ProbabilityMap ingest_external_map(const std::filesystem::path& dir, const std::string& image_id, int width,
                                   int height) {
    const auto path = dir / (image_id + ".png");
    if (!std::filesystem::exists(path)) throw IoError("missing external map " + path.string());
    ProbabilityMap map = load_probability_map(path);
    if (map.width() != width || map.height() != height)
        throw DimensionMismatch("external map " + path.string() + " is " + std::to_string(map.width()) + "x" +
                                std::to_string(map.height()) + ", expected " + std::to_string(width) + "x" +
                                std::to_string(height));
    return map;
}

EnsembleConfig EnsembleConfig::parse(std::istream& in) {
    EnsembleConfig cfg;
    bool saw_wtau = false;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ss(raw);
        std::string keyword;
        if (!(ss >> keyword)) continue;
        if (keyword == "wtau") {
            std::string v, extra;
            if (!(ss >> v) || (ss >> extra)) throw ConfigError("expected: wtau <number>", lineno);
            cfg.wtau = parse_number(v, lineno, "wtau");
            saw_wtau = true;
        } else if (keyword == "member") {
            EnsembleMember m;
            bool has_name = false, has_weight = false, has_tau = false;
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + tok + "'", lineno);
                const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
                if (key == "name") {
                    m.name = value;
                    has_name = !value.empty();
                } else if (key == "tau") {
                    m.tau = parse_number(value, lineno, key);
                    has_tau = true;
                } else if (key == "weight") {
                    m.weight = parse_number(value, lineno, key);
                    has_weight = true;
                } else if (key == "map_dir") {
                    m.map_dir = value;
                } else if (key == "base") {
                    const auto b = parse_method(value);
                    if (!b) throw ConfigError("unknown base method '" + value + "'", lineno);
                    m.base = *b;
                } else {
                    throw ConfigError("unknown member field '" + key + "'", lineno);
                }
            }
            if (!has_name) throw ConfigError("member needs name=", lineno);
            if (!has_weight) throw ConfigError("member '" + m.name + "' needs weight=", lineno);
            if (m.weight < 0) throw ConfigError("member '" + m.name + "' has a negative weight", lineno);
            if (!has_tau) m.tau = m.builtin() ? default_tau(*m.builtin()) : kExternalDefaultTau;
            cfg.members.push_back(std::move(m));
        } else {
            throw ConfigError("unknown directive '" + keyword + "'", lineno);
        }
    }
    if (!saw_wtau) throw ConfigError("missing wtau line");
    return cfg;
}

EnsembleConfig EnsembleConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ensemble config " + path.string());
    return parse(in);
}

std::string EnsembleConfig::to_text() const {
    std::ostringstream out;
    out << "wtau " << format_number(wtau) << '\n';
    for (const auto& m : members) {
        out << "member name=" << m.name << " tau=" << format_number(m.tau) << " weight=" << format_number(m.weight);
        if (!m.map_dir.empty()) out << " map_dir=" << m.map_dir.string();
        if (m.base != Method::Bayes) out << " base=" << method_name(m.base);
        out << '\n';
    }
    return out.str();
}

void EnsembleConfig::validate() const {
    if (!(wtau > 1)) throw ConfigError("wtau must be greater than 1");
    if (members.empty()) throw EmptyEnsemble("ensemble has no members");
    double total = 0;
    std::string missing;
    for (const auto& m : members) {
        if (!(m.weight >= 0)) throw ConfigError("member '" + m.name + "' has a negative weight");
        total += m.weight;
        if (m.weight > 0 && !m.builtin() && m.map_dir.empty()) missing += (missing.empty() ? "" : ", ") + m.name;
    }
    if (!(total > 0)) throw EmptyEnsemble("ensemble weights sum to zero");
    if (!missing.empty()) throw ConfigError("external members without map_dir: " + missing);
}

EnsembleConfig vote_preset(int which, std::optional<double> wtau,
                           const std::map<std::string, std::filesystem::path>& map_dirs) {
    if (which < 1 || which > 4) throw std::invalid_argument("vote presets are numbered 1..4");
    const auto idx = static_cast<std::size_t>(which - 1);
    EnsembleConfig cfg;
    cfg.wtau = wtau.value_or(kVoteDefaultWtau[idx]);
    for (std::size_t k = 0; k < kVoteMemberNames.size(); ++k) {
        EnsembleMember m;
        m.name = kVoteMemberNames[k];
        m.tau = kVoteMemberTaus[k];
        m.weight = kVoteWeights[idx][k];
        if (const auto it = map_dirs.find(m.name); it != map_dirs.end()) m.map_dir = it->second;
        cfg.members.push_back(std::move(m));
    }
    return cfg;
}

std::vector<std::string> missing_models(const EnsembleConfig& cfg, const ModelSet& models) {
    std::set<std::string> missing;
    for (const auto& m : cfg.members) {
        if (m.weight == 0 || !m.builtin()) continue;
        DetectorSettings s = DetectorSettings::with_defaults(*m.builtin());
        s.base = m.base;
        for (auto& n : missing_models(s, models)) missing.insert(n);
    }
    return {missing.begin(), missing.end()};
}

LabelMask run_ensemble(const EnsembleConfig& cfg, const Image& img, const std::string& image_id,
                       const ModelSet& models) {
    cfg.validate();
    std::vector<LabelMask> masks;
    std::vector<double> weights;
    for (const auto& m : cfg.members) {
        if (m.weight == 0) continue;
        if (const auto method = m.builtin()) {
            DetectorSettings s = DetectorSettings::with_defaults(*method);
            s.tau = m.tau;
            s.base = m.base;
            masks.push_back(detect(s, img, models));
        } else {
            const Threshold8 tau(static_cast<int>(std::lround(m.tau)));
            masks.push_back(threshold_map(ingest_external_map(m.map_dir, image_id, img.width(), img.height()), tau));
        }
        weights.push_back(m.weight);
    }
    return vote(masks, weights, cfg.wtau);
}

}  // namespace skinbench
