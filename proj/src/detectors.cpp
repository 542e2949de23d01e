#include "skinbench/detectors.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace skinbench {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 9> kNames{{
    {Method::Gmm, "gmm"},
    {Method::Bayes, "bayes"},
    {Method::Spl, "spl"},
    {Method::Cheddad, "cheddad"},
    {Method::Chen, "chen"},
    {Method::Sa1, "sa1"},
    {Method::Sa2, "sa2"},
    {Method::Sa3, "sa3"},
    {Method::Dyc, "dyc"},
}};

bool is_spatial(Method m) { return m == Method::Sa1 || m == Method::Sa2 || m == Method::Sa3; }

bool is_probability_source(Method m) {
    return m == Method::Bayes || m == Method::Gmm || m == Method::Spl || m == Method::Cheddad;
}

void model_slots(Method m, std::vector<std::string>& out) {
    switch (m) {
        case Method::Bayes:
        case Method::Spl: out.emplace_back("histogram"); break;
        case Method::Gmm: out.emplace_back("gmm"); break;
        case Method::Cheddad: out.emplace_back("cheddad"); break;
        default: break;
    }
}

ProbabilityMap source_map(Method m, const Image& img, const ModelSet& models) {
    switch (m) {
        case Method::Bayes: return bayes_map(*models.histogram, img);
        case Method::Spl: return spl_map(*models.histogram, img);
        case Method::Gmm: return gmm_map(*models.gmm, img);
        case Method::Cheddad: return cheddad_detect(img, *models.cheddad);
        default: throw UsageError("not a probability detector: " + std::string(method_name(m)));
    }
}

ProbabilityMap from_mask(const LabelMask& mask) {
    ProbabilityMap out(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] == Label::Skin ? 1.0 : 0.0;
    return out;
}

Threshold8 to_threshold8(double tau) {
    const double r = std::round(tau);
    if (r != tau) throw UsageError("threshold must be an integer in [0,255], got " + std::to_string(tau));
    return Threshold8(static_cast<int>(r));
}

}  // namespace

std::string_view method_name(Method m) noexcept {
    for (const auto& [k, v] : kNames)
        if (k == m) return v;
    return "?";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    for (const auto& [k, v] : kNames)
        if (v == name) return k;
    return std::nullopt;
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> all = [] {
        std::vector<Method> v;
        for (const auto& [k, name] : kNames) v.push_back(k);
        return v;
    }();
    return all;
}

double default_tau(Method m) noexcept {
    switch (m) {
        case Method::Bayes: return 110;
        case Method::Spl: return -2;
        case Method::Cheddad: return 125;
        case Method::Gmm: return 128;
        case Method::Sa1: return 175;
        case Method::Sa2: return 50;
        case Method::Sa3: return 50;
        case Method::Chen:
        case Method::Dyc: return 0;
    }
    return 0;
}

bool uses_tau(Method m) noexcept { return m != Method::Chen && m != Method::Dyc; }

void ModelSet::add(AnyModel m) {
    std::visit(
        [this](auto&& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HistogramModel>) histogram = std::move(v);
            else if constexpr (std::is_same_v<T, GmmModel>) gmm = std::move(v);
            else if constexpr (std::is_same_v<T, CheddadModel>) cheddad = std::move(v);
            else lda = std::move(v);
        },
        std::move(m));
}

void ModelSet::add_file(const std::filesystem::path& path) { add(load_model_file(path)); }

DetectorSettings DetectorSettings::with_defaults(Method m) {
    DetectorSettings s;
    s.method = m;
    s.tau = default_tau(m);
    return s;
}

std::vector<std::string> missing_models(const DetectorSettings& s, const ModelSet& models) {
    std::vector<std::string> need;
    if (is_spatial(s.method)) {
        if (!is_probability_source(s.base))
            throw UsageError("spatial detectors need a probability base (bayes, gmm, spl, cheddad), got " +
                             std::string(method_name(s.base)));
        model_slots(s.base, need);
        if (s.method == Method::Sa2) need.emplace_back("lda");
    } else {
        model_slots(s.method, need);
    }
    std::vector<std::string> missing;
    for (const auto& n : need) {
        const bool have = (n == "histogram" && models.histogram) || (n == "gmm" && models.gmm) ||
                          (n == "cheddad" && models.cheddad) || (n == "lda" && models.lda);
        if (!have) missing.push_back(n);
    }
    return missing;
}

void require_models(const DetectorSettings& s, const ModelSet& models) {
    const auto missing = missing_models(s, models);
    if (missing.empty()) return;
    std::string msg = std::string(method_name(s.method)) + " needs model(s):";
    for (const auto& m : missing) msg += " " + m;
    throw UsageError(msg);
}

ProbabilityMap probability_map(const DetectorSettings& s, const Image& img, const ModelSet& models) {
    require_models(s, models);
    switch (s.method) {
        case Method::Chen: return from_mask(chen_detect(img, s.chen));
        case Method::Dyc: return from_mask(dyc_detect(img, s.dyc));
        case Method::Sa1: return source_map(s.base, img, models);
        case Method::Sa2: return sa2_map(source_map(s.base, img, models), *models.lda);
        case Method::Sa3: {
            const ProbabilityMap base = source_map(s.base, img, models);
            const SeedMask seeds = extract_seeds_adaptive(base);
            if (seeds.count() == 0) return base;
            return blend_maps(base, chroma_map(img, fit_chroma_model(img, seeds)));
        }
        default: return source_map(s.method, img, models);
    }
}

LabelMask detect(const DetectorSettings& s, const Image& img, const ModelSet& models) {
    require_models(s, models);
    switch (s.method) {
        case Method::Chen: return chen_detect(img, s.chen);
        case Method::Dyc: return dyc_detect(img, s.dyc);
        case Method::Spl: return spl_detect(*models.histogram, img, s.tau);
        case Method::Bayes:
        case Method::Gmm:
        case Method::Cheddad: return threshold_map(source_map(s.method, img, models), to_threshold8(s.tau));
        case Method::Sa1: return sa1_detect(source_map(s.base, img, models), s.tau, s.seed_threshold);
        case Method::Sa2: return sa2_detect(source_map(s.base, img, models), *models.lda, s.tau, s.seed_threshold);
        case Method::Sa3: return sa3_detect(img, source_map(s.base, img, models), s.tau);
    }
    throw UsageError("unknown method");
}

LdaFit train_lda_from_manifest(const DatasetManifest& manifest, const DetectorSettings& base_settings,
                               const ModelSet& models, std::size_t stride) {
    if (!is_probability_source(base_settings.method))
        throw UsageError("LDA base must be a probability detector (bayes, gmm, spl, cheddad)");
    if (manifest.empty()) throw EmptyTrainingSet("training manifest is empty");
    require_models(base_settings, models);
    LdaSamples samples;
    for (const auto& e : manifest.entries) {
        if (e.mask.empty()) throw EmptyTrainingSet("manifest entry without a mask: " + e.image.string());
        const Image img = load_image(e.image);
        const LabelMask truth = load_mask(e.mask);
        if (!img.same_shape(truth)) throw DimensionMismatch("image and mask sizes differ: " + e.image.string());
        samples.add(texture_features(source_map(base_settings.method, img, models)), truth, stride);
    }
    return train_lda(samples);
}

}  // namespace skinbench
