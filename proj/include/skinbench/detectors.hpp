#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skinbench/model_io.hpp"

namespace skinbench {

enum class Method { Gmm, Bayes, Spl, Cheddad, Chen, Sa1, Sa2, Sa3, Dyc };

std::string_view method_name(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;
const std::vector<Method>& all_methods();

/// Default decision threshold per method. Its meaning depends on the method:
/// a Threshold8 cutoff for bayes/gmm/cheddad, a log2 ratio for spl (strict
/// ">"), a path-cost bound for sa1/sa2/sa3. chen and dyc ignore it.
double default_tau(Method m) noexcept;
bool uses_tau(Method m) noexcept;

/// Trained parameters available to a run. Each slot is filled from a model file.
struct ModelSet {
    std::optional<HistogramModel> histogram;
    std::optional<GmmModel> gmm;
    std::optional<CheddadModel> cheddad;
    std::optional<LdaModel> lda;

    void add(AnyModel m);
    void add_file(const std::filesystem::path& path);
};

struct DetectorSettings {
    Method method = Method::Bayes;
    double tau = 0;
    /// Probability detector feeding sa1/sa2/sa3 (bayes, gmm, spl or cheddad).
    Method base = Method::Bayes;
    Threshold8 seed_threshold{230};
    ChenBounds chen;
    DycParams dyc;

    static DetectorSettings with_defaults(Method m);
};

/// Names of the model slots `s` needs but `models` lacks; empty when ready.
std::vector<std::string> missing_models(const DetectorSettings& s, const ModelSet& models);

/// Throws UsageError listing missing models.
void require_models(const DetectorSettings& s, const ModelSet& models);

/// The map a method thresholds or propagates over:
///   bayes/gmm/cheddad  their posterior-like probability;
///   spl                2^l / (1 + 2^l);
///   sa1                the base map;  sa2  the LDA map;  sa3  the blended map;
///   chen/dyc           their binary decision as 0/1.
ProbabilityMap probability_map(const DetectorSettings& s, const Image& img, const ModelSet& models);

/// Binary decision of one stand-alone detector.
LabelMask detect(const DetectorSettings& s, const Image& img, const ModelSet& models);

/// Trains the SA2 discriminant from base-map texture features of a labelled
/// manifest, keeping every `stride`-th labelled pixel.
LdaFit train_lda_from_manifest(const DatasetManifest& manifest, const DetectorSettings& base_settings,
                               const ModelSet& models, std::size_t stride = 16);

}  // namespace skinbench
