#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skinbench/dataset.hpp"
#include "skinbench/image.hpp"

namespace skinbench {

using Color3 = std::array<double, 3>;

struct GaussianComponent {
    double weight = 0;
    Color3 mean{};
    Color3 variance{1, 1, 1};

    friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;
};

/// Diagonal-covariance Gaussian mixture over RGB (8-bit units).
struct Mixture {
    std::vector<GaussianComponent> components;

    double log_density(const Color3& x) const;

    friend bool operator==(const Mixture&, const Mixture&) = default;
};

struct GmmModel {
    Mixture skin;
    Mixture nonskin;
    double skin_prior = 0.5;  // class frequency seen at training time

    friend bool operator==(const GmmModel&, const GmmModel&) = default;
};

struct GmmOptions {
    int components = 16;
    std::uint64_t seed = 0;
    int max_iterations = 200;
    double tolerance = 1e-6;  // on the mean per-sample log-likelihood
    double variance_floor = 1.0;
};

struct MixtureFit {
    Mixture mixture;
    /// Mean per-sample log-likelihood: entry 0 is the k-means++ start, then
    /// one entry per EM iteration.
    std::vector<double> log_likelihood;
};

/// k-means++ seeded initialisation followed by EM. Throws TooFewSamples
/// when there are fewer samples than components.
MixtureFit fit_mixture(std::span<const Color3> samples, const GmmOptions& options);

GmmModel train_gmm(std::span<const Color3> skin, std::span<const Color3> nonskin, const GmmOptions& options);

/// Labelled pixels from a manifest, reservoir-subsampled to at most
/// `max_per_class` per class. Deterministic for a given seed and manifest.
std::pair<std::vector<Color3>, std::vector<Color3>> collect_samples(const DatasetManifest& manifest,
                                                                    std::size_t max_per_class,
                                                                    std::uint64_t seed);

/// prior*L_s / (prior*L_s + (1-prior)*L_n), log-odds clamped to +-30 so the
/// result stays strictly inside (0,1).
double gmm_posterior(const GmmModel& m, Rgb p, double skin_prior);
inline double gmm_posterior(const GmmModel& m, Rgb p) { return gmm_posterior(m, p, m.skin_prior); }

ProbabilityMap gmm_map(const GmmModel& m, const Image& img);

}  // namespace skinbench
