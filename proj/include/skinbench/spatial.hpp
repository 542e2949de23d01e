#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "skinbench/image.hpp"

namespace skinbench {

class SeedMask : public Grid<std::uint8_t> {
public:
    using Grid<std::uint8_t>::Grid;
    bool is_seed(std::size_t i) const noexcept { return (*this)[i] != 0; }
    std::size_t count() const noexcept;
};

/// Shortest-route cost from the nearest seed; +inf where no seed reaches.
class DistanceMap : public Grid<double> {
public:
    using Grid<double>::Grid;
};

inline Threshold8 default_seed_threshold() { return Threshold8(230); }

/// Seed iff p >= q/255.
SeedMask extract_seeds_fixed(const ProbabilityMap& map, Threshold8 q = default_seed_threshold());

/// Seed iff p >= max(0.5, 95th percentile of the map); 8-connected seed
/// components smaller than 0.01% of the image area are dropped.
SeedMask extract_seeds_adaptive(const ProbabilityMap& map);

/// Cost of stepping into a pixel with probability p: 255*(1-p) per unit
/// length, length 1 for axial moves and sqrt(2) for diagonal ones.
double step_cost(double p, bool diagonal) noexcept;

/// Multi-source shortest paths over the 8-connected grid.
DistanceMap propagate(const ProbabilityMap& map, const SeedMask& seeds);

/// SKIN iff the distance is finite and <= tau.
LabelMask threshold_distance(const DistanceMap& dist, double tau);

/// Fixed seeds on the base map, propagate over it, threshold the distance.
LabelMask sa1_detect(const ProbabilityMap& base, double tau, Threshold8 seed_q = default_seed_threshold());

inline constexpr std::array<int, 4> kTextureKernels{3, 5, 7, 9};
inline constexpr int kTextureStats = 4;  // median, min, range, std
inline constexpr int kTextureDims = static_cast<int>(kTextureKernels.size()) * kTextureStats;

/// 16 neighborhood statistics per pixel, ordered per kernel as
/// (median, min, max-min, population std). Borders replicate edge pixels.
class TextureFeatures {
public:
    TextureFeatures(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size() / kTextureDims; }

    std::span<double, kTextureDims> operator[](std::size_t i) {
        return std::span<double, kTextureDims>(data_.data() + i * kTextureDims, kTextureDims);
    }
    std::span<const double, kTextureDims> operator[](std::size_t i) const {
        return std::span<const double, kTextureDims>(data_.data() + i * kTextureDims, kTextureDims);
    }

private:
    int width_;
    int height_;
    std::vector<double> data_;
};

TextureFeatures texture_features(const ProbabilityMap& map);

/// Fisher projection with a logistic squashing to [0,1]:
/// p = 1 / (1 + exp(-scale * (w.x + offset))).
struct LdaModel {
    std::vector<double> weights;  // unit norm, skin side positive
    double offset = 0;
    double scale = 1;

    double project(std::span<const double> x) const;
    double probability(std::span<const double> x) const;

    friend bool operator==(const LdaModel&, const LdaModel&) = default;
};

/// Row-major feature vectors per class.
struct LdaSamples {
    int dims = kTextureDims;
    std::vector<double> skin;
    std::vector<double> nonskin;

    std::size_t skin_count() const noexcept { return skin.size() / static_cast<std::size_t>(dims); }
    std::size_t nonskin_count() const noexcept { return nonskin.size() / static_cast<std::size_t>(dims); }

    /// Adds every `stride`-th labelled pixel.
    void add(const TextureFeatures& features, const LabelMask& truth, std::size_t stride = 1);
};

struct LdaFit {
    LdaModel model;
    double separation = 0;  // projected skin mean minus non-skin mean
    bool low_separation = false;
};

/// w ~ (S_w + 1e-6 I)^-1 (mu_skin - mu_nonskin), S_w the pooled
/// within-class covariance. The offset puts the midpoint of the projected
/// class means at 0; the scale maps the class means to 0.95 / 0.05.
LdaFit train_lda(const LdaSamples& samples);

ProbabilityMap lda_map(const TextureFeatures& features, const LdaModel& model);

/// Texture features of the base map pushed through the LDA squashing.
ProbabilityMap sa2_map(const ProbabilityMap& base, const LdaModel& model);

LabelMask sa2_detect(const ProbabilityMap& base, const LdaModel& model, double tau,
                     Threshold8 seed_q = default_seed_threshold());

/// Axis-aligned Gaussian over (Cb,Cr) of the seed pixels; peak value 1.
struct ChromaGaussian {
    double cb_mean = 128, cr_mean = 128;
    double cb_var = 1, cr_var = 1;

    double probability(double cb, double cr) const noexcept;
};

/// Variances are floored at 1. Throws std::invalid_argument on an empty seed set.
ChromaGaussian fit_chroma_model(const Image& img, const SeedMask& seeds);

ProbabilityMap chroma_map(const Image& img, const ChromaGaussian& model);

/// 0.5 * base + 0.5 * local, pixel by pixel.
ProbabilityMap blend_maps(const ProbabilityMap& base, const ProbabilityMap& local);

/// Adaptive seeds on the base map, local chroma model from those seeds,
/// blended map, propagation from the same seeds, distance threshold.
LabelMask sa3_detect(const Image& img, const ProbabilityMap& base, double tau);

}  // namespace skinbench
