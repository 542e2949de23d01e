#pragma once

#include <cstdint>
#include <vector>

#include "skinbench/dataset.hpp"
#include "skinbench/image.hpp"

namespace skinbench {

/// Per-class RGB color histograms with `bins` levels per channel.
///
/// Colors are binned by dropping low bits: with s = 8 - log2(bins),
/// index(r,g,b) = (r>>s)*bins^2 + (g>>s)*bins + (b>>s).
class HistogramModel {
public:
    static constexpr int default_bins = 32;

    explicit HistogramModel(int bins = default_bins);
    HistogramModel(int bins, std::vector<std::uint64_t> skin, std::vector<std::uint64_t> nonskin);

    int bins() const noexcept { return bins_; }
    std::size_t bin_count() const noexcept { return skin_.size(); }
    std::size_t bin_index(Rgb p) const noexcept {
        return (std::size_t(p.r >> shift_) * std::size_t(bins_) + std::size_t(p.g >> shift_)) * std::size_t(bins_) +
               std::size_t(p.b >> shift_);
    }

    const std::vector<std::uint64_t>& skin_counts() const noexcept { return skin_; }
    const std::vector<std::uint64_t>& nonskin_counts() const noexcept { return nonskin_; }
    std::uint64_t skin_total() const noexcept { return skin_total_; }
    std::uint64_t nonskin_total() const noexcept { return nonskin_total_; }

    /// Fraction of counted pixels that are skin; 0 for an empty model.
    double skin_prior() const noexcept;

    /// Adds every non-DONTCARE pixel to its class bin.
    void accumulate(const Image& img, const LabelMask& truth);
    void add(Rgb p, Label l, std::uint64_t n = 1);
    void merge(const HistogramModel& other);

    friend bool operator==(const HistogramModel& a, const HistogramModel& b) {
        return a.bins_ == b.bins_ && a.skin_ == b.skin_ && a.nonskin_ == b.nonskin_;
    }

private:
    int bins_;
    int shift_;
    std::vector<std::uint64_t> skin_;
    std::vector<std::uint64_t> nonskin_;
    std::uint64_t skin_total_ = 0;
    std::uint64_t nonskin_total_ = 0;
};

/// Sums histograms over every manifest entry. Throws EmptyTrainingSet when
/// no labelled pixel was seen.
HistogramModel train_histogram(const DatasetManifest& manifest, int bins = HistogramModel::default_bins,
                               int workers = 1);

/// Laplace-smoothed class frequency (count + eps) / (total + eps * bins^3).
double smoothed_frequency(std::uint64_t count, std::uint64_t total, std::size_t bin_count, double eps = 1.0);

/// P(skin | rgb) = f_s*pi / (f_s*pi + f_n*(1-pi)) with smoothed frequencies.
double bayes_posterior(const HistogramModel& m, Rgb p, double eps = 1.0);

/// log2(f_s / f_n); SPL classifies skin when this exceeds its threshold.
double spl_logratio(const HistogramModel& m, Rgb p, double eps = 1.0);

ProbabilityMap bayes_map(const HistogramModel& m, const Image& img);

/// Raw per-pixel log-ratios (not probabilities).
Grid<double> spl_scores(const HistogramModel& m, const Image& img);

/// Log-ratio mapped to (0,1) through 2^l / (1 + 2^l), i.e. the equal-prior posterior.
ProbabilityMap spl_map(const HistogramModel& m, const Image& img);

/// SKIN iff log-ratio > tau (strict).
LabelMask spl_detect(const HistogramModel& m, const Image& img, double tau);

}  // namespace skinbench
