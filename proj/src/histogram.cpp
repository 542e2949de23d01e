#include "skinbench/histogram.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "skinbench/parallel.hpp"

namespace skinbench {
namespace {

int checked_shift(int bins) {
    if (bins < 1 || bins > 256 || !std::has_single_bit(static_cast<unsigned>(bins)))
        throw std::invalid_argument("histogram bins must be a power of two in [1,256]");
    return 8 - std::countr_zero(static_cast<unsigned>(bins));
}

std::size_t cube(int bins) { return std::size_t(bins) * std::size_t(bins) * std::size_t(bins); }

}  // namespace

HistogramModel::HistogramModel(int bins)
    : bins_(bins), shift_(checked_shift(bins)), skin_(cube(bins), 0), nonskin_(cube(bins), 0) {}

HistogramModel::HistogramModel(int bins, std::vector<std::uint64_t> skin, std::vector<std::uint64_t> nonskin)
    : bins_(bins), shift_(checked_shift(bins)), skin_(std::move(skin)), nonskin_(std::move(nonskin)) {
    if (skin_.size() != cube(bins) || nonskin_.size() != cube(bins))
        throw std::invalid_argument("histogram count arrays must have bins^3 entries");
    skin_total_ = std::accumulate(skin_.begin(), skin_.end(), std::uint64_t{0});
    nonskin_total_ = std::accumulate(nonskin_.begin(), nonskin_.end(), std::uint64_t{0});
}

double HistogramModel::skin_prior() const noexcept {
    const std::uint64_t all = skin_total_ + nonskin_total_;
    return all == 0 ? 0.0 : static_cast<double>(skin_total_) / static_cast<double>(all);
}

void HistogramModel::add(Rgb p, Label l, std::uint64_t n) {
    if (l == Label::Skin) {
        skin_[bin_index(p)] += n;
        skin_total_ += n;
    } else if (l == Label::NonSkin) {
        nonskin_[bin_index(p)] += n;
        nonskin_total_ += n;
    }
}

void HistogramModel::accumulate(const Image& img, const LabelMask& truth) {
    if (!img.same_shape(truth)) throw DimensionMismatch("image and mask sizes differ");
    for (std::size_t i = 0; i < img.size(); ++i) add(img[i], truth[i]);
}

void HistogramModel::merge(const HistogramModel& other) {
    if (other.bins_ != bins_) throw std::invalid_argument("cannot merge histograms with different bins");
    for (std::size_t i = 0; i < skin_.size(); ++i) {
        skin_[i] += other.skin_[i];
        nonskin_[i] += other.nonskin_[i];
    }
    skin_total_ += other.skin_total_;
    nonskin_total_ += other.nonskin_total_;
}

HistogramModel train_histogram(const DatasetManifest& manifest, int bins, int workers) {
    if (manifest.empty()) throw EmptyTrainingSet("training manifest is empty");
    for (const auto& e : manifest.entries)
        if (e.mask.empty()) throw EmptyTrainingSet("manifest entry without a mask: " + e.image.string());

    // One partial histogram per worker slot; integer sums make the merge
    // order irrelevant.
    const int slots = std::max(1, std::min<int>(workers, static_cast<int>(manifest.size())));
    std::vector<HistogramModel> partial(static_cast<std::size_t>(slots), HistogramModel(bins));
    const std::size_t per = (manifest.size() + slots - 1) / slots;
    parallel_for(static_cast<std::size_t>(slots), slots, [&](std::size_t s) {
        const std::size_t end = std::min(manifest.size(), (s + 1) * per);
        for (std::size_t i = s * per; i < end; ++i) {
            const auto& e = manifest.entries[i];
            partial[s].accumulate(load_image(e.image), load_mask(e.mask));
        }
    });
    HistogramModel total(bins);
    for (const auto& p : partial) total.merge(p);
    if (total.skin_total() + total.nonskin_total() == 0)
        throw EmptyTrainingSet("no labelled (non-don't-care) pixels in training set");
    return total;
}

double smoothed_frequency(std::uint64_t count, std::uint64_t total, std::size_t bin_count, double eps) {
    return (static_cast<double>(count) + eps) / (static_cast<double>(total) + eps * static_cast<double>(bin_count));
}

double bayes_posterior(const HistogramModel& m, Rgb p, double eps) {
    const std::size_t i = m.bin_index(p);
    const double fs = smoothed_frequency(m.skin_counts()[i], m.skin_total(), m.bin_count(), eps);
    const double fn = smoothed_frequency(m.nonskin_counts()[i], m.nonskin_total(), m.bin_count(), eps);
    const double prior = m.skin_prior();
    const double num = fs * prior;
    return num / (num + fn * (1.0 - prior));
}

double spl_logratio(const HistogramModel& m, Rgb p, double eps) {
    const std::size_t i = m.bin_index(p);
    const double fs = smoothed_frequency(m.skin_counts()[i], m.skin_total(), m.bin_count(), eps);
    const double fn = smoothed_frequency(m.nonskin_counts()[i], m.nonskin_total(), m.bin_count(), eps);
    return std::log2(fs / fn);
}

ProbabilityMap bayes_map(const HistogramModel& m, const Image& img) {
    ProbabilityMap out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = bayes_posterior(m, img[i]);
    return out;
}

Grid<double> spl_scores(const HistogramModel& m, const Image& img) {
    Grid<double> out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = spl_logratio(m, img[i]);
    return out;
}

ProbabilityMap spl_map(const HistogramModel& m, const Image& img) {
    ProbabilityMap out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double l = spl_logratio(m, img[i]);
        out[i] = 1.0 / (1.0 + std::exp2(-l));
    }
    return out;
}

LabelMask spl_detect(const HistogramModel& m, const Image& img, double tau) {
    LabelMask out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        out[i] = spl_logratio(m, img[i]) > tau ? Label::Skin : Label::NonSkin;
    return out;
}

}  // namespace skinbench
