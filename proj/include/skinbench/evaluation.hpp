#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skinbench/image.hpp"

namespace skinbench {

/// Skin is the positive class. Don't-care ground truth is never counted.
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) noexcept { return a += b; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// A 0/0 ratio evaluates to 0 and sets `degenerate`.
struct Metrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    double tpr = 0;
    double fpr = 0;
    bool degenerate = false;
};

/// Predictions must be binary; throws DimensionMismatch on size mismatch
/// and std::invalid_argument on a don't-care prediction.
ConfusionCounts confusion(const LabelMask& pred, const LabelMask& truth);

Metrics metrics(const ConfusionCounts& c) noexcept;

/// Sums the counts first and computes the metrics once (pixel level), so
/// large images weigh more than small ones.
Metrics aggregate_pixel_level(std::span<const ConfusionCounts> counts) noexcept;

struct GroupedCounts {
    std::string group;
    ConfusionCounts counts;
};

/// Pixel-level metrics per group, then the unweighted mean over groups.
/// Throws MissingGroup when an entry has an empty group id.
Metrics group_average(std::span<const GroupedCounts> entries);

struct ApSample {
    bool face = false;
    double fraction = 0;  // share of pixels detected as skin
};

/// Mean precision at the rank of each face image, images ordered by
/// fraction descending (ties keep input order), scaled to [0,100].
/// Throws NoPositives without a face image.
double average_precision(std::span<const ApSample> samples);

double skin_fraction(const LabelMask& pred) noexcept;

struct SweepRow {
    double tau = 0;
    ConfusionCounts counts;
    Metrics metrics;
};

/// One pixel-level row per threshold over all (map, truth) pairs.
std::vector<SweepRow> threshold_sweep(std::span<const ProbabilityMap> maps, std::span<const LabelMask> truth,
                                      std::span<const Threshold8> taus);

/// Same, for detectors whose decision is not a probability cutoff.
/// `predict(tau, i)` returns the mask for image i at threshold tau.
std::vector<SweepRow> sweep(std::span<const double> taus, std::span<const LabelMask> truth,
                            const std::function<LabelMask(double, std::size_t)>& predict);

/// Fractional ranks (1 = best; tied values share the mean of their positions).
std::vector<double> fractional_ranks(std::span<const double> values, bool higher_is_better = true);

struct RankTable {
    std::vector<std::vector<double>> dataset_ranks;  // [method][dataset]
    std::vector<double> average_rank;                 // per method
    std::vector<double> final_rank;                   // rank of the average rank
};

/// scores[method][dataset]. Throws IncompleteMatrix on ragged rows, an
/// empty matrix, or NaN entries.
RankTable rank_table(const std::vector<std::vector<double>>& scores, bool higher_is_better = true);

/// One line of an evaluation report. Empty optionals become empty CSV cells.
struct ReportRow {
    std::string method;
    std::string dataset;
    std::optional<double> tau;
    std::optional<Metrics> metrics;
    std::optional<double> ap;
    std::optional<double> rank;
};

inline constexpr const char* kReportHeader = "method,dataset,tau,precision,recall,F1,TPR,FPR,AP,rank";

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);
std::vector<ReportRow> read_report_csv(std::istream& in);

/// Methods x datasets score matrix merged from report rows (F1 when present,
/// else AP; the best value when several thresholds were reported) with ranks.
struct Comparison {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> scores;
    RankTable ranks;
};

/// Throws IncompleteMatrix when some method lacks a dataset another has.
Comparison compare_reports(std::span<const ReportRow> rows);
void write_comparison_csv(std::ostream& out, const Comparison& c);

}  // namespace skinbench
