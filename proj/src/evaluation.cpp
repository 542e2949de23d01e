#include "skinbench/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace skinbench {
namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) noexcept {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

std::string fmt(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::optional<double> parse_cell(const std::string& s, int line) {
    if (s.empty()) return std::nullopt;
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("bad number '" + s + "' in report", line);
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Ranks by an exactly comparable key (sums of half-integer ranks are exact).
std::vector<double> ranks_by_key(std::span<const double> key, bool higher_is_better) {
    const std::size_t n = key.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return higher_is_better ? key[a] > key[b] : key[a] < key[b];
    });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && key[order[j + 1]] == key[order[i]]) ++j;
        const double mean_pos = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_pos;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

ConfusionCounts confusion(const LabelMask& pred, const LabelMask& truth) {
    if (!pred.same_shape(truth)) throw DimensionMismatch("prediction and ground truth sizes differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const Label t = truth[i];
        if (t == Label::DontCare) continue;
        const Label p = pred[i];
        if (p == Label::DontCare) throw std::invalid_argument("predictions must not contain don't-care labels");
        const bool ps = p == Label::Skin, ts = t == Label::Skin;
        if (ps && ts) ++c.tp;
        else if (ps) ++c.fp;
        else if (ts) ++c.fn;
        else ++c.tn;
    }
    return c;
}

Metrics metrics(const ConfusionCounts& c) noexcept {
    Metrics m;
    m.precision = ratio(c.tp, c.tp + c.fp, m.degenerate);
    m.recall = ratio(c.tp, c.tp + c.fn, m.degenerate);
    m.tpr = m.recall;
    m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fn + c.fp, m.degenerate);
    m.fpr = ratio(c.fp, c.fp + c.tn, m.degenerate);
    return m;
}

Metrics aggregate_pixel_level(std::span<const ConfusionCounts> counts) noexcept {
    ConfusionCounts sum;
    for (const auto& c : counts) sum += c;
    return metrics(sum);
}

Metrics group_average(std::span<const GroupedCounts> entries) {
    std::vector<std::string> order;
    std::map<std::string, ConfusionCounts> by_group;
    for (const auto& e : entries) {
        if (e.group.empty()) throw MissingGroup("entry without a group id");
        auto [it, inserted] = by_group.try_emplace(e.group);
        if (inserted) order.push_back(e.group);
        it->second += e.counts;
    }
    Metrics mean;
    if (order.empty()) {
        mean.degenerate = true;
        return mean;
    }
    for (const auto& g : order) {
        const Metrics m = metrics(by_group[g]);
        mean.precision += m.precision;
        mean.recall += m.recall;
        mean.f1 += m.f1;
        mean.tpr += m.tpr;
        mean.fpr += m.fpr;
        mean.degenerate = mean.degenerate || m.degenerate;
    }
    const double n = static_cast<double>(order.size());
    mean.precision /= n;
    mean.recall /= n;
    mean.f1 /= n;
    mean.tpr /= n;
    mean.fpr /= n;
    return mean;
}

double average_precision(std::span<const ApSample> samples) {
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return samples[a].fraction > samples[b].fraction; });
    std::size_t hits = 0;
    double sum = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (!samples[order[r]].face) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    if (hits == 0) throw NoPositives("average precision needs at least one face image");
    return 100.0 * sum / static_cast<double>(hits);
}

double skin_fraction(const LabelMask& pred) noexcept {
    return static_cast<double>(pred.count(Label::Skin)) / static_cast<double>(pred.size());
}

std::vector<SweepRow> threshold_sweep(std::span<const ProbabilityMap> maps, std::span<const LabelMask> truth,
                                      std::span<const Threshold8> taus) {
    if (maps.size() != truth.size()) throw DimensionMismatch("one ground-truth mask per map is required");
    std::vector<double> t;
    for (auto tau : taus) t.push_back(tau.value());
    return sweep(t, truth, [&](double tau, std::size_t i) {
        return threshold_map(maps[i], Threshold8(static_cast<int>(tau)));
    });
}

std::vector<SweepRow> sweep(std::span<const double> taus, std::span<const LabelMask> truth,
                            const std::function<LabelMask(double, std::size_t)>& predict) {
    std::vector<SweepRow> rows;
    for (double tau : taus) {
        SweepRow row;
        row.tau = tau;
        for (std::size_t i = 0; i < truth.size(); ++i) row.counts += confusion(predict(tau, i), truth[i]);
        row.metrics = metrics(row.counts);
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> fractional_ranks(std::span<const double> values, bool higher_is_better) {
    return ranks_by_key(values, higher_is_better);
}

RankTable rank_table(const std::vector<std::vector<double>>& scores, bool higher_is_better) {
    if (scores.empty() || scores[0].empty()) throw IncompleteMatrix("score matrix is empty");
    const std::size_t methods = scores.size(), datasets = scores[0].size();
    for (const auto& row : scores) {
        if (row.size() != datasets) throw IncompleteMatrix("score matrix rows differ in length");
        for (double v : row)
            if (std::isnan(v)) throw IncompleteMatrix("score matrix has missing (NaN) entries");
    }
    RankTable t;
    t.dataset_ranks.assign(methods, std::vector<double>(datasets));
    std::vector<double> column(methods), rank_sum(methods, 0.0);
    for (std::size_t d = 0; d < datasets; ++d) {
        for (std::size_t m = 0; m < methods; ++m) column[m] = scores[m][d];
        const auto r = fractional_ranks(column, higher_is_better);
        for (std::size_t m = 0; m < methods; ++m) {
            t.dataset_ranks[m][d] = r[m];
            rank_sum[m] += r[m];
        }
    }
    t.average_rank.resize(methods);
    for (std::size_t m = 0; m < methods; ++m) t.average_rank[m] = rank_sum[m] / static_cast<double>(datasets);
    // every method has the same dataset count, so ranking the sums ranks the averages
    t.final_rank = ranks_by_key(rank_sum, /*higher_is_better=*/false);
    return t;
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
    out << kReportHeader << '\n';
    for (const auto& r : rows) {
        out << r.method << ',' << r.dataset << ',' << fmt(r.tau) << ',';
        if (r.metrics) {
            const Metrics& m = *r.metrics;
            out << fmt(m.precision) << ',' << fmt(m.recall) << ',' << fmt(m.f1) << ',' << fmt(m.tpr) << ','
                << fmt(m.fpr);
        } else {
            out << ",,,,";
        }
        out << ',' << fmt(r.ap) << ',' << fmt(r.rank) << '\n';
    }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty report");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kReportHeader) throw ConfigError("unexpected report header '" + line + "'", 1);
    std::vector<ReportRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 10) throw ConfigError("expected 10 columns", lineno);
        ReportRow r;
        r.method = cells[0];
        r.dataset = cells[1];
        r.tau = parse_cell(cells[2], lineno);
        const auto p = parse_cell(cells[3], lineno), rc = parse_cell(cells[4], lineno), f = parse_cell(cells[5], lineno),
                   tpr = parse_cell(cells[6], lineno), fpr = parse_cell(cells[7], lineno);
        if (f) {
            Metrics m;
            m.precision = p.value_or(0);
            m.recall = rc.value_or(0);
            m.f1 = *f;
            m.tpr = tpr.value_or(0);
            m.fpr = fpr.value_or(0);
            r.metrics = m;
        }
        r.ap = parse_cell(cells[8], lineno);
        r.rank = parse_cell(cells[9], lineno);
        rows.push_back(std::move(r));
    }
    return rows;
}

Comparison compare_reports(std::span<const ReportRow> rows) {
    Comparison c;
    std::map<std::pair<std::string, std::string>, double> best;
    for (const auto& r : rows) {
        std::optional<double> score;
        if (r.metrics) score = r.metrics->f1;
        else if (r.ap) score = r.ap;
        if (!score) continue;
        if (std::find(c.methods.begin(), c.methods.end(), r.method) == c.methods.end()) c.methods.push_back(r.method);
        if (std::find(c.datasets.begin(), c.datasets.end(), r.dataset) == c.datasets.end())
            c.datasets.push_back(r.dataset);
        auto [it, inserted] = best.try_emplace({r.method, r.dataset}, *score);
        if (!inserted) it->second = std::max(it->second, *score);
    }
    if (c.methods.empty()) throw IncompleteMatrix("reports contain no scores");
    std::string missing;
    c.scores.assign(c.methods.size(), std::vector<double>(c.datasets.size()));
    for (std::size_t m = 0; m < c.methods.size(); ++m)
        for (std::size_t d = 0; d < c.datasets.size(); ++d) {
            const auto it = best.find({c.methods[m], c.datasets[d]});
            if (it == best.end()) missing += (missing.empty() ? "" : ", ") + c.methods[m] + "/" + c.datasets[d];
            else c.scores[m][d] = it->second;
        }
    if (!missing.empty()) throw IncompleteMatrix("missing method/dataset scores: " + missing);
    c.ranks = rank_table(c.scores);
    return c;
}

void write_comparison_csv(std::ostream& out, const Comparison& c) {
    out << "method";
    for (const auto& d : c.datasets) out << ',' << d;
    out << ",avg_rank,rank\n";
    for (std::size_t m = 0; m < c.methods.size(); ++m) {
        out << c.methods[m];
        for (double v : c.scores[m]) out << ',' << fmt(v);
        out << ',' << fmt(c.ranks.average_rank[m]) << ',' << fmt(c.ranks.final_rank[m]) << '\n';
    }
}

}  // namespace skinbench
