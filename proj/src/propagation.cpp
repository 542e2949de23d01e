#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "skinbench/spatial.hpp"
#include "skinbench/stats.hpp"

namespace skinbench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Neighbor {
    int dx, dy;
    bool diagonal;
};
constexpr Neighbor kNeighbors[8] = {{-1, 0, false}, {1, 0, false}, {0, -1, false}, {0, 1, false},
                                    {-1, -1, true}, {1, -1, true}, {-1, 1, true},  {1, 1, true}};

// Drops 8-connected components with fewer than min_size pixels.
void remove_small_components(SeedMask& seeds, double min_size) {
    const int w = seeds.width(), h = seeds.height();
    std::vector<std::uint8_t> visited(seeds.size(), 0);
    std::vector<std::size_t> component, stack;
    for (std::size_t start = 0; start < seeds.size(); ++start) {
        if (!seeds.is_seed(start) || visited[start]) continue;
        component.clear();
        stack.assign(1, start);
        visited[start] = 1;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            component.push_back(i);
            const int x = static_cast<int>(i % static_cast<std::size_t>(w)), y = static_cast<int>(i / static_cast<std::size_t>(w));
            for (const auto& n : kNeighbors) {
                const int nx = x + n.dx, ny = y + n.dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const std::size_t j = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
                if (seeds.is_seed(j) && !visited[j]) {
                    visited[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        if (static_cast<double>(component.size()) < min_size)
            for (std::size_t i : component) seeds[i] = 0;
    }
}

}  // namespace

std::size_t SeedMask::count() const noexcept {
    const auto v = values();
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](std::uint8_t s) { return s != 0; }));
}

SeedMask extract_seeds_fixed(const ProbabilityMap& map, Threshold8 q) {
    SeedMask seeds(map.width(), map.height());
    const double cut = q.cutoff();
    for (std::size_t i = 0; i < map.size(); ++i) seeds[i] = map[i] >= cut ? 1 : 0;
    return seeds;
}

SeedMask extract_seeds_adaptive(const ProbabilityMap& map) {
    const auto v = map.values();
    const double cut = std::max(0.5, quantile(std::vector<double>(v.begin(), v.end()), 0.95));
    SeedMask seeds(map.width(), map.height());
    for (std::size_t i = 0; i < map.size(); ++i) seeds[i] = map[i] >= cut ? 1 : 0;
    remove_small_components(seeds, 1e-4 * static_cast<double>(map.size()));
    return seeds;
}

double step_cost(double p, bool diagonal) noexcept {
    const double base = 255.0 * (1.0 - p);
    return diagonal ? base * std::sqrt(2.0) : base;
}

DistanceMap propagate(const ProbabilityMap& map, const SeedMask& seeds) {
    if (!map.same_shape(seeds)) throw DimensionMismatch("seed mask and probability map sizes differ");
    const int w = map.width(), h = map.height();
    DistanceMap dist(w, h, kInf);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (seeds.is_seed(i)) {
            dist[i] = 0.0;
            open.emplace(0.0, i);
        }
    std::vector<std::uint8_t> done(map.size(), 0);
    while (!open.empty()) {
        const auto [d, i] = open.top();
        open.pop();
        if (done[i]) continue;
        done[i] = 1;
        const int x = static_cast<int>(i % static_cast<std::size_t>(w)), y = static_cast<int>(i / static_cast<std::size_t>(w));
        for (const auto& n : kNeighbors) {
            const int nx = x + n.dx, ny = y + n.dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
            if (done[j]) continue;
            const double cand = d + step_cost(map[j], n.diagonal);
            if (cand < dist[j]) {
                dist[j] = cand;
                open.emplace(cand, j);
            }
        }
    }
    return dist;
}

LabelMask threshold_distance(const DistanceMap& dist, double tau) {
    LabelMask out(dist.width(), dist.height());
    for (std::size_t i = 0; i < dist.size(); ++i)
        out[i] = std::isfinite(dist[i]) && dist[i] <= tau ? Label::Skin : Label::NonSkin;
    return out;
}

LabelMask sa1_detect(const ProbabilityMap& base, double tau, Threshold8 seed_q) {
    return threshold_distance(propagate(base, extract_seeds_fixed(base, seed_q)), tau);
}

}  // namespace skinbench
