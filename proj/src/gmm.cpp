#include "skinbench/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <unordered_map>

#include "skinbench/errors.hpp"

namespace skinbench {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// mt19937_64 output is fixed by the standard; the distribution adaptors are
// not, so uniform doubles are built from the raw bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }

private:
    std::mt19937_64 engine_;
};

double component_log_density(const GaussianComponent& c, const Color3& x) {
    double acc = 0;
    for (int d = 0; d < 3; ++d) {
        const double diff = x[d] - c.mean[d];
        acc += diff * diff / c.variance[d] + std::log(2.0 * std::numbers::pi * c.variance[d]);
    }
    return -0.5 * acc;
}

double sq_dist(const Color3& a, const Color3& b) {
    double s = 0;
    for (int d = 0; d < 3; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return s;
}

std::vector<Color3> kmeanspp_centers(std::span<const Color3> x, int k, Rng& rng) {
    std::vector<Color3> centers;
    centers.push_back(x[rng.index(x.size())]);
    std::vector<double> d2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d2[i] = sq_dist(x[i], centers[0]);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total <= 0) {
            pick = rng.index(x.size());
        } else {
            const double target = rng.uniform() * total;
            double run = 0;
            pick = x.size() - 1;
            for (std::size_t i = 0; i < x.size(); ++i) {
                run += d2[i];
                if (run > target) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(x[pick]);
        for (std::size_t i = 0; i < x.size(); ++i) d2[i] = std::min(d2[i], sq_dist(x[i], centers.back()));
    }
    return centers;
}

Mixture initial_mixture(std::span<const Color3> x, const std::vector<Color3>& centers, double floor) {
    const std::size_t k = centers.size();
    std::vector<std::size_t> count(k, 0);
    std::vector<Color3> sum(k, Color3{}), sumsq(k, Color3{});
    std::vector<std::size_t> owner(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t best = 0;
        double bd = sq_dist(x[i], centers[0]);
        for (std::size_t c = 1; c < k; ++c) {
            const double d = sq_dist(x[i], centers[c]);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        owner[i] = best;
        ++count[best];
        for (int d = 0; d < 3; ++d) sum[best][d] += x[i][d];
    }
    Mixture m;
    m.components.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        auto& comp = m.components[c];
        comp.weight = static_cast<double>(count[c]) / static_cast<double>(x.size());
        if (count[c] == 0) {
            comp.mean = centers[c];
            comp.variance = {floor, floor, floor};
            continue;
        }
        for (int d = 0; d < 3; ++d) comp.mean[d] = sum[c][d] / static_cast<double>(count[c]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& mu = m.components[owner[i]].mean;
        for (int d = 0; d < 3; ++d) sumsq[owner[i]][d] += (x[i][d] - mu[d]) * (x[i][d] - mu[d]);
    }
    for (std::size_t c = 0; c < k; ++c)
        if (count[c] > 0)
            for (int d = 0; d < 3; ++d)
                m.components[c].variance[d] = std::max(floor, sumsq[c][d] / static_cast<double>(count[c]));
    return m;
}

// Fills resp (n x k, row-major) and returns the mean log-likelihood.
double e_step(std::span<const Color3> x, const Mixture& m, std::vector<double>& resp) {
    const std::size_t k = m.components.size();
    std::vector<double> logw(k);
    for (std::size_t c = 0; c < k; ++c)
        logw[c] = m.components[c].weight > 0 ? std::log(m.components[c].weight) : kNegInf;
    double total = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double* r = resp.data() + i * k;
        double best = kNegInf;
        for (std::size_t c = 0; c < k; ++c) {
            r[c] = logw[c] == kNegInf ? kNegInf : logw[c] + component_log_density(m.components[c], x[i]);
            best = std::max(best, r[c]);
        }
        double s = 0;
        for (std::size_t c = 0; c < k; ++c) {
            r[c] = r[c] == kNegInf ? 0.0 : std::exp(r[c] - best);
            s += r[c];
        }
        for (std::size_t c = 0; c < k; ++c) r[c] /= s;
        total += best + std::log(s);
    }
    return total / static_cast<double>(x.size());
}

void m_step(std::span<const Color3> x, const std::vector<double>& resp, Mixture& m, double floor) {
    const std::size_t k = m.components.size();
    for (std::size_t c = 0; c < k; ++c) {
        double nk = 0;
        Color3 mu{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = resp[i * k + c];
            nk += r;
            for (int d = 0; d < 3; ++d) mu[d] += r * x[i][d];
        }
        auto& comp = m.components[c];
        if (!(nk > 0)) {
            comp.weight = 0;  // starved; parameters are irrelevant
            continue;
        }
        for (int d = 0; d < 3; ++d) mu[d] /= nk;
        Color3 var{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = resp[i * k + c];
            for (int d = 0; d < 3; ++d) var[d] += r * (x[i][d] - mu[d]) * (x[i][d] - mu[d]);
        }
        comp.weight = nk / static_cast<double>(x.size());
        comp.mean = mu;
        for (int d = 0; d < 3; ++d) comp.variance[d] = std::max(floor, var[d] / nk);
    }
    double wsum = 0;
    for (const auto& c : m.components) wsum += c.weight;
    for (auto& c : m.components) c.weight /= wsum;
}

Color3 to_color(Rgb p) { return {double(p.r), double(p.g), double(p.b)}; }

}  // namespace

double Mixture::log_density(const Color3& x) const {
    double best = kNegInf;
    std::vector<double> terms;
    terms.reserve(components.size());
    for (const auto& c : components) {
        if (!(c.weight > 0)) continue;
        terms.push_back(std::log(c.weight) + component_log_density(c, x));
        best = std::max(best, terms.back());
    }
    if (best == kNegInf) return kNegInf;
    double s = 0;
    for (double t : terms) s += std::exp(t - best);
    return best + std::log(s);
}

MixtureFit fit_mixture(std::span<const Color3> samples, const GmmOptions& options) {
    if (options.components < 1) throw std::invalid_argument("mixture needs at least one component");
    if (samples.size() < static_cast<std::size_t>(options.components))
        throw TooFewSamples("need at least " + std::to_string(options.components) + " samples, got " +
                            std::to_string(samples.size()));
    Rng rng(options.seed);
    MixtureFit fit;
    fit.mixture = initial_mixture(samples, kmeanspp_centers(samples, options.components, rng), options.variance_floor);

    std::vector<double> resp(samples.size() * static_cast<std::size_t>(options.components));
    double ll = e_step(samples, fit.mixture, resp);
    fit.log_likelihood.push_back(ll);
    for (int it = 0; it < options.max_iterations; ++it) {
        m_step(samples, resp, fit.mixture, options.variance_floor);
        const double next = e_step(samples, fit.mixture, resp);
        fit.log_likelihood.push_back(next);
        const double gain = next - ll;
        ll = next;
        if (gain < options.tolerance) break;
    }
    return fit;
}

GmmModel train_gmm(std::span<const Color3> skin, std::span<const Color3> nonskin, const GmmOptions& options) {
    GmmModel m;
    m.skin = fit_mixture(skin, options).mixture;
    GmmOptions other = options;
    other.seed = options.seed + 1;
    m.nonskin = fit_mixture(nonskin, other).mixture;
    m.skin_prior = static_cast<double>(skin.size()) / static_cast<double>(skin.size() + nonskin.size());
    return m;
}

std::pair<std::vector<Color3>, std::vector<Color3>> collect_samples(const DatasetManifest& manifest,
                                                                    std::size_t max_per_class,
                                                                    std::uint64_t seed) {
    if (manifest.empty()) throw EmptyTrainingSet("training manifest is empty");
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<Color3> skin, nonskin;
    std::size_t seen_skin = 0, seen_non = 0;
    auto offer = [&](std::vector<Color3>& bag, std::size_t& seen, const Color3& c) {
        ++seen;
        if (bag.size() < max_per_class) {
            bag.push_back(c);
        } else {
            const std::size_t j = rng.index(seen);
            if (j < max_per_class) bag[j] = c;
        }
    };
    for (const auto& e : manifest.entries) {
        if (e.mask.empty()) throw EmptyTrainingSet("manifest entry without a mask: " + e.image.string());
        const Image img = load_image(e.image);
        const LabelMask truth = load_mask(e.mask);
        if (!img.same_shape(truth)) throw DimensionMismatch("image and mask sizes differ: " + e.image.string());
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (truth[i] == Label::Skin) offer(skin, seen_skin, to_color(img[i]));
            else if (truth[i] == Label::NonSkin) offer(nonskin, seen_non, to_color(img[i]));
        }
    }
    if (skin.empty() && nonskin.empty()) throw EmptyTrainingSet("no labelled pixels in training set");
    return {std::move(skin), std::move(nonskin)};
}

double gmm_posterior(const GmmModel& m, Rgb p, double skin_prior) {
    const Color3 x = to_color(p);
    const double ls = std::log(skin_prior) + m.skin.log_density(x);
    const double ln = std::log1p(-skin_prior) + m.nonskin.log_density(x);
    double logit = ls - ln;
    if (std::isnan(logit)) logit = 0;
    logit = std::clamp(logit, -30.0, 30.0);
    return 1.0 / (1.0 + std::exp(-logit));
}

ProbabilityMap gmm_map(const GmmModel& m, const Image& img) {
    ProbabilityMap out(img.width(), img.height());
    std::unordered_map<std::uint32_t, double> cache;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const Rgb p = img[i];
        const std::uint32_t key = (std::uint32_t(p.r) << 16) | (std::uint32_t(p.g) << 8) | p.b;
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, gmm_posterior(m, p)).first;
        out[i] = it->second;
    }
    return out;
}

}  // namespace skinbench
