#include <doctest.h>

#include <cmath>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

using namespace skinbench;

namespace {

std::vector<Color3> cloud(std::mt19937_64& rng, Color3 center, double spread, int n) {
    std::normal_distribution<double> noise(0.0, spread);
    std::vector<Color3> out;
    for (int i = 0; i < n; ++i) out.push_back({center[0] + noise(rng), center[1] + noise(rng), center[2] + noise(rng)});
    return out;
}

Mixture single(Color3 mean, Color3 var) { return Mixture{{GaussianComponent{1.0, mean, var}}}; }

}  // namespace

TEST_SUITE("statistical-models") {

TEST_CASE("K=1 is the closed-form mean and floored variance") {
    std::mt19937_64 rng(1);
    auto x = cloud(rng, {100, 50, 30}, 10, 500);
    x.push_back({100, 50, 30});
    GmmOptions opt;
    opt.components = 1;
    const auto fit = fit_mixture(x, opt);
    REQUIRE(fit.mixture.components.size() == 1);
    const auto& c = fit.mixture.components[0];
    for (int ch = 0; ch < 3; ++ch) {
        double mean = 0;
        for (const auto& p : x) mean += p[ch];
        mean /= double(x.size());
        double var = 0;
        for (const auto& p : x) var += (p[ch] - mean) * (p[ch] - mean);
        var /= double(x.size());
        CHECK(c.mean[ch] == doctest::Approx(mean).epsilon(1e-9));
        CHECK(c.variance[ch] == doctest::Approx(std::max(var, 1.0)).epsilon(1e-9));
    }
    CHECK(c.weight == doctest::Approx(1.0));

    // a tight cloud hits the variance floor
    std::vector<Color3> flat(50, Color3{10, 20, 30});
    const auto f2 = fit_mixture(flat, opt);
    CHECK(f2.mixture.components[0].variance == Color3{1, 1, 1});
}

TEST_CASE("two separated clouds match a k-means oracle") {
    std::mt19937_64 rng(2);
    auto x = cloud(rng, {40, 40, 40}, 5, 400);
    auto y = cloud(rng, {200, 150, 120}, 5, 400);
    x.insert(x.end(), y.begin(), y.end());
    GmmOptions opt;
    opt.components = 2;
    opt.seed = 3;
    const auto fit = fit_mixture(x, opt);
    const auto centers = oracle::kmeans(x, {x.front(), x.back()});
    for (const auto& c : centers) {
        double best = 1e9;
        for (const auto& comp : fit.mixture.components) {
            double d = 0;
            for (int ch = 0; ch < 3; ++ch) d += (comp.mean[ch] - c[ch]) * (comp.mean[ch] - c[ch]);
            best = std::min(best, std::sqrt(d));
        }
        CHECK(best < 1.0);
    }
    double wsum = 0;
    for (const auto& comp : fit.mixture.components) wsum += comp.weight;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("EM log-likelihood never decreases") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(seed + 100);
        std::vector<Color3> x;
        for (int k = 0; k < 4; ++k) {
            auto c = cloud(rng, {testsupport::uniform(rng) * 255, testsupport::uniform(rng) * 255,
                                 testsupport::uniform(rng) * 255},
                           3 + 20 * testsupport::uniform(rng), 150);
            x.insert(x.end(), c.begin(), c.end());
        }
        GmmOptions opt;
        opt.components = 6;
        opt.seed = seed;
        const auto fit = fit_mixture(x, opt);
        CHECK(fit.log_likelihood.size() >= 2);
        for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i)
            CHECK(fit.log_likelihood[i] >= fit.log_likelihood[i - 1] - 1e-9);
        for (const auto& c : fit.mixture.components)
            for (double v : c.variance) CHECK(v >= 1.0);
    }
}

TEST_CASE("training is deterministic for a seed") {
    std::mt19937_64 rng(4);
    const auto s = cloud(rng, {180, 120, 100}, 15, 300);
    const auto n = cloud(rng, {60, 90, 140}, 25, 300);
    GmmOptions opt;
    opt.components = 4;
    opt.seed = 7;
    const auto a = train_gmm(s, n, opt), b = train_gmm(s, n, opt);
    CHECK(a == b);
    CHECK(save_model(a) == save_model(b));
    CHECK(a.skin_prior == 0.5);
}

TEST_CASE("too few samples") {
    std::vector<Color3> x(3, Color3{1, 2, 3});
    GmmOptions opt;
    opt.components = 4;
    CHECK_THROWS_AS(fit_mixture(x, opt), TooFewSamples);
    CHECK_THROWS_AS(train_gmm(std::vector<Color3>(10), x, opt), TooFewSamples);
}

TEST_CASE("gmm_posterior examples") {
    // mirrored about the plane r = 128
    GmmModel sym{single({100, 50, 50}, {100, 100, 100}), single({156, 50, 50}, {100, 100, 100}), 0.5};
    CHECK(gmm_posterior(sym, {128, 77, 13}) == doctest::Approx(0.5).epsilon(1e-12));

    // 20 sigma away
    GmmModel far{single({200, 100, 80}, {4, 4, 4}), single({160, 100, 80}, {4, 4, 4}), 0.5};
    CHECK(gmm_posterior(far, {200, 100, 80}) >= 0.999);

    // L_s = 3 L_n: same shape, density scaled by weight split
    GmmModel three{single({50, 50, 50}, {25, 25, 25}),
                   Mixture{{GaussianComponent{1.0 / 3.0, {50, 50, 50}, {25, 25, 25}},
                            GaussianComponent{2.0 / 3.0, {250, 0, 0}, {1, 1, 1}}}},
                   0.5};
    CHECK(gmm_posterior(three, {50, 50, 50}, 0.5) == doctest::Approx(0.75).epsilon(1e-9));

    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double p = gmm_posterior(far, testsupport::random_rgb(rng));
        CHECK((p > 0 && p < 1));
    }
}

TEST_CASE("collect_samples is deterministic and capped") {
    testsupport::TempDir dir;
    std::mt19937_64 rng(9);
    std::vector<testsupport::LabelledImage> data;
    for (int i = 0; i < 3; ++i) data.push_back(testsupport::separable_sample(rng, 20, 20));
    const auto manifest = DatasetManifest::load(testsupport::write_dataset(dir.path(), data));
    const auto a = collect_samples(manifest, 50, 1), b = collect_samples(manifest, 50, 1);
    CHECK(a == b);
    CHECK(a.first.size() <= 50);
    CHECK(a.second.size() == 50);
    const auto all = collect_samples(manifest, 1u << 20, 1);
    std::size_t skin = 0;
    for (const auto& d : data) skin += d.truth.count(Label::Skin);
    CHECK(all.first.size() == skin);
}

}
