#include <doctest.h>

#include "../support/fixtures.hpp"

using namespace skinbench;

TEST_SUITE("colorspaces") {

TEST_CASE("rgb_to_ycbcr examples") {
    const auto black = rgb_to_ycbcr({0, 0, 0});
    CHECK(black.y == 0);
    CHECK(black.cb == 128);
    CHECK(black.cr == 128);
    const auto white = rgb_to_ycbcr({255, 255, 255});
    CHECK(white.y == doctest::Approx(255).epsilon(1e-12));
    CHECK(white.cb == 128);
    CHECK(white.cr == 128);
    // Y = 0.299*255, Cb = 128 - 0.168736*255, Cr = 128 + 0.5*255 (clamped)
    const auto red = rgb_to_ycbcr({255, 0, 0});
    CHECK(red.y == doctest::Approx(0.299 * 255).epsilon(1e-12));
    CHECK(red.y == doctest::Approx(76.245).epsilon(1e-9));
    CHECK(red.cb == doctest::Approx(128 - 0.168736 * 255).epsilon(1e-12));
    CHECK(red.cb == doctest::Approx(84.97232).epsilon(1e-9));
    CHECK(red.cr == 255);
}

TEST_CASE("rgb_to_ycbcr gray axis has exact chroma center and stays in range") {
    for (int v = 0; v < 256; ++v) {
        const auto c = rgb_to_ycbcr({std::uint8_t(v), std::uint8_t(v), std::uint8_t(v)});
        CHECK(c.cb == 128.0);
        CHECK(c.cr == 128.0);
        CHECK(c.y == doctest::Approx(v).epsilon(1e-12));
    }
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20000; ++i) {
        const Rgb p = testsupport::random_rgb(rng);
        const auto c = rgb_to_ycbcr(p);
        CHECK((c.y >= 0 && c.y <= 255 && c.cb >= 0 && c.cb <= 255 && c.cr >= 0 && c.cr <= 255));
        const double cb = 128 - 0.168736 * p.r - 0.331264 * p.g + 0.5 * p.b;
        CHECK(c.cb == doctest::Approx(std::clamp(cb, 0.0, 255.0)).epsilon(1e-9));
    }
}

TEST_CASE("chen_transform examples") {
    CHECK(chen_transform({200, 120, 80}) == ChenPixel{80, 40, 120});
    CHECK(chen_transform({9, 9, 9}) == ChenPixel{0, 0, 0});
    CHECK(chen_transform({0, 255, 0}) == ChenPixel{-255, 255, 0});
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10000; ++i) {
        const auto c = chen_transform(testsupport::random_rgb(rng));
        CHECK(c.b == c.r + c.g);
    }
}

TEST_CASE("cheddad_e examples") {
    CHECK(cheddad_e({255, 0, 0}) == doctest::Approx(0.2989).epsilon(1e-12));
    CHECK(cheddad_e({128, 128, 128}) == doctest::Approx(-0.0001 * 128 / 255.0).epsilon(1e-9));
    CHECK(std::abs(cheddad_e({128, 128, 128})) < 1e-4);
    CHECK(cheddad_e({0, 255, 0}) == doctest::Approx(-0.4130).epsilon(1e-12));
}

TEST_CASE("cheddad_e range and monotonicity in max(G,B)") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20000; ++i) {
        const double e = cheddad_e(testsupport::random_rgb(rng));
        CHECK((e >= -1 && e <= 1));
    }
    for (int r = 0; r < 256; r += 17) {
        double prev = 2;
        for (int m = 0; m < 256; ++m) {
            const double e = cheddad_e({std::uint8_t(r), std::uint8_t(m), std::uint8_t(m)});
            CHECK(e < prev);
            prev = e;
        }
    }
    CHECK(cheddad_e({100, 50, 50}) == cheddad_e({100, 50, 50}));
}

}
