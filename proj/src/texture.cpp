#include <algorithm>
#include <cmath>

#include "skinbench/spatial.hpp"

namespace skinbench {

TextureFeatures::TextureFeatures(int width, int height)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kTextureDims, 0.0) {
    if (width < 1 || height < 1) throw DimensionMismatch("feature raster must be at least 1x1");
}

TextureFeatures texture_features(const ProbabilityMap& map) {
    const int w = map.width(), h = map.height();
    TextureFeatures out(w, h);
    auto sample = [&](int x, int y) { return map.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };

    std::vector<double> window, scratch;
    window.reserve(81);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto f = out[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
            window.assign(1, sample(x, y));
            for (std::size_t k = 0; k < kTextureKernels.size(); ++k) {
                const int r = kTextureKernels[k] / 2;
                // grow the window by the ring at Chebyshev distance r
                for (int dy = -r; dy <= r; ++dy)
                    for (int dx = -r; dx <= r; ++dx)
                        if (std::max(std::abs(dx), std::abs(dy)) == r) window.push_back(sample(x + dx, y + dy));

                scratch = window;
                const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(scratch.size() / 2);
                std::nth_element(scratch.begin(), mid, scratch.end());
                const double median = *mid;
                const auto [mn, mx] = std::minmax_element(window.begin(), window.end());
                double stddev = 0;
                if (*mx > *mn) {
                    double sum = 0;
                    for (double v : window) sum += v;
                    const double mean = sum / static_cast<double>(window.size());
                    double ss = 0;
                    for (double v : window) ss += (v - mean) * (v - mean);
                    stddev = std::sqrt(ss / static_cast<double>(window.size()));
                }
                f[k * kTextureStats + 0] = median;
                f[k * kTextureStats + 1] = *mn;
                f[k * kTextureStats + 2] = *mx - *mn;
                f[k * kTextureStats + 3] = stddev;
            }
        }
    }
    return out;
}

}  // namespace skinbench
