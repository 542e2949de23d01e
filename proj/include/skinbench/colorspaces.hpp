#pragma once

#include "skinbench/image.hpp"

namespace skinbench {

/// Full-range BT.601 YCbCr; chroma centered on 128.
struct YCbCr {
    double y = 0;
    double cb = 128;
    double cr = 128;
};

/// Channel differences: r = R-G, g = G-B, b = R-B (so b == r + g).
struct ChenPixel {
    int r = 0;
    int g = 0;
    int b = 0;

    friend bool operator==(const ChenPixel&, const ChenPixel&) = default;
};

YCbCr rgb_to_ycbcr(Rgb p) noexcept;

constexpr ChenPixel chen_transform(Rgb p) noexcept {
    return {int(p.r) - int(p.g), int(p.g) - int(p.b), int(p.r) - int(p.b)};
}

/// Luma minus the non-red map max(G,B), channels scaled to [0,1]. Always in [-1,1].
double cheddad_e(Rgb p) noexcept;

}  // namespace skinbench
