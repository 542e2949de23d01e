#include "skinbench/colorspaces.hpp"

#include <algorithm>

namespace skinbench {

YCbCr rgb_to_ycbcr(Rgb p) noexcept {
    const double r = p.r, g = p.g, b = p.b;
    // Same constants as the usual weighted sums, regrouped around channel
    // differences so gray inputs land exactly on Y = value, Cb = Cr = 128.
    const double y = g + 0.299 * (r - g) + 0.114 * (b - g);
    const double cb = 128.0 + 0.168736 * (b - r) + 0.331264 * (b - g);
    const double cr = 128.0 + 0.418688 * (r - g) + 0.081312 * (r - b);
    return {std::clamp(y, 0.0, 255.0), std::clamp(cb, 0.0, 255.0), std::clamp(cr, 0.0, 255.0)};
}

double cheddad_e(Rgb p) noexcept {
    const double r = p.r / 255.0, g = p.g / 255.0, b = p.b / 255.0;
    const double gray = 0.2989 * r + 0.5870 * g + 0.1140 * b;
    return std::clamp(gray - std::max(g, b), -1.0, 1.0);
}

}  // namespace skinbench
