#pragma once

#include <span>

#include "skinbench/dataset.hpp"
#include "skinbench/image.hpp"

namespace skinbench {

/// Open intervals on the channel differences of chen_transform.
struct ChenBounds {
    int lo_r = -142, hi_r = 18;
    int lo_g = -48, hi_g = 92;
    int lo_b = -32, hi_b = 192;
    /// Negate the differences before testing (sR=G-R etc.).
    bool sign_flip = false;

    void validate() const;
};

bool chen_is_skin(Rgb p, const ChenBounds& b = {}) noexcept;
LabelMask chen_detect(const Image& img, const ChenBounds& b = {});

/// Skin interval on the Cheddad signal plus a Gaussian fit inside it.
struct CheddadModel {
    double e_lo = 0;
    double e_hi = 0;
    double e_mean = 0;
    double e_std = 1;

    friend bool operator==(const CheddadModel&, const CheddadModel&) = default;
};

inline constexpr std::size_t kCheddadMinSkinPixels = 1000;

/// Central `mass` quantile interval and Gaussian fit of the given skin
/// e-values. Fewer than 1000 values -> TooFewSamples. Degenerate spreads
/// are widened: std floored at 1e-4, an empty interval opened by +-1e-4.
CheddadModel fit_cheddad(std::span<const double> skin_e, double mass = 0.95);

/// Collects the e-value of every SKIN pixel in the manifest and fits it.
CheddadModel train_cheddad(const DatasetManifest& manifest, double mass = 0.95);

/// exp(-(e-mean)^2 / (2 std^2)) inside [e_lo,e_hi], 0 outside.
double cheddad_probability(const CheddadModel& m, double e) noexcept;
ProbabilityMap cheddad_detect(const Image& img, const CheddadModel& m);

struct DycParams {
    double y_lo = 16, y_hi = 235;
    double cb_lo = 77, cb_hi = 127;
    double cr_lo = 133, cr_hi = 173;
    double quantile = 0.05;
    double delta = 12;

    void validate() const;
};

/// Per-image dynamic YCbCr clustering:
///  1. candidates pass the luma gate and the static chroma box;
///  2. dynamic Cb/Cr ranges are the [q, 1-q] quantiles of the candidates;
///  3. Cr ~ a*Cb + c is least-squares fitted on the candidates;
///  4. a pixel is skin when its Cb and Cr sit in the dynamic ranges and
///     |Cr - (a*Cb + c)| <= delta.
/// No candidates gives an all non-skin mask.
LabelMask dyc_detect(const Image& img, const DycParams& params = {});

}  // namespace skinbench
