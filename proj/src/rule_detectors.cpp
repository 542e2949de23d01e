#include "skinbench/rule_detectors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skinbench/colorspaces.hpp"
#include "skinbench/stats.hpp"

namespace skinbench {

void ChenBounds::validate() const {
    if (!(lo_r < hi_r && lo_g < hi_g && lo_b < hi_b))
        throw std::invalid_argument("Chen bounds need lo < hi for every pair");
}

bool chen_is_skin(Rgb p, const ChenBounds& b) noexcept {
    ChenPixel c = chen_transform(p);
    if (b.sign_flip) c = {-c.r, -c.g, -c.b};
    return b.lo_r < c.r && c.r < b.hi_r && b.lo_g < c.g && c.g < b.hi_g && b.lo_b < c.b && c.b < b.hi_b;
}

LabelMask chen_detect(const Image& img, const ChenBounds& b) {
    b.validate();
    LabelMask out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = chen_is_skin(img[i], b) ? Label::Skin : Label::NonSkin;
    return out;
}

CheddadModel fit_cheddad(std::span<const double> skin_e, double mass) {
    if (!(mass > 0 && mass <= 1)) throw std::invalid_argument("interval mass must be in (0,1]");
    if (skin_e.size() < kCheddadMinSkinPixels)
        throw TooFewSamples("Cheddad fit needs at least 1000 skin pixels, got " + std::to_string(skin_e.size()));
    std::vector<double> sorted(skin_e.begin(), skin_e.end());
    std::sort(sorted.begin(), sorted.end());
    const double tail = (1.0 - mass) / 2.0;
    CheddadModel m;
    m.e_lo = sorted_quantile(sorted, tail);
    m.e_hi = sorted_quantile(sorted, 1.0 - tail);
    const auto ms = mean_std(sorted);
    m.e_mean = ms.mean;
    m.e_std = std::max(ms.stddev, 1e-4);
    if (!(m.e_lo < m.e_hi)) {
        m.e_lo -= 1e-4;
        m.e_hi += 1e-4;
    }
    // Keep the mean inside the interval for skewed samples.
    m.e_mean = std::clamp(m.e_mean, m.e_lo, m.e_hi);
    return m;
}

CheddadModel train_cheddad(const DatasetManifest& manifest, double mass) {
    std::vector<double> values;
    for (const auto& e : manifest.entries) {
        if (e.mask.empty()) throw TooFewSamples("manifest entry without a mask: " + e.image.string());
        const Image img = load_image(e.image);
        const LabelMask truth = load_mask(e.mask);
        if (!img.same_shape(truth)) throw DimensionMismatch("image and mask sizes differ: " + e.image.string());
        for (std::size_t i = 0; i < img.size(); ++i)
            if (truth[i] == Label::Skin) values.push_back(cheddad_e(img[i]));
    }
    return fit_cheddad(values, mass);
}

double cheddad_probability(const CheddadModel& m, double e) noexcept {
    if (e < m.e_lo || e > m.e_hi) return 0.0;
    const double z = (e - m.e_mean) / m.e_std;
    return std::exp(-0.5 * z * z);
}

ProbabilityMap cheddad_detect(const Image& img, const CheddadModel& m) {
    ProbabilityMap out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = cheddad_probability(m, cheddad_e(img[i]));
    return out;
}

void DycParams::validate() const {
    if (!(0 <= y_lo && y_lo < y_hi && y_hi <= 255)) throw std::invalid_argument("DYC luma gate must satisfy 0 <= lo < hi <= 255");
    if (!(cb_lo <= cb_hi && cr_lo <= cr_hi)) throw std::invalid_argument("DYC chroma gate is empty");
    if (!(quantile > 0 && quantile < 0.5)) throw std::invalid_argument("DYC quantile must be in (0,0.5)");
    if (!(delta > 0)) throw std::invalid_argument("DYC delta must be positive");
}

LabelMask dyc_detect(const Image& img, const DycParams& params) {
    params.validate();
    std::vector<YCbCr> ycc(img.size());
    std::vector<double> cbs, crs;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const YCbCr c = rgb_to_ycbcr(img[i]);
        ycc[i] = c;
        if (c.y >= params.y_lo && c.y <= params.y_hi && c.cb >= params.cb_lo && c.cb <= params.cb_hi &&
            c.cr >= params.cr_lo && c.cr <= params.cr_hi) {
            cbs.push_back(c.cb);
            crs.push_back(c.cr);
        }
    }
    LabelMask out(img.width(), img.height(), Label::NonSkin);
    if (cbs.empty()) return out;

    // Least squares Cr = a*Cb + c. Sums are taken over the sorted-by-value
    // pairs so the fit does not depend on pixel order.
    std::vector<std::pair<double, double>> pairs(cbs.size());
    for (std::size_t i = 0; i < cbs.size(); ++i) pairs[i] = {cbs[i], crs[i]};
    std::sort(pairs.begin(), pairs.end());
    const double n = static_cast<double>(pairs.size());
    double mcb = 0, mcr = 0;
    for (const auto& [cb, cr] : pairs) {
        mcb += cb;
        mcr += cr;
    }
    mcb /= n;
    mcr /= n;
    double sxy = 0, sxx = 0;
    for (const auto& [cb, cr] : pairs) {
        sxy += (cb - mcb) * (cr - mcr);
        sxx += (cb - mcb) * (cb - mcb);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    const double intercept = mcr - slope * mcb;

    std::sort(cbs.begin(), cbs.end());
    std::sort(crs.begin(), crs.end());
    const double cb_lo = sorted_quantile(cbs, params.quantile), cb_hi = sorted_quantile(cbs, 1 - params.quantile);
    const double cr_lo = sorted_quantile(crs, params.quantile), cr_hi = sorted_quantile(crs, 1 - params.quantile);

    for (std::size_t i = 0; i < img.size(); ++i) {
        const YCbCr& c = ycc[i];
        const bool in_range = c.cb >= cb_lo && c.cb <= cb_hi && c.cr >= cr_lo && c.cr <= cr_hi;
        if (in_range && std::abs(c.cr - (slope * c.cb + intercept)) <= params.delta) out[i] = Label::Skin;
    }
    return out;
}

}  // namespace skinbench
