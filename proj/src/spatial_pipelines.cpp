#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skinbench/colorspaces.hpp"
#include "skinbench/spatial.hpp"

namespace skinbench {

ProbabilityMap sa2_map(const ProbabilityMap& base, const LdaModel& model) {
    return lda_map(texture_features(base), model);
}

LabelMask sa2_detect(const ProbabilityMap& base, const LdaModel& model, double tau, Threshold8 seed_q) {
    const ProbabilityMap refined = sa2_map(base, model);
    return threshold_distance(propagate(refined, extract_seeds_fixed(refined, seed_q)), tau);
}

double ChromaGaussian::probability(double cb, double cr) const noexcept {
    const double zb = (cb - cb_mean) * (cb - cb_mean) / cb_var;
    const double zr = (cr - cr_mean) * (cr - cr_mean) / cr_var;
    return std::exp(-0.5 * (zb + zr));
}

ChromaGaussian fit_chroma_model(const Image& img, const SeedMask& seeds) {
    if (!img.same_shape(seeds)) throw DimensionMismatch("image and seed mask sizes differ");
    double n = 0, sb = 0, sr = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        if (seeds.is_seed(i)) {
            const YCbCr c = rgb_to_ycbcr(img[i]);
            sb += c.cb;
            sr += c.cr;
            n += 1;
        }
    if (n == 0) throw std::invalid_argument("chroma model needs at least one seed");
    ChromaGaussian g;
    g.cb_mean = sb / n;
    g.cr_mean = sr / n;
    double vb = 0, vr = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        if (seeds.is_seed(i)) {
            const YCbCr c = rgb_to_ycbcr(img[i]);
            vb += (c.cb - g.cb_mean) * (c.cb - g.cb_mean);
            vr += (c.cr - g.cr_mean) * (c.cr - g.cr_mean);
        }
    g.cb_var = std::max(1.0, vb / n);
    g.cr_var = std::max(1.0, vr / n);
    return g;
}

ProbabilityMap chroma_map(const Image& img, const ChromaGaussian& model) {
    ProbabilityMap out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const YCbCr c = rgb_to_ycbcr(img[i]);
        out[i] = model.probability(c.cb, c.cr);
    }
    return out;
}

ProbabilityMap blend_maps(const ProbabilityMap& base, const ProbabilityMap& local) {
    if (!base.same_shape(local)) throw DimensionMismatch("blended maps differ in size");
    ProbabilityMap out(base.width(), base.height());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = 0.5 * base[i] + 0.5 * local[i];
    return out;
}

LabelMask sa3_detect(const Image& img, const ProbabilityMap& base, double tau) {
    if (!img.same_shape(base)) throw DimensionMismatch("image and base map sizes differ");
    const SeedMask seeds = extract_seeds_adaptive(base);
    if (seeds.count() == 0) return LabelMask(img.width(), img.height(), Label::NonSkin);
    const ProbabilityMap blended = blend_maps(base, chroma_map(img, fit_chroma_model(img, seeds)));
    return threshold_distance(propagate(blended, seeds), tau);
}

}  // namespace skinbench
