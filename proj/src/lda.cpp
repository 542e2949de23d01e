#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "skinbench/spatial.hpp"

namespace skinbench {
namespace {

constexpr double kRegularization = 1e-6;

Eigen::VectorXd class_mean(const std::vector<double>& rows, int dims) {
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size()) / dims;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(rows.data(), n, dims);
    return x.colwise().mean().transpose();
}

void add_scatter(const std::vector<double>& rows, int dims, const Eigen::VectorXd& mean, Eigen::MatrixXd& scatter) {
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size()) / dims;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(rows.data(), n, dims);
    const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    scatter += centered.transpose() * centered;
}

}  // namespace

double LdaModel::project(std::span<const double> x) const {
    if (x.size() != weights.size()) throw DimensionMismatch("feature vector length does not match LDA model");
    double s = offset;
    for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
    return s;
}

double LdaModel::probability(std::span<const double> x) const {
    return 1.0 / (1.0 + std::exp(-scale * project(x)));
}

void LdaSamples::add(const TextureFeatures& features, const LabelMask& truth, std::size_t stride) {
    if (dims != kTextureDims) throw std::invalid_argument("texture samples must be 16-dimensional");
    if (features.width() != truth.width() || features.height() != truth.height())
        throw DimensionMismatch("feature and mask sizes differ");
    stride = std::max<std::size_t>(stride, 1);
    std::size_t labelled = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::DontCare) continue;
        if (labelled++ % stride != 0) continue;
        auto& bag = truth[i] == Label::Skin ? skin : nonskin;
        const auto f = features[i];
        bag.insert(bag.end(), f.begin(), f.end());
    }
}

LdaFit train_lda(const LdaSamples& samples) {
    const int d = samples.dims;
    if (d < 1) throw std::invalid_argument("LDA needs at least one feature dimension");
    if (samples.skin.size() % static_cast<std::size_t>(d) != 0 || samples.nonskin.size() % static_cast<std::size_t>(d) != 0)
        throw DimensionMismatch("sample buffer length is not a multiple of the feature dimension");
    if (samples.skin_count() == 0 || samples.nonskin_count() == 0)
        throw TooFewSamples("LDA needs samples from both classes");

    const Eigen::VectorXd mu_s = class_mean(samples.skin, d);
    const Eigen::VectorXd mu_n = class_mean(samples.nonskin, d);
    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
    add_scatter(samples.skin, d, mu_s, sw);
    add_scatter(samples.nonskin, d, mu_n, sw);
    sw /= static_cast<double>(samples.skin_count() + samples.nonskin_count());
    sw += kRegularization * Eigen::MatrixXd::Identity(d, d);

    Eigen::VectorXd w = sw.ldlt().solve(mu_s - mu_n);
    LdaFit fit;
    const double norm = w.norm();
    if (!(norm > 0) || !std::isfinite(norm)) {
        w = Eigen::VectorXd::Unit(d, 0);
        fit.low_separation = true;
    } else {
        w /= norm;
    }
    if (w.dot(mu_s - mu_n) < 0) w = -w;

    const double ps = w.dot(mu_s), pn = w.dot(mu_n);
    fit.separation = ps - pn;
    fit.model.weights.assign(w.data(), w.data() + d);
    fit.model.offset = -(ps + pn) / 2.0;
    if (fit.separation > 1e-9) {
        fit.model.scale = 2.0 * std::log(19.0) / fit.separation;
    } else {
        fit.model.scale = 1.0;
        fit.low_separation = true;
    }
    return fit;
}

ProbabilityMap lda_map(const TextureFeatures& features, const LdaModel& model) {
    ProbabilityMap out(features.width(), features.height());
    for (std::size_t i = 0; i < features.size(); ++i) out[i] = model.probability(features[i]);
    return out;
}

}  // namespace skinbench
