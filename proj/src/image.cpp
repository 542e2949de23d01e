#include "skinbench/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace skinbench {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read " + path.string());
    return bytes;
}

// Decodes without any channel conversion so gray and alpha can be told apart.
cv::Mat decode(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.empty()) throw DecodeError("empty file " + path.string());
    cv::Mat raw;
    try {
        raw = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception& e) {
        throw DecodeError("cannot decode " + path.string() + ": " + e.what());
    }
    if (raw.empty()) throw DecodeError("unsupported or corrupt image " + path.string());
    if (raw.depth() != CV_8U) throw DecodeError("only 8-bit images are supported: " + path.string());
    return raw;
}

void write_png(const cv::Mat& mat, const std::filesystem::path& path) {
    std::vector<std::uint8_t> buf;
    try {
        if (!cv::imencode(".png", mat, buf)) throw IoError("cannot encode PNG for " + path.string());
    } catch (const cv::Exception& e) {
        throw IoError("cannot encode PNG for " + path.string() + ": " + e.what());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

cv::Mat gray_only(const std::filesystem::path& path) {
    cv::Mat raw = decode(path);
    if (raw.channels() == 1) return raw;
    if (raw.channels() == 2) {  // gray + alpha
        cv::Mat g;
        cv::extractChannel(raw, g, 0);
        return g;
    }
    throw DecodeError("expected a single-channel gray image: " + path.string());
}

}  // namespace

ProbabilityMap::ProbabilityMap(int width, int height, double fill) : Grid<double>(width, height, fill) {
    if (!(fill >= 0.0 && fill <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
}

ProbabilityMap::ProbabilityMap(int width, int height, std::vector<double> values)
    : Grid<double>(width, height, std::move(values)) {
    for (double v : this->values())
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
}

bool LabelMask::has_dont_care() const noexcept { return count(Label::DontCare) > 0; }

std::size_t LabelMask::count(Label l) const noexcept {
    const auto v = values();
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), l));
}

Threshold8::Threshold8(int value) : value_(value) {
    if (value < 0 || value > 255) throw std::invalid_argument("threshold must be in [0,255]");
}

Image load_image(const std::filesystem::path& path) {
    cv::Mat raw = decode(path);
    Image img(raw.cols, raw.rows);
    const int ch = raw.channels();
    for (int y = 0; y < raw.rows; ++y) {
        const std::uint8_t* row = raw.ptr<std::uint8_t>(y);
        for (int x = 0; x < raw.cols; ++x) {
            const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * ch;
            Rgb& out = img.at(x, y);
            if (ch <= 2) {
                out = {px[0], px[0], px[0]};
            } else {
                // OpenCV stores BGR(A)
                out = {px[2], px[1], px[0]};
            }
        }
    }
    return img;
}

void save_image(const Image& img, const std::filesystem::path& path) {
    cv::Mat mat(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const Rgb p = img.at(x, y);
            mat.at<cv::Vec3b>(y, x) = cv::Vec3b(p.b, p.g, p.r);
        }
    write_png(mat, path);
}

LabelMask load_mask(const std::filesystem::path& path) {
    cv::Mat g = gray_only(path);
    LabelMask mask(g.cols, g.rows);
    for (int y = 0; y < g.rows; ++y)
        for (int x = 0; x < g.cols; ++x) {
            const int v = g.at<std::uint8_t>(y, x);
            mask.at(x, y) = v >= 192 ? Label::Skin : (v <= 63 ? Label::NonSkin : Label::DontCare);
        }
    return mask;
}

void save_mask(const LabelMask& mask, const std::filesystem::path& path) {
    cv::Mat mat(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            std::uint8_t v = 128;
            switch (mask.at(x, y)) {
                case Label::Skin: v = 255; break;
                case Label::NonSkin: v = 0; break;
                case Label::DontCare: v = 128; break;
            }
            mat.at<std::uint8_t>(y, x) = v;
        }
    write_png(mat, path);
}

void save_probability_map(const ProbabilityMap& map, const std::filesystem::path& path) {
    cv::Mat mat(map.height(), map.width(), CV_8UC1);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            mat.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(std::lround(255.0 * map.at(x, y)));
    write_png(mat, path);
}

ProbabilityMap load_probability_map(const std::filesystem::path& path) {
    cv::Mat g = gray_only(path);
    ProbabilityMap map(g.cols, g.rows);
    for (int y = 0; y < g.rows; ++y)
        for (int x = 0; x < g.cols; ++x) map.at(x, y) = g.at<std::uint8_t>(y, x) / 255.0;
    return map;
}

LabelMask threshold_map(const ProbabilityMap& map, Threshold8 tau) {
    LabelMask out(map.width(), map.height());
    const double cut = tau.cutoff();
    for (std::size_t i = 0; i < map.size(); ++i) out[i] = map[i] >= cut ? Label::Skin : Label::NonSkin;
    return out;
}

}  // namespace skinbench
