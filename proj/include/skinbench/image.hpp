#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "skinbench/errors.hpp"

namespace skinbench {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major raster of `T`. Width and height are always at least 1.
template <class T>
class Grid {
public:
    using value_type = T;

    Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
        check_dims(width, height);
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Grid(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dims(width, height);
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw DimensionMismatch("raster data length does not match width*height");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool same_shape(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    static void check_dims(int w, int h) {
        if (w < 1 || h < 1) throw DimensionMismatch("raster dimensions must be at least 1x1");
    }
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<T> data_;
};

/// Decoded 8-bit RGB image.
class Image : public Grid<Rgb> {
public:
    using Grid<Rgb>::Grid;
};

/// Per-pixel skin probability, every value in [0,1].
class ProbabilityMap : public Grid<double> {
public:
    ProbabilityMap(int width, int height, double fill = 0.0);
    ProbabilityMap(int width, int height, std::vector<double> values);
};

enum class Label : std::uint8_t { NonSkin = 0, Skin = 1, DontCare = 2 };

/// Ground truth (may hold DontCare) or a prediction (never DontCare).
class LabelMask : public Grid<Label> {
public:
    using Grid<Label>::Grid;

    bool has_dont_care() const noexcept;
    std::size_t count(Label l) const noexcept;
};

/// Probability cutoff on the 0..255 scale; a pixel passes when p >= value/255.
class Threshold8 {
public:
    constexpr Threshold8() = default;
    explicit Threshold8(int value);

    int value() const noexcept { return value_; }
    double cutoff() const noexcept { return value_ / 255.0; }

    friend bool operator==(const Threshold8&, const Threshold8&) = default;

private:
    int value_ = 0;
};

Image load_image(const std::filesystem::path& path);
void save_image(const Image& img, const std::filesystem::path& path);

/// Reads an 8-bit gray PNG: >=192 skin, <=63 non-skin, anything between don't-care.
LabelMask load_mask(const std::filesystem::path& path);

/// Writes SKIN=255, NONSKIN=0, DONTCARE=128.
void save_mask(const LabelMask& mask, const std::filesystem::path& path);

/// 8-bit gray PNG, round(255*p). Lossy.
void save_probability_map(const ProbabilityMap& map, const std::filesystem::path& path);

/// gray/255 per pixel.
ProbabilityMap load_probability_map(const std::filesystem::path& path);

LabelMask threshold_map(const ProbabilityMap& map, Threshold8 tau);

}  // namespace skinbench
