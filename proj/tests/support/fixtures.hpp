#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "skinbench/skinbench.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace skinbench;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("skinbench-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Rgb random_rgb(std::mt19937_64& rng) {
    return {static_cast<std::uint8_t>(rng() & 0xff), static_cast<std::uint8_t>(rng() & 0xff),
            static_cast<std::uint8_t>(rng() & 0xff)};
}

inline Image random_image(std::mt19937_64& rng, int w, int h) {
    Image img(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = random_rgb(rng);
    return img;
}

inline ProbabilityMap random_map(std::mt19937_64& rng, int w, int h) {
    ProbabilityMap m(w, h);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = uniform(rng);
    return m;
}

/// Binary mask with the given skin probability.
inline LabelMask random_binary_mask(std::mt19937_64& rng, int w, int h, double p_skin = 0.5) {
    LabelMask m(w, h);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = uniform(rng) < p_skin ? Label::Skin : Label::NonSkin;
    return m;
}

/// Skin and background colors live in disjoint 8-level bins.
inline Rgb skin_color(std::mt19937_64& rng) {
    return {static_cast<std::uint8_t>(uniform_int(rng, 200, 215)), static_cast<std::uint8_t>(uniform_int(rng, 120, 135)),
            static_cast<std::uint8_t>(uniform_int(rng, 80, 95))};
}

inline Rgb background_color(std::mt19937_64& rng) {
    return {static_cast<std::uint8_t>(uniform_int(rng, 16, 31)), static_cast<std::uint8_t>(uniform_int(rng, 160, 175)),
            static_cast<std::uint8_t>(uniform_int(rng, 200, 215))};
}

struct LabelledImage {
    Image image;
    LabelMask truth;
};

/// A rectangle of skin colors on a background; truth marks the rectangle.
inline LabelledImage separable_sample(std::mt19937_64& rng, int w, int h) {
    LabelledImage s{Image(w, h), LabelMask(w, h, Label::NonSkin)};
    const int x0 = uniform_int(rng, 0, w / 2), y0 = uniform_int(rng, 0, h / 2);
    const int x1 = x0 + uniform_int(rng, w / 4, w / 2), y1 = y0 + uniform_int(rng, h / 4, h / 2);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool skin = x >= x0 && x < x1 && y >= y0 && y < y1;
            s.image.at(x, y) = skin ? skin_color(rng) : background_color(rng);
            s.truth.at(x, y) = skin ? Label::Skin : Label::NonSkin;
        }
    return s;
}

/// Writes images/masks as PNGs plus a manifest; returns the manifest path.
inline fs::path write_dataset(const fs::path& dir, const std::vector<LabelledImage>& samples,
                              const std::string& name = "data", const std::vector<std::string>& groups = {}) {
    fs::create_directories(dir / name);
    const fs::path manifest = dir / (name + ".tsv");
    std::ofstream out(manifest);
    out << "# image\tmask\tgroup\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string stem = name + "_" + std::to_string(i);
        save_image(samples[i].image, dir / name / (stem + ".png"));
        save_mask(samples[i].truth, dir / name / (stem + "_gt.png"));
        out << name << "/" << stem << ".png\t" << name << "/" << stem << "_gt.png";
        if (i < groups.size()) out << '\t' << groups[i];
        out << '\n';
    }
    return manifest;
}

inline std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testsupport
