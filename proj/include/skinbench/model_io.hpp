#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "skinbench/gmm.hpp"
#include "skinbench/histogram.hpp"
#include "skinbench/rule_detectors.hpp"
#include "skinbench/spatial.hpp"

namespace skinbench {

// Model file layout, all integers and doubles little-endian:
//
//   char[4]  magic "SKND"
//   u32      format version (currently 1)
//   u32      model type tag (ModelType)
//   ...      parameter block:
//     Histogram  u32 bins; u64 skin[bins^3]; u64 nonskin[bins^3]
//     Gmm        f64 skin_prior; then skin and non-skin mixtures, each
//                u32 K; K x (f64 weight, f64 mean[3], f64 variance[3])
//     Cheddad    f64 e_lo, e_hi, e_mean, e_std
//     Lda        u32 dims; f64 weights[dims]; f64 offset; f64 scale
//
// The file must end exactly after the parameter block.

enum class ModelType : std::uint32_t { Histogram = 1, Gmm = 2, Cheddad = 3, Lda = 4 };

inline constexpr std::uint32_t kModelFormatVersion = 1;

using AnyModel = std::variant<HistogramModel, GmmModel, CheddadModel, LdaModel>;

ModelType model_type(const AnyModel& m) noexcept;
std::string model_type_name(ModelType t);

std::vector<std::uint8_t> save_model(const AnyModel& m);

/// Throws FormatError (bad magic, unknown tag, truncated or trailing data)
/// or VersionError.
AnyModel load_model(std::span<const std::uint8_t> bytes);

void save_model_file(const AnyModel& m, const std::filesystem::path& path);
AnyModel load_model_file(const std::filesystem::path& path);

}  // namespace skinbench
