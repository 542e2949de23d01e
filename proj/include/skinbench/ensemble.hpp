#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skinbench/detectors.hpp"

namespace skinbench {

/// Weighted vote: a pixel is skin iff the summed weight of members voting
/// skin is strictly greater than (sum of all weights) / wtau.
LabelMask vote(std::span<const LabelMask> masks, std::span<const double> weights, double wtau);

/// <dir>/<image_id>.png read as 8-bit gray, p = gray/255. The map must be
/// width x height.
ProbabilityMap ingest_external_map(const std::filesystem::path& dir, const std::string& image_id, int width,
                                   int height);

struct EnsembleMember {
    std::string name;
    double tau = 0;
    double weight = 0;
    std::filesystem::path map_dir;     // external members only
    Method base = Method::Bayes;       // probability source for sa1/sa2/sa3

    /// Built-in detector when the name is a method name, nullopt for an
    /// external map source.
    std::optional<Method> builtin() const noexcept { return parse_method(name); }
};

/// Text format, one directive per line (`#` comments, blank lines ignored):
///
///   wtau 1.5
///   member name=sa1 tau=175 weight=0.5
///   member name=segnet tau=128 weight=5.5 map_dir=/maps/segnet
///
/// `tau` defaults to the method default (128 for external maps); `base`
/// optionally names the probability source of sa1/sa2/sa3.
struct EnsembleConfig {
    std::vector<EnsembleMember> members;
    double wtau = 1.5;

    static EnsembleConfig parse(std::istream& in);
    static EnsembleConfig load(const std::filesystem::path& path);
    std::string to_text() const;

    /// Checks weights, wtau > 1, a positive total weight over the members and
    /// a map_dir for every external member with non-zero weight.
    void validate() const;
};

inline constexpr double kExternalDefaultTau = 128;

inline constexpr std::array<const char*, 9> kVoteMemberNames{"sa1",   "sa2",    "sa3",  "cheddad", "dyc",
                                                             "bayes", "segnet", "unet", "deeplab"};
inline constexpr std::array<double, 9> kVoteMemberTaus{175, 50, 50, 125, 0, 110, kExternalDefaultTau,
                                                       kExternalDefaultTau, kExternalDefaultTau};
inline constexpr std::array<std::array<double, 9>, 4> kVoteWeights{{
    {0.5, 1.5, 1, 1.5, 0.5, 1, 0, 0, 0},
    {0.5, 1.5, 1, 1.5, 0, 1, 5.5, 0, 0},
    {0.5, 1.5, 1, 1.5, 0, 1, 5.5, 2.75, 0},
    {0.25, 0.75, 0.5, 0.75, 0, 0.5, 2.75, 1.375, 5.5},
}};
/// Best wtau per preset (Vote1 1.5, Vote2-4 1.75).
inline constexpr std::array<double, 4> kVoteDefaultWtau{1.5, 1.75, 1.75, 1.75};

/// Built-in Vote1..Vote4 configurations (`which` in 1..4). External
/// members get their map_dir from `map_dirs` when present.
EnsembleConfig vote_preset(int which, std::optional<double> wtau = std::nullopt,
                           const std::map<std::string, std::filesystem::path>& map_dirs = {});

/// Runs every member with non-zero weight on `img` and fuses their masks.
/// `image_id` names the external map files.
LabelMask run_ensemble(const EnsembleConfig& cfg, const Image& img, const std::string& image_id,
                       const ModelSet& models);

/// Model slots the built-in members of `cfg` need but `models` lacks.
std::vector<std::string> missing_models(const EnsembleConfig& cfg, const ModelSet& models);

}  // namespace skinbench
