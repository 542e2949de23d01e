#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace skinbench {

/// One manifest line. `mask` is empty when the file gives "-" (allowed for
/// the face/non-face protocol, which needs no ground-truth mask).
struct ManifestEntry {
    std::filesystem::path image;
    std::filesystem::path mask;
    std::string group;

    /// Image file stem; predictions and external maps are keyed by it.
    std::string id() const { return image.stem().string(); }
};

/// TAB-separated text: image_path, mask_path[, group_id]. `#` starts a
/// comment line; blank lines are skipped. Relative paths resolve against
/// the manifest's directory.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    static DatasetManifest parse(std::istream& in, const std::filesystem::path& base_dir = {});
    static DatasetManifest load(const std::filesystem::path& path);

    bool empty() const noexcept { return entries.empty(); }
    std::size_t size() const noexcept { return entries.size(); }
};

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace skinbench
