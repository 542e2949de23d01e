#include "skinbench/dataset.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "skinbench/errors.hpp"

namespace skinbench {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) out.push_back(field);
    if (!line.empty() && line.back() == '\t') out.emplace_back();
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) return base / path;
    return path;
}

}  // namespace

DatasetManifest DatasetManifest::parse(std::istream& in, const std::filesystem::path& base_dir) {
    DatasetManifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() < 2 || fields.size() > 3)
            throw ConfigError("expected 2 or 3 TAB-separated fields, got " + std::to_string(fields.size()), lineno);
        if (fields[0].empty()) throw ConfigError("empty image path", lineno);
        ManifestEntry e;
        e.image = resolve(base_dir, fields[0]);
        if (fields[1] != "-" && !fields[1].empty()) e.mask = resolve(base_dir, fields[1]);
        if (fields.size() == 3) e.group = fields[2];
        m.entries.push_back(std::move(e));
    }
    return m;
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    return parse(in, path.parent_path());
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    for (const auto& e : manifest.entries) {
        out << e.image.string() << '\t' << (e.mask.empty() ? std::string("-") : e.mask.string());
        if (!e.group.empty()) out << '\t' << e.group;
        out << '\n';
    }
}

}  // namespace skinbench
