#include "carsr/manifest.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "carsr/errors.hpp"
#include "carsr/jpeg_codec.hpp"

namespace carsr {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json spec_to_json(const DegradeSpec& spec) {
    json j = {{"scale", spec.scale}, {"kernel", spec.kernel}, {"qf_min", spec.qf_min}, {"qf_max", spec.qf_max}};
    j["fixed_qf"] = spec.fixed_qf ? json(*spec.fixed_qf) : json(nullptr);
    return j;
}

DegradeSpec spec_from_json(const json& j) {
    DegradeSpec spec;
    spec.scale = j.at("scale").get<int>();
    spec.kernel = j.at("kernel").get<std::string>();
    spec.qf_min = j.at("qf_min").get<int>();
    spec.qf_max = j.at("qf_max").get<int>();
    if (j.contains("fixed_qf") && !j.at("fixed_qf").is_null()) spec.fixed_qf = j.at("fixed_qf").get<int>();
    return spec;
}

}  // namespace

DatasetManifest build_manifest(const fs::path& source_dir, const DegradeSpec& spec, std::uint64_t seed,
                               std::size_t count, int hr_patch) {
    validate(spec);
    if (hr_patch < spec.scale || hr_patch % spec.scale != 0) {
        throw ConfigError("hr_patch", "must be a positive multiple of the scale");
    }
    const auto files = list_images(source_dir);
    struct Source {
        std::string name;
        int height;
        int width;
    };
    std::vector<Source> usable;
    for (const auto& file : files) {
        const Image img = read_image(file);
        if (img.height() >= hr_patch && img.width() >= hr_patch) {
            usable.push_back({file.filename().string(), img.height(), img.width()});
        }
    }
    if (usable.empty()) {
        throw InputError("no decodable images of at least " + std::to_string(hr_patch) + "px in " +
                         source_dir.string());
    }

    DatasetManifest m;
    m.source_dir = source_dir.string();
    m.seed = seed;
    m.spec = spec;
    m.hr_patch = hr_patch;
    m.codec_id = jpeg_codec_id();
    m.entries.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        const auto& src = usable[std::uniform_int_distribution<std::size_t>(0, usable.size() - 1)(rng)];
        m.entries.push_back({src.name, draw_recipe(src.height, src.width, spec, hr_patch, rng)});
    }
    return m;
}

std::string serialize_manifest(const DatasetManifest& m) {
    std::ostringstream out;
    const json header = {{"record", "header"},       {"source_dir", m.source_dir}, {"seed", m.seed},
                         {"spec", spec_to_json(m.spec)}, {"hr_patch", m.hr_patch},   {"codec_id", m.codec_id},
                         {"count", m.entries.size()}};
    out << header.dump() << '\n';
    for (const auto& e : m.entries) {
        const json rec = {{"source", e.source},
                          {"x", e.recipe.x},
                          {"y", e.recipe.y},
                          {"qf", e.recipe.qf},
                          {"transform_id", e.recipe.transform_id}};
        out << rec.dump() << '\n';
    }
    return out.str();
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << serialize_manifest(m);
    if (!out) throw IoError("cannot write manifest " + path.string());
}

DatasetManifest read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open manifest " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty manifest " + path.string());
    DatasetManifest m;
    std::size_t expected = 0;
    try {
        const json header = json::parse(line);
        m.source_dir = header.at("source_dir").get<std::string>();
        m.seed = header.at("seed").get<std::uint64_t>();
        m.spec = spec_from_json(header.at("spec"));
        m.hr_patch = header.at("hr_patch").get<int>();
        m.codec_id = header.at("codec_id").get<std::string>();
        expected = header.at("count").get<std::size_t>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json rec = json::parse(line);
            ManifestEntry e;
            e.source = rec.at("source").get<std::string>();
            e.recipe.x = rec.at("x").get<int>();
            e.recipe.y = rec.at("y").get<int>();
            e.recipe.qf = rec.at("qf").get<int>();
            e.recipe.transform_id = rec.at("transform_id").get<int>();
            m.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw InputError("malformed manifest " + path.string() + ": " + e.what());
    }
    if (m.entries.size() != expected) {
        throw InputError("manifest " + path.string() + " declares " + std::to_string(expected) + " entries, found " +
                         std::to_string(m.entries.size()));
    }
    return m;
}

std::map<int, std::size_t> qf_histogram(const DatasetManifest& manifest) {
    std::map<int, std::size_t> hist;
    for (const auto& e : manifest.entries) ++hist[e.recipe.qf];
    return hist;
}

ManifestPairs::ManifestPairs(DatasetManifest manifest) : manifest_(std::move(manifest)) {
    validate(manifest_.spec);
    for (const auto& e : manifest_.entries) {
        if (sources_.contains(e.source)) continue;
        sources_.emplace(e.source, read_image(fs::path(manifest_.source_dir) / e.source));
    }
}

PatchPair ManifestPairs::pair(std::size_t index) const {
    const ManifestEntry& e = manifest_.entries.at(index);
    return make_pair(sources_.at(e.source), manifest_.spec, manifest_.hr_patch, e.recipe);
}

}  // namespace carsr
