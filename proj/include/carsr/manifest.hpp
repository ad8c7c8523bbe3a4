#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "carsr/image.hpp"
#include "carsr/synthesis.hpp"

namespace carsr {

struct ManifestEntry {
    std::string source;  // file name inside the manifest's source_dir
    PairRecipe recipe;

    friend bool operator==(const ManifestEntry& a, const ManifestEntry& b) {
        return a.source == b.source && a.recipe.x == b.recipe.x && a.recipe.y == b.recipe.y &&
               a.recipe.qf == b.recipe.qf && a.recipe.transform_id == b.recipe.transform_id;
    }
};

/// Reproducible list of training pairs. Regenerating from (source_dir, spec,
/// seed, count, hr_patch) yields the same entries.
struct DatasetManifest {
    std::string source_dir;
    std::uint64_t seed = 0;
    DegradeSpec spec;
    int hr_patch = kDefaultHrPatch;
    std::string codec_id;
    std::vector<ManifestEntry> entries;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Entry i draws from its own stream seeded by derive_seed(seed, i). Sources
/// smaller than the patch are skipped; throws InputError when none remain.
DatasetManifest build_manifest(const std::filesystem::path& source_dir, const DegradeSpec& spec,
                               std::uint64_t seed, std::size_t count, int hr_patch = kDefaultHrPatch);

/// Line-delimited JSON: one header record, then one record per entry.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
std::string serialize_manifest(const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Per-qf entry counts, for summaries.
std::map<int, std::size_t> qf_histogram(const DatasetManifest& manifest);

/// Decodes every referenced source once and synthesizes pairs on demand.
class ManifestPairs final : public PairSource {
public:
    explicit ManifestPairs(DatasetManifest manifest);

    std::size_t size() const override { return manifest_.entries.size(); }
    PatchPair pair(std::size_t index) const override;
    const DatasetManifest& manifest() const noexcept { return manifest_; }

private:
    DatasetManifest manifest_;
    std::map<std::string, Image> sources_;
};

}  // namespace carsr
