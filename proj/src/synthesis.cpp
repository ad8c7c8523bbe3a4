#include "carsr/synthesis.hpp"

#include "carsr/errors.hpp"
#include "carsr/jpeg_codec.hpp"
#include "carsr/resample.hpp"

namespace carsr {

void validate(const DegradeSpec& spec) {
    if (spec.scale < 1) throw ConfigError("DegradeSpec.scale", "must be >= 1");
    if (spec.kernel != "bicubic_antialiased") {
        throw ConfigError("DegradeSpec.kernel", "unknown kernel '" + spec.kernel + "' (valid: bicubic_antialiased)");
    }
    if (spec.qf_min < 1 || spec.qf_min > 100) throw ConfigError("DegradeSpec.qf_min", "must be in [1, 100]");
    if (spec.qf_max < spec.qf_min || spec.qf_max > 100) {
        throw ConfigError("DegradeSpec.qf_max", "must be in [qf_min, 100]");
    }
    if (spec.fixed_qf && (*spec.fixed_qf < 1 || *spec.fixed_qf > 100)) {
        throw ConfigError("DegradeSpec.fixed_qf", "must be in [1, 100]");
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

PairRecipe draw_recipe(int source_height, int source_width, const DegradeSpec& spec, int hr_patch,
                       std::mt19937_64& rng) {
    if (hr_patch < spec.scale || hr_patch % spec.scale != 0) {
        throw ConfigError("hr_patch", "must be a positive multiple of the scale");
    }
    if (source_height < hr_patch || source_width < hr_patch) {
        throw DomainError("source image " + std::to_string(source_height) + "x" + std::to_string(source_width) +
                          " smaller than the " + std::to_string(hr_patch) + "px patch");
    }
    PairRecipe r;
    r.x = std::uniform_int_distribution<int>(0, source_width - hr_patch)(rng);
    r.y = std::uniform_int_distribution<int>(0, source_height - hr_patch)(rng);
    r.qf = spec.fixed_qf ? *spec.fixed_qf : std::uniform_int_distribution<int>(spec.qf_min, spec.qf_max)(rng);
    r.transform_id = std::uniform_int_distribution<int>(0, kDihedralCount - 1)(rng);
    return r;
}

PatchPair make_pair(const Image& hr_img, const DegradeSpec& spec, int hr_patch, const PairRecipe& recipe) {
    PatchPair pair;
    pair.hr = dihedral(hr_img.crop(recipe.y, recipe.x, hr_patch, hr_patch), recipe.transform_id);
    pair.lr_clean = bicubic_downscale(pair.hr, spec.scale);
    pair.lr = jpeg_roundtrip(pair.lr_clean, recipe.qf);
    pair.qf = recipe.qf;
    pair.transform_id = recipe.transform_id;
    return pair;
}

PatchPair synthesize_pair(const Image& hr_img, const DegradeSpec& spec, std::mt19937_64& rng, int hr_patch) {
    validate(spec);
    const PairRecipe recipe = draw_recipe(hr_img.height(), hr_img.width(), spec, hr_patch, rng);
    return make_pair(hr_img, spec, hr_patch, recipe);
}

PatchPair augment_dihedral(const PatchPair& pair, int transform_id) {
    PatchPair out;
    out.lr = dihedral(pair.lr, transform_id);
    out.lr_clean = pair.lr_clean.empty() ? Image{} : dihedral(pair.lr_clean, transform_id);
    out.hr = dihedral(pair.hr, transform_id);
    out.qf = pair.qf;
    out.transform_id = dihedral_compose(transform_id, pair.transform_id);
    return out;
}

}  // namespace carsr
