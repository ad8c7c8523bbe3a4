#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "carsr/image.hpp"

namespace carsr {

/// How a clean HR image becomes the low-resolution, low-quality input.
struct DegradeSpec {
    int scale = 4;
    std::string kernel = "bicubic_antialiased";
    int qf_min = 10;
    int qf_max = 100;
    std::optional<int> fixed_qf;

    friend bool operator==(const DegradeSpec&, const DegradeSpec&) = default;
};

/// Throws ConfigError naming the first invalid field.
void validate(const DegradeSpec& spec);

inline constexpr int kDefaultHrPatch = 128;

struct PatchPair {
    Image lr;        // degraded input, 3 x p x p
    Image lr_clean;  // bicubic LR before compression
    Image hr;        // ground truth, 3 x sp x sp
    int qf = 0;
    int transform_id = 0;
};

/// Where a pair is cut from and how it is degraded; fully determines the pair.
struct PairRecipe {
    int x = 0;
    int y = 0;
    int qf = 0;
    int transform_id = 0;
};

/// Draws crop origin, quality factor and dihedral transform for a source of the given size.
PairRecipe draw_recipe(int source_height, int source_width, const DegradeSpec& spec, int hr_patch,
                       std::mt19937_64& rng);

/// Crops the HR patch, applies the dihedral transform, then builds
/// LR = jpeg(bicubic_downscale(patch, s), qf).
PatchPair make_pair(const Image& hr_img, const DegradeSpec& spec, int hr_patch, const PairRecipe& recipe);

/// Random crop / quality / transform, then make_pair. Throws DomainError when
/// the source is smaller than the patch.
PatchPair synthesize_pair(const Image& hr_img, const DegradeSpec& spec, std::mt19937_64& rng,
                          int hr_patch = kDefaultHrPatch);

/// Applies the same dihedral transform to every image of the pair. The
/// stored transform id becomes the composition with the previous one.
PatchPair augment_dihedral(const PatchPair& pair, int transform_id);

/// Indexed collection of training pairs.
class PairSource {
public:
    virtual ~PairSource() = default;
    virtual std::size_t size() const = 0;
    virtual PatchPair pair(std::size_t index) const = 0;
};

/// Pairs held in memory.
class PairList final : public PairSource {
public:
    explicit PairList(std::vector<PatchPair> pairs) : pairs_(std::move(pairs)) {}
    std::size_t size() const override { return pairs_.size(); }
    PatchPair pair(std::size_t index) const override { return pairs_.at(index); }

private:
    std::vector<PatchPair> pairs_;
};

/// splitmix64 mixing of (seed, index), used to derive independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace carsr
