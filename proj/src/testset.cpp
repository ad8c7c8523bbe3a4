#include "carsr/testset.hpp"

#include "carsr/errors.hpp"
#include "carsr/jpeg_codec.hpp"
#include "carsr/resample.hpp"

namespace carsr {

TestSet degrade_testset(const std::filesystem::path& dir, int quality, int scale) {
    if (quality < 1 || quality > 100) throw DomainError("quality must be in [1, 100]");
    if (scale < 1) throw DomainError("scale must be >= 1");
    TestSet set;
    set.quality = quality;
    set.scale = scale;
    for (const auto& file : list_images(dir)) {
        const std::string name = file.filename().string();
        try {
            TestPair p;
            p.name = name;
            p.hr = read_image(file).center_crop_to_multiple(scale);
            p.lr_clean = bicubic_downscale(p.hr, scale);
            p.lr = jpeg_roundtrip(p.lr_clean, quality);
            set.pairs.push_back(std::move(p));
        } catch (const Error& e) {
            set.failures.push_back({name, e.what()});
        }
    }
    return set;
}

}  // namespace carsr
