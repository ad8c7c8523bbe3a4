#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "carsr/image.hpp"

namespace carsr {

struct TestPair {
    std::string name;
    Image hr;        // center-cropped to a multiple of the scale
    Image lr_clean;  // bicubic LR
    Image lr;        // bicubic LR after JPEG at the set's quality
};

struct FileFailure {
    std::string name;
    std::string message;
};

struct TestSet {
    int quality = 0;
    int scale = 0;
    std::vector<TestPair> pairs;
    std::vector<FileFailure> failures;
};

/// Degrades every image of `dir` at a fixed quality. Undecodable files are
/// reported in `failures` and skipped.
TestSet degrade_testset(const std::filesystem::path& dir, int quality, int scale = 4);

}  // namespace carsr
