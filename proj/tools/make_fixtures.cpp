// Writes a directory of procedural PNG scenes for smoke runs and tests.
#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "carsr/errors.hpp"
#include "carsr/fixtures.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic scene images"};
    std::string out_dir;
    int count = 8;
    int height = 192;
    int width = 192;
    std::uint64_t seed = 1;
    app.add_option("--out", out_dir, "Output directory")->required();
    app.add_option("--count", count, "Number of images")->check(CLI::PositiveNumber);
    app.add_option("--height", height, "Image height")->check(CLI::PositiveNumber);
    app.add_option("--width", width, "Image width")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Scene seed");
    CLI11_PARSE(app, argc, argv);
    try {
        carsr::fixtures::write_scene_set(out_dir, count, height, width, seed);
    } catch (const carsr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    std::cout << "wrote " << count << " images to " << out_dir << '\n';
    return 0;
}
