#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "carsr/errors.hpp"
#include "carsr/fixtures.hpp"
#include "carsr/image.hpp"
#include "carsr/jpeg_codec.hpp"
#include "carsr/manifest.hpp"
#include "carsr/quality.hpp"
#include "carsr/resample.hpp"
#include "carsr/synthesis.hpp"
#include "carsr/testset.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace carsr;

namespace {

Image random_image(int c, int h, int w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    Image img(c, h, w);
    for (float& v : img.data()) v = u(rng);
    return img;
}

Image asymmetric_patch(int n) {
    Image img(3, n, n);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) img.at(c, y, x) = static_cast<float>((c + 1) * (y * n + x)) / (3.0f * n * n);
        }
    }
    return img;
}

std::vector<double> plane_values(const Image& img, int c) {
    return {img.plane(c).begin(), img.plane(c).end()};
}

}  // namespace

TEST_SUITE("image") {
    TEST_CASE("construction rejects empty shapes") {
        CHECK_THROWS_AS(Image(0, 4, 4), ShapeError);
        CHECK_THROWS_AS(Image(3, 4, -1), ShapeError);
        Image img(3, 2, 5, 0.25f);
        CHECK(img.size() == 30);
        CHECK(img.at(2, 1, 4) == 0.25f);
    }

    TEST_CASE("crop bounds and center crop") {
        const auto img = random_image(3, 10, 13, 1);
        const auto c = img.crop(2, 3, 4, 5);
        CHECK(c.at(1, 0, 0) == img.at(1, 2, 3));
        CHECK(c.at(2, 3, 4) == img.at(2, 5, 7));
        CHECK_THROWS_AS(img.crop(8, 0, 4, 4), ShapeError);
        const auto cc = img.center_crop_to_multiple(4);
        CHECK(cc.height() == 8);
        CHECK(cc.width() == 12);
        CHECK(cc.at(0, 0, 0) == img.at(0, 1, 0));
    }

    TEST_CASE("8-bit round trip is exact on quantized values") {
        Rgb8 rgb{4, 3, {}};
        for (int i = 0; i < 36; ++i) rgb.pixels.push_back(static_cast<std::uint8_t>(i * 7));
        CHECK(to_rgb8(from_rgb8(rgb)).pixels == rgb.pixels);
    }

    TEST_CASE("png round trip") {
        test::TempDir dir;
        const auto img = from_rgb8(to_rgb8(random_image(3, 9, 11, 2)));
        write_png(dir / "a.png", img);
        CHECK(read_image(dir / "a.png") == img);
        CHECK_THROWS_AS(read_image(dir / "missing.png"), Error);
    }
}

TEST_SUITE("dihedral") {
    TEST_CASE("identity, involution and order four") {
        const auto img = asymmetric_patch(5);
        CHECK(dihedral(img, 0) == img);
        CHECK(dihedral(dihedral(img, 4), 4) == img);
        auto r = img;
        for (int i = 0; i < 4; ++i) r = dihedral(r, 1);
        CHECK(r == img);
        CHECK_THROWS_AS(dihedral(img, 8), DomainError);
        CHECK_THROWS_AS(dihedral(img, -1), DomainError);
    }

    TEST_CASE("eight distinct images of an asymmetric patch") {
        const auto img = asymmetric_patch(6);
        std::vector<Image> outs;
        for (int t = 0; t < kDihedralCount; ++t) outs.push_back(dihedral(img, t));
        for (int a = 0; a < 8; ++a) {
            for (int b = a + 1; b < 8; ++b) CHECK_FALSE(outs[a] == outs[b]);
        }
    }

    TEST_CASE("one quarter turn is counter-clockwise") {
        Image img(1, 2, 2);
        img.at(0, 0, 0) = 1;  // top-left
        img.at(0, 0, 1) = 2;  // top-right
        const auto r = dihedral(img, 1);
        CHECK(r.at(0, 0, 0) == 2.0f);  // top-right moves to top-left
        CHECK(r.at(0, 1, 0) == 1.0f);
    }

    TEST_CASE("inverse and composition agree with direct application") {
        const auto img = random_image(2, 4, 7, 3);
        for (int a = 0; a < 8; ++a) {
            CHECK(dihedral(dihedral(img, a), dihedral_inverse(a)) == img);
            for (int b = 0; b < 8; ++b) {
                CHECK(dihedral(dihedral(img, b), a) == dihedral(img, dihedral_compose(a, b)));
            }
        }
    }
}

TEST_SUITE("resample") {
    TEST_CASE("cubic kernel values") {
        CHECK(cubic_kernel(0.0) == 1.0);
        CHECK(cubic_kernel(1.0) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(cubic_kernel(2.0) == 0.0);
        CHECK(cubic_kernel(0.5) == doctest::Approx(oracle::keys(0.5)));
        CHECK(cubic_kernel(-1.5) == doctest::Approx(oracle::keys(1.5)));
        CHECK(cubic_kernel(1.5) == doctest::Approx(-0.0625));
    }

    TEST_CASE("constant image stays constant") {
        const Image img(3, 16, 12, 0.375f);
        const auto down = bicubic_downscale(img, 4);
        CHECK(down.height() == 4);
        CHECK(down.width() == 3);
        for (float v : down.data()) CHECK(v == doctest::Approx(0.375f).epsilon(1e-6));
        for (float v : bicubic_upscale(img, 2).data()) CHECK(v == doctest::Approx(0.375f).epsilon(1e-6));
    }

    TEST_CASE("128 to 32 shape and divisibility") {
        const auto img = random_image(3, 128, 128, 4);
        const auto d = bicubic_downscale(img, 4);
        CHECK(d.height() == 32);
        CHECK(d.width() == 32);
        CHECK_THROWS_AS(bicubic_downscale(random_image(3, 10, 12, 5), 4), ShapeError);
    }

    TEST_CASE("ramp matches the per-pixel kernel-sum oracle") {
        Image ramp(1, 24, 40);
        for (int y = 0; y < 24; ++y) {
            for (int x = 0; x < 40; ++x) ramp.at(0, y, x) = static_cast<float>(x) / 39.0f;
        }
        const auto values = plane_values(ramp, 0);
        for (int s : {2, 4}) {
            const auto out = resize_bicubic(ramp, 24 / s, 40 / s);
            for (int y = 0; y < out.height(); ++y) {
                for (int x = 0; x < out.width(); ++x) {
                    const double expected = oracle::cubic_pixel(values, 24, 40, 24 / s, 40 / s, y, x);
                    CHECK(std::abs(out.at(0, y, x) - expected) < 1e-6);
                }
            }
        }
        // Upscaling as well.
        const auto small = random_image(1, 5, 6, 6);
        const auto up = resize_bicubic(small, 20, 24);
        const auto sv = plane_values(small, 0);
        for (int y = 0; y < 20; ++y) {
            for (int x = 0; x < 24; ++x) CHECK(std::abs(up.at(0, y, x) - oracle::cubic_pixel(sv, 5, 6, 20, 24, y, x)) < 1e-6);
        }
    }

    TEST_CASE("downscale clamps into [0, 1]") {
        Image img(1, 8, 8, 0.0f);
        for (int y = 0; y < 8; ++y) {
            for (int x = 4; x < 8; ++x) img.at(0, y, x) = 1.0f;
        }
        const auto d = bicubic_downscale(img, 2);
        for (float v : d.data()) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
    }
}

TEST_SUITE("jpeg") {
    TEST_CASE("quality range") {
        const Image img(3, 16, 16, 0.5f);
        CHECK_THROWS_AS(jpeg_roundtrip(img, 0), DomainError);
        CHECK_THROWS_AS(jpeg_roundtrip(img, 101), DomainError);
        CHECK_NOTHROW(jpeg_roundtrip(img, 1));
        CHECK_FALSE(jpeg_codec_id().empty());
    }

    TEST_CASE("uniform mid-gray survives quality 90") {
        const Image gray(3, 32, 32, 128.0f / 255.0f);
        const auto out = jpeg_roundtrip(gray, 90);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out.data()[i] - gray.data()[i]) < 1.0f / 255.0f);
    }

    TEST_CASE("higher quality gives higher PSNR") {
        const auto img = fixtures::synthetic_scene(64, 64, 7);
        const Image q8 = from_rgb8(to_rgb8(img));
        CHECK(psnr_y(q8, jpeg_roundtrip(q8, 90), 0) > psnr_y(q8, jpeg_roundtrip(q8, 10), 0));
    }

    TEST_CASE("deterministic and decodable") {
        const auto img = fixtures::synthetic_scene(40, 24, 8);
        CHECK(jpeg_roundtrip(img, 37) == jpeg_roundtrip(img, 37));
        const auto bytes = encode_jpeg(to_rgb8(img), 50);
        const auto rgb = decode_jpeg(bytes);
        CHECK(rgb.height == 40);
        CHECK(rgb.width == 24);
        const std::vector<std::uint8_t> junk{1, 2, 3, 4};
        CHECK_THROWS_AS(decode_jpeg(junk), InputError);
    }
}

TEST_SUITE("synthesis") {
    TEST_CASE("spec validation") {
        DegradeSpec s;
        CHECK_NOTHROW(validate(s));
        s.qf_min = 0;
        CHECK_THROWS_AS(validate(s), ConfigError);
        s = {};
        s.qf_min = 60;
        s.qf_max = 50;
        CHECK_THROWS_AS(validate(s), ConfigError);
        s = {};
        s.scale = 0;
        CHECK_THROWS_AS(validate(s), ConfigError);
        s = {};
        s.fixed_qf = 101;
        CHECK_THROWS_AS(validate(s), ConfigError);
    }

    TEST_CASE("fixed quality contract") {
        const auto src = fixtures::synthetic_scene(160, 150, 9);
        DegradeSpec spec;
        spec.fixed_qf = 40;
        std::mt19937_64 rng(5);
        const auto recipe = draw_recipe(160, 150, spec, 128, rng);
        const auto pair = make_pair(src, spec, 128, {recipe.x, recipe.y, recipe.qf, 0});
        CHECK(pair.lr.height() == 32);
        CHECK(pair.lr.width() == 32);
        CHECK(pair.hr.height() == 128);
        CHECK(pair.qf == 40);
        CHECK(pair.transform_id == 0);
        CHECK(pair.hr == src.crop(recipe.y, recipe.x, 128, 128));
    }

    TEST_CASE("same rng state gives the same pair") {
        const auto src = fixtures::synthetic_scene(140, 140, 10);
        std::mt19937_64 a(42), b(42);
        const auto p = synthesize_pair(src, {}, a);
        const auto q = synthesize_pair(src, {}, b);
        CHECK(p.lr == q.lr);
        CHECK(p.hr == q.hr);
        CHECK(p.qf == q.qf);
        CHECK(p.transform_id == q.transform_id);
    }

    TEST_CASE("too small source") {
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(synthesize_pair(Image(3, 100, 200), {}, rng), DomainError);
    }

    TEST_CASE("quality factor is uniform on the range") {
        std::mt19937_64 rng(2024);
        const DegradeSpec spec;
        const int n = 10000;
        double sum = 0.0;
        std::vector<int> counts(101, 0);
        for (int i = 0; i < n; ++i) {
            const auto r = draw_recipe(256, 256, spec, 128, rng);
            REQUIRE(r.qf >= 10);
            REQUIRE(r.qf <= 100);
            REQUIRE(r.transform_id >= 0);
            REQUIRE(r.transform_id < 8);
            sum += r.qf;
            ++counts[r.qf];
        }
        // Discrete uniform on 91 values: variance (91^2 - 1) / 12.
        const double sigma = std::sqrt((91.0 * 91.0 - 1.0) / 12.0 / n);
        CHECK(std::abs(sum / n - 55.0) < 3.0 * sigma);
        // Chi-square with 90 degrees of freedom; 99.9th percentile is about 137.
        double chi2 = 0.0;
        const double expected = n / 91.0;
        for (int q = 10; q <= 100; ++q) chi2 += (counts[q] - expected) * (counts[q] - expected) / expected;
        CHECK(chi2 < 137.0);
    }

    TEST_CASE("stored clean LR is the bicubic downscale of the HR patch") {
        const auto src = fixtures::synthetic_scene(150, 170, 11);
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            std::mt19937_64 rng(seed);
            const auto p = synthesize_pair(src, {}, rng, 64);
            CHECK(bicubic_downscale(p.hr, 4) == p.lr_clean);
            CHECK(jpeg_roundtrip(p.lr_clean, p.qf) == p.lr);
        }
    }

    TEST_CASE("dihedral augmentation") {
        const auto src = fixtures::synthetic_scene(64, 64, 12);
        DegradeSpec spec;
        spec.fixed_qf = 30;
        const auto base = make_pair(src, spec, 64, {0, 0, 30, 0});
        const auto id = augment_dihedral(base, 0);
        CHECK(id.lr == base.lr);
        CHECK(id.hr == base.hr);
        const auto twice = augment_dihedral(augment_dihedral(base, 4), 4);
        CHECK(twice.hr == base.hr);
        CHECK(twice.transform_id == 0);
        std::set<std::vector<float>> distinct;
        for (int t = 0; t < 8; ++t) {
            const auto p = augment_dihedral(base, t);
            CHECK(p.lr == dihedral(base.lr, t));
            CHECK(p.hr == dihedral(base.hr, t));
            CHECK(p.transform_id == t);
            distinct.insert({p.hr.data().begin(), p.hr.data().end()});
        }
        CHECK(distinct.size() == 8);
        CHECK_THROWS_AS(augment_dihedral(base, 8), DomainError);
    }

    TEST_CASE("derived seeds differ") {
        std::set<std::uint64_t> seen;
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
        CHECK(seen.size() == 1000);
        CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    }
}

TEST_SUITE("manifest") {
    TEST_CASE("deterministic, round-trips and references sources") {
        test::TempDir dir;
        fixtures::write_scene_set(dir / "src", 3, 96, 112, 1);
        const DegradeSpec spec;
        const auto a = build_manifest(dir / "src", spec, 9, 100, 64);
        const auto b = build_manifest(dir / "src", spec, 9, 100, 64);
        CHECK(a.entries.size() == 100);
        CHECK(serialize_manifest(a) == serialize_manifest(b));
        write_manifest(dir / "m.jsonl", a);
        CHECK(read_manifest(dir / "m.jsonl") == a);
        std::set<std::string> names;
        for (const auto& p : list_images(dir / "src")) names.insert(p.filename().string());
        for (const auto& e : a.entries) {
            CHECK(names.contains(e.source));
            CHECK(e.recipe.x + 64 <= 112);
            CHECK(e.recipe.y + 64 <= 96);
        }
        CHECK(a.codec_id == jpeg_codec_id());
        const auto c = build_manifest(dir / "src", spec, 10, 100, 64);
        CHECK_FALSE(serialize_manifest(c) == serialize_manifest(a));
        std::size_t total = 0;
        for (const auto& [qf, n] : qf_histogram(a)) total += n;
        CHECK(total == 100);
    }

    TEST_CASE("count zero and empty directory") {
        test::TempDir dir;
        std::filesystem::create_directories(dir / "empty");
        fixtures::write_scene_set(dir / "src", 1, 80, 80, 2);
        CHECK(build_manifest(dir / "src", {}, 1, 0, 64).entries.empty());
        CHECK_THROWS_AS(build_manifest(dir / "empty", {}, 1, 4, 64), InputError);
    }

    TEST_CASE("pairs regenerate from the manifest") {
        test::TempDir dir;
        fixtures::write_scene_set(dir / "src", 2, 80, 90, 3);
        const auto m = build_manifest(dir / "src", {}, 4, 6, 64);
        ManifestPairs pairs(m);
        CHECK(pairs.size() == 6);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto p = pairs.pair(i);
            const auto& e = m.entries[i];
            CHECK(p.qf == e.recipe.qf);
            CHECK(p.transform_id == e.recipe.transform_id);
            const auto src = read_image(dir / "src" / e.source);
            CHECK(p.hr == dihedral(src.crop(e.recipe.y, e.recipe.x, 64, 64), e.recipe.transform_id));
        }
    }
}

TEST_SUITE("testset") {
    TEST_CASE("five images give five pairs; quality ordering") {
        test::TempDir dir;
        fixtures::write_scene_set(dir.path(), 5, 70, 90, 4);
        const auto q10 = degrade_testset(dir.path(), 10);
        const auto q40 = degrade_testset(dir.path(), 40);
        REQUIRE(q10.pairs.size() == 5);
        REQUIRE(q40.pairs.size() == 5);
        CHECK(q10.pairs[0].hr.height() == 68);
        CHECK(q10.pairs[0].hr.width() == 88);
        CHECK(q10.pairs[0].lr.height() == 17);
        double m10 = 0, m40 = 0;
        for (int i = 0; i < 5; ++i) {
            m10 += psnr_y(q10.pairs[i].lr_clean, q10.pairs[i].lr, 0);
            m40 += psnr_y(q40.pairs[i].lr_clean, q40.pairs[i].lr, 0);
        }
        CHECK(m40 > m10);
    }

    TEST_CASE("scale one at quality 100 is nearly lossless") {
        test::TempDir dir;
        fixtures::write_scene_set(dir.path(), 1, 48, 48, 5);
        const auto set = degrade_testset(dir.path(), 100, 1);
        REQUIRE(set.pairs.size() == 1);
        CHECK(psnr_y(set.pairs[0].hr, set.pairs[0].lr, 0) > 35.0);
    }

    TEST_CASE("undecodable files are reported and skipped") {
        test::TempDir dir;
        fixtures::write_scene_set(dir.path(), 2, 40, 40, 6);
        std::ofstream(dir / "broken.png") << "not an image";
        const auto set = degrade_testset(dir.path(), 20);
        CHECK(set.pairs.size() == 2);
        REQUIRE(set.failures.size() == 1);
        CHECK(set.failures[0].name == "broken.png");
    }
}

TEST_SUITE("metrics") {
    TEST_CASE("luma coefficients") {
        Image px(3, 1, 1, 1.0f);
        CHECK(rgb_to_y(px).at(0, 0) == doctest::Approx(235.0).epsilon(1e-12));
        px = Image(3, 1, 1, 0.0f);
        CHECK(rgb_to_y(px).at(0, 0) == 16.0);
        px.at(1, 0, 0) = 1.0f;
        CHECK(rgb_to_y(px).at(0, 0) == doctest::Approx(144.553).epsilon(1e-12));
        CHECK_THROWS_AS(rgb_to_y(Image(1, 2, 2)), ShapeError);
    }

    TEST_CASE("psnr sentinel, analytic value and errors") {
        const auto a = random_image(3, 20, 20, 13);
        CHECK(psnr_y(a, a, 4) == kPsnrInfinity);
        Plane p{8, 8, std::vector<double>(64, 100.0)};
        Plane q{8, 8, std::vector<double>(64, 125.5)};
        CHECK(psnr(p, q) == 20.0);
        CHECK_THROWS_AS(psnr_y(a, random_image(3, 20, 21, 1), 0), ShapeError);
        CHECK_THROWS_AS(psnr_y(a, a, 10), DomainError);
    }

    TEST_CASE("psnr matches the two-pass oracle, symmetric and shift invariant") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto a = random_image(3, 24, 30, 100 + seed);
            const auto b = random_image(3, 24, 30, 200 + seed);
            const auto ya = shave_border(rgb_to_y(a), 4);
            const auto yb = shave_border(rgb_to_y(b), 4);
            CHECK(std::abs(psnr_y(a, b, 4) - oracle::psnr(ya.values, yb.values)) < 1e-9);
            CHECK(psnr_y(a, b, 4) == psnr_y(b, a, 4));
            Plane sa = ya, sb = yb;
            for (auto& v : sa.values) v += 7.0;
            for (auto& v : sb.values) v += 7.0;
            CHECK(std::abs(psnr(sa, sb) - psnr(ya, yb)) < 1e-9);
        }
    }

    TEST_CASE("shave") {
        Plane p{10, 12, std::vector<double>(120)};
        for (int i = 0; i < 120; ++i) p.values[i] = i;
        const auto s = shave_border(p, 2);
        CHECK(s.height == 6);
        CHECK(s.width == 8);
        CHECK(s.at(0, 0) == p.at(2, 2));
        CHECK_THROWS_AS(shave_border(p, 5), DomainError);
    }

    TEST_CASE("ssim identities and oracle") {
        const auto taps = ssim_gaussian_taps();
        CHECK(taps.size() == 11);
        double sum = 0;
        for (double t : taps) sum += t;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));

        const auto a = fixtures::synthetic_scene(40, 44, 14);
        CHECK(ssim_y(a, a, 4) == 1.0);
        const auto b = jpeg_roundtrip(a, 20);
        CHECK(ssim_y(a, b, 4) == ssim_y(b, a, 4));
        const auto ya = rgb_to_y(a), yb = rgb_to_y(b);
        CHECK(std::abs(ssim(ya, yb) - oracle::ssim(ya.values, yb.values, ya.height, ya.width)) < 1e-6);

        Plane inv = ya;
        for (auto& v : inv.values) v = 255.0 - v;
        CHECK(ssim(ya, inv) < 0.0);
        CHECK_THROWS_AS(ssim_y(Image(3, 12, 12), Image(3, 12, 12), 1), DomainError);
    }
}
