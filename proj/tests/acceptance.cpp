// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <torch/torch.h>

#include "carsr/commands.hpp"
#include "carsr/evaluate.hpp"
#include "carsr/fixtures.hpp"
#include "carsr/jpeg_codec.hpp"
#include "carsr/loss.hpp"
#include "carsr/network.hpp"
#include "carsr/parameter_store.hpp"
#include "carsr/quality.hpp"
#include "carsr/resample.hpp"
#include "carsr/synthesis.hpp"
#include "carsr/tensor_ops.hpp"
#include "carsr/trainer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace carsr;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kParamTarget = 14.8e6;
constexpr double kParamBand = 0.10;
constexpr int kShuffleCases = 200;
constexpr int kIdentityCases = 20;
constexpr int kGradSamples = 50;
constexpr double kGradRelTol = 1e-3;
constexpr double kGradStep = 1e-5;
constexpr double kScheduleRelTol = 1e-12;
constexpr double kLossRelTol = 1e-12;
constexpr double kSsimOracleTol = 1e-6;
constexpr int kSsimPairs = 20;
constexpr int kOverfitPairs = 8;
constexpr double kOverfitDrop = 0.90;
constexpr double kOverfitGainDb = 1.0;
constexpr double kMonotoneSlackDb = 0.1;
constexpr int kMonotoneImages = 12;
constexpr double kEnsembleTol = 1e-5;
constexpr int kDeterminismIters = 200;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << v;
    return s.str();
}

std::string sci(double v) {
    std::ostringstream s;
    s.precision(2);
    s << std::scientific << v;
    return s.str();
}

double rel_err(double got, double want) {
    if (got == want) return 0.0;
    return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

model::ModelConfig desk_model() {
    train::TrainConfig t;
    model::ModelConfig m;
    train::apply_desk_preset(t, m);
    return m;
}

train::TrainConfig desk_train() {
    train::TrainConfig t;
    model::ModelConfig m;
    train::apply_desk_preset(t, m);
    return t;
}

std::vector<PatchPair> fixture_pairs(int count, int hr_patch, std::uint64_t seed) {
    std::vector<PatchPair> pairs;
    for (int i = 0; i < count; ++i) {
        const auto src = fixtures::synthetic_scene(hr_patch * 2, hr_patch * 2, seed + i);
        std::mt19937_64 rng(derive_seed(seed, i));
        pairs.push_back(synthesize_pair(src, DegradeSpec{}, rng, hr_patch));
    }
    return pairs;
}

// 1 -------------------------------------------------------------------------
Outcome parameter_budget() {
    const model::ModelConfig cfg;
    const auto inventory = model::layer_inventory(cfg);
    std::cout << "  layer inventory (default config):\n";
    std::int64_t rrdb_total = 0;
    for (const auto& spec : inventory) {
        if (spec.name.rfind("trunk.rrdb", 0) == 0) {
            rrdb_total += spec.param_count();
            continue;
        }
        std::cout << "    " << spec.name << "  " << spec.out_channels << "x" << spec.in_channels << "x" << spec.kernel
                  << "x" << spec.kernel << " d" << spec.dilation << "  " << spec.param_count() << "\n";
    }
    for (const auto& spec : inventory) {
        if (spec.name.rfind("trunk.rrdb0.", 0) == 0) {
            std::cout << "    " << spec.name << "  " << spec.out_channels << "x" << spec.in_channels << "x"
                      << spec.kernel << "x" << spec.kernel << "  " << spec.param_count() << "\n";
        }
    }
    std::cout << "    trunk.rrdb0..rrdb" << cfg.num_rrdb - 1 << " total  " << rrdb_total << "\n";
    const auto built = model::build_model(cfg, 0);
    const auto count = model::count_params(built);
    const bool consistent = count == model::count_params(inventory);
    const double dev = (static_cast<double>(count) - kParamTarget) / kParamTarget;
    return {consistent && std::abs(dev) <= kParamBand,
            std::to_string(count) + " params, " + fixed(100 * dev, 2) + "% from 14.8M (band +/-10%)"};
}

// 2 -------------------------------------------------------------------------
Outcome pixel_shuffle_oracle() {
    std::mt19937_64 rng(2);
    int exact = 0;
    for (int i = 0; i < kShuffleCases; ++i) {
        const int s = i < 20 ? 1 : 1 + static_cast<int>(rng() % 4);
        const int c = 1 + static_cast<int>(rng() % 4);
        const int h = 1 + static_cast<int>(rng() % 9);
        const int w = 1 + static_cast<int>(rng() % 9);
        torch::manual_seed(rng());
        const auto t = torch::randn({1, c * s * s, h, w}, torch::kFloat64);
        const auto out = model::pixel_shuffle(t, s).contiguous();
        const std::vector<double> in(t.data_ptr<double>(), t.data_ptr<double>() + t.numel());
        const auto expected = oracle::pixel_shuffle(in, c * s * s, h, w, s);
        const std::vector<double> got(out.data_ptr<double>(), out.data_ptr<double>() + out.numel());
        if (got == expected) ++exact;
    }
    return {exact == kShuffleCases, std::to_string(exact) + "/" + std::to_string(kShuffleCases) + " cases exact"};
}

// 3 -------------------------------------------------------------------------
Outcome residual_identity() {
    const auto cfg = desk_model();
    auto params = model::build_model(cfg, 3);
    {
        torch::NoGradGuard g;
        params.at("enhance2").weight.zero_();
        params.at("enhance2").bias.zero_();
    }
    torch::NoGradGuard g;
    std::mt19937_64 rng(3);
    int equal = 0;
    for (int i = 0; i < kIdentityCases; ++i) {
        const int h = 8 + static_cast<int>(rng() % 17);
        const int w = 8 + static_cast<int>(rng() % 17);
        torch::manual_seed(rng());
        const auto lr = torch::rand({1, 3, h, w});
        if (torch::equal(model::forward(params, cfg, lr), model::bilinear_upsample(lr, cfg.scale))) ++equal;
    }
    return {equal == kIdentityCases, std::to_string(equal) + "/" + std::to_string(kIdentityCases) + " bit-equal"};
}

// 4 -------------------------------------------------------------------------
Outcome gradient_check() {
    model::ModelConfig cfg;
    cfg.n_features = 8;
    cfg.num_rrdb = 1;
    auto params = model::build_model(cfg, 4).to(torch::kFloat64);
    torch::manual_seed(4);
    const auto lr = torch::rand({1, 3, 8, 8}, torch::kFloat64);
    const auto hr = torch::rand({1, 3, 32, 32}, torch::kFloat64);

    params.set_requires_grad(true);
    const auto loss = train::pixel_loss(model::forward(params, cfg, lr), hr, train::LossType::L1);
    const auto tensors = params.tensors();
    const auto grads = torch::autograd::grad({loss}, tensors);
    params.set_requires_grad(false);

    std::int64_t total = 0;
    for (const auto& t : tensors) total += t.numel();
    std::mt19937_64 rng(44);
    std::uniform_int_distribution<std::int64_t> pick(0, total - 1);
    // Central difference of the L1 loss, differenced per pixel before the
    // mean so summation round-off cancels between the two sides.
    const auto output = [&] {
        torch::NoGradGuard g;
        return model::forward(params, cfg, lr);
    };
    double worst = 0.0;
    int ok = 0;
    for (int k = 0; k < kGradSamples; ++k) {
        std::int64_t flat = pick(rng);
        std::size_t ti = 0;
        while (flat >= tensors[ti].numel()) flat -= tensors[ti++].numel();
        auto view = tensors[ti].view(-1);
        const double orig = view[flat].item<double>();
        double fd = 0.0;
        {
            torch::NoGradGuard g;
            view[flat] = orig + kGradStep;
            const auto up = output();
            view[flat] = orig - kGradStep;
            const auto down = output();
            view[flat] = orig;
            fd = ((up - hr).abs() - (down - hr).abs()).mean().item<double>() / (2 * kGradStep);
        }
        const double analytic = grads[ti].view(-1)[flat].item<double>();
        const double err = std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-8});
        worst = std::max(worst, err);
        if (err < kGradRelTol) ++ok;
    }
    return {ok == kGradSamples,
            std::to_string(ok) + "/" + std::to_string(kGradSamples) + " within 1e-3, worst rel err " + sci(worst)};
}

// 5 -------------------------------------------------------------------------
Outcome schedule() {
    const train::TrainConfig cfg;  // lr 2e-4 -> 1e-7, restarts every 2.5e5, 1e6 iterations
    const double T = static_cast<double>(cfg.restart_period);
    const auto analytic = [&](std::int64_t it) {
        const double t = std::fmod(static_cast<double>(it), T);
        return cfg.lr_min + 0.5 * (cfg.lr_init - cfg.lr_min) * (1.0 + std::cos(std::numbers::pi * t / T));
    };
    const std::int64_t p = cfg.restart_period;
    std::vector<std::int64_t> points{0, p / 4, p / 2, p - 1, p};
    for (std::int64_t k = 2; k * p < cfg.total_iters; ++k) {
        points.push_back(k * p - 1);
        points.push_back(k * p);
    }
    double worst = 0.0;
    for (auto it : points) worst = std::max(worst, rel_err(train::cosine_lr(it, cfg), analytic(it)));
    bool restarts = true;
    for (std::int64_t k = 1; k * p < cfg.total_iters; ++k) {
        restarts = restarts && train::cosine_lr(k * p, cfg) == cfg.lr_init &&
                   train::cosine_lr(k * p - 1, cfg) < 1.0001 * cfg.lr_min;
    }
    const bool midpoint = rel_err(train::cosine_lr(p / 2, cfg), (2e-4 + 1e-7) / 2) <= kScheduleRelTol;
    return {worst <= kScheduleRelTol && restarts && midpoint,
            "max rel err " + sci(worst) + " over " + std::to_string(points.size()) + " points, restarts " +
                (restarts ? "ok" : "WRONG")};
}

// 6 -------------------------------------------------------------------------
Outcome loss_composition() {
    model::ModelConfig cfg;
    cfg.n_features = 8;
    cfg.num_rrdb = 1;
    cfg.with_car_head = true;
    const auto params = model::build_model(cfg, 6);
    torch::NoGradGuard g;
    double worst = 0.0;
    int cases = 0;
    for (double lambda : {0.0, 1.0, 16.0}) {
        for (int trial = 0; trial < 5; ++trial) {
            torch::manual_seed(600 + trial);
            const auto lr = torch::rand({4, 3, 12, 12});
            const auto gt_lr = torch::rand({4, 3, 12, 12});
            const auto gt_hr = torch::rand({4, 3, 48, 48});
            const auto out = model::forward_all(params, cfg, lr, true);
            for (auto kind : {train::LossType::L1, train::LossType::MSE, train::LossType::Charbonnier}) {
                const auto r = train::combined_loss(out.hr, gt_hr, out.lr_estimate, gt_lr, lambda, kind);
                const double l_hr = train::pixel_loss(out.hr, gt_hr, kind).item<double>();
                const double l_lr = train::pixel_loss(out.lr_estimate, gt_lr, kind).item<double>();
                const double expected = l_hr + lambda * l_lr;
                worst = std::max(worst, rel_err(r.report.total, expected));
                worst = std::max(worst, rel_err(r.report.total, r.report.l_hr + lambda * r.report.l_lr));
                ++cases;
            }
        }
    }
    const auto arith = train::combined_loss(torch::full({1, 3, 4, 4}, 0.1, torch::kFloat64),
                                            torch::zeros({1, 3, 4, 4}, torch::kFloat64),
                                            torch::full({1, 3, 1, 1}, 0.02, torch::kFloat64),
                                            torch::zeros({1, 3, 1, 1}, torch::kFloat64), 16.0);
    const bool example = std::abs(arith.report.total - 0.42) < 1e-12;
    return {worst <= kLossRelTol && example,
            std::to_string(cases) + " batches, max rel err " + sci(worst) + ", 0.1 + 16*0.02 = " +
                fixed(arith.report.total, 6)};
}

// 7 -------------------------------------------------------------------------
Outcome metric_oracles() {
    Plane a{32, 32, std::vector<double>(32 * 32)};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(16.0, 200.0);
    for (auto& v : a.values) v = u(rng);
    Plane b = a;
    for (auto& v : b.values) v += 25.5;
    const double p = psnr(a, b);
    const bool twenty = p == 20.0;

    double worst = 0.0;
    bool self_one = true;
    for (int i = 0; i < kSsimPairs; ++i) {
        const auto img = fixtures::synthetic_scene(40 + i, 48, 700 + i);
        const auto other = i % 2 ? jpeg_roundtrip(img, 10 + 4 * i) : fixtures::synthetic_scene(40 + i, 48, 900 + i);
        const auto ya = shave_border(rgb_to_y(img), 4);
        const auto yb = shave_border(rgb_to_y(other), 4);
        const double s = ssim_y(img, other, 4);
        worst = std::max(worst, std::abs(s - oracle::ssim(ya.values, yb.values, ya.height, ya.width)));
        self_one = self_one && ssim_y(img, img, 4) == 1.0;
    }
    return {twenty && self_one && worst < kSsimOracleTol,
            "PSNR at uniform 25.5 diff = " + fixed(p, 12) + " dB, SSIM(a,a)=1 " + (self_one ? "yes" : "NO") +
                ", SSIM vs oracle max |diff| " + sci(worst) + " over " + std::to_string(kSsimPairs) + " pairs"};
}

// 8 -------------------------------------------------------------------------
Outcome overfit() {
    const auto cfg = desk_model();
    const auto tc = desk_train();
    const auto pairs = fixture_pairs(kOverfitPairs, tc.hr_patch, 800);
    const PairList data(pairs);
    test::TempDir dir("carsr_overfit");
    train::LoopOptions opt;
    opt.checkpoint_dir = dir.path();
    const auto start = std::chrono::steady_clock::now();
    opt.on_step = [&](const train::LossReport& r) {
        if ((r.iter + 1) % 250 == 0) {
            const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::cout << "  iter " << r.iter + 1 << "  l_HR " << fixed(r.l_hr, 5) << "  (" << fixed(s, 0) << " s)\n"
                      << std::flush;
        }
    };
    const auto result = train::train_loop(data, cfg, tc, opt);
    const double first = result.reports.front().l_hr;

    // Final L1 and PSNR-Y on the 8 training pairs with the trained weights.
    const auto batch = train::make_batch(pairs);
    double final_l1 = 0.0;
    {
        torch::NoGradGuard g;
        final_l1 = train::pixel_loss(model::forward(result.params, cfg, batch.lr), batch.hr, train::LossType::L1)
                       .item<double>();
    }
    double model_psnr = 0.0, bicubic_psnr = 0.0;
    for (const auto& p : pairs) {
        model_psnr += psnr_y(eval::super_resolve(result.params, cfg, p.lr, false), p.hr, cfg.scale) / pairs.size();
        bicubic_psnr += psnr_y(bicubic_upscale(p.lr, cfg.scale), p.hr, cfg.scale) / pairs.size();
    }
    const double drop = 1.0 - final_l1 / first;
    const double gain = model_psnr - bicubic_psnr;
    return {drop >= kOverfitDrop && gain >= kOverfitGainDb,
            std::to_string(result.iteration) + " iters: L1 " + fixed(first, 4) + " -> " + fixed(final_l1, 4) + " (" +
                fixed(100 * drop, 1) + "% drop), PSNR-Y " + fixed(model_psnr, 2) + " dB vs bicubic " +
                fixed(bicubic_psnr, 2) + " dB (+" + fixed(gain, 2) + ")"};
}

// 9 -------------------------------------------------------------------------
Outcome degradation_monotone() {
    const int qualities[] = {90, 70, 50, 30, 10};
    std::vector<double> means;
    for (int qf : qualities) {
        double sum = 0.0;
        for (int i = 0; i < kMonotoneImages; ++i) {
            const auto lr_clean = bicubic_downscale(fixtures::synthetic_scene(128, 128, 900 + i), 4);
            sum += psnr_y(lr_clean, jpeg_roundtrip(lr_clean, qf), 0);
        }
        means.push_back(sum / kMonotoneImages);
    }
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (i > 0 && means[i] > means[i - 1] + kMonotoneSlackDb) ok = false;
        detail += (i ? ", " : "") + std::string("q") + std::to_string(qualities[i]) + " " + fixed(means[i], 2);
    }
    return {ok, detail + " dB over " + std::to_string(kMonotoneImages) + " images"};
}

// 10 ------------------------------------------------------------------------
Outcome ensemble_equivariance() {
    model::ModelConfig cfg;
    cfg.n_features = 8;
    cfg.num_rrdb = 1;
    train::TrainConfig tc;
    tc.total_iters = 60;
    tc.restart_period = 60;
    tc.batch_size = 4;
    tc.hr_patch = 32;
    tc.lr_init = 1e-3;
    tc.checkpoint_every = 60;
    const PairList data(fixture_pairs(6, 32, 1000));
    test::TempDir dir("carsr_ensemble");
    train::LoopOptions opt;
    opt.checkpoint_dir = dir.path();
    const auto trained = train::train_loop(data, cfg, tc, opt);

    torch::manual_seed(10);
    const auto lr = torch::rand({1, 3, 16, 16});
    torch::NoGradGuard g;
    const auto base = eval::self_ensemble(trained.params, cfg, lr);
    double worst = 0.0;
    for (int t = 0; t < kDihedralCount; ++t) {
        const auto lhs = eval::self_ensemble(trained.params, cfg, model::dihedral(lr, t));
        worst = std::max(worst, (lhs - model::dihedral(base, t)).abs().max().item<double>());
    }
    return {worst <= kEnsembleTol, "max |ens(T x) - T ens(x)| = " + sci(worst) + " over 8 transforms"};
}

// 11 ------------------------------------------------------------------------
Outcome ablation_constructibility() {
    auto base = desk_model();
    auto tc = desk_train();
    tc.batch_size = 2;
    const auto pairs = fixture_pairs(2, tc.hr_patch, 1100);
    int stepped = 0;
    std::string detail;
    for (auto ctx : {model::ContextVariant::aspp, model::ContextVariant::nonlocal,
                     model::ContextVariant::sequential_atrous}) {
        for (auto up : {model::UpsampleVariant::pixelshuffle, model::UpsampleVariant::upconvolution}) {
            auto cfg = base;
            cfg.context = ctx;
            cfg.upsample = up;
            auto params = model::build_model(cfg, 11);
            const auto before = params.clone();
            auto state = train::AdamState::zeros_like(params);
            const auto r = train::train_step(params, cfg, tc, pairs, state, 0);
            bool changed = false;
            for (std::size_t i = 0; i < params.size(); ++i) {
                changed = changed || !torch::equal(params.layers()[i].weight, before.layers()[i].weight);
            }
            if (std::isfinite(r.total) && changed) ++stepped;
        }
    }
    bool ordered = true;
    for (int nf : {base.n_features, 64}) {
        auto a = base;
        a.n_features = nf;
        auto n = a;
        n.context = model::ContextVariant::nonlocal;
        const auto ca = model::count_params(model::layer_inventory(a), "context.");
        const auto cn = model::count_params(model::layer_inventory(n), "context.");
        ordered = ordered && ca < cn;
        detail += ", n_f=" + std::to_string(nf) + " context aspp " + std::to_string(ca) + " < nonlocal " +
                  std::to_string(cn);
    }
    return {stepped == 6 && ordered, std::to_string(stepped) + "/6 variants stepped" + detail};
}

// 12 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    if (code != 0) std::cout << "  command failed (" << code << "): " << err.str();
    return code;
}

Outcome determinism() {
    test::TempDir dir("carsr_determinism");
    fixtures::write_scene_set(dir / "src", 6, 96, 96, 1200);
    {
        std::ofstream cfg(dir / "run.yaml");
        cfg << "Paths:\n  source_dir: \"" << (dir / "src").string() << "\"\n  manifest: \""
            << (dir / "manifest.jsonl").string() << "\"\nPrepare:\n  count: 64\n  seed: 12\n";
    }
    const std::string iters = std::to_string(kDeterminismIters);
    const auto common = [&](const std::string& command, const std::string& ckpt_dir) {
        return std::vector<std::string>{command, "--config", (dir / "run.yaml").string(), "--desk",
                                        "--set", "TrainConfig.total_iters=" + iters,
                                        "--set", "TrainConfig.restart_period=" + iters,
                                        "--set", "TrainConfig.checkpoint_every=50",
                                        "--set", "Paths.checkpoint_dir=" + ckpt_dir};
    };

    if (cli(common("prepare-data", "")) != 0) return {false, "prepare-data failed"};
    const auto manifest1 = slurp(dir / "manifest.jsonl");
    if (cli(common("prepare-data", "")) != 0) return {false, "prepare-data failed"};
    const bool manifest_same = !manifest1.empty() && manifest1 == slurp(dir / "manifest.jsonl");

    const auto run_a = (dir / "a").string(), run_b = (dir / "b").string(), run_c = (dir / "c").string();
    if (cli(common("train", run_a)) != 0 || cli(common("train", run_b)) != 0) return {false, "train failed"};
    int compared = 0;
    bool ckpts_same = true;
    for (std::int64_t it = 0; it <= kDeterminismIters; it += 50) {
        const auto name = train::checkpoint_path("", it).filename();
        const auto a = slurp(fs::path(run_a) / name);
        ckpts_same = ckpts_same && !a.empty() && a == slurp(fs::path(run_b) / name);
        ++compared;
    }
    ckpts_same = ckpts_same && slurp(fs::path(run_a) / "train_log.jsonl") == slurp(fs::path(run_b) / "train_log.jsonl");

    auto halted = common("train", run_c);
    halted.insert(halted.end(), {"--stop-at", std::to_string(kDeterminismIters / 2)});
    auto resumed = common("train", run_c);
    resumed.push_back("--resume");
    if (cli(halted) != 0 || cli(resumed) != 0) return {false, "interrupted train failed"};
    const auto final_name = train::checkpoint_path("", kDeterminismIters).filename();
    const bool resume_same = slurp(fs::path(run_a) / final_name) == slurp(fs::path(run_c) / final_name) &&
                             slurp(fs::path(run_a) / "train_log.jsonl") == slurp(fs::path(run_c) / "train_log.jsonl");
    return {manifest_same && ckpts_same && resume_same,
            std::string("manifest bytes ") + (manifest_same ? "identical" : "DIFFER") + ", " + std::to_string(compared) +
                " checkpoints " + (ckpts_same ? "identical" : "DIFFER") + ", resume@" +
                std::to_string(kDeterminismIters / 2) + " vs uninterrupted@" + iters + " " +
                (resume_same ? "identical" : "DIFFER")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    torch::set_num_threads(std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
    const std::vector<Criterion> criteria = {
        {1, "parameter budget", parameter_budget},
        {2, "pixel-shuffle oracle", pixel_shuffle_oracle},
        {3, "residual identity", residual_identity},
        {4, "gradient check", gradient_check},
        {5, "cosine schedule", schedule},
        {6, "loss composition", loss_composition},
        {7, "metric oracles", metric_oracles},
        {8, "overfit convergence", overfit},
        {9, "degradation monotonicity", degradation_monotone},
        {10, "self-ensemble equivariance", ensemble_equivariance},
        {11, "ablation constructibility", ablation_constructibility},
        {12, "determinism and resume", determinism},
    };
    // Optional argument: comma-free list of criterion ids to run, e.g. "1 2 8".
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

    int failed = 0;
    std::vector<std::string> summary;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        std::cout << "[" << c.id << "] " << c.name << "\n" << std::flush;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char line[64];
        std::snprintf(line, sizeof(line), "%s  [%2d] ", o.pass ? "PASS" : "FAIL", c.id);
        summary.push_back(std::string(line) + c.name + ": " + o.detail + " (" + fixed(secs, 1) + " s)");
        std::cout << summary.back() << "\n" << std::flush;
        if (!o.pass) ++failed;
    }
    std::cout << "\n==== acceptance summary ====\n";
    for (const auto& s : summary) std::cout << s << "\n";
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failed;
}
