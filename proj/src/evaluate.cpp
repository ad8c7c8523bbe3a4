#include "carsr/evaluate.hpp"

#include <chrono>
#include <cmath>

#include "carsr/errors.hpp"
#include "carsr/network.hpp"
#include "carsr/quality.hpp"
#include "carsr/tensor_ops.hpp"

namespace carsr::eval {

torch::Tensor self_ensemble(const model::ParameterStore& params, const model::ModelConfig& cfg,
                            const torch::Tensor& lr) {
    torch::Tensor sum;
    for (int t = 0; t < kDihedralCount; ++t) {
        const auto out = model::dihedral(model::forward(params, cfg, model::dihedral(lr, t)), dihedral_inverse(t));
        sum = sum.defined() ? sum + out : out;
    }
    return sum / static_cast<double>(kDihedralCount);
}

Image super_resolve(const model::ParameterStore& params, const model::ModelConfig& cfg, const Image& lr,
                    bool ensembled) {
    torch::InferenceMode guard;
    const auto dtype = params.layers().front().weight.scalar_type();
    const auto input = model::to_tensor(lr).to(dtype);
    const auto out = ensembled ? self_ensemble(params, cfg, input) : model::forward(params, cfg, input);
    return model::to_image(out).clamped();
}

void recompute_means(EvalResult& result) {
    double psnr_sum = 0.0, ssim_sum = 0.0;
    std::size_t psnr_n = 0, ssim_n = 0, infinite_n = 0;
    result.failures = 0;
    for (const auto& row : result.per_image) {
        if (row.error) {
            ++result.failures;
            continue;
        }
        ssim_sum += row.ssim_y;
        ++ssim_n;
        if (std::isinf(row.psnr_y)) {
            ++infinite_n;
            if (result.exclude_infinite) continue;
            psnr_sum += kPsnrCapDb;
        } else {
            psnr_sum += row.psnr_y;
        }
        ++psnr_n;
    }
    result.mean_psnr_y = psnr_n ? psnr_sum / static_cast<double>(psnr_n) : 0.0;
    // Every prediction exact: there is no finite error to average.
    if (infinite_n > 0 && infinite_n == ssim_n) result.mean_psnr_y = kPsnrInfinity;
    result.mean_ssim_y = ssim_n ? ssim_sum / static_cast<double>(ssim_n) : 0.0;
}

EvalResult evaluate_dataset(const Predictor& predict, const std::vector<TestPair>& pairs, std::int64_t params,
                            const EvalOptions& options) {
    if (pairs.empty()) throw InputError("evaluate_dataset: no image pairs");
    EvalResult result;
    result.params = params;
    result.shave = options.shave;
    result.exclude_infinite = options.exclude_infinite;
    for (const auto& pair : pairs) {
        ImageScore row;
        row.name = pair.name;
        try {
            const auto start = std::chrono::steady_clock::now();
            const Image sr = predict(pair.lr);
            const auto stop = std::chrono::steady_clock::now();
            row.runtime_s = std::chrono::duration<double>(stop - start).count();
            result.runtime_total_s += row.runtime_s;
            row.psnr_y = psnr_y(sr, pair.hr, options.shave);
            row.ssim_y = ssim_y(sr, pair.hr, options.shave);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        result.per_image.push_back(std::move(row));
    }
    recompute_means(result);
    return result;
}

EvalResult evaluate_dataset(const model::ParameterStore& params, const model::ModelConfig& cfg,
                            const std::vector<TestPair>& pairs, bool ensembled, const EvalOptions& options) {
    const Predictor predict = [&](const Image& lr) { return super_resolve(params, cfg, lr, ensembled); };
    return evaluate_dataset(predict, pairs, model::count_params(params), options);
}

namespace {

nlohmann::json psnr_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

}  // namespace

nlohmann::json to_json(const EvalResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.per_image) {
        nlohmann::json j = {{"name", row.name},
                            {"psnr_y", psnr_json(row.psnr_y)},
                            {"ssim_y", row.ssim_y},
                            {"runtime_s", row.runtime_s}};
        if (row.error) j["error"] = *row.error;
        rows.push_back(std::move(j));
    }
    return {{"per_image", std::move(rows)},
            {"mean_psnr_y", psnr_json(r.mean_psnr_y)},
            {"mean_ssim_y", r.mean_ssim_y},
            {"runtime_total_s", r.runtime_total_s},
            {"params", r.params},
            {"shave", r.shave},
            {"psnr_cap_db", kPsnrCapDb},
            {"exclude_infinite", r.exclude_infinite},
            {"failures", r.failures}};
}

}  // namespace carsr::eval
