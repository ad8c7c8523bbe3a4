#include "carsr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include "carsr/errors.hpp"
#include "carsr/network.hpp"
#include "carsr/tensor_ops.hpp"

namespace carsr::train {
namespace fs = std::filesystem;

AdamState AdamState::zeros_like(const model::ParameterStore& params) {
    AdamState s;
    for (const auto& t : params.tensors()) {
        s.m.push_back(torch::zeros_like(t).detach());
        s.v.push_back(torch::zeros_like(t).detach());
    }
    return s;
}

AdamState AdamState::clone() const {
    AdamState s;
    s.step = step;
    for (const auto& t : m) s.m.push_back(t.clone());
    for (const auto& t : v) s.v.push_back(t.clone());
    return s;
}

void adam_update(model::ParameterStore& params, AdamState& state, std::span<const torch::Tensor> grads, double lr,
                 const TrainConfig& cfg) {
    torch::NoGradGuard no_grad;
    const auto tensors = params.tensors();
    if (grads.size() != tensors.size() || state.m.size() != tensors.size()) {
        throw ShapeError("adam_update: gradient / state count does not match the parameter store");
    }
    ++state.step;
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    const double step_size = lr / bias1;
    const double bias2_sqrt = std::sqrt(bias2);
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& g = grads[i];
        state.m[i].mul_(b1).add_(g, 1.0 - b1);
        state.v[i].mul_(b2).addcmul_(g, g, 1.0 - b2);
        const auto denom = (state.v[i].sqrt() / bias2_sqrt).add_(cfg.adam_eps);
        tensors[i].addcdiv_(state.m[i], denom, -step_size);
    }
}

Batch make_batch(std::span<const PatchPair> pairs) {
    if (pairs.empty()) throw ShapeError("empty batch");
    std::vector<const Image*> lr, lr_clean, hr;
    for (const auto& p : pairs) {
        lr.push_back(&p.lr);
        hr.push_back(&p.hr);
        if (!p.lr_clean.empty()) lr_clean.push_back(&p.lr_clean);
    }
    Batch b;
    b.lr = model::stack_images(lr);
    b.hr = model::stack_images(hr);
    if (lr_clean.size() == pairs.size()) b.lr_clean = model::stack_images(lr_clean);
    return b;
}

std::pair<std::vector<torch::Tensor>, CombinedLoss> loss_and_gradients(const model::ParameterStore& params,
                                                                       const model::ModelConfig& model,
                                                                       const TrainConfig& train, const Batch& batch) {
    const bool use_lr = train.lambda_recon > 0.0;
    const auto dtype = params.layers().front().weight.scalar_type();
    const auto lr = batch.lr.to(dtype);
    const auto outputs = model::forward_all(params, model, lr, use_lr);
    torch::Tensor gt_lr = use_lr && batch.lr_clean.defined() ? batch.lr_clean.to(dtype) : torch::Tensor();
    auto loss = combined_loss(outputs.hr, batch.hr.to(dtype), outputs.lr_estimate, gt_lr, train.lambda_recon,
                              train.loss);
    std::vector<torch::Tensor> inputs = params.tensors();
    auto grads = torch::autograd::grad({loss.total}, inputs, /*grad_outputs=*/{}, /*retain_graph=*/false,
                                       /*create_graph=*/false, /*allow_unused=*/true);
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!grads[i].defined()) grads[i] = torch::zeros_like(inputs[i]);
    }
    return {std::move(grads), std::move(loss)};
}

LossReport train_step(model::ParameterStore& params, const model::ModelConfig& model, const TrainConfig& train,
                      std::span<const PatchPair> batch, AdamState& state, std::int64_t iter,
                      const std::string& batch_label) {
    if (batch.empty()) throw ShapeError("train_step: empty batch");
    const double lr = cosine_lr(iter, train);
    params.set_requires_grad(true);
    auto [grads, loss] = loss_and_gradients(params, model, train, make_batch(batch));
    params.set_requires_grad(false);
    if (!std::isfinite(loss.report.total)) {
        throw NumericError("non-finite loss at iteration " + std::to_string(iter) +
                           (batch_label.empty() ? std::string() : " on batch " + batch_label));
    }
    adam_update(params, state, grads, lr, train);
    loss.report.iter = iter;
    loss.report.lr_value = lr;
    return loss.report;
}

std::vector<std::size_t> batch_indices(std::uint64_t seed, std::int64_t iter, std::size_t dataset_size,
                                       int batch_size) {
    if (dataset_size == 0) throw InputError("empty training set");
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(batch_size));
    std::int64_t cached_epoch = -1;
    std::vector<std::size_t> perm(dataset_size);
    for (int k = 0; k < batch_size; ++k) {
        const auto pos = static_cast<std::uint64_t>(iter) * static_cast<std::uint64_t>(batch_size) +
                         static_cast<std::uint64_t>(k);
        const auto epoch = static_cast<std::int64_t>(pos / dataset_size);
        if (epoch != cached_epoch) {
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            std::mt19937_64 rng(derive_seed(seed ^ 0xBA7C4ULL, static_cast<std::uint64_t>(epoch)));
            // Fisher-Yates with explicit draws keeps the order independent of std::shuffle's implementation.
            for (std::size_t i = dataset_size - 1; i > 0; --i) {
                const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
                std::swap(perm[i], perm[j]);
            }
            cached_epoch = epoch;
        }
        out.push_back(perm[pos % dataset_size]);
    }
    return out;
}

fs::path checkpoint_path(const fs::path& dir, std::int64_t iteration) {
    char name[32];
    std::snprintf(name, sizeof(name), "ckpt_%08lld.bin", static_cast<long long>(iteration));
    return dir / name;
}

std::optional<fs::path> latest_checkpoint(const fs::path& dir) {
    if (!fs::is_directory(dir)) return std::nullopt;
    static const std::regex pattern(R"(ckpt_(\d{8,})\.bin)");
    std::optional<fs::path> best;
    long long best_iter = -1;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) {
            const long long it = std::stoll(m[1].str());
            if (it > best_iter) {
                best_iter = it;
                best = entry.path();
            }
        }
    }
    return best;
}

model::Checkpoint make_checkpoint(const model::ParameterStore& params, const AdamState& state,
                                  const model::ModelConfig& model, const TrainConfig& train, std::int64_t iteration) {
    model::Checkpoint ckpt;
    ckpt.model = model;
    ckpt.iteration = iteration;
    ckpt.params = params.clone();
    ckpt.train_state = {{"adam_step", state.step}, {"train_config", train}};
    const auto tensors = params.layers();
    std::size_t k = 0;
    for (const auto& layer : tensors) {
        for (const char* part : {".weight", ".bias"}) {
            ckpt.extra.emplace_back("adam.m/" + layer.spec.name + part, state.m[k]);
            ckpt.extra.emplace_back("adam.v/" + layer.spec.name + part, state.v[k]);
            ++k;
        }
    }
    return ckpt;
}

namespace {

AdamState restore_adam(const model::Checkpoint& ckpt) {
    AdamState s = AdamState::zeros_like(ckpt.params);
    if (ckpt.train_state.is_object() && ckpt.train_state.contains("adam_step")) {
        s.step = ckpt.train_state.at("adam_step").get<std::int64_t>();
    }
    std::map<std::string, torch::Tensor> extra(ckpt.extra.begin(), ckpt.extra.end());
    std::size_t k = 0;
    for (const auto& layer : ckpt.params.layers()) {
        for (const char* part : {".weight", ".bias"}) {
            const auto m = extra.find("adam.m/" + layer.spec.name + part);
            const auto v = extra.find("adam.v/" + layer.spec.name + part);
            if (m == extra.end() || v == extra.end()) {
                throw IncompatibleCheckpoint("checkpoint lacks optimizer state for " + layer.spec.name + part);
            }
            s.m[k] = m->second.clone();
            s.v[k] = v->second.clone();
            ++k;
        }
    }
    return s;
}

// Keeps only log records with iter < `iteration`.
void truncate_log(const fs::path& log, std::int64_t iteration) {
    if (!fs::exists(log)) return;
    std::ifstream in(log);
    std::ostringstream kept;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("iter")) continue;
        if (rec.at("iter").get<std::int64_t>() < iteration) kept << line << '\n';
    }
    in.close();
    std::ofstream out(log, std::ios::trunc);
    out << kept.str();
}

void remove_stale_checkpoints(const fs::path& dir) {
    static const std::regex pattern(R"(ckpt_(\d{8,})\.bin)");
    std::vector<fs::path> stale;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (std::regex_match(entry.path().filename().string(), pattern)) stale.push_back(entry.path());
    }
    for (const auto& p : stale) fs::remove(p);
}

}  // namespace

LoopResult train_loop(const PairSource& data, const model::ModelConfig& model, const TrainConfig& train,
                      const LoopOptions& options) {
    validate(train, model);
    if (data.size() == 0) throw InputError("training set is empty");
    if (options.checkpoint_dir.empty()) throw ConfigError("checkpoint_dir", "must be set");
    std::error_code ec;
    fs::create_directories(options.checkpoint_dir, ec);
    if (ec) throw IoError("cannot create " + options.checkpoint_dir.string() + ": " + ec.message());
    const fs::path log_path =
        options.log_path.empty() ? options.checkpoint_dir / "train_log.jsonl" : options.log_path;

    LoopResult result;
    const auto latest = options.resume ? latest_checkpoint(options.checkpoint_dir) : std::nullopt;
    if (latest) {
        const auto ckpt = model::load_checkpoint(*latest);
        if (ckpt.model != model) throw IncompatibleCheckpoint("checkpoint model config differs from the requested one");
        model::check_compatible(ckpt.params, model);
        result.params = ckpt.params.clone();
        result.optimizer = restore_adam(ckpt);
        result.iteration = ckpt.iteration;
        truncate_log(log_path, result.iteration);
    } else {
        remove_stale_checkpoints(options.checkpoint_dir);
        result.params = model::build_model(model, train.seed);
        result.optimizer = AdamState::zeros_like(result.params);
        result.iteration = 0;
        std::ofstream(log_path, std::ios::trunc);
        const auto path = checkpoint_path(options.checkpoint_dir, 0);
        model::save_checkpoint(path, make_checkpoint(result.params, result.optimizer, model, train, 0));
        result.checkpoints.push_back(path);
    }

    std::ofstream log(log_path, std::ios::app);
    if (!log) throw IoError("cannot open training log " + log_path.string());
    std::vector<PatchPair> batch;
    const std::int64_t end =
        options.stop_at ? std::min(train.total_iters, std::max<std::int64_t>(0, *options.stop_at)) : train.total_iters;
    while (result.iteration < end) {
        const std::int64_t iter = result.iteration;
        const auto indices = batch_indices(train.seed, iter, data.size(), train.batch_size);
        batch.clear();
        for (auto i : indices) batch.push_back(data.pair(i));
        std::string label;
        for (auto i : indices) label += (label.empty() ? "[" : ",") + std::to_string(i);
        label += "]";
        const LossReport report =
            train_step(result.params, model, train, batch, result.optimizer, iter, label);
        log << to_json(report).dump() << '\n' << std::flush;
        if (!log) throw IoError("failed writing training log " + log_path.string());
        result.reports.push_back(report);
        if (options.on_step) options.on_step(report);
        result.iteration = iter + 1;
        if (result.iteration % train.checkpoint_every == 0 || result.iteration == end) {
            const auto path = checkpoint_path(options.checkpoint_dir, result.iteration);
            model::save_checkpoint(path,
                                   make_checkpoint(result.params, result.optimizer, model, train, result.iteration));
            result.checkpoints.push_back(path);
        }
    }
    return result;
}

}  // namespace carsr::train
