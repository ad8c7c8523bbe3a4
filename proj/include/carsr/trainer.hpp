#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "carsr/checkpoint.hpp"
#include "carsr/model_config.hpp"
#include "carsr/parameter_store.hpp"
#include "carsr/synthesis.hpp"
#include "carsr/train_config.hpp"

namespace carsr::train {

/// First and second moment estimates, aligned with ParameterStore::tensors().
struct AdamState {
    std::int64_t step = 0;
    std::vector<torch::Tensor> m;
    std::vector<torch::Tensor> v;

    static AdamState zeros_like(const model::ParameterStore& params);
    AdamState clone() const;
};

/// Bias-corrected Adam update of every parameter in place.
void adam_update(model::ParameterStore& params, AdamState& state, std::span<const torch::Tensor> grads, double lr,
                 const TrainConfig& cfg);

/// Batch tensors assembled from pairs.
struct Batch {
    torch::Tensor lr;
    torch::Tensor lr_clean;
    torch::Tensor hr;
};
Batch make_batch(std::span<const PatchPair> pairs);

/// Gradients of the configured loss with respect to every tensor of `params`
/// (weight, bias, ...), and the loss report. Does not modify params.
std::pair<std::vector<torch::Tensor>, CombinedLoss> loss_and_gradients(const model::ParameterStore& params,
                                                                       const model::ModelConfig& model,
                                                                       const TrainConfig& train, const Batch& batch);

/// One Adam step at cosine_lr(iter). Mutates params and state. Throws
/// NumericError (mentioning `batch_label`) on a non-finite loss.
LossReport train_step(model::ParameterStore& params, const model::ModelConfig& model, const TrainConfig& train,
                      std::span<const PatchPair> batch, AdamState& state, std::int64_t iter,
                      const std::string& batch_label = {});

/// Indices of the batch used at `iter`: consecutive slices of a stream of
/// per-epoch shuffles, epoch e shuffled with derive_seed(seed, e).
std::vector<std::size_t> batch_indices(std::uint64_t seed, std::int64_t iter, std::size_t dataset_size, int batch_size);

struct LoopOptions {
    std::filesystem::path checkpoint_dir;
    std::filesystem::path log_path;  // defaults to checkpoint_dir / "train_log.jsonl"
    bool resume = false;
    // Halt (with a checkpoint) once this many iterations are done, as if the
    // run had been interrupted; the schedule still follows total_iters.
    std::optional<std::int64_t> stop_at;
    std::function<void(const LossReport&)> on_step;
};

struct LoopResult {
    model::ParameterStore params;
    AdamState optimizer;
    std::int64_t iteration = 0;  // completed steps
    std::vector<std::filesystem::path> checkpoints;
    std::vector<LossReport> reports;  // steps run by this call
};

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::int64_t iteration);
/// Highest-iteration checkpoint in `dir`, if any.
std::optional<std::filesystem::path> latest_checkpoint(const std::filesystem::path& dir);

/// Packs params, optimizer moments and the configs into a checkpoint.
model::Checkpoint make_checkpoint(const model::ParameterStore& params, const AdamState& state,
                                  const model::ModelConfig& model, const TrainConfig& train, std::int64_t iteration);

/// Runs iterations [start, total_iters). A fresh run writes the initial
/// checkpoint (iteration 0); afterwards one every checkpoint_every steps and
/// at the end. With resume set, continues bit-exactly from the latest
/// checkpoint in checkpoint_dir and truncates the log to match it.
LoopResult train_loop(const PairSource& data, const model::ModelConfig& model, const TrainConfig& train,
                      const LoopOptions& options);

}  // namespace carsr::train
