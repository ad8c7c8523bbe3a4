#pragma once

#include <cstdint>

#include <json.hpp>

#include "carsr/loss.hpp"
#include "carsr/model_config.hpp"

namespace carsr::train {

struct TrainConfig {
    int batch_size = 36;
    int hr_patch = 128;
    double lr_init = 2e-4;
    double lr_min = 1e-7;
    std::int64_t restart_period = 250000;
    std::int64_t total_iters = 1000000;
    LossType loss = LossType::L1;
    double lambda_recon = 0.0;
    std::uint64_t seed = 0;
    std::int64_t checkpoint_every = 10000;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Throws ConfigError naming the offending field.
void validate(const TrainConfig& cfg);

/// Checks that the model can produce what the loss needs (lambda > 0 needs the CAR head).
void validate(const TrainConfig& train, const model::ModelConfig& model);

/// Desk-scale preset: 2000 iterations with a restart at 1000, batch 8,
/// 64px HR patches, n_f = 32, 4 RRDBs, checkpoints every 1000 iterations.
void apply_desk_preset(TrainConfig& train, model::ModelConfig& model);

/// Cosine annealing with warm restarts:
///   t = iter mod restart_period
///   lr = lr_min + (lr_init - lr_min) (1 + cos(pi t / restart_period)) / 2
/// Throws DomainError unless 0 <= iter < total_iters.
double cosine_lr(std::int64_t iter, const TrainConfig& cfg);

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

}  // namespace carsr::train
