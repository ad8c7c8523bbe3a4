#include <cmath>
#include <numbers>

#include "carsr/errors.hpp"
#include "carsr/train_config.hpp"

namespace carsr::train {

void validate(const TrainConfig& cfg) {
    if (cfg.batch_size < 1) throw ConfigError("TrainConfig.batch_size", "must be >= 1");
    if (cfg.hr_patch < 1) throw ConfigError("TrainConfig.hr_patch", "must be >= 1");
    if (!(cfg.lr_min >= 0.0)) throw ConfigError("TrainConfig.lr_min", "must be >= 0");
    if (!(cfg.lr_min < cfg.lr_init)) throw ConfigError("TrainConfig.lr_init", "must exceed lr_min");
    if (cfg.total_iters < 0) throw ConfigError("TrainConfig.total_iters", "must be >= 0");
    if (cfg.restart_period < 1) throw ConfigError("TrainConfig.restart_period", "must be >= 1");
    if (cfg.total_iters > 0 && cfg.restart_period > cfg.total_iters) {
        throw ConfigError("TrainConfig.restart_period", "must not exceed total_iters");
    }
    if (!(cfg.lambda_recon >= 0.0)) throw ConfigError("TrainConfig.lambda_recon", "must be >= 0");
    if (cfg.checkpoint_every < 1) throw ConfigError("TrainConfig.checkpoint_every", "must be >= 1");
    if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0)) throw ConfigError("TrainConfig.adam_beta1", "must be in [0, 1)");
    if (!(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0)) throw ConfigError("TrainConfig.adam_beta2", "must be in [0, 1)");
    if (!(cfg.adam_eps > 0.0)) throw ConfigError("TrainConfig.adam_eps", "must be > 0");
}

void validate(const TrainConfig& train, const model::ModelConfig& model) {
    validate(train);
    model::validate(model);
    if (train.lambda_recon > 0.0 && !model.with_car_head) {
        throw ConfigError("TrainConfig.lambda_recon", "lambda > 0 requires ModelConfig.with_car_head = true");
    }
    if (train.hr_patch % model.scale != 0) {
        throw ConfigError("TrainConfig.hr_patch", "must be a multiple of ModelConfig.scale");
    }
}

void apply_desk_preset(TrainConfig& train, model::ModelConfig& model) {
    train.total_iters = 2000;
    train.restart_period = 1000;
    train.batch_size = 8;
    train.hr_patch = 64;
    train.checkpoint_every = 1000;
    model.n_features = 32;
    model.num_rrdb = 4;
}

double cosine_lr(std::int64_t iter, const TrainConfig& cfg) {
    if (iter < 0 || iter >= cfg.total_iters) {
        throw DomainError("iteration " + std::to_string(iter) + " outside [0, " + std::to_string(cfg.total_iters) + ")");
    }
    const auto t = static_cast<double>(iter % cfg.restart_period);
    const auto period = static_cast<double>(cfg.restart_period);
    return cfg.lr_min + 0.5 * (cfg.lr_init - cfg.lr_min) * (1.0 + std::cos(std::numbers::pi * t / period));
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
    j = nlohmann::json{{"batch_size", cfg.batch_size},
                       {"hr_patch", cfg.hr_patch},
                       {"lr_init", cfg.lr_init},
                       {"lr_min", cfg.lr_min},
                       {"restart_period", cfg.restart_period},
                       {"total_iters", cfg.total_iters},
                       {"loss_type", to_string(cfg.loss)},
                       {"lambda_recon", cfg.lambda_recon},
                       {"seed", cfg.seed},
                       {"checkpoint_every", cfg.checkpoint_every},
                       {"adam_beta1", cfg.adam_beta1},
                       {"adam_beta2", cfg.adam_beta2},
                       {"adam_eps", cfg.adam_eps}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.hr_patch = j.at("hr_patch").get<int>();
    cfg.lr_init = j.at("lr_init").get<double>();
    cfg.lr_min = j.at("lr_min").get<double>();
    cfg.restart_period = j.at("restart_period").get<std::int64_t>();
    cfg.total_iters = j.at("total_iters").get<std::int64_t>();
    cfg.loss = parse_loss_type(j.at("loss_type").get<std::string>());
    cfg.lambda_recon = j.at("lambda_recon").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.checkpoint_every = j.at("checkpoint_every").get<std::int64_t>();
    cfg.adam_beta1 = j.at("adam_beta1").get<double>();
    cfg.adam_beta2 = j.at("adam_beta2").get<double>();
    cfg.adam_eps = j.at("adam_eps").get<double>();
}

}  // namespace carsr::train
