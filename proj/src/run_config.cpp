#include "carsr/run_config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "carsr/errors.hpp"

namespace carsr::cli {
namespace {

using Section = std::map<std::string, YAML::Node>;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"ModelConfig",
         {"scale", "in_channels", "n_features", "num_rrdb", "dilations", "context_variant", "upsample_variant",
          "growth_channels", "residual_scale", "with_car_head"}},
        {"TrainConfig",
         {"batch_size", "hr_patch", "lr_init", "lr_min", "restart_period", "total_iters", "loss_type", "lambda_recon",
          "seed", "checkpoint_every", "adam_beta1", "adam_beta2", "adam_eps", "desk_preset"}},
        {"DegradeSpec", {"scale", "kernel", "qf_min", "qf_max", "fixed_qf"}},
        {"Paths",
         {"source_dir", "manifest", "checkpoint_dir", "checkpoint", "test_dir", "report_dir", "input_dir",
          "output_dir", "log"}},
        {"Prepare", {"count", "seed"}},
        {"Eval", {"qualities", "ensemble", "shave", "exclude_infinite"}},
        {"Ablate", {"architectures", "lambdas", "quality"}},
        {"Preprocess", {"downsample"}},
    };
    return keys;
}

template <typename T>
void read(const YAML::Node& section, const std::string& name, const char* key, T& out) {
    const YAML::Node node = section[key];
    if (!node) return;
    try {
        out = node.as<T>();
    } catch (const YAML::Exception& e) {
        throw ConfigError(name + "." + key, "malformed value: " + e.msg);
    }
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    // Keep a float marker so the value re-parses as a real.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

RunConfig decode(const YAML::Node& root) {
    if (root && !root.IsNull() && !root.IsMap()) throw ConfigError("config", "top level must be a mapping");
    for (const auto& kv : root) {
        const auto section = kv.first.as<std::string>();
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ConfigError(section, "unknown section");
        if (kv.second.IsNull()) continue;
        if (!kv.second.IsMap()) throw ConfigError(section, "section must be a mapping");
        for (const auto& entry : kv.second) {
            const auto key = entry.first.as<std::string>();
            if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
        }
    }

    RunConfig cfg;
    if (const auto m = root["ModelConfig"]) {
        const std::string s = "ModelConfig";
        read(m, s, "scale", cfg.model.scale);
        read(m, s, "in_channels", cfg.model.in_channels);
        read(m, s, "n_features", cfg.model.n_features);
        read(m, s, "num_rrdb", cfg.model.num_rrdb);
        read(m, s, "dilations", cfg.model.dilations);
        std::string name;
        if (m["context_variant"]) {
            read(m, s, "context_variant", name);
            cfg.model.context = model::parse_context_variant(name);
        }
        if (m["upsample_variant"]) {
            read(m, s, "upsample_variant", name);
            cfg.model.upsample = model::parse_upsample_variant(name);
        }
        read(m, s, "growth_channels", cfg.model.growth_channels);
        read(m, s, "residual_scale", cfg.model.residual_scale);
        read(m, s, "with_car_head", cfg.model.with_car_head);
    }
    if (const auto t = root["TrainConfig"]) {
        const std::string s = "TrainConfig";
        read(t, s, "batch_size", cfg.train.batch_size);
        read(t, s, "hr_patch", cfg.train.hr_patch);
        read(t, s, "lr_init", cfg.train.lr_init);
        read(t, s, "lr_min", cfg.train.lr_min);
        read(t, s, "restart_period", cfg.train.restart_period);
        read(t, s, "total_iters", cfg.train.total_iters);
        if (t["loss_type"]) {
            std::string name;
            read(t, s, "loss_type", name);
            cfg.train.loss = train::parse_loss_type(name);
        }
        read(t, s, "lambda_recon", cfg.train.lambda_recon);
        read(t, s, "seed", cfg.train.seed);
        read(t, s, "checkpoint_every", cfg.train.checkpoint_every);
        read(t, s, "adam_beta1", cfg.train.adam_beta1);
        read(t, s, "adam_beta2", cfg.train.adam_beta2);
        read(t, s, "adam_eps", cfg.train.adam_eps);
        read(t, s, "desk_preset", cfg.desk_preset);
    }
    if (const auto d = root["DegradeSpec"]) {
        const std::string s = "DegradeSpec";
        read(d, s, "scale", cfg.degrade.scale);
        read(d, s, "kernel", cfg.degrade.kernel);
        read(d, s, "qf_min", cfg.degrade.qf_min);
        read(d, s, "qf_max", cfg.degrade.qf_max);
        if (d["fixed_qf"] && !d["fixed_qf"].IsNull()) {
            int q = 0;
            read(d, s, "fixed_qf", q);
            cfg.degrade.fixed_qf = q;
        }
    }
    if (const auto p = root["Paths"]) {
        const std::string s = "Paths";
        read(p, s, "source_dir", cfg.paths.source_dir);
        read(p, s, "manifest", cfg.paths.manifest);
        read(p, s, "checkpoint_dir", cfg.paths.checkpoint_dir);
        read(p, s, "checkpoint", cfg.paths.checkpoint);
        read(p, s, "test_dir", cfg.paths.test_dir);
        read(p, s, "report_dir", cfg.paths.report_dir);
        read(p, s, "input_dir", cfg.paths.input_dir);
        read(p, s, "output_dir", cfg.paths.output_dir);
        read(p, s, "log", cfg.paths.log);
    }
    if (const auto p = root["Prepare"]) {
        read(p, "Prepare", "count", cfg.prepare.count);
        read(p, "Prepare", "seed", cfg.prepare.seed);
    }
    if (const auto e = root["Eval"]) {
        read(e, "Eval", "qualities", cfg.eval.qualities);
        read(e, "Eval", "ensemble", cfg.eval.ensemble);
        read(e, "Eval", "shave", cfg.eval.shave);
        read(e, "Eval", "exclude_infinite", cfg.eval.exclude_infinite);
    }
    if (const auto a = root["Ablate"]) {
        read(a, "Ablate", "architectures", cfg.ablate.architectures);
        read(a, "Ablate", "lambdas", cfg.ablate.lambdas);
        read(a, "Ablate", "quality", cfg.ablate.quality);
    }
    if (const auto p = root["Preprocess"]) read(p, "Preprocess", "downsample", cfg.preprocess.downsample);
    return cfg;
}

YAML::Node parse_yaml(std::string_view text) {
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError("config", "YAML syntax error: " + e.msg);
    }
}

void override_node(YAML::Node& root, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw ConfigError("--set", "expected Section.key=value, got '" + std::string(assignment) + "'");
    }
    const std::string section(assignment.substr(0, dot));
    const std::string key(assignment.substr(dot + 1, eq - dot - 1));
    const std::string value(assignment.substr(eq + 1));
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    root[section][key] = parse_yaml(value.empty() ? "''" : value);
}

}  // namespace

RunConfig parse_run_config(std::string_view yaml, const std::vector<std::string>& overrides) {
    YAML::Node root = parse_yaml(yaml);
    for (const auto& o : overrides) override_node(root, o);
    return decode(root);
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), overrides);
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    YAML::Node root = parse_yaml(serialize_run_config(cfg));
    override_node(root, assignment);
    cfg = decode(root);
}

std::string serialize_run_config(const RunConfig& cfg) {
    YAML::Emitter out;
    out << YAML::BeginMap;

    out << YAML::Key << "ModelConfig" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "scale" << YAML::Value << cfg.model.scale;
    out << YAML::Key << "in_channels" << YAML::Value << cfg.model.in_channels;
    out << YAML::Key << "n_features" << YAML::Value << cfg.model.n_features;
    out << YAML::Key << "num_rrdb" << YAML::Value << cfg.model.num_rrdb;
    out << YAML::Key << "dilations" << YAML::Value << YAML::Flow << cfg.model.dilations;
    out << YAML::Key << "context_variant" << YAML::Value << model::to_string(cfg.model.context);
    out << YAML::Key << "upsample_variant" << YAML::Value << model::to_string(cfg.model.upsample);
    out << YAML::Key << "growth_channels" << YAML::Value << cfg.model.growth_channels;
    out << YAML::Key << "residual_scale" << YAML::Value << shortest(cfg.model.residual_scale);
    out << YAML::Key << "with_car_head" << YAML::Value << cfg.model.with_car_head;
    out << YAML::EndMap;

    out << YAML::Key << "TrainConfig" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "batch_size" << YAML::Value << cfg.train.batch_size;
    out << YAML::Key << "hr_patch" << YAML::Value << cfg.train.hr_patch;
    out << YAML::Key << "lr_init" << YAML::Value << shortest(cfg.train.lr_init);
    out << YAML::Key << "lr_min" << YAML::Value << shortest(cfg.train.lr_min);
    out << YAML::Key << "restart_period" << YAML::Value << cfg.train.restart_period;
    out << YAML::Key << "total_iters" << YAML::Value << cfg.train.total_iters;
    out << YAML::Key << "loss_type" << YAML::Value << train::to_string(cfg.train.loss);
    out << YAML::Key << "lambda_recon" << YAML::Value << shortest(cfg.train.lambda_recon);
    out << YAML::Key << "seed" << YAML::Value << cfg.train.seed;
    out << YAML::Key << "checkpoint_every" << YAML::Value << cfg.train.checkpoint_every;
    out << YAML::Key << "adam_beta1" << YAML::Value << shortest(cfg.train.adam_beta1);
    out << YAML::Key << "adam_beta2" << YAML::Value << shortest(cfg.train.adam_beta2);
    out << YAML::Key << "adam_eps" << YAML::Value << shortest(cfg.train.adam_eps);
    out << YAML::Key << "desk_preset" << YAML::Value << cfg.desk_preset;
    out << YAML::EndMap;

    out << YAML::Key << "DegradeSpec" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "scale" << YAML::Value << cfg.degrade.scale;
    out << YAML::Key << "kernel" << YAML::Value << cfg.degrade.kernel;
    out << YAML::Key << "qf_min" << YAML::Value << cfg.degrade.qf_min;
    out << YAML::Key << "qf_max" << YAML::Value << cfg.degrade.qf_max;
    out << YAML::Key << "fixed_qf" << YAML::Value;
    if (cfg.degrade.fixed_qf) {
        out << *cfg.degrade.fixed_qf;
    } else {
        out << YAML::Null;
    }
    out << YAML::EndMap;

    const auto& p = cfg.paths;
    out << YAML::Key << "Paths" << YAML::Value << YAML::BeginMap;
    for (const auto& [key, value] : std::vector<std::pair<const char*, const std::string*>>{
             {"source_dir", &p.source_dir},
             {"manifest", &p.manifest},
             {"checkpoint_dir", &p.checkpoint_dir},
             {"checkpoint", &p.checkpoint},
             {"test_dir", &p.test_dir},
             {"report_dir", &p.report_dir},
             {"input_dir", &p.input_dir},
             {"output_dir", &p.output_dir},
             {"log", &p.log}}) {
        out << YAML::Key << key << YAML::Value << YAML::DoubleQuoted << *value;
    }
    out << YAML::EndMap;

    out << YAML::Key << "Prepare" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "count" << YAML::Value << cfg.prepare.count;
    out << YAML::Key << "seed" << YAML::Value << cfg.prepare.seed;
    out << YAML::EndMap;

    out << YAML::Key << "Eval" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "qualities" << YAML::Value << YAML::Flow << cfg.eval.qualities;
    out << YAML::Key << "ensemble" << YAML::Value << cfg.eval.ensemble;
    out << YAML::Key << "shave" << YAML::Value << cfg.eval.shave;
    out << YAML::Key << "exclude_infinite" << YAML::Value << cfg.eval.exclude_infinite;
    out << YAML::EndMap;

    out << YAML::Key << "Ablate" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "architectures" << YAML::Value << YAML::Flow << cfg.ablate.architectures;
    out << YAML::Key << "lambdas" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double l : cfg.ablate.lambdas) out << shortest(l);
    out << YAML::EndSeq;
    out << YAML::Key << "quality" << YAML::Value << cfg.ablate.quality;
    out << YAML::EndMap;

    out << YAML::Key << "Preprocess" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "downsample" << YAML::Value << cfg.preprocess.downsample;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_run_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace carsr::cli
