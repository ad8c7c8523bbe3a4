#include "carsr/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "carsr/checkpoint.hpp"
#include "carsr/errors.hpp"
#include "carsr/evaluate.hpp"
#include "carsr/jpeg_codec.hpp"
#include "carsr/manifest.hpp"
#include "carsr/parameter_store.hpp"
#include "carsr/resample.hpp"
#include "carsr/testset.hpp"
#include "carsr/trainer.hpp"

namespace carsr::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_set(const std::string& field, const std::string& value) {
    if (value.empty()) throw ConfigError(field, "must be set");
}

void require_dir(const std::string& field, const std::string& value) {
    require_set(field, value);
    if (!fs::is_directory(value)) throw IoError(field + ": directory '" + value + "' does not exist");
}

void require_file(const std::string& field, const std::string& value) {
    require_set(field, value);
    if (!fs::is_regular_file(value)) throw IoError(field + ": file '" + value + "' does not exist");
}

void ensure_dir(const fs::path& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    ensure_dir(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
    f.close();
    if (!f) throw IoError("cannot write " + path.string());
}

void validate_quality(const std::string& field, int qf) {
    if (qf < 1 || qf > 100) throw ConfigError(field, "JPEG quality must be in [1, 100], got " + std::to_string(qf));
}

json report_header(const RunConfig& cfg, const std::string& command) {
    return {
        {"format_version", kReportFormatVersion},
        {"command", command},
        {"config_hash", config_hash(cfg)},
        {"codec_id", jpeg_codec_id()},
        {"config", serialize_run_config(cfg)},
    };
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

fs::path resolve_checkpoint(const RunConfig& cfg) {
    if (!cfg.paths.checkpoint.empty()) {
        require_file("Paths.checkpoint", cfg.paths.checkpoint);
        return cfg.paths.checkpoint;
    }
    if (cfg.paths.checkpoint_dir.empty()) throw ConfigError("Paths.checkpoint", "set it or Paths.checkpoint_dir");
    const auto latest = train::latest_checkpoint(cfg.paths.checkpoint_dir);
    if (!latest) throw IoError("Paths.checkpoint_dir: no checkpoint in '" + cfg.paths.checkpoint_dir + "'");
    return *latest;
}

model::Checkpoint load_matching_checkpoint(const fs::path& path, const model::ModelConfig& expected) {
    auto ckpt = model::load_checkpoint(path);
    if (ckpt.model != expected) {
        throw IncompatibleCheckpoint("checkpoint " + path.string() + " was trained with ModelConfig " +
                                     json(ckpt.model).dump() + " but the run requests " + json(expected).dump());
    }
    model::check_compatible(ckpt.params, expected);
    return ckpt;
}

DatasetManifest load_training_manifest(const RunConfig& cfg, const train::TrainConfig& train,
                                       const model::ModelConfig& model) {
    require_file("Paths.manifest", cfg.paths.manifest);
    auto manifest = read_manifest(cfg.paths.manifest);
    if (manifest.hr_patch != train.hr_patch) {
        throw ConfigError("TrainConfig.hr_patch", "manifest was built with hr_patch " +
                                                      std::to_string(manifest.hr_patch) + ", config asks for " +
                                                      std::to_string(train.hr_patch));
    }
    if (manifest.spec.scale != model.scale) {
        throw ConfigError("ModelConfig.scale", "manifest scale " + std::to_string(manifest.spec.scale) +
                                                   " differs from model scale " + std::to_string(model.scale));
    }
    if (manifest.entries.empty()) throw InputError("manifest " + cfg.paths.manifest + " has no entries");
    return manifest;
}

std::function<void(const train::LossReport&)> progress_printer(std::ostream& out, std::int64_t total,
                                                              const std::string& tag) {
    const std::int64_t every = std::max<std::int64_t>(1, total / 20);
    return [&out, every, total, tag](const train::LossReport& r) {
        if ((r.iter + 1) % every != 0 && r.iter + 1 != total) return;
        out << tag << "iter " << r.iter + 1 << "/" << total << "  l_HR " << fmt(r.l_hr) << "  l_LR "
            << fmt(r.l_lr) << "  lr " << fmt(r.lr_value) << '\n'
            << std::flush;
    };
}

struct EvalRow {
    std::string method;
    std::string dataset;
    int qf = 0;
    eval::EvalResult result;
};

json row_json(const EvalRow& row) {
    json j = eval::to_json(row.result);
    j["method"] = row.method;
    j["dataset"] = row.dataset;
    j["qf"] = row.qf;
    return j;
}

std::string dataset_name(const std::string& dir) {
    const fs::path p = fs::path(dir).lexically_normal();
    const auto name = (p.has_filename() ? p.filename() : p.parent_path().filename()).string();
    return name.empty() ? dir : name;
}

eval::Predictor bicubic_predictor(int scale) {
    return [scale](const Image& lr) { return bicubic_upscale(lr, scale).clamped(); };
}

}  // namespace

fs::path cmd_prepare_data(const RunConfig& cfg, std::ostream& out) {
    validate(cfg.degrade);
    train::validate(cfg.train);
    require_dir("Paths.source_dir", cfg.paths.source_dir);
    require_set("Paths.manifest", cfg.paths.manifest);
    if (cfg.train.hr_patch % cfg.degrade.scale != 0) {
        throw ConfigError("TrainConfig.hr_patch", "must be a multiple of DegradeSpec.scale");
    }

    const auto source = fs::absolute(cfg.paths.source_dir).lexically_normal();
    const auto manifest =
        build_manifest(source, cfg.degrade, cfg.prepare.seed, cfg.prepare.count, cfg.train.hr_patch);
    const fs::path path = cfg.paths.manifest;
    write_text(path, serialize_manifest(manifest));

    json summary = report_header(cfg, "prepare-data");
    summary["manifest"] = path.string();
    summary["count"] = manifest.entries.size();
    summary["hr_patch"] = manifest.hr_patch;
    json hist = json::object();
    for (const auto& [qf, n] : qf_histogram(manifest)) hist[std::to_string(qf)] = n;
    summary["qf_histogram"] = hist;
    write_text(fs::path(path.string() + ".summary.json"), summary.dump(2) + "\n");

    out << "wrote " << manifest.entries.size() << " entries to " << path.string() << '\n';
    return path;
}

fs::path cmd_train(const RunConfig& cfg, bool resume, std::ostream& out, std::optional<std::int64_t> stop_at) {
    model::validate(cfg.model);
    train::validate(cfg.train);
    train::validate(cfg.train, cfg.model);
    require_set("Paths.checkpoint_dir", cfg.paths.checkpoint_dir);
    const auto manifest = load_training_manifest(cfg, cfg.train, cfg.model);

    ManifestPairs data(manifest);
    train::LoopOptions options;
    options.checkpoint_dir = cfg.paths.checkpoint_dir;
    options.log_path = cfg.paths.log;
    options.resume = resume;
    options.stop_at = stop_at;
    options.on_step = progress_printer(out, cfg.train.total_iters, "");
    const auto result = train::train_loop(data, cfg.model, cfg.train, options);
    const auto final_ckpt = train::checkpoint_path(cfg.paths.checkpoint_dir, result.iteration);
    out << (result.iteration == cfg.train.total_iters ? "final checkpoint " : "stopped at checkpoint ")
        << final_ckpt.string() << '\n';
    return final_ckpt;
}

fs::path cmd_eval(const RunConfig& cfg, std::ostream& out) {
    model::validate(cfg.model);
    require_dir("Paths.test_dir", cfg.paths.test_dir);
    require_set("Paths.report_dir", cfg.paths.report_dir);
    if (cfg.eval.qualities.empty()) throw ConfigError("Eval.qualities", "must not be empty");
    for (int qf : cfg.eval.qualities) validate_quality("Eval.qualities", qf);
    if (cfg.eval.shave < 0) throw ConfigError("Eval.shave", "must be >= 0");
    const auto ckpt_path = resolve_checkpoint(cfg);
    const auto ckpt = load_matching_checkpoint(ckpt_path, cfg.model);

    const eval::EvalOptions options{cfg.eval.shave, cfg.eval.exclude_infinite};
    const auto dataset = dataset_name(cfg.paths.test_dir);
    const std::int64_t params = model::count_params(ckpt.params);
    std::vector<EvalRow> rows;
    json failures = json::array();
    for (int qf : cfg.eval.qualities) {
        const auto set = degrade_testset(cfg.paths.test_dir, qf, cfg.model.scale);
        for (const auto& f : set.failures) failures.push_back({{"qf", qf}, {"name", f.name}, {"error", f.message}});
        if (set.pairs.empty()) throw InputError("no decodable images in " + cfg.paths.test_dir);
        rows.push_back({"bicubic", dataset, qf, eval::evaluate_dataset(bicubic_predictor(cfg.model.scale), set.pairs, 0, options)});
        rows.push_back({"CAJNN", dataset, qf, eval::evaluate_dataset(ckpt.params, cfg.model, set.pairs, false, options)});
        if (cfg.eval.ensemble) {
            rows.push_back(
                {"CAJNN+", dataset, qf, eval::evaluate_dataset(ckpt.params, cfg.model, set.pairs, true, options)});
        }
        for (auto it = rows.end() - (cfg.eval.ensemble ? 3 : 2); it != rows.end(); ++it) {
            out << it->method << "  " << dataset << "  qf " << qf << "  PSNR-Y " << fmt(it->result.mean_psnr_y)
                << "  SSIM-Y " << fmt(it->result.mean_ssim_y) << '\n';
        }
    }

    json report = report_header(cfg, "eval");
    report["checkpoint"] = ckpt_path.string();
    report["iteration"] = ckpt.iteration;
    report["params"] = params;
    report["shave"] = cfg.eval.shave;
    report["exclude_infinite"] = cfg.eval.exclude_infinite;
    report["dataset"] = dataset;
    report["failures"] = failures;
    report["rows"] = json::array();
    for (const auto& r : rows) report["rows"].push_back(row_json(r));

    std::ostringstream csv;
    csv << "method,dataset,qf,psnr_y,ssim_y,runtime_s,params,images,config_hash,codec_id,shave\n";
    const auto hash = config_hash(cfg);
    for (const auto& r : rows) {
        csv << r.method << ',' << r.dataset << ',' << r.qf << ',' << fmt(r.result.mean_psnr_y) << ','
            << fmt(r.result.mean_ssim_y) << ',' << fmt(r.result.runtime_total_s) << ',' << r.result.params << ','
            << r.result.per_image.size() << ',' << hash << ',' << jpeg_codec_id() << ',' << cfg.eval.shave << '\n';
    }

    const fs::path dir = cfg.paths.report_dir;
    write_text(dir / "eval_report.csv", csv.str());
    write_text(dir / "eval_report.json", report.dump(2) + "\n");
    out << "report " << (dir / "eval_report.json").string() << '\n';
    return dir / "eval_report.json";
}

namespace {

struct AblationVariant {
    std::string name;
    std::string group;  // "architecture" or "lambda"
    model::ModelConfig model;
    train::TrainConfig train;
};

std::vector<AblationVariant> ablation_variants(const RunConfig& cfg) {
    std::vector<AblationVariant> variants;
    for (const auto& arch : cfg.ablate.architectures) {
        const auto plus = arch.find('+');
        if (plus == std::string::npos) {
            throw ConfigError("Ablate.architectures", "expected <context>+<upsampler>, got '" + arch + "'");
        }
        AblationVariant v{arch, "architecture", cfg.model, cfg.train};
        v.model.context = model::parse_context_variant(arch.substr(0, plus));
        v.model.upsample = model::parse_upsample_variant(arch.substr(plus + 1));
        v.model.with_car_head = false;
        v.train.lambda_recon = 0.0;
        variants.push_back(std::move(v));
    }
    for (double lambda : cfg.ablate.lambdas) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw ConfigError("Ablate.lambdas", "lambda must be finite and >= 0, got " + fmt(lambda));
        }
        AblationVariant v{"lambda=" + fmt(lambda), "lambda", cfg.model, cfg.train};
        v.model.context = model::ContextVariant::aspp;
        v.model.upsample = model::UpsampleVariant::pixelshuffle;
        v.model.with_car_head = lambda > 0.0;
        v.train.lambda_recon = lambda;
        variants.push_back(std::move(v));
    }
    for (const auto& v : variants) {
        model::validate(v.model);
        train::validate(v.train, v.model);
    }
    return variants;
}

std::string directory_tag(const std::string& name) {
    std::string tag;
    for (char c : name) tag += std::isalnum(static_cast<unsigned char>(c)) || c == '.' ? c : '_';
    return tag;
}

}  // namespace

fs::path cmd_ablate(const RunConfig& cfg, std::ostream& out) {
    model::validate(cfg.model);
    train::validate(cfg.train);
    validate_quality("Ablate.quality", cfg.ablate.quality);
    require_dir("Paths.test_dir", cfg.paths.test_dir);
    require_set("Paths.report_dir", cfg.paths.report_dir);
    const auto variants = ablation_variants(cfg);
    if (variants.empty()) throw ConfigError("Ablate", "no variants requested");
    const auto manifest = load_training_manifest(cfg, cfg.train, cfg.model);

    const auto set = degrade_testset(cfg.paths.test_dir, cfg.ablate.quality, cfg.model.scale);
    if (set.pairs.empty()) throw InputError("no decodable images in " + cfg.paths.test_dir);
    ManifestPairs data(manifest);
    const fs::path dir = cfg.paths.report_dir;
    const eval::EvalOptions options{cfg.eval.shave, cfg.eval.exclude_infinite};
    const auto bicubic = eval::evaluate_dataset(bicubic_predictor(cfg.model.scale), set.pairs, 0, options);

    json rows = json::array();
    std::ostringstream csv;
    csv << "group,variant,context,upsampler,lambda,params,context_params,psnr_y,ssim_y,final_l_hr,final_l_lr,"
           "config_hash,codec_id,shave\n";
    const auto hash = config_hash(cfg);
    for (const auto& v : variants) {
        out << "ablation " << v.name << '\n' << std::flush;
        train::LoopOptions loop;
        loop.checkpoint_dir = dir / "ablation" / directory_tag(v.name);
        loop.on_step = progress_printer(out, v.train.total_iters, "  ");
        const auto result = train::train_loop(data, v.model, v.train, loop);
        const auto scores = eval::evaluate_dataset(result.params, v.model, set.pairs, false, options);
        const auto inventory = model::layer_inventory(v.model);
        const std::int64_t params = model::count_params(inventory);
        const std::int64_t context_params = model::count_params(inventory, "context.");
        const double l_hr = result.reports.empty() ? std::nan("") : result.reports.back().l_hr;
        const double l_lr = result.reports.empty() ? std::nan("") : result.reports.back().l_lr;

        json row = {
            {"group", v.group},
            {"variant", v.name},
            {"context", model::to_string(v.model.context)},
            {"upsampler", model::to_string(v.model.upsample)},
            {"lambda", v.train.lambda_recon},
            {"with_car_head", v.model.with_car_head},
            {"params", params},
            {"context_params", context_params},
            {"mean_psnr_y", scores.mean_psnr_y},
            {"mean_ssim_y", scores.mean_ssim_y},
            {"final_l_HR", fmt(l_hr)},
            {"final_l_LR", fmt(l_lr)},
            {"iterations", result.iteration},
            {"checkpoint", train::checkpoint_path(loop.checkpoint_dir, result.iteration).string()},
        };
        rows.push_back(row);
        csv << v.group << ',' << v.name << ',' << model::to_string(v.model.context) << ','
            << model::to_string(v.model.upsample) << ',' << fmt(v.train.lambda_recon) << ',' << params << ','
            << context_params << ',' << fmt(scores.mean_psnr_y) << ',' << fmt(scores.mean_ssim_y) << ','
            << fmt(l_hr) << ',' << fmt(l_lr) << ',' << hash << ',' << jpeg_codec_id() << ',' << cfg.eval.shave
            << '\n';
        out << "  PSNR-Y " << fmt(scores.mean_psnr_y) << "  params " << params << '\n';
    }

    json report = report_header(cfg, "ablate");
    report["quality"] = cfg.ablate.quality;
    report["shave"] = cfg.eval.shave;
    report["dataset"] = dataset_name(cfg.paths.test_dir);
    report["bicubic_psnr_y"] = bicubic.mean_psnr_y;
    report["rows"] = rows;
    write_text(dir / "ablation_report.csv", csv.str());
    write_text(dir / "ablation_report.json", report.dump(2) + "\n");
    out << "report " << (dir / "ablation_report.json").string() << '\n';
    return dir / "ablation_report.json";
}

fs::path cmd_preprocess(const RunConfig& cfg, std::ostream& out) {
    model::validate(cfg.model);
    require_dir("Paths.input_dir", cfg.paths.input_dir);
    require_set("Paths.output_dir", cfg.paths.output_dir);
    const auto ckpt = load_matching_checkpoint(resolve_checkpoint(cfg), cfg.model);
    const auto inputs = list_images(cfg.paths.input_dir);
    if (inputs.empty()) throw InputError("no images in " + cfg.paths.input_dir);

    const fs::path dir = cfg.paths.output_dir;
    ensure_dir(dir);
    json files = json::array();
    std::size_t written = 0;
    for (const auto& path : inputs) {
        json entry = {{"input", path.filename().string()}};
        try {
            const Image lr = read_image(path);
            Image sr = eval::super_resolve(ckpt.params, cfg.model, lr, cfg.eval.ensemble);
            if (cfg.preprocess.downsample) sr = resize_bicubic(sr, lr.height(), lr.width()).clamped();
            const auto target = dir / (path.stem().string() + ".png");
            write_png(target, sr);
            entry["output"] = target.filename().string();
            ++written;
        } catch (const Error& e) {
            entry["error"] = e.what();
            out << "failed " << path.filename().string() << ": " << e.what() << '\n';
        }
        files.push_back(entry);
    }

    json report = report_header(cfg, "preprocess");
    report["downsample"] = cfg.preprocess.downsample;
    report["ensemble"] = cfg.eval.ensemble;
    report["files"] = files;
    write_text(dir / "preprocess_report.json", report.dump(2) + "\n");
    out << "wrote " << written << " of " << inputs.size() << " images to " << dir.string() << '\n';
    if (written == 0) throw InputError("no input image could be processed");
    return dir;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Super-resolution of JPEG-compressed images"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::vector<std::string> overrides;
    bool desk = false;
    bool resume = false;
    std::optional<std::int64_t> stop_at;
    bool ensemble = false;
    bool downsample = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "YAML run configuration");
        sub->add_option("--set", overrides, "Override, Section.key=value (repeatable)");
        sub->add_flag("--desk", desk, "Apply the desk-scale preset");
    };
    auto* prepare = app.add_subcommand("prepare-data", "Build the training manifest");
    auto* train_cmd = app.add_subcommand("train", "Train a model");
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a test set");
    auto* ablate = app.add_subcommand("ablate", "Train and score the ablation variants");
    auto* preprocess = app.add_subcommand("preprocess", "Super-resolve a directory of images");
    for (auto* sub : {prepare, train_cmd, eval_cmd, ablate, preprocess}) add_common(sub);
    train_cmd->add_flag("--resume", resume, "Continue from the latest checkpoint");
    train_cmd->add_option("--stop-at", stop_at, "Stop (with a checkpoint) after this many iterations")
        ->check(CLI::NonNegativeNumber);
    eval_cmd->add_flag("--ensemble", ensemble, "Also report self-ensembled scores");
    preprocess->add_flag("--ensemble", ensemble, "Use the self-ensemble");
    preprocess->add_flag("--downsample", downsample, "Resize outputs back to the input size");

    std::vector<std::string> argv{"carsr"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitConfig;
    }

    try {
        RunConfig cfg = config_path.empty() ? parse_run_config("") : load_run_config(config_path);
        if (desk || cfg.desk_preset || ablate->parsed()) {
            train::apply_desk_preset(cfg.train, cfg.model);
            cfg.desk_preset = true;
        }
        for (const auto& o : overrides) apply_override(cfg, o);
        if (ensemble) cfg.eval.ensemble = true;
        if (downsample) cfg.preprocess.downsample = true;

        if (prepare->parsed()) cmd_prepare_data(cfg, out);
        if (train_cmd->parsed()) cmd_train(cfg, resume, out, stop_at);
        if (eval_cmd->parsed()) cmd_eval(cfg, out);
        if (ablate->parsed()) cmd_ablate(cfg, out);
        if (preprocess->parsed()) cmd_preprocess(cfg, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IncompatibleCheckpoint& e) {
        err << "incompatible checkpoint: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace carsr::cli
