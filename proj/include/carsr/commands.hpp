#pragma once

#include <filesystem>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "carsr/run_config.hpp"

namespace carsr::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,   // bad config or CLI usage, incompatible checkpoint
    kExitIo = 3,       // unreadable or unwritable files
    kExitNumeric = 4,  // non-finite loss during training
};

inline constexpr int kReportFormatVersion = 1;

// Each command validates its whole configuration before touching the file
// system and throws carsr errors; run_cli maps them to exit codes.

/// Builds the training manifest; returns its path.
std::filesystem::path cmd_prepare_data(const RunConfig& cfg, std::ostream& out);
/// Trains to TrainConfig.total_iters (or stops early at `stop_at`); returns
/// the last checkpoint written.
std::filesystem::path cmd_train(const RunConfig& cfg, bool resume, std::ostream& out,
                                std::optional<std::int64_t> stop_at = std::nullopt);
/// Writes eval_report.json / eval_report.csv into Paths.report_dir.
std::filesystem::path cmd_eval(const RunConfig& cfg, std::ostream& out);
/// Trains and scores every ablation variant; writes ablation_report.json / .csv.
std::filesystem::path cmd_ablate(const RunConfig& cfg, std::ostream& out);
/// Super-resolves every image of Paths.input_dir into Paths.output_dir.
std::filesystem::path cmd_preprocess(const RunConfig& cfg, std::ostream& out);

/// Full command line handling, args excluding the program name:
///   <command> [--config FILE] [--set Section.key=value]... [--desk]
///             [--resume] [--stop-at N] [--ensemble] [--downsample]
/// The config file is read first, the desk preset (when requested by flag,
/// by TrainConfig.desk_preset, or implied by `ablate`) is applied on top,
/// then the --set overrides.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace carsr::cli
