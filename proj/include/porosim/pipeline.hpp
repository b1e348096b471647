#pragma once

#include <string>

#include "porosim/config.hpp"

namespace porosim {

/// Exit codes shared by all commands: 0 success, 1 check or solver failure,
/// 2 configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

int cmd_simulate(const RunConfig& config, const std::string& out_dir,
                 bool dry_run);
int cmd_analyze(const std::string& trajectory_path, const RunConfig& config,
                const std::string& out_dir);
int cmd_validate(const std::string& filter);
int cmd_scale_report(const RunConfig& config, bool json);
int cmd_sweep(const RunConfig& config, const std::string& out_dir);

}  // namespace porosim
