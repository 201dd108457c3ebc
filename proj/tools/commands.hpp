#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace rrf::cli {

/// Checks the keys a subcommand needs before any work starts.
void require_for(const std::string& command, const RunConfig& config,
                 const std::vector<std::string>& inputs);

void cmd_sample_env(const RunConfig& config);

/// One trajectory file per replica, then manifest.json.
void cmd_run(const RunConfig& config);

/// `inputs` are trajectory files; config.manifest adds the files it lists.
void cmd_analyze(const RunConfig& config, const std::vector<std::string>& inputs);

/// Run and analyze in one pass, with optional calibration and a second floor.
void cmd_report(const RunConfig& config);

}  // namespace rrf::cli
