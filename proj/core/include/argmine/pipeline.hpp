#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "argmine/config.hpp"

namespace argmine {

// Pipeline stages in execution order ("all" runs every one).
const std::vector<std::string>& pipeline_stages();

struct StageOptions {
  bool force = false;
  int jobs = 0;               // 0 -> config value
  bool quiet = false;
};

// Runs one stage (or "all"). Skips stages whose inputs, outputs, and config
// are unchanged according to the manifest, unless forced. Throws DataError /
// ConfigError / NumericError on failure.
void run_stage(const PipelineConfig& config, const std::string& stage,
               const StageOptions& options = {});

// FNV-1a 64 of a file's bytes, as 16 hex chars. Used by the manifest.
std::string hash_file(const std::string& path);

}  // namespace argmine
