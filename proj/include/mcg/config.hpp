#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mcg/cave.hpp"
#include "mcg/trial.hpp"

namespace mcg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything one `run` invocation needs: environment recipe, trial
/// parameters, output directory.
struct RunConfig {
  std::string env_kind = "cave";  // cave | mesh
  CaveParams cave;
  std::string mesh_path;
  std::vector<Vec3> mesh_starts;
  TrialConfig trial;
  bool save_direct_grid = false;
  std::string out_dir = "out";
};

/// Parse INI text (sections, key = value, # or ; comments).  Unknown
/// sections or keys are errors with the offending line number, so typos
/// can't silently fall back to defaults.
RunConfig parse_config_text(const std::string& text);

/// Read a file and parse it.  Throws ConfigError for unreadable files too.
RunConfig load_config_file(const std::string& path);

/// Apply MCG_<SECTION>_<KEY> environment variables on top of `cfg`.
void apply_env_overrides(RunConfig& cfg);

/// Effective configuration, every key present, numbers at %.17g so a dump
/// re-parses to the bitwise-identical configuration.
std::string dump_config(const RunConfig& cfg);

/// Build the world the config describes (generated cave or mesh file).
Environment build_environment(const RunConfig& cfg);

}  // namespace mcg
