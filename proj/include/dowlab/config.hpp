#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "dowlab/evaluation.hpp"

namespace dowlab::cli {

/// Effective settings for one invocation. Precedence when assembling:
/// built-in defaults, then the config file, then command-line flags.
struct Config {
  std::string data_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int k = 3;
  std::string target = "DIS";
  int trees = 100;            // forest trees and boosting stages alike
  double learning_rate = 0.1;
  int depth = -1;             // <0: per-model defaults (forest 6, boosting 3)
  std::string split = "temporal";
  std::string hml_path;
  std::string risk_free_path;
};

/// Parses a flat "key=value" file ('#' starts a comment). Keys are the long
/// flag names without the dashes. Unknown keys or malformed lines throw
/// ConfigError.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Overwrites fields named by the map; numeric values must parse fully.
void apply_config_entries(Config& c, const std::map<std::string, std::string>& entries);

/// The settings a run actually used, in the same key=value shape the config
/// file takes, so an echoed file can reproduce the run.
std::string echo_config(const Config& c);

/// Converts to pipeline options, parsing the split and loading any external
/// factor series from disk.
eval::PipelineOptions to_pipeline_options(const Config& c);

}  // namespace dowlab::cli
