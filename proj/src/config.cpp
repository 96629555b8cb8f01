#include "dowlab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "dowlab/errors.hpp"
#include "dowlab/text.hpp"

namespace dowlab::cli {

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::map<std::string, std::string> entries;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (entries.count(key))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    entries[key] = value;
  }
  return entries;
}

namespace {

double parse_number(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError("'" + key + "' needs a number, got '" + value + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  double v = parse_number(key, value);
  auto i = static_cast<long long>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("'" + key + "' needs an integer, got '" + value + "'");
  return i;
}

}  // namespace

void apply_config_entries(Config& c, const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) {
    if (key == "data") {
      c.data_path = value;
    } else if (key == "out") {
      c.out_dir = value;
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "k") {
      c.k = static_cast<int>(parse_integer(key, value));
    } else if (key == "target") {
      c.target = value;
    } else if (key == "trees") {
      c.trees = static_cast<int>(parse_integer(key, value));
    } else if (key == "learning-rate") {
      c.learning_rate = parse_number(key, value);
    } else if (key == "depth") {
      c.depth = static_cast<int>(parse_integer(key, value));
    } else if (key == "split") {
      c.split = value;
    } else if (key == "hml") {
      c.hml_path = value;
    } else if (key == "risk-free") {
      c.risk_free_path = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

std::string echo_config(const Config& c) {
  std::ostringstream out;
  out << "data=" << c.data_path << "\n";
  out << "out=" << c.out_dir << "\n";
  out << "seed=" << c.seed << "\n";
  out << "k=" << c.k << "\n";
  out << "target=" << c.target << "\n";
  out << "trees=" << c.trees << "\n";
  out << "learning-rate=" << fmt6(c.learning_rate) << "\n";
  out << "depth=" << c.depth << "\n";
  out << "split=" << c.split << "\n";
  out << "hml=" << c.hml_path << "\n";
  out << "risk-free=" << c.risk_free_path << "\n";
  return out.str();
}

eval::PipelineOptions to_pipeline_options(const Config& c) {
  eval::PipelineOptions opts;
  opts.seed = c.seed;
  opts.target = c.target;
  opts.k = c.k;
  opts.elbow_k_max = std::max(10, c.k);
  opts.forest_trees = c.trees;
  opts.boost_stages = c.trees;
  opts.learning_rate = c.learning_rate;
  if (c.depth >= 0) {
    opts.forest_depth = c.depth;
    opts.boost_depth = c.depth;
  }
  opts.split = eval::SplitSpec::parse(c.split);
  if (!c.hml_path.empty()) opts.factors.hml = features::DatedSeries::load(c.hml_path);
  if (!c.risk_free_path.empty())
    opts.factors.risk_free = features::DatedSeries::load(c.risk_free_path);
  return opts;
}

}  // namespace dowlab::cli
