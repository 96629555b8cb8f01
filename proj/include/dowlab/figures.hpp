#pragma once

#include <string>
#include <vector>

#include "dowlab/evaluation.hpp"
#include "dowlab/ingest.hpp"

namespace dowlab::figures {

/// Writes files under one output directory and remembers their names;
/// finish() closes the run with a manifest listing everything written.
class Emitter {
 public:
  explicit Emitter(std::string out_dir);

  void write(const std::string& name, const std::string& content);
  void finish();

  const std::string& dir() const { return dir_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::string dir_;
  std::vector<std::string> names_;
};

/// Figure pairs: figN.svg plus figN.csv carrying exactly the plotted numbers.
/// 1: weekly closing prices, one line per stock
/// 2: per-attribute histograms
/// 3: natural log of the closing prices
/// 4: clustering elbow curve (k vs within-cluster sum of squares)
/// 5-7: per-model accuracy bars, obtained next to the reference value
void fig_close_prices(Emitter& out, const ingest::Dataset& d);
void fig_histograms(Emitter& out, const ingest::Dataset& d);
void fig_log_prices(Emitter& out, const ingest::Dataset& d);
void fig_elbow(Emitter& out, const std::vector<std::pair<int, double>>& curve);
void fig_accuracy_bars(Emitter& out, const eval::ModelScore& score, int fig_number);

void write_accuracy_csv(Emitter& out, const std::vector<eval::ModelScore>& scores);
void write_cluster_files(Emitter& out, const cluster::ClusterModel& m,
                         const std::vector<std::string>& members);
void write_predictions(Emitter& out, const std::string& model_name,
                       const eval::PipelineResult& r, const Series& predicted);
void write_models(Emitter& out, const eval::PipelineResult& r);

}  // namespace dowlab::figures
