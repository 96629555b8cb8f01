#include "dowlab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <map>

#include "dowlab/config.hpp"
#include "dowlab/errors.hpp"
#include "dowlab/figures.hpp"
#include "dowlab/ingest.hpp"
#include "dowlab/rng.hpp"
#include "dowlab/text.hpp"

namespace dowlab::cli {

namespace {

/// One subcommand's bound flag storage plus the CLI11 handles needed to tell
/// a flag the user passed from one still holding its default.
struct FlagSet {
  Config flags;
  std::string config_path;
  std::map<std::string, CLI::Option*> opts;
};

void add_common_options(CLI::App* cmd, FlagSet& f) {
  f.opts["data"] = cmd->add_option("--data", f.flags.data_path, "weekly dataset CSV");
  f.opts["out"] = cmd->add_option("--out", f.flags.out_dir, "output directory (default: out)");
  f.opts["seed"] = cmd->add_option("--seed", f.flags.seed, "master random seed (default: 42)");
  f.opts["k"] = cmd->add_option("--k", f.flags.k, "number of clusters (default: 3)");
  f.opts["target"] = cmd->add_option("--target", f.flags.target,
                                     "ticker whose next-week change is modeled (default: DIS)");
  f.opts["trees"] = cmd->add_option(
      "--trees", f.flags.trees, "forest trees and boosting stages (default: 100)");
  f.opts["learning-rate"] = cmd->add_option("--learning-rate", f.flags.learning_rate,
                                            "boosting learning rate in (0, 1] (default: 0.1)");
  f.opts["depth"] = cmd->add_option(
      "--depth", f.flags.depth, "tree depth cap for both ensembles (default: forest 6, boosting 3)");
  f.opts["split"] = cmd->add_option("--split", f.flags.split,
                                    "'temporal' or 'holdout:<fraction>' (default: temporal)");
  f.opts["hml"] = cmd->add_option("--hml", f.flags.hml_path,
                                  "external value-factor series, date,value CSV");
  f.opts["risk-free"] = cmd->add_option("--risk-free", f.flags.risk_free_path,
                                        "external risk-free series, date,value CSV");
  f.opts["config"] =
      cmd->add_option("--config", f.config_path, "key=value config file; flags override it");
}

/// defaults -> config file -> flags the user actually passed.
Config assemble_config(const FlagSet& f) {
  Config c;
  if (f.opts.at("config")->count() > 0) apply_config_entries(c, read_config_file(f.config_path));
  auto passed = [&](const char* name) { return f.opts.at(name)->count() > 0; };
  if (passed("data")) c.data_path = f.flags.data_path;
  if (passed("out")) c.out_dir = f.flags.out_dir;
  if (passed("seed")) c.seed = f.flags.seed;
  if (passed("k")) c.k = f.flags.k;
  if (passed("target")) c.target = f.flags.target;
  if (passed("trees")) c.trees = f.flags.trees;
  if (passed("learning-rate")) c.learning_rate = f.flags.learning_rate;
  if (passed("depth")) c.depth = f.flags.depth;
  if (passed("split")) c.split = f.flags.split;
  if (passed("hml")) c.hml_path = f.flags.hml_path;
  if (passed("risk-free")) c.risk_free_path = f.flags.risk_free_path;
  return c;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::pair<ingest::Dataset, ingest::ValidationReport> load_data(const Config& c,
                                                               std::ostream& err) {
  auto loaded = ingest::load_and_validate(c.data_path);
  for (const auto& w : loaded.second.warnings) err << "warning: " << w << "\n";
  return loaded;
}

void write_report_files(figures::Emitter& em, const eval::PipelineResult& res) {
  em.write("report.txt", res.report.to_text());
  em.write("report.kv", res.report.to_kv());
  figures::write_accuracy_csv(em, res.report.scores);
  figures::write_predictions(em, "linear_regression", res, res.linear_test_pred);
  figures::write_predictions(em, "random_forest", res, res.forest_test_pred);
  figures::write_predictions(em, "gradient_boosting", res, res.boost_test_pred);
}

int cmd_validate(const Config& c, std::ostream& out) {
  auto [d, report] = ingest::load_and_validate(c.data_path);
  out << report.to_text();
  return 0;
}

int cmd_eda(const Config& c, std::ostream& out, std::ostream& err) {
  auto [d, vrep] = load_data(c, err);
  figures::Emitter em(c.out_dir);
  figures::fig_close_prices(em, d);
  figures::fig_histograms(em, d);
  figures::fig_log_prices(em, d);
  em.write("config.txt", echo_config(c));
  em.finish();
  out << "wrote " << em.names().size() << " files to " << c.out_dir << "\n";
  return 0;
}

int cmd_cluster(const Config& c, std::ostream& out, std::ostream& err) {
  auto [d, vrep] = load_data(c, err);
  eval::PipelineOptions opts = to_pipeline_options(c);
  auto returns = features::pivot_returns(d);

  auto model = cluster::kmeans_best(returns, opts.k, derive_seed(opts.seed, 1),
                                    opts.kmeans_restarts, opts.kmeans_max_iter, opts.kmeans_tol);
  int k_max = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(std::max(opts.elbow_k_max, 1)), returns.values.rows()));
  auto elbow = cluster::elbow_curve(returns, k_max, derive_seed(opts.seed, 2),
                                    opts.kmeans_restarts, opts.kmeans_max_iter, opts.kmeans_tol);
  auto members = cluster::cluster_members(model, opts.target);

  figures::Emitter em(c.out_dir);
  figures::fig_elbow(em, elbow);
  figures::write_cluster_files(em, model, members);
  em.write("config.txt", echo_config(c));
  em.finish();

  out << "k=" << opts.k << " wcss=" << fmt6(model.wcss) << " iterations=" << model.iterations
      << "\n";
  out << "cluster of " << opts.target << ": " << join(members, " ") << "\n";
  return 0;
}

int cmd_fit(const Config& c, std::ostream& out, std::ostream& err) {
  auto [d, vrep] = load_data(c, err);
  eval::PipelineResult res = eval::run_pipeline(d, to_pipeline_options(c));
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";

  figures::Emitter em(c.out_dir);
  figures::write_models(em, res);
  em.write("config.txt", echo_config(c));
  em.finish();

  out << "fitted linear_regression, random_forest, gradient_boosting for " << res.report.target
      << " on " << res.report.train_rows << " training rows; models in " << c.out_dir << "\n";
  return 0;
}

int cmd_evaluate(const Config& c, std::ostream& out, std::ostream& err) {
  auto [d, vrep] = load_data(c, err);
  eval::PipelineResult res = eval::run_pipeline(d, to_pipeline_options(c));
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";

  figures::Emitter em(c.out_dir);
  write_report_files(em, res);
  em.write("config.txt", echo_config(c));
  em.finish();

  out << res.report.to_text();
  return 0;
}

int cmd_report(const Config& c, std::ostream& out, std::ostream& err) {
  auto [d, vrep] = load_data(c, err);
  eval::PipelineResult res = eval::run_pipeline(d, to_pipeline_options(c));
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";

  figures::Emitter em(c.out_dir);
  figures::fig_close_prices(em, d);
  figures::fig_histograms(em, d);
  figures::fig_log_prices(em, d);
  figures::fig_elbow(em, res.elbow);
  for (std::size_t i = 0; i < res.report.scores.size(); ++i)
    figures::fig_accuracy_bars(em, res.report.scores[i], static_cast<int>(5 + i));
  figures::write_cluster_files(em, res.clusters, res.members);
  figures::write_models(em, res);
  write_report_files(em, res);
  em.write("validation.txt", vrep.to_text());
  em.write("config.txt", echo_config(c));
  em.finish();

  out << res.report.to_text();
  out << "wrote " << em.names().size() << " files to " << c.out_dir << "\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"weekly stock pipeline: cleaning, factors, clustering, model comparison"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    bool needs_data;
    int (*handler)(const Config&, std::ostream&, std::ostream&);
  };
  const std::vector<Command> commands = {
      {"validate", "check the dataset and print its validation report", true,
       [](const Config& c, std::ostream& o, std::ostream&) { return cmd_validate(c, o); }},
      {"eda", "write distribution and price figures (fig1-fig3)", true, cmd_eda},
      {"cluster", "group stocks by return co-movement; write elbow curve and assignments", true,
       cmd_cluster},
      {"fit", "fit the three models and save them", true, cmd_fit},
      {"evaluate", "fit, score on held-out rows, write the comparison report", true,
       cmd_evaluate},
      {"report", "full run: figures, cluster files, models, reports, manifest", true, cmd_report},
  };

  std::vector<FlagSet> flagsets(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].name, commands[i].help);
    add_common_options(sub, flagsets[i]);
    subs.push_back(sub);
  }

  std::vector<std::string> store = std::move(args);
  store.insert(store.begin(), "dowlab");
  std::vector<char*> argv;
  argv.reserve(store.size());
  for (auto& s : store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      Config c = assemble_config(flagsets[i]);
      if (commands[i].needs_data && c.data_path.empty()) {
        err << "error: --data is required (flag or config file)\n";
        return 2;
      }
      return commands[i].handler(c, out, err);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  err << "error: no subcommand selected\n";
  return 2;
}

}  // namespace dowlab::cli
