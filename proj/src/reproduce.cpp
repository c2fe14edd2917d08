#include "nar/reproduce.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace nar {

namespace {

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
  return {mean, std::sqrt(var)};
}

TrainConfig base_config(const ReproduceOptions& opts, unsigned seed) {
  TrainConfig cfg;
  cfg.steps = opts.small_scale ? std::min<long>(opts.steps, 40000) : opts.steps;
  cfg.lr = opts.lr;
  cfg.seed = seed;
  cfg.m = opts.m;
  cfg.K = opts.K;
  cfg.dims = make_experiment_dims(opts.m, opts.K, opts.hidden, opts.agg1);
  cfg.relu_skip_upd_last = true;
  cfg.loss.eta = opts.eta;
  cfg.loss.vertices = LossVertices::AllVertices;
  cfg.train_set = experiment_training_set(opts.x, opts.K, opts.beta);
  cfg.log_every = 100;
  return cfg;
}

void save_run(const std::string& out_dir, const std::string& label, unsigned seed,
              const TrainResult& res) {
  if (out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem = out_dir + "/" + label + "_seed" + std::to_string(seed);
  std::ofstream ck(stem + ".ckpt");
  write_checkpoint(ck, res.theta);
  std::ofstream ms(stem + ".metrics.csv");
  write_metrics_csv(ms, res.history, {});
}

}  // namespace

std::vector<EvalSet> general_eval_sets(const ReproduceOptions& opts, unsigned dataset_seed,
                                       SourceMarking marking) {
  std::vector<EvalSet> sets;
  for (int n : opts.sizes) {
    if (opts.small_scale && n > 256) continue;
    DatasetSpec spec;
    spec.kind = DatasetKind::General;
    spec.n = n;
    spec.count = opts.graphs_per_set;
    spec.seed = dataset_seed + static_cast<unsigned>(n);
    spec.K = opts.K;
    spec.beta = opts.beta;
    sets.push_back(EvalSet::from_instances("general-" + std::to_string(n), gen_dataset(spec),
                                           opts.K, marking));
  }
  return sets;
}

ScoreTable reproduce(const ReproduceOptions& opts, const std::string& out_dir) {
  ScoreTable table;
  for (int n : opts.sizes)
    if (!(opts.small_scale && n > 256)) table.sizes.push_back(n);

  struct RunSpec {
    std::string label;
    RegKind reg;
    SourceMarking marking;
  };
  std::vector<RunSpec> runs;
  if (opts.question == "q1") {
    runs.push_back({"weighted-l1", RegKind::WeightedL1, SourceMarking::BfInit});
  } else if (opts.question == "q2") {
    runs.push_back({"1-iwl", RegKind::WeightedL1, SourceMarking::BfInit});
    runs.push_back({"1-wl", RegKind::WeightedL1, SourceMarking::None});
  } else if (opts.question == "q3") {
    runs.push_back({"weighted-l1", RegKind::WeightedL1, SourceMarking::BfInit});
    runs.push_back({"l1", RegKind::L1, SourceMarking::BfInit});
    runs.push_back({"l2", RegKind::L2, SourceMarking::BfInit});
  } else {
    throw std::invalid_argument("reproduce: unknown question " + opts.question);
  }

  // One shared dataset per marking mode; the baseline sees stripped labels
  // but is scored against the same targets.
  std::map<SourceMarking, std::vector<EvalSet>> eval_cache;
  for (const RunSpec& run : runs)
    if (!eval_cache.count(run.marking))
      eval_cache[run.marking] = general_eval_sets(opts, 9000, run.marking);

  for (const RunSpec& run : runs) {
    table.row_labels.push_back(run.label);
    std::vector<std::vector<double>> per_size(table.sizes.size());
    for (unsigned seed : opts.seeds) {
      TrainConfig cfg = base_config(opts, seed);
      cfg.loss.reg = run.reg;
      if (run.marking == SourceMarking::None) cfg.train_set = strip_source_marks(cfg.train_set);
      const TrainResult res = train(cfg);
      save_run(out_dir, opts.question + "_" + run.label, seed, res);
      table.final_train_losses[run.label].push_back(res.history.back().loss_total);
      const std::vector<EvalSet>& sets = eval_cache[run.marking];
      for (std::size_t i = 0; i < sets.size(); ++i)
        per_size[i].push_back(test_score(res.theta, sets[i]));
    }
    for (const auto& scores : per_size)
      table.cells[run.label].push_back(mean_std(scores));
  }
  return table;
}

void write_score_table_csv(std::ostream& os, const ScoreTable& table) {
  os << "model";
  for (int n : table.sizes) os << ",mean_" << n << ",std_" << n;
  os << '\n';
  for (const std::string& label : table.row_labels) {
    os << label;
    for (const auto& [mean, sd] : table.cells.at(label))
      os << ',' << format_double(mean) << ',' << format_double(sd);
    os << '\n';
  }
}

}  // namespace nar
