// Command-line front end: dataset generation, training, evaluation, WL
// tests, classical oracles, invariant suites, and the Q1-Q3 reproduction
// tables. All outputs are CSV or the plain text formats documented in the
// README.

#include "nar/analysis.hpp"
#include "nar/checks.hpp"
#include "nar/oracles.hpp"
#include "nar/reproduce.hpp"
#include "nar/training.hpp"
#include "nar/wl.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace nar;

std::map<std::string, std::string> read_kv_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad config line: " + line);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

template <typename T>
T take(std::map<std::string, std::string>& kv, const std::string& key, T fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::istringstream ss(it->second);
  T out;
  ss >> out;
  if (!ss) throw std::runtime_error("bad value for " + key + ": " + it->second);
  kv.erase(it);
  return out;
}

std::string take_str(std::map<std::string, std::string>& kv, const std::string& key,
                     const std::string& fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::string out = it->second;
  kv.erase(it);
  return out;
}

void reject_unknown(const std::map<std::string, std::string>& kv) {
  if (!kv.empty()) throw std::runtime_error("unknown config key: " + kv.begin()->first);
}

DatasetSpec spec_from_config(std::map<std::string, std::string> kv) {
  DatasetSpec spec;
  spec.kind = dataset_kind_from_string(take_str(kv, "kind", "er"));
  spec.n = take(kv, "n", spec.n);
  spec.p = take(kv, "p", spec.p);
  spec.avg_degree = take(kv, "avg-degree", spec.avg_degree);
  spec.weight_low = take(kv, "weight-low", spec.weight_low);
  spec.weight_high = take(kv, "weight-high", spec.weight_high);
  spec.count = take(kv, "count", spec.count);
  spec.seed = take(kv, "seed", spec.seed);
  spec.beta = take(kv, "beta", spec.beta);
  spec.K = take(kv, "steps-k", spec.K);
  reject_unknown(kv);
  return spec;
}

std::vector<BFInstance> load_instances(const std::string& path, double beta) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::vector<BFInstance> out;
  for (GraphRecord& rec : read_dataset(in)) {
    BFInstance inst;
    inst.graph = std::move(rec.graph);
    inst.beta = beta;
    out.push_back(std::move(inst));
  }
  return out;
}

int cmd_gen(const std::string& spec_file, const std::string& out_path) {
  const DatasetSpec spec = spec_from_config(read_kv_config(spec_file));
  const std::vector<BFInstance> graphs = gen_dataset(spec);
  std::vector<GraphRecord> records;
  for (const BFInstance& g : graphs) {
    GraphRecord rec;
    const Eigen::VectorXd t = bf_k_step(g, spec.K);
    for (int v = 0; v < g.n(); ++v) rec.targets.emplace_back(v, t[v]);
    rec.graph = g.graph;
    records.push_back(std::move(rec));
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_dataset(out, records);
  return 0;
}

TrainConfig train_config_from_file(const std::string& path, std::string* out_dir) {
  std::map<std::string, std::string> kv = read_kv_config(path);
  TrainConfig cfg;
  cfg.steps = take(kv, "steps", cfg.steps);
  cfg.lr = take(kv, "lr", cfg.lr);
  cfg.seed = take(kv, "seed", cfg.seed);
  cfg.m = take(kv, "m", cfg.m);
  cfg.K = take(kv, "k", cfg.K);
  const int hidden = take(kv, "hidden", 64);
  const int agg1 = take(kv, "agg1-dim", 16);
  const std::string mode = take_str(kv, "mode", "experiment");
  if (mode == "experiment") {
    cfg.dims = make_experiment_dims(cfg.m, cfg.K, hidden, agg1);
    cfg.relu_skip_upd_last = true;
    cfg.loss.vertices = LossVertices::AllVertices;
  } else if (mode == "theorem") {
    cfg.dims = make_theorem_dims(cfg.m, cfg.K, hidden);
    cfg.relu_skip_upd_last = false;
    cfg.loss.vertices = LossVertices::TargetOnly;
  } else {
    throw std::runtime_error("mode must be experiment or theorem");
  }
  cfg.loss.reg = reg_kind_from_string(take_str(kv, "reg", "weighted-l1"));
  cfg.loss.eta = take(kv, "eta", cfg.loss.eta);
  cfg.loss.cert_target = take(kv, "cert-target", cfg.loss.cert_target);
  cfg.log_every = take(kv, "log-every", cfg.log_every);

  const double x = take(kv, "x", 50.0);
  const double beta = take(kv, "beta", 1000.0);
  const std::string train_set = take_str(kv, "train-set", "experiment");
  const std::string marking = take_str(kv, "source-marking", "bf-init");
  if (train_set == "experiment") {
    cfg.train_set = experiment_training_set(x, cfg.K, beta);
  } else if (train_set == "theorem") {
    cfg.train_set = theorem_training_set(x, cfg.K, beta);
  } else {
    // A dataset file; targets are K further BF steps from the stored labels.
    for (BFInstance& inst : load_instances(train_set, beta)) {
      TrainGraph tg;
      tg.targets = bf_k_step(inst, cfg.K);
      tg.instance = std::move(inst);
      cfg.train_set.push_back(std::move(tg));
    }
    if (cfg.train_set.empty()) throw std::runtime_error("train set file holds no graphs");
  }
  if (marking == "none") {
    cfg.train_set = strip_source_marks(cfg.train_set);
  } else if (marking != "bf-init") {
    throw std::runtime_error("source-marking must be bf-init or none");
  }

  // eval-set.<name> = <dataset file> columns in the metrics CSV.
  std::vector<std::pair<std::string, std::string>> eval_files;
  for (auto it = kv.begin(); it != kv.end();) {
    if (it->first.rfind("eval-set.", 0) == 0) {
      eval_files.emplace_back(it->first.substr(9), it->second);
      it = kv.erase(it);
    } else {
      ++it;
    }
  }
  for (const auto& [name, file] : eval_files)
    cfg.eval_sets.push_back(EvalSet::from_instances(
        name, load_instances(file, beta), cfg.K,
        marking == "none" ? SourceMarking::None : SourceMarking::BfInit));

  *out_dir = take_str(kv, "out-dir", "train-out");
  reject_unknown(kv);
  return cfg;
}

int cmd_train(const std::string& config_file, std::uint64_t seed_override, bool has_seed,
              long steps_override) {
  std::string out_dir;
  TrainConfig cfg = train_config_from_file(config_file, &out_dir);
  if (has_seed) cfg.seed = seed_override;
  if (steps_override > 0) cfg.steps = steps_override;
  const TrainResult res = train(cfg);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream ck(out_dir + "/checkpoint.txt");
    write_checkpoint(ck, res.theta);
  }
  {
    std::ofstream ms(out_dir + "/metrics.csv");
    std::vector<std::string> names;
    for (const EvalSet& s : cfg.eval_sets) names.push_back(s.name);
    write_metrics_csv(ms, res.history, names);
  }
  std::cout << "final_loss," << format_double(res.history.back().loss_total) << '\n';
  std::cout << "checkpoint," << out_dir << "/checkpoint.txt" << '\n';
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& dataset, double beta,
             const std::string& marking) {
  std::ifstream ck(checkpoint);
  if (!ck) throw std::runtime_error("cannot open checkpoint: " + checkpoint);
  const BFParamSet theta = read_checkpoint(ck);
  const SourceMarking mode = marking == "none" ? SourceMarking::None : SourceMarking::BfInit;
  const EvalSet set = EvalSet::from_instances("eval", load_instances(dataset, beta), theta.K, mode);
  std::cout << "dataset,score\n" << dataset << ',' << format_double(test_score(theta, set)) << '\n';
  return 0;
}

int cmd_wl(const std::string& mode, const std::string& file, int r1, int r2, int depth) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open graph file: " + file);
  const std::vector<GraphRecord> recs = read_dataset(in);
  if (recs.empty()) throw std::runtime_error("no graphs in " + file);
  const WeightedGraph& g = recs[0].graph;
  if (mode == "refine") {
    const Coloring c = wl1_refine(g, std::vector<int>(static_cast<std::size_t>(g.n), 0));
    std::cout << "vertex,stable_color\n";
    for (int v = 0; v < g.n; ++v) std::cout << v << ',' << c.colors[static_cast<std::size_t>(v)] << '\n';
    return 0;
  }
  if (recs.size() < 2 && mode != "unr")
    throw std::runtime_error("mode " + mode + " needs two graphs in the file");
  std::cout << "mode,verdict\n";
  if (mode == "graphs") {
    std::cout << "1-wl," << (wl1_distinguish_graphs(g, recs[1].graph) ? "distinguished" : "equivalent") << '\n';
  } else if (mode == "rooted") {
    std::cout << "1-iwl-rooted,"
              << (iwl_distinguish_rooted(g, r1, recs[1].graph, r2) ? "distinguished" : "equivalent")
              << '\n';
  } else if (mode == "wl11") {
    std::cout << "(1,1)-wl," << (wl11_distinguish(g, recs[1].graph) ? "distinguished" : "equivalent")
              << '\n';
  } else if (mode == "unr") {
    std::cout << "unr," << unrolling_tree(g, r1, depth) << '\n';
  } else {
    throw std::runtime_error("unknown wl mode: " + mode);
  }
  return 0;
}

int cmd_oracle(const std::string& algo, const std::string& file, int source, double beta, int K) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open graph file: " + file);
  const std::vector<GraphRecord> recs = read_dataset(in);
  if (recs.empty()) throw std::runtime_error("no graphs in " + file);
  const WeightedGraph& g = recs[0].graph;
  std::cout << "vertex,value\n";
  if (algo == "sssp") {
    const Eigen::VectorXd d = sssp_cost(g, source);
    for (int v = 0; v < g.n; ++v) std::cout << v << ',' << format_double(d[v]) << '\n';
  } else if (algo == "bf-k") {
    BFInstance inst;
    inst.graph = g;
    inst.beta = beta;
    const Eigen::VectorXd d = bf_k_step(inst, K);
    for (int v = 0; v < g.n; ++v) std::cout << v << ',' << format_double(d[v]) << '\n';
  } else if (algo == "pagerank") {
    const Eigen::VectorXd r = truncated_pagerank(g, 0.85, K);
    for (int v = 0; v < g.n; ++v) std::cout << v << ',' << format_double(r[v]) << '\n';
  } else if (algo == "mst") {
    std::cout << "total," << format_double(mst_cost(g)) << '\n';
  } else if (algo == "msf-thresholds") {
    std::cout << "total," << format_double(msf_via_thresholds(g)) << '\n';
  } else {
    throw std::runtime_error("unknown oracle: " + algo);
  }
  return 0;
}

int cmd_check(const std::string& suite) {
  const std::vector<CheckResult> results = run_checks(suite);
  std::size_t passed = 0;
  for (const CheckResult& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << '\n';
    if (r.passed) ++passed;
  }
  std::cout << passed << "/" << results.size() << " checks passed\n";
  return passed == results.size() ? 0 : 1;
}

int cmd_reproduce(const std::string& question, const std::string& out_dir, bool small_scale,
                  long steps, double smooth_sigma) {
  ReproduceOptions opts;
  opts.question = question;
  opts.small_scale = small_scale;
  if (steps > 0) opts.steps = steps;
  (void)smooth_sigma;
  const ScoreTable table = reproduce(opts, out_dir);
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + question + "_scores.csv";
  std::ofstream out(path);
  write_score_table_csv(out, table);
  write_score_table_csv(std::cout, table);
  std::cout << "table," << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bellman-Ford MPNN laboratory"};
  app.require_subcommand(1);

  std::string spec_file, out_path = "dataset.txt";
  auto* gen = app.add_subcommand("gen", "generate a dataset file from a key=value spec");
  gen->add_option("--spec", spec_file, "dataset spec file")->required();
  gen->add_option("--out", out_path, "output dataset path");

  std::string config_file;
  std::uint64_t seed = 0;
  bool has_seed = false;
  long steps_override = 0;
  auto* tr = app.add_subcommand("train", "train a model from a key=value config");
  tr->add_option("--config", config_file, "training config file")->required();
  tr->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    has_seed = true;
  });
  tr->add_option("--steps", steps_override, "override the step count");

  std::string checkpoint, dataset, marking = "bf-init";
  double beta = 1000.0;
  auto* ev = app.add_subcommand("eval", "score a checkpoint on a dataset");
  ev->add_option("--checkpoint", checkpoint)->required();
  ev->add_option("--data", dataset)->required();
  ev->add_option("--beta", beta);
  ev->add_option("--source-marking", marking)->check(CLI::IsMember({"bf-init", "none"}));

  std::string wl_mode = "graphs", wl_file;
  int wl_r1 = 0, wl_r2 = 0, wl_depth = 3;
  auto* wl = app.add_subcommand("wl", "Weisfeiler-Leman refinement verdicts");
  wl->add_option("--mode", wl_mode)->check(CLI::IsMember({"refine", "graphs", "rooted", "wl11", "unr"}));
  wl->add_option("--graphs", wl_file, "file with one or two graph records")->required();
  wl->add_option("--root1", wl_r1);
  wl->add_option("--root2", wl_r2);
  wl->add_option("--depth", wl_depth);

  std::string algo = "sssp", oracle_file;
  int source = 0, bf_k = 2;
  double oracle_beta = 1000.0;
  auto* orc = app.add_subcommand("oracle", "run a classical algorithm, print vertex,value CSV");
  orc->add_option("--algo", algo)
      ->check(CLI::IsMember({"sssp", "bf-k", "pagerank", "mst", "msf-thresholds"}));
  orc->add_option("--graph", oracle_file)->required();
  orc->add_option("--source", source);
  orc->add_option("--beta", oracle_beta);
  orc->add_option("--k", bf_k);

  std::string suite = "all";
  auto* ck = app.add_subcommand("check", "run the invariant battery");
  ck->add_option("--suite", suite);

  std::string question = "q1", rep_out = "reproduce-out", scale = "full";
  long rep_steps = 0;
  double smooth_sigma = 0.0;
  auto* rep = app.add_subcommand("reproduce", "rerun a paper experiment across seeds");
  rep->add_option("question", question)->check(CLI::IsMember({"q1", "q2", "q3"}));
  rep->add_option("--out", rep_out);
  rep->add_option("--scale", scale)->check(CLI::IsMember({"small", "full"}));
  rep->add_option("--steps", rep_steps);
  rep->add_option("--smooth-sigma", smooth_sigma, "Gaussian smoothing for exported curves");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(spec_file, out_path);
    if (tr->parsed()) return cmd_train(config_file, seed, has_seed, steps_override);
    if (ev->parsed()) return cmd_eval(checkpoint, dataset, beta, marking);
    if (wl->parsed()) return cmd_wl(wl_mode, wl_file, wl_r1, wl_r2, wl_depth);
    if (orc->parsed()) return cmd_oracle(algo, oracle_file, source, oracle_beta, bf_k);
    if (ck->parsed()) return cmd_check(suite);
    if (rep->parsed()) return cmd_reproduce(question, rep_out, scale == "small", rep_steps, smooth_sigma);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
