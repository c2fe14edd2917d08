#pragma once

#include "nar/training.hpp"

#include <map>
#include <string>
#include <vector>

namespace nar {

struct ReproduceOptions {
  std::string question = "q1";      // q1 | q2 | q3
  std::vector<unsigned> seeds = {1, 2, 3};
  std::vector<int> sizes = {64, 128, 256, 512, 1024};
  long steps = 160000;
  double lr = 0.001;
  double eta = 0.1;
  double x = 50.0;
  double beta = 1000.0;
  int K = 2;
  int m = 2;
  int hidden = 64;
  int agg1 = 16;
  int graphs_per_set = 50;
  bool small_scale = false;  // caps n at 256 and steps at 40000
};

struct ScoreTable {
  // rows: model/regularizer label -> per-size (mean, std) over seeds
  std::vector<std::string> row_labels;
  std::vector<int> sizes;
  std::map<std::string, std::vector<std::pair<double, double>>> cells;
  std::map<std::string, std::vector<double>> final_train_losses;  // per seed
};

// Runs the scripted configuration for one question across seeds and returns
// the score table. Trained checkpoints and metrics land under out_dir when
// it is nonempty.
ScoreTable reproduce(const ReproduceOptions& opts, const std::string& out_dir = "");

void write_score_table_csv(std::ostream& os, const ScoreTable& table);

// The shared General evaluation sets (one per size), deterministic per seed.
std::vector<EvalSet> general_eval_sets(const ReproduceOptions& opts, unsigned dataset_seed,
                                       SourceMarking marking);

}  // namespace nar
