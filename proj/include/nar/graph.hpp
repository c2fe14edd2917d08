#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nar {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

// Attributed, edge-weighted graph. Undirected edges are stored once and
// treated symmetrically. attrs is n x d0 (one row per vertex).
struct WeightedGraph {
  int n = 0;
  bool directed = false;
  std::vector<Edge> edges;
  Eigen::MatrixXd attrs;  // n x d0

  int d0() const { return static_cast<int>(attrs.cols()); }
  void validate() const;
};

// A WeightedGraph whose per-vertex scalar labels are current Bellman-Ford
// distance estimates. Every vertex carries an implicit self-loop of weight 0;
// the self-loop is not stored in the edge list.
struct BFInstance {
  WeightedGraph graph;  // d0 == 1, attrs column holds the labels
  double beta = 1000.0;

  int n() const { return graph.n; }
  double label(int v) const { return graph.attrs(v, 0); }
  void set_label(int v, double x) { graph.attrs(v, 0) = x; }
  Eigen::VectorXd labels() const { return graph.attrs.col(0); }
  void set_labels(const Eigen::VectorXd& l) { graph.attrs.col(0) = l; }
};

// In-neighbors with weights, in deterministic edge-list order. For undirected
// graphs both directions are emitted; self-loops are never included here.
std::vector<std::vector<std::pair<int, double>>> in_adjacency(const WeightedGraph& g);

// Path graph P_beta(w): K+1 vertices, label(v_0) = w_0, label(v_i) = beta,
// edge (v_{i-1}, v_i) of weight w_i.
BFInstance make_path_graph(const Eigen::VectorXd& w, double beta);

struct TrainSample {
  BFInstance instance;
  int target_vertex = 0;
  double target = 0.0;
};

// K+1 path instances with edge vectors x * e_k, k in [K]_0; the target vertex
// is v_K and the target value is x for every instance. Requires
// beta >= 2 * (N + x + 1) with N = K + 1.
std::vector<TrainSample> make_bf_training_set(double x, int K, double beta);

// Edge case graph G(x, K): backbone v_{-1}..v_K plus, for each i in [K], a
// bypass path of length i+1 whose final edge has weight x. Labels are the
// one-step BF distances from v_{-1}. Vertex order: v_{-1}, v_0, .., v_K,
// then p_{1,0}, p_{2,0}, p_{2,1}, .., p_{K,K-1}.
BFInstance make_edge_case_graph(double x, int K, double beta = 1000.0);
int edge_case_vertex(int K, int i);             // index of v_i, i in [-1, K]
int edge_case_bypass_vertex(int K, int i, int j);  // index of p_{i,j}

enum class DatasetKind { ErConstDeg, Er, Sbm, Star, Complete, Path, General };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::Er;
  int n = 64;
  double p = 0.1;            // er
  double avg_degree = 6.4;   // er-constdeg: p = avg_degree / n
  Eigen::Matrix3d sbm = (Eigen::Matrix3d() << 0.7, 0.05, 0.02,
                                              0.05, 0.6, 0.03,
                                              0.02, 0.03, 0.4).finished();
  double weight_low = 1.0;
  double weight_high = 100.0;
  int count = 1;
  std::uint64_t seed = 0;
  double beta = 1000.0;
  int K = 2;  // steps used for targets and for edge-case members of General

  void validate() const;
};

DatasetKind dataset_kind_from_string(const std::string& s);
std::string to_string(DatasetKind k);

// Deterministic given spec.seed. Generated graphs contain no isolated
// vertices; labels are the BF initialization with source vertex 0.
std::vector<BFInstance> gen_dataset(const DatasetSpec& spec);

struct Sssp6 {
  BFInstance G;
  int s = 0, t1 = 0, t2 = 0;
};
struct MstPair {
  WeightedGraph G, H;
};
struct Mst14 {
  WeightedGraph G, H;
  int v = 0, w = 0;  // roots for the individualized comparison
};

// Two triangles joined by a heavy edge; shortest paths s->t1 and s->t2 cost 2
// and 7 while 1-WL cannot tell t1 from t2.
Sssp6 counterexample_sssp6();
// Same 6-vertex graph vs a 6-cycle with a heavy chord: MST costs 9 vs 7.
MstPair counterexample_mst6();
// 14-vertex pair with MST costs 39 vs 31 that rooted 1-iWL cannot separate.
Mst14 counterexample_mst14();

// Vertex indices of H shifted by |V(G)|; attributes concatenated.
WeightedGraph disjoint_union(const WeightedGraph& g, const WeightedGraph& h);

// Text graph format, one record per line:
//   g <n> <directed:0|1> <d0>
//   v <idx> <attr...>
//   e <u> <v> <w>
//   t <vertex> <value>     (optional targets)
// Numbers are shortest round-trip decimals; +inf prints as "inf". Dataset
// files concatenate records separated by blank lines.
std::string format_double(double x);
double parse_double(const std::string& s);

struct GraphRecord {
  WeightedGraph graph;
  std::vector<std::pair<int, double>> targets;
};

void write_graph(std::ostream& os, const WeightedGraph& g,
                 const std::vector<std::pair<int, double>>* targets = nullptr);
GraphRecord read_graph(std::istream& is);
void write_dataset(std::ostream& os, const std::vector<GraphRecord>& records);
std::vector<GraphRecord> read_dataset(std::istream& is);

}  // namespace nar
