#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netfuzz/logic.hpp"
#include "netfuzz/netlist.hpp"
#include "netfuzz/tensor.hpp"

namespace netfuzz {

// Undirected view of a netlist: one node per net (the driving gate is
// fused into its output net), one edge per fan-in connection. Neighbor
// lists keep edge insertion order so that relabeling a graph permutes
// every downstream float computation reproducibly.
struct NetGraph {
  uint32_t n = 0;
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // deduped, insertion order
  std::vector<std::vector<uint32_t>> adj;
  std::vector<Interface> interface;  // per-node static features
  std::vector<GateKind> gate;

  uint32_t degree(uint32_t v) const { return static_cast<uint32_t>(adj[v].size()); }

  // Build from a bare edge list (tests, synthetic graphs). Self-loops are
  // rejected; duplicate edges collapse to the first occurrence.
  static NetGraph from_edges(uint32_t n,
                             std::span<const std::pair<uint32_t, uint32_t>> edges);
};

NetGraph build_graph(const Netlist& nl);

inline constexpr uint32_t kInterfaceFeatures = 3;
inline constexpr uint32_t kGateFeatures = 10;   // Input..Dff; consts encode as BUFF
inline constexpr uint32_t kLogicFeatures = 4;
inline constexpr uint32_t kFeatureWidth =
    kInterfaceFeatures + kGateFeatures + kLogicFeatures;  // 17

/// One-hot node features: [interface | driver gate kind | logic value].
/// With `inputs_only` set, the logic segment of every non-input node is
/// forced to X; input nodes always show their real value.
Tensor2 encode_features(const NetGraph& g, std::span<const LogicValue> values,
                        bool inputs_only = false);

// Â = D^{-1/2} (A + I) D^{-1/2}, stored CSR with the diagonal entry first
// in each row. Symmetric by construction: both directions of an edge use
// the identical expression 1/sqrt(d_i * d_j).
struct NormalizedAdjacency {
  uint32_t n = 0;
  std::vector<uint32_t> row_ptr;
  std::vector<uint32_t> col;
  std::vector<double> val;

  // out = Â * in
  void apply(const Tensor2& in, Tensor2& out) const;
  double entry(uint32_t i, uint32_t j) const;  // 0 if absent
};

NormalizedAdjacency normalized_adjacency(const NetGraph& g);

std::vector<double> degree_centrality(const NetGraph& g);
// Brandes, undirected, scaled by 2/((n-1)(n-2)).
std::vector<double> betweenness_centrality(const NetGraph& g, int jobs = 1);
// BFS with the Wasserman-Faust correction for disconnected graphs.
std::vector<double> closeness_centrality(const NetGraph& g);

struct EigenvectorResult {
  std::vector<double> values;  // L2-normalized, nonnegative
  bool converged = true;
  uint32_t iterations = 0;
};

// Power iteration on A + I (self-loops break the bipartite oscillation),
// uniform positive start vector.
EigenvectorResult eigenvector_centrality(const NetGraph& g,
                                         uint32_t max_iterations = 1000,
                                         double tolerance = 1e-8);

struct CentralityReport {
  double degree = 0.0;
  double betweenness = 0.0;
  double closeness = 0.0;
  double eigenvector = 0.0;
  double average_degree = 0.0;  // raw 2|E|/n
  bool eigenvector_converged = true;
};

CentralityReport centrality_report(const NetGraph& g, int jobs = 1);
std::string centrality_json(const NetGraph& g, const CentralityReport& r);

// One `u v` line per edge, insertion order.
std::string edge_list_text(const NetGraph& g);

}  // namespace netfuzz
