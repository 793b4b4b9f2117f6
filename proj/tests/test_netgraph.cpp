#include <doctest.h>

#include <cmath>

#include "netfuzz/netgraph.hpp"
#include "netfuzz/netlist.hpp"
#include "support/oracles.hpp"

using namespace netfuzz;

namespace {

std::string data(const char* name) {
  return std::string(NETFUZZ_DATA_DIR "/") + name;
}

NetGraph graph_of(std::initializer_list<std::pair<uint32_t, uint32_t>> edges,
                  uint32_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> e(edges);
  return NetGraph::from_edges(n, e);
}

constexpr double kTol = 1e-12;

}  // namespace

TEST_CASE("single AND gate gives 3 nodes and 2 edges") {
  const Netlist nl = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n");
  const NetGraph g = build_graph(nl);
  CHECK(g.n == 3);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0] == std::pair<uint32_t, uint32_t>{0, 2});
  CHECK(g.edges[1] == std::pair<uint32_t, uint32_t>{1, 2});
}

TEST_CASE("c17 graph: 11 nodes, 12 edges, node count equals stats nodes") {
  const Netlist nl = parse_bench_file(data("c17.bench"));
  const NetGraph g = build_graph(nl);
  CHECK(g.n == 11);
  CHECK(g.edges.size() == 12);
  CHECK(g.n == stats(nl).nodes);
}

TEST_CASE("a DFF contributes an edge across the clock boundary") {
  const Netlist nl = parse_bench("INPUT(d)\nOUTPUT(q)\nq = DFF(d)\n");
  const NetGraph g = build_graph(nl);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0] == std::pair<uint32_t, uint32_t>{0, 1});
}

TEST_CASE("duplicate fan-in edges collapse") {
  const Netlist nl = parse_bench("INPUT(a)\nOUTPUT(y)\ny = XOR(a, a)\n");
  const NetGraph g = build_graph(nl);
  CHECK(g.edges.size() == 1);
}

TEST_CASE("feature encoding matches the layout [interface|gate|logic]") {
  // Output port of an AND gate carrying logic 0.
  const Netlist nl = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n");
  const NetGraph g = build_graph(nl);
  std::vector<LogicValue> vals{LogicValue::L1, LogicValue::L1, LogicValue::L0};
  const Tensor2 f = encode_features(g, vals);
  REQUIRE(f.cols == 17);
  const double* y = f.row(2);
  // interface one-hot: [input, wire, output]
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 1.0);
  // gate one-hot slot for AND (enumeration position 1)
  CHECK(y[3 + 1] == 1.0);
  // logic one-hot for 0
  CHECK(y[13 + 0] == 1.0);
  double row_sum = 0;
  for (uint32_t c = 0; c < 17; ++c) row_sum += y[c];
  CHECK(row_sum == 3.0);  // exactly one hot bit per segment
}

TEST_CASE("inputs-only mask hides every non-input logic value") {
  const Netlist nl = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
  const NetGraph g = build_graph(nl);
  std::vector<LogicValue> vals{LogicValue::L1, LogicValue::L0};
  const Tensor2 f = encode_features(g, vals, /*inputs_only=*/true);
  // Input keeps its real value...
  CHECK(f.at(0, 13 + 1) == 1.0);
  // ...the driven net reads X regardless of its actual value.
  CHECK(f.at(1, 13 + 2) == 1.0);
  CHECK(f.at(1, 13 + 0) == 0.0);
}

TEST_CASE("constants encode as buffers") {
  const Netlist nl = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
  const Netlist bad =
      inject_fault(nl, FaultSpec{FaultKind::StuckAt1, 1, GateKind::Buff});
  const NetGraph g = build_graph(bad);
  CHECK(g.gate[1] == GateKind::Buff);
}

TEST_CASE("normalized adjacency: isolated node") {
  const NetGraph g = graph_of({}, 1);
  const NormalizedAdjacency a = normalized_adjacency(g);
  CHECK(a.entry(0, 0) == 1.0);
}

TEST_CASE("normalized adjacency: triangle rows sum to 1 with entries 1/3") {
  const NetGraph g = graph_of({{0, 1}, {1, 2}, {0, 2}}, 3);
  const NormalizedAdjacency a = normalized_adjacency(g);
  for (uint32_t i = 0; i < 3; ++i) {
    double row = 0.0;
    for (uint32_t j = 0; j < 3; ++j) {
      CHECK(a.entry(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
      row += a.entry(i, j);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("normalized adjacency: single edge gives the half matrix") {
  const NetGraph g = graph_of({{0, 1}}, 2);
  const NormalizedAdjacency a = normalized_adjacency(g);
  for (uint32_t i = 0; i < 2; ++i)
    for (uint32_t j = 0; j < 2; ++j)
      CHECK(a.entry(i, j) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Â is exactly symmetric and entries equal 1/sqrt(di dj)") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const NetGraph g = testing::random_connected_graph(30, 25, seed);
    const NormalizedAdjacency a = normalized_adjacency(g);
    for (auto [u, v] : g.edges) {
      const double duv = a.entry(u, v);
      const double dvu = a.entry(v, u);
      CHECK(duv == dvu);  // bitwise
      const double want = 1.0 / std::sqrt((g.degree(u) + 1.0) * (g.degree(v) + 1.0));
      CHECK(std::abs(duv - want) <= 1e-15);
    }
    for (uint32_t v = 0; v < g.n; ++v)
      CHECK(a.entry(v, v) == 1.0 / (g.degree(v) + 1.0));
  }
}

TEST_CASE("row sums of Â equal 1 when all neighbors share the degree") {
  // K3 is 2-regular; a 6-cycle is 2-regular; both must give row sums of
  // exactly 1. (A general <= 1 row-sum bound does not hold: a hub whose
  // neighbors have lower degree exceeds it, e.g. a star center.)
  for (const NetGraph& g :
       {graph_of({{0, 1}, {1, 2}, {0, 2}}, 3),
        graph_of({{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}, 6)}) {
    const NormalizedAdjacency a = normalized_adjacency(g);
    Tensor2 one(g.n, 1), o;
    for (double& v : one.data) v = 1.0;
    a.apply(one, o);
    for (double v : o.data) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }

  // Star S4 center: 1/4 + 3/sqrt(8), demonstrably above 1.
  const NetGraph star = graph_of({{0, 1}, {0, 2}, {0, 3}}, 4);
  const NormalizedAdjacency a = normalized_adjacency(star);
  Tensor2 one(4, 1), o;
  for (double& v : one.data) v = 1.0;
  a.apply(one, o);
  CHECK(o.data[0] == doctest::Approx(0.25 + 3.0 / std::sqrt(8.0)).epsilon(1e-14));
}

TEST_CASE("P3 hand values: degree, betweenness, closeness") {
  const NetGraph g = graph_of({{0, 1}, {1, 2}}, 3);
  const auto deg = degree_centrality(g);
  CHECK(deg[0] == doctest::Approx(0.5).epsilon(kTol));
  CHECK(deg[1] == doctest::Approx(1.0).epsilon(kTol));
  CHECK(deg[2] == doctest::Approx(0.5).epsilon(kTol));
  const auto bc = betweenness_centrality(g);
  CHECK(bc[0] == doctest::Approx(0.0).epsilon(kTol));
  CHECK(bc[1] == doctest::Approx(1.0).epsilon(kTol));
  CHECK(bc[2] == doctest::Approx(0.0).epsilon(kTol));
  const auto cl = closeness_centrality(g);
  CHECK(cl[0] == doctest::Approx(2.0 / 3.0).epsilon(kTol));
  CHECK(cl[1] == doctest::Approx(1.0).epsilon(kTol));
  CHECK(cl[2] == doctest::Approx(2.0 / 3.0).epsilon(kTol));
}

TEST_CASE("K3: every metric is uniform by symmetry") {
  const NetGraph g = graph_of({{0, 1}, {1, 2}, {0, 2}}, 3);
  for (const auto& v :
       {degree_centrality(g), betweenness_centrality(g), closeness_centrality(g),
        eigenvector_centrality(g).values}) {
    CHECK(v[0] == doctest::Approx(v[1]).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(v[2]).epsilon(1e-12));
  }
}

TEST_CASE("star S4: center dominates") {
  const NetGraph g = graph_of({{0, 1}, {0, 2}, {0, 3}}, 4);
  const auto deg = degree_centrality(g);
  CHECK(deg[0] == doctest::Approx(1.0).epsilon(kTol));
  CHECK(deg[1] == doctest::Approx(1.0 / 3.0).epsilon(kTol));
  const auto bc = betweenness_centrality(g);
  CHECK(bc[0] == doctest::Approx(1.0).epsilon(kTol));
  CHECK(bc[1] == doctest::Approx(0.0).epsilon(kTol));
}

TEST_CASE("all four centralities match the dense oracles on random graphs") {
  for (uint64_t seed = 100; seed < 120; ++seed) {
    const uint32_t n = 10 + static_cast<uint32_t>(seed % 40);
    const NetGraph g = testing::random_connected_graph(n, n / 2, seed);
    const auto d = testing::DenseGraph::from(g);

    const auto deg = degree_centrality(g);
    const auto deg_o = testing::degree_oracle(d);
    const auto bc = betweenness_centrality(g);
    const auto bc_o = testing::betweenness_oracle(d);
    const auto cl = closeness_centrality(g);
    const auto cl_o = testing::closeness_oracle(d);
    const auto ev = eigenvector_centrality(g).values;
    const auto ev_o = testing::eigenvector_oracle(d);
    for (uint32_t v = 0; v < n; ++v) {
      CHECK(std::abs(deg[v] - deg_o[v]) <= 1e-9);
      CHECK(std::abs(bc[v] - bc_o[v]) <= 1e-9);
      CHECK(std::abs(cl[v] - cl_o[v]) <= 1e-9);
      CHECK(std::abs(ev[v] - ev_o[v]) <= 1e-9);
    }
  }
}

TEST_CASE("disconnected graphs: closeness correction and eigenvector mass") {
  // Two components: P2 and an isolated node.
  const NetGraph g = graph_of({{0, 1}}, 3);
  const auto cl = closeness_centrality(g);
  // Wasserman-Faust: (r-1)/(n-1) * (r-1)/dist = (1/2)*(1/1)
  CHECK(cl[0] == doctest::Approx(0.5).epsilon(kTol));
  CHECK(cl[2] == 0.0);
  const auto ev = eigenvector_centrality(g).values;
  // Dominant component (the edge) carries the mass; the isolated node decays.
  CHECK(ev[0] > 0.1);
  CHECK(ev[2] < 1e-6);
}

TEST_CASE("degenerate eigenvector cases fall back to uniform") {
  const auto one = eigenvector_centrality(graph_of({}, 1));
  CHECK(one.values[0] == doctest::Approx(1.0));
  const auto empty4 = eigenvector_centrality(graph_of({}, 4));
  for (double v : empty4.values) CHECK(v == doctest::Approx(0.5));
  CHECK(empty4.converged);
}

TEST_CASE("centrality report basics") {
  // Single edge: degree centrality average 1.0.
  const NetGraph p2 = graph_of({{0, 1}}, 2);
  const CentralityReport r = centrality_report(p2);
  CHECK(r.degree == doctest::Approx(1.0).epsilon(kTol));
  CHECK(r.average_degree == doctest::Approx(1.0).epsilon(kTol));

  // Empty-edge graph: degree/betweenness/closeness all zero; the
  // eigenvector falls back to the L2-normalized uniform vector.
  const CentralityReport e = centrality_report(graph_of({}, 4));
  CHECK(e.degree == 0.0);
  CHECK(e.betweenness == 0.0);
  CHECK(e.closeness == 0.0);
  CHECK(e.eigenvector == doctest::Approx(0.5));
  CHECK(e.average_degree == 0.0);
}

TEST_CASE("c5315 report sits in the published magnitude band") {
  // The published row was computed on a differently-synthesized netlist of
  // the same circuit, so only magnitudes are comparable.
  const Netlist nl = parse_bench_file(data("c5315.bench"));
  const NetGraph g = build_graph(nl);
  const CentralityReport r = centrality_report(g);
  CHECK(r.degree > 0.0005);
  CHECK(r.degree < 0.01);
  CHECK(r.closeness > 0.03);
  CHECK(r.closeness < 0.3);
  CHECK(r.average_degree > 1.5);
  CHECK(r.average_degree < 6.0);
}

TEST_CASE("betweenness is identical across jobs counts") {
  const NetGraph g = testing::random_connected_graph(40, 30, 9);
  const auto a = betweenness_centrality(g, 1);
  const auto b = betweenness_centrality(g, 4);
  for (uint32_t v = 0; v < g.n; ++v)
    CHECK(a[v] == doctest::Approx(b[v]).epsilon(1e-12));
}

TEST_CASE("edge list export is one pair per line") {
  const NetGraph g = graph_of({{0, 1}, {1, 2}}, 3);
  CHECK(edge_list_text(g) == "0 1\n1 2\n");
}
