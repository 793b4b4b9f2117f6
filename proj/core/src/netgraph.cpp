#include "netfuzz/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "netfuzz/error.hpp"

namespace netfuzz {

namespace {

struct EdgeAccumulator {
  NetGraph& g;
  std::unordered_set<uint64_t> seen;

  void add(uint32_t u, uint32_t v) {
    if (u == v) return;
    const uint64_t key = u < v ? (uint64_t(u) << 32 | v) : (uint64_t(v) << 32 | u);
    if (!seen.insert(key).second) return;
    g.edges.emplace_back(u, v);
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
};

}  // namespace

NetGraph NetGraph::from_edges(
    uint32_t n, std::span<const std::pair<uint32_t, uint32_t>> edges) {
  NetGraph g;
  g.n = n;
  g.adj.resize(n);
  g.interface.assign(n, Interface::Wire);
  g.gate.assign(n, GateKind::Buff);
  EdgeAccumulator acc{g, {}};
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw Error(Error::Kind::GraphMismatch, "edge endpoint out of range");
    if (u == v)
      throw Error(Error::Kind::GraphMismatch, "self-loops are not allowed");
    acc.add(u, v);
  }
  return g;
}

NetGraph build_graph(const Netlist& nl) {
  NetGraph g;
  g.n = nl.size();
  g.adj.resize(g.n);
  g.interface.resize(g.n);
  g.gate.resize(g.n);
  EdgeAccumulator acc{g, {}};
  for (const Net& net : nl.nets) {
    g.interface[net.id] = net.interface;
    // Constants are a fault-injection artifact; the feature space only
    // knows the ten public kinds, so they present as buffers.
    g.gate[net.id] = (net.kind == GateKind::Const0 || net.kind == GateKind::Const1)
                         ? GateKind::Buff
                         : net.kind;
    for (uint32_t f : net.fanins) acc.add(f, net.id);
  }
  return g;
}

Tensor2 encode_features(const NetGraph& g, std::span<const LogicValue> values,
                        bool inputs_only) {
  if (values.size() != g.n)
    throw Error(Error::Kind::GraphMismatch,
                "state length does not match node count");
  Tensor2 f(g.n, kFeatureWidth);
  for (uint32_t v = 0; v < g.n; ++v) {
    double* row = f.row(v);
    row[static_cast<uint32_t>(g.interface[v])] = 1.0;
    row[kInterfaceFeatures + static_cast<uint32_t>(g.gate[v])] = 1.0;
    LogicValue lv = values[v];
    if (inputs_only && g.interface[v] != Interface::PrimaryInput)
      lv = LogicValue::LX;
    row[kInterfaceFeatures + kGateFeatures + static_cast<uint32_t>(lv)] = 1.0;
  }
  return f;
}

NormalizedAdjacency normalized_adjacency(const NetGraph& g) {
  NormalizedAdjacency a;
  a.n = g.n;
  a.row_ptr.reserve(g.n + 1);
  a.row_ptr.push_back(0);
  std::vector<double> deg(g.n);
  for (uint32_t v = 0; v < g.n; ++v)
    deg[v] = static_cast<double>(g.degree(v)) + 1.0;  // self-loop
  for (uint32_t v = 0; v < g.n; ++v) {
    a.col.push_back(v);
    a.val.push_back(1.0 / deg[v]);
    for (uint32_t u : g.adj[v]) {
      a.col.push_back(u);
      a.val.push_back(1.0 / std::sqrt(deg[v] * deg[u]));
    }
    a.row_ptr.push_back(static_cast<uint32_t>(a.col.size()));
  }
  return a;
}

void NormalizedAdjacency::apply(const Tensor2& in, Tensor2& out) const {
  if (in.rows != n)
    throw Error(Error::Kind::ShapeMismatch,
                "adjacency rows do not match input rows");
  out.rows = n;
  out.cols = in.cols;
  out.data.assign(size_t(n) * in.cols, 0.0);
  for (uint32_t i = 0; i < n; ++i) {
    double* oi = out.row(i);
    for (uint32_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
      const double w = val[e];
      const double* src = in.row(col[e]);
      for (uint32_t j = 0; j < in.cols; ++j) oi[j] += w * src[j];
    }
  }
}

double NormalizedAdjacency::entry(uint32_t i, uint32_t j) const {
  for (uint32_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e)
    if (col[e] == j) return val[e];
  return 0.0;
}

std::vector<double> degree_centrality(const NetGraph& g) {
  std::vector<double> c(g.n, 0.0);
  if (g.n < 2) return c;
  const double scale = 1.0 / static_cast<double>(g.n - 1);
  for (uint32_t v = 0; v < g.n; ++v) c[v] = g.degree(v) * scale;
  return c;
}

namespace {

// Single-source shortest-path dependency accumulation (Brandes).
void brandes_from(const NetGraph& g, uint32_t s, std::vector<double>& acc,
                  std::vector<int32_t>& dist, std::vector<double>& sigma,
                  std::vector<double>& delta, std::vector<uint32_t>& order) {
  std::fill(dist.begin(), dist.end(), -1);
  std::fill(sigma.begin(), sigma.end(), 0.0);
  std::fill(delta.begin(), delta.end(), 0.0);
  order.clear();

  dist[s] = 0;
  sigma[s] = 1.0;
  std::vector<uint32_t> queue{s};
  size_t head = 0;
  while (head < queue.size()) {
    const uint32_t v = queue[head++];
    order.push_back(v);
    for (uint32_t w : g.adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
      if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const uint32_t w = *it;
    for (uint32_t v : g.adj[w])
      if (dist[v] == dist[w] - 1)
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
    if (w != s) acc[w] += delta[w];
  }
}

}  // namespace

std::vector<double> betweenness_centrality(const NetGraph& g, int jobs) {
  std::vector<double> bc(g.n, 0.0);
  if (g.n < 3) return bc;

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(g.n)));
  std::vector<std::vector<double>> partial(
      static_cast<size_t>(workers), std::vector<double>(g.n, 0.0));

  auto run = [&](int w) {
    std::vector<int32_t> dist(g.n);
    std::vector<double> sigma(g.n), delta(g.n);
    std::vector<uint32_t> order;
    order.reserve(g.n);
    for (uint32_t s = static_cast<uint32_t>(w); s < g.n;
         s += static_cast<uint32_t>(workers))
      brandes_from(g, s, partial[static_cast<size_t>(w)], dist, sigma, delta, order);
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }

  // Merge in fixed worker order; results depend on `jobs` but not on
  // scheduling.
  for (int w = 0; w < workers; ++w)
    for (uint32_t v = 0; v < g.n; ++v) bc[v] += partial[static_cast<size_t>(w)][v];

  // Each unordered pair was accumulated from both endpoints.
  const double scale =
      1.0 / (static_cast<double>(g.n - 1) * static_cast<double>(g.n - 2));
  for (double& v : bc) v *= scale;
  return bc;
}

std::vector<double> closeness_centrality(const NetGraph& g) {
  std::vector<double> c(g.n, 0.0);
  if (g.n < 2) return c;
  std::vector<int32_t> dist(g.n);
  std::vector<uint32_t> queue;
  for (uint32_t s = 0; s < g.n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.assign(1, s);
    dist[s] = 0;
    size_t head = 0;
    uint64_t total = 0;
    uint32_t reached = 1;
    while (head < queue.size()) {
      const uint32_t v = queue[head++];
      for (uint32_t w : g.adj[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          total += static_cast<uint64_t>(dist[w]);
          ++reached;
          queue.push_back(w);
        }
    }
    if (reached > 1) {
      const double r = static_cast<double>(reached - 1);
      c[s] = r / static_cast<double>(g.n - 1) * (r / static_cast<double>(total));
    }
  }
  return c;
}

EigenvectorResult eigenvector_centrality(const NetGraph& g,
                                         uint32_t max_iterations,
                                         double tolerance) {
  EigenvectorResult r;
  const double uniform = 1.0 / std::sqrt(static_cast<double>(g.n));
  r.values.assign(g.n, uniform);
  if (g.n < 2 || g.edges.empty()) return r;

  std::vector<double> x(g.n, uniform), next(g.n);
  for (uint32_t it = 1; it <= max_iterations; ++it) {
    for (uint32_t v = 0; v < g.n; ++v) {
      double s = x[v];  // self-loop keeps the iteration aperiodic
      for (uint32_t u : g.adj[v]) s += x[u];
      next[v] = s;
    }
    double norm = 0.0;
    for (double v : next) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : next) v /= norm;

    double diff = 0.0;
    for (uint32_t v = 0; v < g.n; ++v) diff += (next[v] - x[v]) * (next[v] - x[v]);
    x = next;
    if (std::sqrt(diff) < tolerance) {
      r.values = x;
      r.converged = true;
      r.iterations = it;
      return r;
    }
  }
  r.values = x;
  r.converged = false;
  r.iterations = max_iterations;
  return r;
}

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

CentralityReport centrality_report(const NetGraph& g, int jobs) {
  CentralityReport r;
  if (g.n == 0) return r;
  r.degree = mean(degree_centrality(g));
  r.betweenness = mean(betweenness_centrality(g, jobs));
  r.closeness = mean(closeness_centrality(g));
  const EigenvectorResult ev = eigenvector_centrality(g);
  r.eigenvector = mean(ev.values);
  r.eigenvector_converged = ev.converged;
  r.average_degree = 2.0 * static_cast<double>(g.edges.size()) /
                     static_cast<double>(g.n);
  return r;
}

std::string centrality_json(const NetGraph& g, const CentralityReport& r) {
  nlohmann::json j;
  j["nodes"] = g.n;
  j["edges"] = g.edges.size();
  j["degree_centrality"] = r.degree;
  j["betweenness"] = r.betweenness;
  j["closeness"] = r.closeness;
  j["eigenvector"] = r.eigenvector;
  j["average_degree"] = r.average_degree;
  j["eigenvector_converged"] = r.eigenvector_converged;
  return j.dump(2) + "\n";
}

std::string edge_list_text(const NetGraph& g) {
  std::ostringstream out;
  for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
  return out.str();
}

}  // namespace netfuzz
