#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mixrec/errors.hpp"
#include "mixrec/rng.hpp"

namespace mixrec {

// Undirected simple graph. Edges are stored as an ordered list of normalized
// (u < v) pairs; the order is meaningful wherever edges correspond to rows of
// a mixup matrix.
struct SimpleGraph {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;

  int m() const { return static_cast<int>(edges.size()); }

  void add_edge(int u, int v) {
    if (u > v) std::swap(u, v);
    edges.emplace_back(u, v);
  }

  void validate() const {
    if (n_vertices < 0) throw std::invalid_argument("SimpleGraph: negative vertex count");
    std::vector<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
      if (u == v) throw std::invalid_argument("SimpleGraph: self-loop");
      if (u < 0 || v < 0 || u >= n_vertices || v >= n_vertices)
        throw std::invalid_argument("SimpleGraph: vertex index out of range");
      std::pair<int, int> key{std::min(u, v), std::max(u, v)};
      if (std::find(seen.begin(), seen.end(), key) != seen.end())
        throw std::invalid_argument("SimpleGraph: duplicate edge");
      seen.push_back(key);
    }
  }

  std::vector<int> degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_vertices), 0);
    for (auto [u, v] : edges) {
      ++deg[static_cast<std::size_t>(u)];
      ++deg[static_cast<std::size_t>(v)];
    }
    return deg;
  }

  bool is_connected() const {
    if (n_vertices <= 1) return true;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_vertices));
    for (auto [u, v] : edges) {
      adj[static_cast<std::size_t>(u)].push_back(v);
      adj[static_cast<std::size_t>(v)].push_back(u);
    }
    std::vector<char> seen(static_cast<std::size_t>(n_vertices), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n_vertices;
  }
};

// Plain text edge list: first line "n m", then m lines "u v" (0-based).
inline void save_edge_list(const std::string& path, const SimpleGraph& g) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("save_edge_list: cannot open " + path);
  out << g.n_vertices << ' ' << g.m() << '\n';
  for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
  if (!out) throw IoError("save_edge_list: write failed for " + path);
}

inline SimpleGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_edge_list: cannot open " + path);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
        return true;
    }
    return false;
  };
  if (!next_line()) throw FormatError(path + ": empty edge list file");
  SimpleGraph g;
  int m = 0;
  {
    std::istringstream header(line);
    if (!(header >> g.n_vertices >> m))
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected \"n m\"");
  }
  for (int e = 0; e < m; ++e) {
    if (!next_line())
      throw FormatError(path + ": expected " + std::to_string(m) + " edges, got " +
                        std::to_string(e));
    std::istringstream row(line);
    int u = 0, v = 0;
    if (!(row >> u >> v))
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected \"u v\"");
    g.add_edge(u, v);
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(path + ": " + e.what());
  }
  return g;
}

// m independent uniform draws of distinct vertex pairs; repeats across draws
// are allowed (this is how private pairs accumulate in the generative model).
inline std::vector<std::pair<int, int>> random_pair_multigraph(int n, int m, Rng& rng) {
  if (n < 2) throw std::invalid_argument("random_pair_multigraph: need n >= 2");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const std::vector<int> pair = rng.sample_subset(n, 2);
    edges.emplace_back(pair[0], pair[1]);
  }
  return edges;
}

// Simple graph with exactly m distinct edges, resampled until connected.
inline SimpleGraph random_connected_graph(int n, int m, Rng& rng) {
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  if (n < 2 || m < n - 1 || m > max_edges)
    throw std::invalid_argument("random_connected_graph: infeasible (n, m)");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::pair<int, int>> all;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) all.emplace_back(u, v);
    // partial Fisher-Yates for the first m slots
    for (int i = 0; i < m; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(rng.below(all.size() - static_cast<std::size_t>(i)));
      std::swap(all[static_cast<std::size_t>(i)], all[j]);
    }
    SimpleGraph g;
    g.n_vertices = n;
    for (int i = 0; i < m; ++i) g.add_edge(all[static_cast<std::size_t>(i)].first,
                                           all[static_cast<std::size_t>(i)].second);
    if (g.is_connected()) return g;
  }
  throw Error("random_connected_graph: failed to hit a connected sample");
}

// Random d-regular simple graph via the pairing model with rejection.
inline SimpleGraph random_regular_graph(int n, int degree, Rng& rng) {
  if (n < degree + 1 || (n * degree) % 2 != 0)
    throw std::invalid_argument("random_regular_graph: infeasible (n, degree)");
  for (int attempt = 0; attempt < 20000; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n * degree));
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < degree; ++k) stubs.push_back(v);
    for (std::size_t i = 0; i + 1 < stubs.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(stubs.size() - i));
      std::swap(stubs[i], stubs[j]);
    }
    SimpleGraph g;
    g.n_vertices = n;
    bool ok = true;
    std::vector<std::vector<char>> seen(static_cast<std::size_t>(n),
                                        std::vector<char>(static_cast<std::size_t>(n), 0));
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const int u = stubs[i], v = stubs[i + 1];
      if (u == v || seen[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) {
        ok = false;
        break;
      }
      seen[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
      seen[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
      g.add_edge(u, v);
    }
    if (ok) return g;
  }
  throw Error("random_regular_graph: rejection sampling failed");
}

}  // namespace mixrec
