#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "mixrec/errors.hpp"
#include "mixrec/gram.hpp"
#include "mixrec/graph.hpp"

namespace mixrec::assign {

struct LineGraph {
  Eigen::MatrixXi A;  // symmetric 0/1 adjacency, zero diagonal

  int size() const { return static_cast<int>(A.rows()); }
};

// Adjacency of L(G): vertices are G's edges, adjacent iff they share exactly
// one endpoint. Vertex i of the result corresponds to edge i of G.
inline LineGraph line_graph_of(const SimpleGraph& g) {
  g.validate();
  const int m = g.m();
  LineGraph L;
  L.A = Eigen::MatrixXi::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const auto [a, b] = g.edges[static_cast<std::size_t>(i)];
      const auto [c, d] = g.edges[static_cast<std::size_t>(j)];
      const int shared = (a == c) + (a == d) + (b == c) + (b == d);
      if (shared == 1) L.A(i, j) = L.A(j, i) = 1;
    }
  }
  return L;
}

// Map from deduplicated edge index to the original row indices it represents.
struct EdgeMultiplicity {
  std::vector<std::vector<int>> groups;  // partition of [m], each sorted

  int dedup_count() const { return static_cast<int>(groups.size()); }
};

// Rows whose private Gram entry is 2 encode the same private pair. Groups
// them, validates that the grouping is consistent (members must relate
// identically to every other row), and returns the line-graph adjacency on
// the deduplicated edges.
inline std::pair<LineGraph, EdgeMultiplicity> dedupe_parallel_edges(
    const gram::PrivateGram& priv) {
  const Eigen::Index m = priv.M.rows();
  if (priv.M.cols() != m || m < 1)
    throw std::invalid_argument("dedupe_parallel_edges: M_priv must be square, m >= 1");
  if (priv.M != priv.M.transpose().eval())
    throw std::invalid_argument("dedupe_parallel_edges: M_priv must be symmetric");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (priv.M(i, i) != 2)
      throw std::invalid_argument("dedupe_parallel_edges: diagonal must be 2");
    for (Eigen::Index j = 0; j < m; ++j)
      if (priv.M(i, j) < 0 || priv.M(i, j) > 2)
        throw std::invalid_argument("dedupe_parallel_edges: entries must be in {0,1,2}");
  }

  std::vector<int> group_of(static_cast<std::size_t>(m), -1);
  EdgeMultiplicity mult;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (group_of[static_cast<std::size_t>(i)] >= 0) continue;
    const int g = mult.dedup_count();
    mult.groups.push_back({static_cast<int>(i)});
    group_of[static_cast<std::size_t>(i)] = g;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (priv.M(i, j) != 2) continue;
      if (group_of[static_cast<std::size_t>(j)] >= 0)
        throw InconsistentGramError("dedupe_parallel_edges: non-transitive duplicate group");
      // a duplicate must look identical to every other row
      for (Eigen::Index k = 0; k < m; ++k) {
        if (k == i || k == j) continue;
        if (priv.M(i, k) != priv.M(j, k))
          throw InconsistentGramError("dedupe_parallel_edges: inconsistent duplicate rows");
      }
      mult.groups[static_cast<std::size_t>(g)].push_back(static_cast<int>(j));
      group_of[static_cast<std::size_t>(j)] = g;
    }
  }

  const int md = mult.dedup_count();
  LineGraph L;
  L.A = Eigen::MatrixXi::Zero(md, md);
  for (int a = 0; a < md; ++a) {
    for (int b = a + 1; b < md; ++b) {
      const int i = mult.groups[static_cast<std::size_t>(a)].front();
      const int j = mult.groups[static_cast<std::size_t>(b)].front();
      if (priv.M(i, j) == 1) L.A(a, b) = L.A(b, a) = 1;
    }
  }
  return {L, mult};
}

namespace detail {

inline std::vector<std::vector<int>> connected_components(const Eigen::MatrixXi& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.push_back({});
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      out[static_cast<std::size_t>(c)].push_back(u);
      for (int v = 0; v < n; ++v) {
        if (A(u, v) == 1 && comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = c;
          stack.push_back(v);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

// A root-graph candidate for one connected line graph: for each L-vertex the
// pair of root vertices of the corresponding root edge, in L-vertex order.
struct RootEdges {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;

  SimpleGraph to_graph() const {
    SimpleGraph g;
    g.n_vertices = n_vertices;
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
  }
};

// Krausz propagation: partition the edge set of connected L into cliques with
// every vertex in at most two of them. Cliques become root vertices; an
// L-vertex covered by only one clique gets a fresh pendant endpoint. The only
// freedom is how the start vertex's neighborhood splits into two cliques;
// each candidate split propagates deterministically through the rest of the
// graph, so the search enumerates 2-colorings of the complement of the start
// neighborhood and takes the first split whose propagation covers every edge.
inline std::optional<RootEdges> krausz_root(const Eigen::MatrixXi& A) {
  const int m = static_cast<int>(A.rows());
  if (m == 1) {
    RootEdges r;
    r.n_vertices = 2;
    r.edges = {{0, 1}};
    return r;
  }

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (A(i, j) == 1) adj[static_cast<std::size_t>(i)].push_back(j);

  // start at a vertex of minimum degree
  int x0 = 0;
  for (int i = 1; i < m; ++i)
    if (adj[static_cast<std::size_t>(i)].size() < adj[static_cast<std::size_t>(x0)].size())
      x0 = i;
  const std::vector<int>& nbr = adj[static_cast<std::size_t>(x0)];

  // components of the complement of L[N(x0)]; each must be bipartite and
  // contributes one binary choice to the split enumeration
  const int nn = static_cast<int>(nbr.size());
  std::vector<int> comp(static_cast<std::size_t>(nn), -1);
  std::vector<int> color(static_cast<std::size_t>(nn), 0);
  int comps = 0;
  for (int s = 0; s < nn; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    comp[static_cast<std::size_t>(s)] = comps;
    color[static_cast<std::size_t>(s)] = 0;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < nn; ++b) {
        if (b == a || A(nbr[static_cast<std::size_t>(a)], nbr[static_cast<std::size_t>(b)]) == 1)
          continue;  // complement edge = non-adjacent pair
        if (comp[static_cast<std::size_t>(b)] < 0) {
          comp[static_cast<std::size_t>(b)] = comps;
          color[static_cast<std::size_t>(b)] = color[static_cast<std::size_t>(a)] ^ 1;
          stack.push_back(b);
        } else if (color[static_cast<std::size_t>(b)] == color[static_cast<std::size_t>(a)]) {
          return std::nullopt;  // odd cycle: N(x0) cannot split into two cliques
        }
      }
    }
    ++comps;
  }
  if (comps > 24)
    throw ResourceBoundError("krausz_root: start-vertex split enumeration too large");

  const auto try_split = [&](std::uint64_t flip_mask) -> std::optional<RootEdges> {
    std::vector<std::vector<int>> cliques;
    std::vector<int> cnt(static_cast<std::size_t>(m), 0);
    std::vector<std::array<int, 2>> memb(static_cast<std::size_t>(m), {-1, -1});
    Eigen::MatrixXi covered = Eigen::MatrixXi::Zero(m, m);

    const auto place = [&](std::vector<int> verts) -> bool {
      for (std::size_t a = 0; a < verts.size(); ++a) {
        if (cnt[static_cast<std::size_t>(verts[a])] >= 2) return false;
        for (std::size_t b = a + 1; b < verts.size(); ++b) {
          if (A(verts[a], verts[b]) != 1) return false;
          if (covered(verts[a], verts[b])) return false;
        }
      }
      const int id = static_cast<int>(cliques.size());
      for (std::size_t a = 0; a < verts.size(); ++a) {
        memb[static_cast<std::size_t>(verts[a])][cnt[static_cast<std::size_t>(verts[a])]++] = id;
        for (std::size_t b = a + 1; b < verts.size(); ++b)
          covered(verts[a], verts[b]) = covered(verts[b], verts[a]) = 1;
      }
      cliques.push_back(std::move(verts));
      return true;
    };

    std::vector<int> side[2];
    for (int a = 0; a < nn; ++a) {
      const int s = color[static_cast<std::size_t>(a)] ^
                    static_cast<int>((flip_mask >> comp[static_cast<std::size_t>(a)]) & 1);
      side[s].push_back(nbr[static_cast<std::size_t>(a)]);
    }
    for (int s = 0; s < 2; ++s) {
      if (side[s].empty()) continue;
      std::vector<int> verts = side[s];
      verts.push_back(x0);
      std::sort(verts.begin(), verts.end());
      if (!place(std::move(verts))) return std::nullopt;
    }

    // forced propagation
    while (true) {
      int pick = -1;
      bool uncovered_left = false;
      for (int y = 0; y < m && pick < 0; ++y) {
        bool open = false;
        for (int z : adj[static_cast<std::size_t>(y)])
          if (!covered(y, z)) {
            open = true;
            break;
          }
        if (!open) continue;
        uncovered_left = true;
        if (cnt[static_cast<std::size_t>(y)] == 2) return std::nullopt;
        if (cnt[static_cast<std::size_t>(y)] == 1) pick = y;
      }
      if (pick < 0) {
        if (uncovered_left) return std::nullopt;  // stalled (cannot happen if connected)
        break;
      }
      std::vector<int> verts{pick};
      for (int z : adj[static_cast<std::size_t>(pick)])
        if (!covered(pick, z)) verts.push_back(z);
      std::sort(verts.begin(), verts.end());
      if (!place(std::move(verts))) return std::nullopt;
    }

    RootEdges root;
    root.n_vertices = static_cast<int>(cliques.size());
    root.edges.resize(static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x) {
      int u = memb[static_cast<std::size_t>(x)][0];
      int v = memb[static_cast<std::size_t>(x)][1];
      if (u < 0) return std::nullopt;  // isolated L-vertex; connected inputs never hit this
      if (v < 0) v = root.n_vertices++;  // pendant endpoint
      root.edges[static_cast<std::size_t>(x)] = {std::min(u, v), std::max(u, v)};
    }
    return root;
  };

  for (std::uint64_t mask = 0; mask < (1ULL << comps); ++mask) {
    auto root = try_split(mask);
    if (!root) continue;
    // the partition must reproduce L exactly
    LineGraph check = line_graph_of(root->to_graph());
    if (check.A == A) return root;
  }
  return std::nullopt;
}

// Canonical relabeling: vertices renumbered by first appearance in edge order.
inline RootEdges canonicalize(const RootEdges& r) {
  std::map<int, int> relabel;
  RootEdges out;
  out.edges.reserve(r.edges.size());
  for (auto [u, v] : r.edges) {
    for (int w : {u, v})
      if (!relabel.count(w)) {
        const int id = static_cast<int>(relabel.size());
        relabel[w] = id;
      }
    const int a = relabel[u], b = relabel[v];
    out.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  out.n_vertices = static_cast<int>(relabel.size());
  return out;
}

inline bool is_complete_k3(const Eigen::MatrixXi& A) {
  return A.rows() == 3 && A.sum() == 6;
}

}  // namespace detail

struct RootReconstruction {
  SimpleGraph graph;                    // edge i corresponds to L-vertex i
  bool ambiguous = false;               // multiple root interpretations exist
  std::vector<SimpleGraph> alternatives;
};

// Root graph of a connected line graph, at most n_priv vertices, with edge
// order matching L's vertex order. The triangle is the one connected line
// graph with two non-isomorphic roots: the star interpretation is preferred
// when it fits the vertex budget, the triangle otherwise, and the ambiguity
// is flagged with both candidates reported.
inline RootReconstruction reconstruct_root_graph(const LineGraph& L, int n_priv) {
  const int m = L.size();
  if (m < 1) throw std::invalid_argument("reconstruct_root_graph: empty line graph");
  if (L.A != L.A.transpose().eval() || L.A.diagonal().sum() != 0)
    throw std::invalid_argument("reconstruct_root_graph: invalid adjacency");
  if (detail::connected_components(L.A).size() != 1)
    throw DisconnectedGraphError("reconstruct_root_graph: line graph is disconnected");

  RootReconstruction out;
  if (m == 1) {
    if (n_priv < 2)
      throw NotLineGraphError("reconstruct_root_graph: need two vertices for an edge");
    out.graph.n_vertices = 2;
    out.graph.add_edge(0, 1);
    out.ambiguous = true;  // any private pair realizes a lone edge
    return out;
  }
  if (detail::is_complete_k3(L.A)) {
    SimpleGraph star;
    star.n_vertices = 4;
    star.add_edge(0, 1);
    star.add_edge(0, 2);
    star.add_edge(0, 3);
    SimpleGraph triangle;
    triangle.n_vertices = 3;
    triangle.add_edge(0, 1);
    triangle.add_edge(0, 2);
    triangle.add_edge(1, 2);
    if (n_priv < 3)
      throw NotLineGraphError("reconstruct_root_graph: vertex budget too small");
    out.ambiguous = true;
    if (n_priv >= 4) {
      out.graph = star;
      out.alternatives.push_back(triangle);
    } else {
      out.graph = triangle;
      out.alternatives.push_back(star);
    }
    return out;
  }

  auto root = detail::krausz_root(L.A);
  if (!root)
    throw NotLineGraphError("reconstruct_root_graph: no clique partition; not a line graph");
  const detail::RootEdges canon = detail::canonicalize(*root);
  if (canon.n_vertices > n_priv)
    throw NotLineGraphError("reconstruct_root_graph: root graph needs more than n_priv vertices");
  out.graph = canon.to_graph();
  return out;
}

// Exhaustive root search for tiny cases: every graph H on n_priv labeled
// vertices whose line graph is isomorphic to L under some edge ordering.
inline std::vector<SimpleGraph> brute_force_root(const LineGraph& L, int n_priv) {
  const int m = L.size();
  if (n_priv < 1 || n_priv > 6)
    throw std::invalid_argument("brute_force_root: enumeration bound is n_priv <= 6");
  if (m > 8)
    throw std::invalid_argument("brute_force_root: enumeration bound is m <= 8 edges");

  std::vector<std::pair<int, int>> all_pairs;
  for (int u = 0; u < n_priv; ++u)
    for (int v = u + 1; v < n_priv; ++v) all_pairs.emplace_back(u, v);
  const int np = static_cast<int>(all_pairs.size());
  if (m > np) return {};

  // degree multiset of L, for quick pruning
  std::vector<int> want_deg(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) want_deg[static_cast<std::size_t>(i)] = L.A.row(i).sum();
  std::vector<int> want_sorted = want_deg;
  std::sort(want_sorted.begin(), want_sorted.end());

  // permutation search: does some relabeling of H's edges match L exactly?
  const auto matches = [&](const Eigen::MatrixXi& AH) {
    std::vector<int> hdeg(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) hdeg[static_cast<std::size_t>(i)] = AH.row(i).sum();
    std::vector<int> hs = hdeg;
    std::sort(hs.begin(), hs.end());
    if (hs != want_sorted) return false;
    std::vector<int> perm(static_cast<std::size_t>(m), -1);  // L-vertex -> H-edge
    std::vector<char> used(static_cast<std::size_t>(m), 0);
    const auto dfs = [&](auto&& self, int i) -> bool {
      if (i == m) return true;
      for (int c = 0; c < m; ++c) {
        if (used[static_cast<std::size_t>(c)] ||
            hdeg[static_cast<std::size_t>(c)] != want_deg[static_cast<std::size_t>(i)])
          continue;
        bool ok = true;
        for (int j = 0; j < i && ok; ++j)
          if (AH(perm[static_cast<std::size_t>(j)], c) != L.A(j, i)) ok = false;
        if (!ok) continue;
        perm[static_cast<std::size_t>(i)] = c;
        used[static_cast<std::size_t>(c)] = 1;
        if (self(self, i + 1)) return true;
        used[static_cast<std::size_t>(c)] = 0;
      }
      return false;
    };
    return dfs(dfs, 0);
  };

  std::vector<SimpleGraph> found;
  std::vector<int> choose(static_cast<std::size_t>(m));
  std::iota(choose.begin(), choose.end(), 0);
  while (true) {
    SimpleGraph h;
    h.n_vertices = n_priv;
    for (int idx : choose)
      h.add_edge(all_pairs[static_cast<std::size_t>(idx)].first,
                 all_pairs[static_cast<std::size_t>(idx)].second);
    if (matches(line_graph_of(h).A)) found.push_back(h);
    // next m-combination of [0, np)
    int i = m - 1;
    while (i >= 0 && choose[static_cast<std::size_t>(i)] == np - m + i) --i;
    if (i < 0) break;
    ++choose[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j)
      choose[static_cast<std::size_t>(j)] = choose[static_cast<std::size_t>(j - 1)] + 1;
  }
  return found;
}

struct AssignmentResult {
  Eigen::MatrixXi W_priv;  // m x n_priv, rows 2-sparse, W W^T = M_priv
  bool ambiguous = false;
  bool whitney_exception = false;  // some component was a triangle line graph
  bool single_edge = false;        // some component was a lone edge
  bool disconnected = false;
  int components = 1;
};

namespace detail {

// Root edges (pairs of component-local vertex ids) for one connected component
// of the deduplicated line graph, plus whether the component was ambiguous.
struct ComponentRoot {
  RootEdges root;           // edges indexed like the component's L-vertices
  bool whitney = false;     // K3 component: star/triangle choice
  bool single = false;      // one-edge component
  RootEdges downgraded;     // triangle variant for K3 components
};

inline ComponentRoot reconstruct_component(const Eigen::MatrixXi& A, bool use_brute,
                                           int n_priv) {
  const int m = static_cast<int>(A.rows());
  ComponentRoot out;
  if (m == 1) {
    out.root.n_vertices = 2;
    out.root.edges = {{0, 1}};
    out.single = true;
    return out;
  }
  if (is_complete_k3(A)) {
    out.whitney = true;
    out.root.n_vertices = 4;  // star preferred; downgrade decided by budget later
    out.root.edges = {{0, 1}, {0, 2}, {0, 3}};
    out.downgraded.n_vertices = 3;
    out.downgraded.edges = {{0, 1}, {0, 2}, {1, 2}};
    return out;
  }
  if (use_brute) {
    LineGraph L;
    L.A = A;
    const std::vector<SimpleGraph> roots = brute_force_root(L, std::min(n_priv, 6));
    // recover an edge ordering consistent with the component's vertex order
    for (const SimpleGraph& h : roots) {
      const LineGraph lh = line_graph_of(h);
      std::vector<int> perm(static_cast<std::size_t>(m), -1);
      std::vector<char> used(static_cast<std::size_t>(m), 0);
      const auto dfs = [&](auto&& self, int i) -> bool {
        if (i == m) return true;
        for (int c = 0; c < m; ++c) {
          if (used[static_cast<std::size_t>(c)]) continue;
          bool ok = true;
          for (int j = 0; j < i && ok; ++j)
            if (lh.A(perm[static_cast<std::size_t>(j)], c) != A(j, i)) ok = false;
          if (!ok) continue;
          perm[static_cast<std::size_t>(i)] = c;
          used[static_cast<std::size_t>(c)] = 1;
          if (self(self, i + 1)) return true;
          used[static_cast<std::size_t>(c)] = 0;
        }
        return false;
      };
      if (!dfs(dfs, 0)) continue;
      out.root.n_vertices = h.n_vertices;
      out.root.edges.resize(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i)
        out.root.edges[static_cast<std::size_t>(i)] =
            h.edges[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      out.root = canonicalize(out.root);
      return out;
    }
    throw NotLineGraphError("assign: no root graph on n_priv vertices matches M_priv");
  }
  auto root = krausz_root(A);
  if (!root) throw NotLineGraphError("assign: component is not a line graph");
  out.root = canonicalize(*root);
  return out;
}

}  // namespace detail

// Recovers the private mixup matrix from the private Gram matrix: dedupe
// parallel edges, reconstruct the root graph per connected component
// (exhaustively for n_priv < 5, by clique partition otherwise), re-expand the
// duplicates and verify W W^T = M_priv exactly. Vertex labels are canonical
// (first edge appearance); recovery is up to private-image permutation.
inline AssignmentResult assign_original_images(const gram::PrivateGram& priv, int n_priv) {
  if (n_priv < 1) throw std::invalid_argument("assign_original_images: n_priv must be >= 1");
  const auto [L, mult] = dedupe_parallel_edges(priv);
  const int md = L.size();
  const auto comps = detail::connected_components(L.A);

  AssignmentResult out;
  out.components = static_cast<int>(comps.size());
  out.disconnected = comps.size() > 1;
  const bool use_brute = n_priv < 5;

  std::vector<detail::ComponentRoot> roots;
  roots.reserve(comps.size());
  int base_vertices = 0;
  for (const auto& verts : comps) {
    const int cm = static_cast<int>(verts.size());
    Eigen::MatrixXi A(cm, cm);
    for (int a = 0; a < cm; ++a)
      for (int b = 0; b < cm; ++b)
        A(a, b) = L.A(verts[static_cast<std::size_t>(a)], verts[static_cast<std::size_t>(b)]);
    roots.push_back(detail::reconstruct_component(A, use_brute, n_priv));
    out.whitney_exception |= roots.back().whitney;
    out.single_edge |= roots.back().single;
    base_vertices += roots.back().root.n_vertices;
  }

  // Whitney components prefer the star root; downgrade to triangles
  // left-to-right if the vertex budget cannot hold them all.
  for (auto& r : roots) {
    if (base_vertices <= n_priv) break;
    if (r.whitney) {
      r.root = r.downgraded;
      base_vertices -= 1;
    }
  }
  if (base_vertices > n_priv)
    throw NotLineGraphError("assign: root graphs need more than n_priv vertices");

  // global vertex ids in order of first appearance over deduplicated edges
  std::vector<std::pair<int, int>> dedup_edge(static_cast<std::size_t>(md));
  std::vector<std::map<int, int>> local_to_global(comps.size());
  int next_vertex = 0;
  std::vector<int> comp_of(static_cast<std::size_t>(md), -1);
  std::vector<int> pos_in_comp(static_cast<std::size_t>(md), -1);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t p = 0; p < comps[c].size(); ++p) {
      comp_of[static_cast<std::size_t>(comps[c][p])] = static_cast<int>(c);
      pos_in_comp[static_cast<std::size_t>(comps[c][p])] = static_cast<int>(p);
    }
  for (int e = 0; e < md; ++e) {
    const int c = comp_of[static_cast<std::size_t>(e)];
    const auto [lu, lv] =
        roots[static_cast<std::size_t>(c)].root.edges[static_cast<std::size_t>(
            pos_in_comp[static_cast<std::size_t>(e)])];
    auto& table = local_to_global[static_cast<std::size_t>(c)];
    for (int w : {lu, lv})
      if (!table.count(w)) table[w] = next_vertex++;
    dedup_edge[static_cast<std::size_t>(e)] = {table[lu], table[lv]};
  }

  out.ambiguous = out.whitney_exception || out.single_edge;
  out.W_priv = Eigen::MatrixXi::Zero(priv.M.rows(), n_priv);
  for (int g = 0; g < md; ++g)
    for (int row : mult.groups[static_cast<std::size_t>(g)]) {
      out.W_priv(row, dedup_edge[static_cast<std::size_t>(g)].first) = 1;
      out.W_priv(row, dedup_edge[static_cast<std::size_t>(g)].second) = 1;
    }

  if ((out.W_priv * out.W_priv.transpose()) != priv.M)
    throw InternalInconsistencyError("assign: reconstructed W_priv fails W W^T = M_priv");
  return out;
}

}  // namespace mixrec::assign
