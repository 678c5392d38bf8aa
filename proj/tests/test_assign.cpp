#include <catch2/catch.hpp>

#include <set>

#include "mixrec/assign.hpp"
#include "mixrec/graph.hpp"

using namespace mixrec;
using assign::LineGraph;
using assign::line_graph_of;

namespace {

SimpleGraph triangle() {
  SimpleGraph g;
  g.n_vertices = 3;
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(1, 2);
  return g;
}

SimpleGraph claw() {
  SimpleGraph g;
  g.n_vertices = 4;
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(0, 3);
  return g;
}

SimpleGraph cycle(int n) {
  SimpleGraph g;
  g.n_vertices = n;
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

SimpleGraph path(int n) {
  SimpleGraph g;
  g.n_vertices = n;
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

gram::PrivateGram gram_of(const Eigen::MatrixXi& W_priv) {
  gram::PrivateGram priv;
  priv.M = W_priv * W_priv.transpose();
  return priv;
}

Eigen::MatrixXi incidence(const SimpleGraph& g) {
  Eigen::MatrixXi W = Eigen::MatrixXi::Zero(g.m(), g.n_vertices);
  for (int e = 0; e < g.m(); ++e) {
    W(e, g.edges[static_cast<std::size_t>(e)].first) = 1;
    W(e, g.edges[static_cast<std::size_t>(e)].second) = 1;
  }
  return W;
}

// Two graphs with the same edge ordering are equal up to vertex relabeling
// iff the multisets of incidence-matrix columns coincide; this is exactly
// "equal up to private-image permutation".
bool same_up_to_relabeling(const SimpleGraph& a, const SimpleGraph& b) {
  if (a.m() != b.m()) return false;
  const auto columns = [](const SimpleGraph& g) {
    std::vector<std::vector<int>> cols(static_cast<std::size_t>(g.n_vertices),
                                       std::vector<int>(static_cast<std::size_t>(g.m()), 0));
    for (int e = 0; e < g.m(); ++e) {
      cols[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].first)]
          [static_cast<std::size_t>(e)] = 1;
      cols[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].second)]
          [static_cast<std::size_t>(e)] = 1;
    }
    // drop all-zero columns so isolated vertices do not affect the comparison
    cols.erase(std::remove_if(cols.begin(), cols.end(),
                              [](const std::vector<int>& c) {
                                return std::all_of(c.begin(), c.end(),
                                                   [](int x) { return x == 0; });
                              }),
               cols.end());
    std::sort(cols.begin(), cols.end());
    return cols;
  };
  return columns(a) == columns(b);
}

bool isomorphic_small(const SimpleGraph& a, const SimpleGraph& b) {
  if (a.n_vertices != b.n_vertices || a.m() != b.m()) return false;
  std::vector<int> perm(static_cast<std::size_t>(a.n_vertices));
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::pair<int, int>> eb(b.edges.begin(), b.edges.end());
  do {
    bool match = true;
    for (auto [u, v] : a.edges) {
      int pu = perm[static_cast<std::size_t>(u)], pv = perm[static_cast<std::size_t>(v)];
      if (pu > pv) std::swap(pu, pv);
      if (!eb.count({pu, pv})) {
        match = false;
        break;
      }
    }
    if (match) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST_CASE("line graph construction") {
  SECTION("triangle maps to a triangle") {
    const LineGraph L = line_graph_of(triangle());
    CHECK(L.A.sum() == 6);
    CHECK(L.size() == 3);
  }
  SECTION("claw maps to a triangle too") {
    const LineGraph L = line_graph_of(claw());
    CHECK(L.A.sum() == 6);
    CHECK(L.size() == 3);
  }
  SECTION("path on 4 vertices maps to a path on 3") {
    const LineGraph L = line_graph_of(path(4));
    Eigen::MatrixXi expect(3, 3);
    expect << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK(L.A == expect);
  }
}

TEST_CASE("duplicate-row grouping") {
  SECTION("no duplicates: identity grouping") {
    const auto [L, mult] = assign::dedupe_parallel_edges(gram_of(incidence(cycle(5))));
    CHECK(mult.dedup_count() == 5);
    CHECK(L.A == line_graph_of(cycle(5)).A);
  }
  SECTION("rows sharing a pair collapse into one edge") {
    const SimpleGraph g = path(4);
    Eigen::MatrixXi W(4, 4);
    W.row(0) = incidence(g).row(0);
    W.row(1) = incidence(g).row(1);
    W.row(2) = incidence(g).row(2);
    W.row(3) = incidence(g).row(0);  // duplicate of row 0
    const auto [L, mult] = assign::dedupe_parallel_edges(gram_of(W));
    CHECK(mult.dedup_count() == 3);
    CHECK(mult.groups[0] == std::vector<int>{0, 3});
    CHECK(L.A == line_graph_of(g).A);
  }
  SECTION("all rows identical: a single 1x1 line graph") {
    Eigen::MatrixXi W(3, 5);
    W.setZero();
    W.col(1).setOnes();
    W.col(3).setOnes();
    const auto [L, mult] = assign::dedupe_parallel_edges(gram_of(W));
    CHECK(mult.dedup_count() == 1);
    CHECK(mult.groups[0] == std::vector<int>{0, 1, 2});
    CHECK(L.size() == 1);
  }
  SECTION("inconsistent duplicate marks are rejected") {
    Eigen::MatrixXi M(3, 3);
    // rows 0,1 claim to be the same pair but disagree about row 2
    M << 2, 2, 1, 2, 2, 0, 1, 0, 2;
    gram::PrivateGram priv;
    priv.M = M;
    CHECK_THROWS_AS(assign::dedupe_parallel_edges(priv), InconsistentGramError);
  }
}

TEST_CASE("root reconstruction from a line graph") {
  SECTION("five-cycle: edge order is preserved") {
    const LineGraph L = line_graph_of(cycle(5));
    const auto rec = assign::reconstruct_root_graph(L, 5);
    CHECK_FALSE(rec.ambiguous);
    CHECK(line_graph_of(rec.graph).A == L.A);
    CHECK(isomorphic_small(rec.graph, cycle(5)));
    // brute-force cross-check: the recovered graph is among all valid roots
    bool found = false;
    for (const auto& h : assign::brute_force_root(L, 5))
      if (isomorphic_small(h, rec.graph)) found = true;
    CHECK(found);
  }
  SECTION("triangle line graph is flagged and reports both roots") {
    LineGraph L;
    L.A = line_graph_of(triangle()).A;
    const auto rec = assign::reconstruct_root_graph(L, 6);
    CHECK(rec.ambiguous);
    REQUIRE(rec.alternatives.size() == 1);
    const bool star_first =
        rec.graph.n_vertices == 4 && rec.alternatives[0].n_vertices == 3;
    CHECK(star_first);  // star preferred when the budget allows it
    CHECK(line_graph_of(rec.graph).A == L.A);
    CHECK(line_graph_of(rec.alternatives[0]).A == L.A);
  }
  SECTION("triangle line graph falls back to the triangle on a tight budget") {
    LineGraph L;
    L.A = line_graph_of(triangle()).A;
    const auto rec = assign::reconstruct_root_graph(L, 3);
    CHECK(rec.ambiguous);
    CHECK(rec.graph.n_vertices == 3);
  }
  SECTION("single vertex: a lone edge, flagged") {
    LineGraph L;
    L.A = Eigen::MatrixXi::Zero(1, 1);
    const auto rec = assign::reconstruct_root_graph(L, 4);
    CHECK(rec.graph.m() == 1);
    CHECK(rec.ambiguous);
  }
  SECTION("the claw is not a line graph") {
    LineGraph L;
    L.A = Eigen::MatrixXi::Zero(4, 4);
    for (int leaf = 1; leaf < 4; ++leaf) L.A(0, leaf) = L.A(leaf, 0) = 1;
    CHECK_THROWS_AS(assign::reconstruct_root_graph(L, 8), NotLineGraphError);
  }
  SECTION("disconnected input is refused") {
    LineGraph L;
    L.A = Eigen::MatrixXi::Zero(2, 2);
    CHECK_THROWS_AS(assign::reconstruct_root_graph(L, 4), DisconnectedGraphError);
  }
  SECTION("random connected roots reconstruct up to relabeling") {
    Rng rng(2024);
    for (int t = 0; t < 40; ++t) {
      const int n = 5 + static_cast<int>(rng.below(6));
      const int max_m = n * (n - 1) / 2;
      const int m = std::min(max_m, n + 2 + static_cast<int>(rng.below(5)));
      const SimpleGraph g = random_connected_graph(n, m, rng);
      const auto rec = assign::reconstruct_root_graph(line_graph_of(g), n);
      CHECK(line_graph_of(rec.graph).A == line_graph_of(g).A);
      CHECK(same_up_to_relabeling(rec.graph, g));
    }
  }
}

TEST_CASE("exhaustive root search") {
  SECTION("triangle line graph on four labels finds triangles and claws") {
    LineGraph L;
    L.A = line_graph_of(triangle()).A;
    const auto roots = assign::brute_force_root(L, 4);
    bool has_triangle = false, has_claw = false;
    for (const auto& h : roots) {
      int max_deg = 0;
      for (int d : h.degrees()) max_deg = std::max(max_deg, d);
      if (max_deg == 2) has_triangle = true;  // 3 edges, degrees <= 2: a triangle
      if (max_deg == 3) has_claw = true;      // a degree-3 center: a claw
    }
    CHECK(has_triangle);
    CHECK(has_claw);
  }
  SECTION("1-vertex line graph finds every single-edge graph") {
    LineGraph L;
    L.A = Eigen::MatrixXi::Zero(1, 1);
    CHECK(assign::brute_force_root(L, 4).size() == 6);  // C(4,2) labeled edges
  }
  SECTION("soundness round trip on random small graphs") {
    Rng rng(55);
    for (int t = 0; t < 25; ++t) {
      const int n = 3 + static_cast<int>(rng.below(3));
      const int max_m = std::min(8, n * (n - 1) / 2);
      const int m = std::max(n - 1, 1 + static_cast<int>(rng.below(max_m)));
      if (m > max_m) continue;
      const SimpleGraph g = random_connected_graph(n, m, rng);
      std::vector<std::pair<int, int>> want = g.edges;
      std::sort(want.begin(), want.end());
      bool found = false;
      for (const auto& h : assign::brute_force_root(line_graph_of(g), n)) {
        std::vector<std::pair<int, int>> have = h.edges;  // enumerated in lex order
        std::sort(have.begin(), have.end());
        if (have == want) found = true;  // the exact labeled graph is enumerated
      }
      CHECK(found);
    }
  }
  SECTION("bounds are enforced") {
    LineGraph L;
    L.A = Eigen::MatrixXi::Zero(9, 9);
    CHECK_THROWS_AS(assign::brute_force_root(L, 4), std::invalid_argument);
    LineGraph small;
    small.A = Eigen::MatrixXi::Zero(1, 1);
    CHECK_THROWS_AS(assign::brute_force_root(small, 7), std::invalid_argument);
  }
}

TEST_CASE("model-scale multigraphs are almost surely connected") {
  // m = ceil(3 n ln n) at n = 8, measured over 100 seeds
  const int n = 8;
  const int m = static_cast<int>(std::ceil(3.0 * n * std::log(n)));
  int connected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(9000 + seed);
    const auto edges = random_pair_multigraph(n, m, rng);
    SimpleGraph support;
    support.n_vertices = n;
    std::set<std::pair<int, int>> seen;
    for (auto e : edges)
      if (seen.insert(e).second) support.add_edge(e.first, e.second);
    connected += support.is_connected();
  }
  CHECK(connected >= 99);
}

TEST_CASE("assignment from the private Gram matrix") {
  SECTION("random connected instance, exact recovery up to column order") {
    Rng rng(808);
    for (int t = 0; t < 15; ++t) {
      const SimpleGraph g = random_connected_graph(8, 14, rng);
      // duplicate a few edges the way repeated private pairs would
      Eigen::MatrixXi W(g.m() + 3, 8);
      W.topRows(g.m()) = incidence(g);
      for (int k = 0; k < 3; ++k)
        W.row(g.m() + k) = W.row(static_cast<int>(rng.below(g.m())));
      const auto res = assign::assign_original_images(gram_of(W), 8);
      CHECK((res.W_priv * res.W_priv.transpose()) == (W * W.transpose()));
      for (int r = 0; r < W.rows(); ++r) CHECK(res.W_priv.row(r).sum() == 2);
      // equality up to column permutation
      std::vector<std::vector<int>> a, b;
      for (int c = 0; c < 8; ++c) {
        std::vector<int> ca, cb;
        for (int r = 0; r < W.rows(); ++r) {
          ca.push_back(res.W_priv(r, c));
          cb.push_back(W(r, c));
        }
        a.push_back(ca);
        b.push_back(cb);
      }
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
  SECTION("single row is returned with the ambiguity flag") {
    Eigen::MatrixXi W(1, 4);
    W << 1, 0, 0, 1;
    const auto res = assign::assign_original_images(gram_of(W), 4);
    CHECK(res.W_priv.row(0).sum() == 2);
    CHECK(res.ambiguous);
    CHECK(res.single_edge);
  }
  SECTION("triangle private Gram with slack budget flags the Whitney pair") {
    const auto res = assign::assign_original_images(gram_of(incidence(triangle())), 5);
    CHECK(res.whitney_exception);
    CHECK(res.ambiguous);
    CHECK((res.W_priv * res.W_priv.transpose()) ==
          (incidence(triangle()) * incidence(triangle()).transpose()));
  }
  SECTION("brute-force branch handles n_priv < 5") {
    const SimpleGraph g = path(4);
    const auto res = assign::assign_original_images(gram_of(incidence(g)), 4);
    CHECK((res.W_priv * res.W_priv.transpose()) ==
          (incidence(g) * incidence(g).transpose()));
  }
  SECTION("disconnected inputs reconstruct per component") {
    Eigen::MatrixXi W(2, 5);
    W.setZero();
    W(0, 0) = W(0, 1) = 1;
    W(1, 2) = W(1, 3) = 1;
    const auto res = assign::assign_original_images(gram_of(W), 5);
    CHECK(res.disconnected);
    CHECK(res.components == 2);
    CHECK((res.W_priv * res.W_priv.transpose()) == (W * W.transpose()));
  }
  SECTION("vertex budget violations are reported") {
    const SimpleGraph g = cycle(6);
    CHECK_THROWS_AS(assign::assign_original_images(gram_of(incidence(g)), 5),
                    NotLineGraphError);
  }
}
