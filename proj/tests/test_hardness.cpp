#include <catch2/catch.hpp>

#include <set>

#include "mixrec/hardness.hpp"
#include "mixrec/signsolve.hpp"

using namespace mixrec;

namespace {

SimpleGraph single_edge() {
  SimpleGraph g;
  g.n_vertices = 2;
  g.add_edge(0, 1);
  return g;
}

SimpleGraph complete(int n) {
  SimpleGraph g;
  g.n_vertices = n;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

SimpleGraph cycle(int n) {
  SimpleGraph g;
  g.n_vertices = n;
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

}  // namespace

TEST_CASE("reduction construction") {
  SECTION("single edge with c = 1 materializes to the 3x2 fixture") {
    const auto inst = hardness::reduce_maxcut(single_edge(), 1);
    const Eigen::MatrixXd W = inst.dense_W();
    const Eigen::VectorXd y = inst.dense_y();
    REQUIRE(W.rows() == 3);
    REQUIRE(W.cols() == 2);
    Eigen::MatrixXd expect_W(3, 2);
    expect_W << 1, 1, 1, 0, 0, 1;
    Eigen::VectorXd expect_y(3);
    expect_y << 0, 1, 1;
    CHECK(W == expect_W);
    CHECK(y == expect_y);
  }
  SECTION("K4 with c = 2 has 6 + 8 rows") {
    const auto inst = hardness::reduce_maxcut(complete(4), 2);
    CHECK(inst.rows() == 14);
    CHECK(inst.dense_W().rows() == 14);
  }
  SECTION("every row has at most two ones") {
    const auto inst = hardness::reduce_maxcut(cycle(5), 3);
    const Eigen::MatrixXd W = inst.dense_W();
    for (int i = 0; i < W.rows(); ++i) CHECK(W.row(i).sum() <= 2.0);
  }
  SECTION("empty graphs and bad c are rejected") {
    SimpleGraph empty;
    empty.n_vertices = 3;
    CHECK_THROWS_AS(hardness::reduce_maxcut(empty, 1), std::invalid_argument);
    CHECK_THROWS_AS(hardness::reduce_maxcut(single_edge(), 0), std::invalid_argument);
  }
  SECTION("paper-scale c refuses to materialize oversized dense forms") {
    const auto inst = hardness::reduce_maxcut(complete(4), 1'000'000'000LL);
    CHECK_THROWS_AS(inst.dense_W(), ResourceBoundError);
  }
}

TEST_CASE("brute-force max cut") {
  CHECK(hardness::brute_force_maxcut(single_edge()).best_value == 1);
  CHECK(hardness::brute_force_maxcut(complete(4)).best_value == 4);
  CHECK(hardness::brute_force_maxcut(cycle(5)).best_value == 4);
  SECTION("size bound") {
    SimpleGraph big;
    big.n_vertices = 25;
    big.add_edge(0, 1);
    CHECK_THROWS_AS(hardness::brute_force_maxcut(big), ResourceBoundError);
  }
  SECTION("best subset attains the best value") {
    const SimpleGraph g = cycle(7);
    const auto cut = hardness::brute_force_maxcut(g);
    int crossing = 0;
    for (auto [u, v] : g.edges) {
      const bool su = std::count(cut.best_subset.begin(), cut.best_subset.end(), u) > 0;
      const bool sv = std::count(cut.best_subset.begin(), cut.best_subset.end(), v) > 0;
      crossing += su != sv;
    }
    CHECK(crossing == cut.best_value);
  }
}

TEST_CASE("reduction objective") {
  SECTION("z = 0 on the single-edge instance with c = 1 scores 2") {
    const auto inst = hardness::reduce_maxcut(single_edge(), 1);
    CHECK(hardness::objective(inst, Eigen::VectorXd::Zero(2)) == Approx(2.0));
  }
  SECTION("a cut and its complement score equally") {
    const auto inst = hardness::reduce_maxcut(cycle(6), 7);
    const Eigen::VectorXd z = hardness::cut_to_assignment({0, 2, 5}, 6);
    CHECK(hardness::objective(inst, z) == hardness::objective(inst, (-z).eval()));
  }
  SECTION("matches the materialized matrix form") {
    const auto inst = hardness::reduce_maxcut(cycle(5), 4);
    Rng rng(3);
    Eigen::VectorXd z(5);
    for (int i = 0; i < 5; ++i) z[i] = rng.standard_normal();
    const double direct = hardness::objective(inst, z);
    const double dense =
        ((inst.dense_W() * z).cwiseAbs() - inst.dense_y()).squaredNorm();
    CHECK(direct == Approx(dense).margin(1e-9));
  }
}

TEST_CASE("completeness identity: objective at an optimal cut is 4(m - OPT)") {
  Rng rng(31337);
  SECTION("K4, every optimal cut") {
    const SimpleGraph g = complete(4);
    const auto cut = hardness::brute_force_maxcut(g);
    REQUIRE(cut.best_value == 4);
    const auto inst = hardness::reduce_maxcut(g, 10);
    for (const auto& subset : hardness::all_optimal_cuts(g))
      CHECK(hardness::objective(inst, hardness::cut_to_assignment(subset, 4)) ==
            4.0 * (g.m() - cut.best_value));
  }
  SECTION("random graphs up to 12 vertices") {
    for (int t = 0; t < 20; ++t) {
      const int n = 3 + static_cast<int>(rng.below(10));
      const int max_m = n * (n - 1) / 2;
      const int m = std::max(1, static_cast<int>(rng.below(max_m + 1)));
      SimpleGraph g;
      g.n_vertices = n;
      Rng local = rng;  // edges drawn from a forked stream to keep t deterministic
      std::set<std::pair<int, int>> seen;
      while (static_cast<int>(seen.size()) < m) {
        const auto pair = local.sample_subset(n, 2);
        seen.insert({pair[0], pair[1]});
      }
      for (auto [u, v] : seen) g.add_edge(u, v);
      const auto cut = hardness::brute_force_maxcut(g);
      const auto inst = hardness::reduce_maxcut(g, 10);
      for (const auto& subset : hardness::all_optimal_cuts(g))
        CHECK(hardness::objective(inst, hardness::cut_to_assignment(subset, n)) ==
              4.0 * (g.m() - cut.best_value));
      rng.next_u64();
    }
  }
}

TEST_CASE("cut assignments") {
  CHECK(hardness::cut_to_assignment({}, 3) == Eigen::VectorXd::Constant(3, -1.0));
  CHECK(hardness::cut_to_assignment({0, 1, 2}, 3) == Eigen::VectorXd::Constant(3, 1.0));
  CHECK_THROWS_AS(hardness::cut_to_assignment({5}, 3), std::invalid_argument);
}

TEST_CASE("soundness rounding gap") {
  SECTION("already-rounded z has zero gap") {
    const SimpleGraph g = complete(4);  // 3-regular
    const auto inst = hardness::reduce_maxcut(g, 10);
    const auto rc =
        hardness::verify_soundness_rounding(inst, hardness::cut_to_assignment({0, 1}, 4));
    CHECK(rc.gap == 0.0);
  }
  SECTION("z = 0 on K4 with c = 100 stays within (48/c) m") {
    const auto inst = hardness::reduce_maxcut(complete(4), 100);
    const auto rc = hardness::verify_soundness_rounding(inst, Eigen::VectorXd::Zero(4));
    CHECK(rc.bound == Approx(48.0 / 100.0 * 6.0));
    CHECK(rc.gap <= rc.bound + 1e-9);
  }
  SECTION("Monte Carlo campaign over random 3-regular graphs") {
    Rng rng(11);
    for (int t = 0; t < 10; ++t) {
      const int n = 4 + 2 * static_cast<int>(rng.below(5));
      const SimpleGraph g = random_regular_graph(n, 3, rng);
      for (long long c : {10LL, 100LL}) {
        const auto inst = hardness::reduce_maxcut(g, c);
        for (int trial = 0; trial < 200; ++trial) {
          Eigen::VectorXd z(n);
          for (int i = 0; i < n; ++i) z[i] = 2.0 * rng.uniform01() - 1.0;
          CHECK_NOTHROW(hardness::verify_soundness_rounding(inst, z));
        }
      }
    }
  }
  SECTION("the 5-regular variant verifies its derived bound") {
    Rng rng(13);
    for (int t = 0; t < 5; ++t) {
      const SimpleGraph g = random_regular_graph(8, 5, rng);
      const auto inst = hardness::reduce_maxcut(g, 100);
      for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd z(8);
        for (int i = 0; i < 8; ++i) z[i] = 2.0 * rng.uniform01() - 1.0;
        const auto rc = hardness::verify_soundness_rounding(inst, z);
        CHECK(rc.bound == Approx(40.0 / 100.0 * g.m()));
      }
    }
  }
  SECTION("irregular graphs are rejected") {
    SimpleGraph g;  // path: degrees 1, 2, 1
    g.n_vertices = 3;
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    const auto inst = hardness::reduce_maxcut(g, 10);
    CHECK_THROWS_AS(hardness::verify_soundness_rounding(inst, Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
  }
}

TEST_CASE("reduction round trip through the sign solver") {
  // the weighted collapsed system stands in for the replicated instance;
  // the solver's continuous optimum sits slightly below the integral value
  // 4(m - OPT) (rounding gap), and rounding its best solution recovers an
  // optimal cut exactly
  Rng rng(17);
  for (const long long c : {10LL, 100LL}) {
    for (int t = 0; t < 6; ++t) {
      const int n = 2 + static_cast<int>(rng.below(3));  // up to 4 vertices
      SimpleGraph g;
      g.n_vertices = n;
      std::set<std::pair<int, int>> seen;
      const int want = 1 + static_cast<int>(rng.below(n * (n - 1) / 2));
      while (static_cast<int>(seen.size()) < want) {
        const auto pair = rng.sample_subset(n, 2);
        seen.insert({pair[0], pair[1]});
      }
      for (auto [u, v] : seen) g.add_edge(u, v);

      const auto inst = hardness::reduce_maxcut(g, c);
      const int opt = hardness::brute_force_maxcut(g).best_value;
      const auto [W, y] = hardness::collapsed_system(inst);
      const auto sol = signsolve::solve_pixel(
          W, Eigen::VectorXd::Zero(W.rows()), y,
          std::numeric_limits<double>::infinity(), 16);

      double best = std::numeric_limits<double>::infinity();
      Eigen::VectorXd best_z;
      for (const auto& z : sol.solutions) {
        const double obj = hardness::objective(inst, z);
        if (obj < best) {
          best = obj;
          best_z = z;
        }
      }
      REQUIRE(std::isfinite(best));
      const double integral = 4.0 * (g.m() - opt);
      CHECK(best <= integral + 1e-9);
      CHECK(best >= integral - 48.0 / static_cast<double>(c) * g.m() - 1e-9);
      // rounding the solver's best point recovers an optimal cut
      Eigen::VectorXd zbar(n);
      for (int i = 0; i < n; ++i) zbar[i] = best_z[i] >= 0 ? 1.0 : -1.0;
      CHECK(hardness::objective(inst, zbar) == integral);
    }
  }
}
