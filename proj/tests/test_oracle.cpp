#include <catch2/catch.hpp>

#include "mixrec/gram.hpp"
#include "mixrec/oracle.hpp"

using namespace mixrec;

TEST_CASE("exact gram values") {
  const SplitSpec split{4, 4, 2, 2};
  Eigen::MatrixXi W(3, 8);
  W.row(0) << 1, 1, 0, 0, 1, 1, 0, 0;
  W.row(1) << 1, 1, 0, 0, 1, 1, 0, 0;  // identical to row 0
  W.row(2) << 0, 0, 1, 1, 0, 1, 1, 0;  // one shared private image with row 0
  const MixupMatrix mix{4, 4, W};
  const Eigen::MatrixXd M = oracle::exact_gram(mix, split);
  CHECK(M(0, 1) == Approx(2.0));
  CHECK(M(0, 2) == Approx(0.5));
  CHECK(M(0, 0) == Approx(2.0));
}

TEST_CASE("Monte Carlo folded moment sanity") {
  SECTION("independent pair") {
    const auto mc = oracle::folded_moment_mc_stats(0.0, 1.0, 2'000'000, 5);
    CHECK(std::fabs(mc.mean - 2.0 / M_PI) <= 3.0 * mc.std_error);
  }
  SECTION("fully correlated pair") {
    const auto mc = oracle::folded_moment_mc_stats(1.0, 1.0, 2'000'000, 6);
    CHECK(std::fabs(mc.mean - 1.0) <= 3.0 * mc.std_error);
  }
  SECTION("argument guards") {
    CHECK_THROWS_AS(oracle::folded_moment_mc(0.0, 1.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(oracle::folded_moment_mc(2.0, 1.0, 10, 1), std::invalid_argument);
  }
}

TEST_CASE("exhaustive public support") {
  SECTION("planted rank-1 matrix") {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(7);
    u[1] = u[5] = 1.0 / std::sqrt(2.0);
    const auto support = oracle::exhaustive_public_support(u * u.transpose(), 2);
    CHECK(support.indices == std::vector<int>{1, 5});
  }
  SECTION("the zero matrix is a tie") {
    CHECK_THROWS_AS(oracle::exhaustive_public_support(Eigen::MatrixXd::Zero(5, 5), 2),
                    AmbiguousSupportError);
  }
  SECTION("size bound") {
    CHECK_THROWS_AS(oracle::exhaustive_public_support(Eigen::MatrixXd::Zero(13, 13), 2),
                    ResourceBoundError);
  }
}

TEST_CASE("naive sign solver fixtures") {
  Eigen::MatrixXd W(3, 3);
  W << 1, 1, 0, 1, 0, 1, 0, 1, 1;

  SECTION("triangle instance has the eight exact solutions") {
    Eigen::VectorXd y(3);
    y << 1, 4, 1;
    const auto sols = oracle::naive_sign_solver(W, Eigen::VectorXd::Zero(3), y, 1e-9);
    CHECK(sols.size() == 8);
    bool has_planted = false;
    for (const auto& z : sols) {
      Eigen::VectorXd want(3);
      want << 1, -2, 3;
      if ((z - want).cwiseAbs().maxCoeff() < 1e-9) has_planted = true;
    }
    CHECK(has_planted);
  }
  SECTION("zero data yields only the zero solution") {
    const auto sols = oracle::naive_sign_solver(W, Eigen::VectorXd::Zero(3),
                                                Eigen::VectorXd::Zero(3), 1e-9);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("planted instances always include the truth") {
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd z(3), y_pub(3);
      for (int i = 0; i < 3; ++i) {
        z[i] = rng.standard_normal();
        y_pub[i] = rng.standard_normal();
      }
      const Eigen::VectorXd y = (W * z + y_pub).cwiseAbs();
      const auto sols = oracle::naive_sign_solver(W, y_pub, y, 1e-8);
      bool found = false;
      for (const auto& s : sols)
        if ((s - z).cwiseAbs().maxCoeff() < 1e-6) found = true;
      CHECK(found);
    }
  }
  SECTION("size bound") {
    const Eigen::MatrixXd big = Eigen::MatrixXd::Ones(13, 2);
    CHECK_THROWS_AS(oracle::naive_sign_solver(big, Eigen::VectorXd::Zero(13),
                                              Eigen::VectorXd::Zero(13), 1e-9),
                    ResourceBoundError);
  }
}
