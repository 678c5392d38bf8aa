#include <catch2/catch.hpp>

#include "mixrec/core_data.hpp"
#include "mixrec/oracle.hpp"
#include "mixrec/publearn.hpp"

using namespace mixrec;

namespace {

Eigen::VectorXd sparse_unit(int n, const std::vector<int>& support) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (int i : support) u[i] = 1.0;
  u.normalize();
  return u;
}

}  // namespace

TEST_CASE("moment matrix construction") {
  SECTION("constant y at the centering point gives the zero matrix") {
    const Eigen::MatrixXd X_pub = Eigen::MatrixXd::Random(50, 4);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(50, std::sqrt(2.0));
    const Eigen::MatrixXd Mt = publearn::build_moment_matrix(y, X_pub, 2.0);
    CHECK(Mt.cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("output is exactly symmetric") {
    const ImageMatrix X = sample_image_matrix(300, 5, 8);
    Eigen::VectorXd y = X.values.col(0).cwiseAbs();
    const Eigen::MatrixXd Mt = publearn::build_moment_matrix(y, X.values, 2.0);
    CHECK((Mt - Mt.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("expectation is 2 a a^T under the generative model (Monte Carlo)") {
    // one synthetic image with d = 10^6 pixels stands in for the expectation
    const SplitSpec split{6, 4, 2, 2};
    const int d = 1'000'000;
    const ImageMatrix X = sample_image_matrix(d, split.n_total(), 17);
    SelectionVector w;
    w.pub_support = {1, 4};
    w.priv_support = {0, 2};
    const Eigen::VectorXd y = make_synthetic(X, w, split);
    const Eigen::MatrixXd Mt =
        publearn::build_moment_matrix(y, X.values.leftCols(split.n_pub), 2.0);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(split.n_pub);
    a[1] = a[4] = 1.0 / std::sqrt(2.0);
    const Eigen::MatrixXd expect = 2.0 * a * a.transpose();
    CHECK((Mt - expect).cwiseAbs().maxCoeff() < 0.02);
  }
  SECTION("empty pixel set is rejected") {
    CHECK_THROWS_AS(
        publearn::build_moment_matrix(Eigen::VectorXd(), Eigen::MatrixXd(0, 3), 2.0),
        std::invalid_argument);
  }
}

TEST_CASE("sparse top component") {
  SECTION("exact rank-1 input returns +/- the planted vector") {
    const Eigen::VectorXd u = sparse_unit(9, {2, 5});
    const Eigen::MatrixXd Mt = u * u.transpose();
    const Eigen::VectorXd v = publearn::sparse_top_component(Mt, 2);
    CHECK(std::min((v - u).norm(), (v + u).norm()) < 1e-12);
  }
  SECTION("identity input returns some valid k-sparse maximizer") {
    const Eigen::MatrixXd Mt = Eigen::MatrixXd::Identity(6, 6);
    const Eigen::VectorXd v = publearn::sparse_top_component(Mt, 2);
    CHECK(v.norm() == Approx(1.0).margin(1e-12));
    int nonzeros = 0;
    for (int i = 0; i < v.size(); ++i) nonzeros += v[i] != 0.0;
    CHECK(nonzeros <= 2);
    CHECK(v.dot(Mt * v) == Approx(1.0).margin(1e-12));
  }
  SECTION("asymmetric input is rejected") {
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(publearn::sparse_top_component(bad, 1), std::invalid_argument);
  }
  SECTION("support match against the exhaustive oracle on spiked instances") {
    Rng rng(77);
    int agree = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
      const int n = 8;
      Eigen::MatrixXd noise(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
          noise(i, j) = noise(j, i) = 0.05 * rng.standard_normal();
      const Eigen::VectorXd u = sparse_unit(n, {static_cast<int>(rng.below(4)),
                                                4 + static_cast<int>(rng.below(4))});
      const Eigen::MatrixXd Mt = 2.0 * u * u.transpose() + noise;
      const Eigen::VectorXd v = publearn::sparse_top_component(Mt, 2);
      std::vector<int> support;
      for (int i = 0; i < n; ++i)
        if (v[i] != 0.0) support.push_back(i);
      if (support == oracle::exhaustive_public_support(Mt, 2).indices) ++agree;
    }
    CHECK(agree >= 99);
  }
}

TEST_CASE("public support learning") {
  SECTION("planted support at acceptance scale") {
    const SplitSpec split{20, 4, 2, 2};
    const int d = 20000;
    const ImageMatrix X = sample_image_matrix(d, split.n_total(), 5);
    SelectionVector w;
    w.pub_support = {2, 5};
    w.priv_support = {1, 3};
    const Eigen::VectorXd y = make_synthetic(X, w, split);
    const publearn::PublicSupport s =
        publearn::learn_public_support(y, X.values.leftCols(split.n_pub), 2);
    CHECK(s.indices == std::vector<int>{2, 5});
  }
  SECTION("k_pub = 1: the single mixed-in public image is identified") {
    const SplitSpec split{8, 4, 1, 2};
    const ImageMatrix X = sample_image_matrix(20000, split.n_total(), 6);
    SelectionVector w;
    w.pub_support = {6};
    w.priv_support = {0, 3};
    const Eigen::VectorXd y = make_synthetic(X, w, split);
    const publearn::PublicSupport s =
        publearn::learn_public_support(y, X.values.leftCols(split.n_pub), 1);
    CHECK(s.indices == std::vector<int>{6});
  }
  SECTION("full set is forced when n_pub == k_pub") {
    const Eigen::MatrixXd X_pub = Eigen::MatrixXd::Random(30, 3);
    const Eigen::VectorXd y = Eigen::VectorXd::Random(30).cwiseAbs();
    const publearn::PublicSupport s = publearn::learn_public_support(y, X_pub, 3);
    CHECK(s.indices == std::vector<int>{0, 1, 2});
  }
  SECTION("boundary tie raises an ambiguous-support error") {
    // crafted so the moment matrix is exactly diag(1.5, 0, 0): s_1 + s_2 = 0
    // kills the identity term and only column 0 carries signal, so the top
    // component cannot fill two support slots
    Eigen::MatrixXd X_pub(2, 3);
    X_pub << 2, 0, 0, 1, 0, 0;
    Eigen::VectorXd y(2);
    y << std::sqrt(3.0), 1.0;
    CHECK_THROWS_AS(publearn::learn_public_support(y, X_pub, 2), AmbiguousSupportError);
  }
  SECTION("agreement with the exhaustive oracle on model instances") {
    const SplitSpec split{12, 4, 2, 2};
    const int d = 20000;
    int agree = 0;
    const int trials = 30;
    for (int t = 0; t < trials; ++t) {
      const GeneratedData data = generate_dataset(split, d, 1, 900 + t);
      const Eigen::VectorXd y = data.Y.Y.row(0).transpose();
      const Eigen::MatrixXd Mt =
          publearn::build_moment_matrix(y, data.X_pub(), 2.0);
      const publearn::PublicSupport fast =
          publearn::learn_public_support(y, data.X_pub(), 2);
      const publearn::PublicSupport slow = oracle::exhaustive_public_support(Mt, 2);
      if (fast.indices == slow.indices) ++agree;
    }
    CHECK(agree >= trials * 95 / 100);
  }
}

TEST_CASE("public contribution") {
  SECTION("empty public side contributes nothing") {
    const Eigen::MatrixXi W_pub(3, 0);
    const Eigen::MatrixXd X_pub(5, 0);
    const Eigen::MatrixXd Y_pub = publearn::public_contribution(W_pub, X_pub, 0);
    CHECK(Y_pub.rows() == 3);
    CHECK(Y_pub.cols() == 5);
    CHECK(Y_pub.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("a single k_pub=1 row reproduces the selected column") {
    const Eigen::MatrixXd X_pub = Eigen::MatrixXd::Random(7, 3);
    Eigen::MatrixXi W_pub = Eigen::MatrixXi::Zero(1, 3);
    W_pub(0, 2) = 1;
    const Eigen::MatrixXd Y_pub = publearn::public_contribution(W_pub, X_pub, 1);
    CHECK((Y_pub.row(0).transpose() - X_pub.col(2)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("ground-truth identity: Y = |private part + Y_pub| rowwise") {
    const SplitSpec split{5, 4, 2, 2};
    const GeneratedData data = generate_dataset(split, 25, 8, 44);
    const Eigen::MatrixXd Y_pub =
        publearn::public_contribution(data.W.pub_block(), data.X_pub(), split.k_pub);
    const Eigen::MatrixXd Y_priv =
        data.W.priv_block().cast<double>() * data.X_priv().transpose() / std::sqrt(2.0);
    CHECK(((Y_priv + Y_pub).cwiseAbs() - data.Y.Y).cwiseAbs().maxCoeff() < 1e-12);
  }
}
