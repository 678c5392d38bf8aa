#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mixrec/core_data.hpp"
#include "mixrec/errors.hpp"
#include "mixrec/publearn.hpp"
#include "mixrec/rng.hpp"

// Brute-force reference implementations used only by tests and acceptance
// runs. None of them shares a numerical kernel with the module it checks:
// the gram oracle works from the ground-truth supports, the moment oracle is
// Monte Carlo, the support oracle enumerates subsets, and the sign solver
// refactorizes the normal equations per sign pattern. Hard size bounds; these
// refuse big inputs instead of silently running forever.
namespace mixrec::oracle {

// Exact W W^T of the dense selection vectors: |pub overlap|/k_pub +
// |priv overlap|/k_priv per pair.
inline Eigen::MatrixXd exact_gram(const MixupMatrix& W, const SplitSpec& split) {
  split.validate();
  const int m = W.m();
  Eigen::MatrixXd M(m, m);
  const Eigen::MatrixXi pub = W.pub_block();
  const Eigen::MatrixXi priv = W.priv_block();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double v = 0.0;
      if (split.k_pub > 0)
        v += static_cast<double>(pub.row(i).dot(pub.row(j))) / split.k_pub;
      if (split.k_priv > 0)
        v += static_cast<double>(priv.row(i).dot(priv.row(j))) / split.k_priv;
      M(i, j) = v;
    }
  }
  return M;
}

struct McMoment {
  double mean = 0.0;
  double std_error = 0.0;
};

// Empirical E[|u||v|] over correlated Gaussian pairs.
inline McMoment folded_moment_mc_stats(double rho, double var, long long samples,
                                       std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("folded_moment_mc: samples must be >= 1");
  if (std::fabs(rho) > 1.0 || var <= 0.0)
    throw std::invalid_argument("folded_moment_mc: bad parameters");
  Rng rng = derive_stream(seed, Stream::monte_carlo);
  const double s = std::sqrt(var);
  const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  double sum = 0.0, sum_sq = 0.0;
  for (long long i = 0; i < samples; ++i) {
    const double g1 = rng.standard_normal();
    const double g2 = rng.standard_normal();
    const double u = s * g1;
    const double v = s * (rho * g1 + mix * g2);
    const double x = std::fabs(u) * std::fabs(v);
    sum += x;
    sum_sq += x * x;
  }
  McMoment out;
  out.mean = sum / static_cast<double>(samples);
  const double variance =
      std::max(0.0, sum_sq / static_cast<double>(samples) - out.mean * out.mean);
  out.std_error = std::sqrt(variance / static_cast<double>(samples));
  return out;
}

inline double folded_moment_mc(double rho, double var, long long samples,
                               std::uint64_t seed) {
  return folded_moment_mc_stats(rho, var, samples, seed).mean;
}

// argmax over all k_pub-subsets S of <Mt, u_S u_S^T> with u_S uniform on S.
inline publearn::PublicSupport exhaustive_public_support(const Eigen::MatrixXd& Mt,
                                                         int k_pub) {
  const int n = static_cast<int>(Mt.rows());
  if (n > 12) throw ResourceBoundError("exhaustive_public_support: bounded to n_pub <= 12");
  if (k_pub < 1 || k_pub > n)
    throw std::invalid_argument("exhaustive_public_support: need 1 <= k_pub <= n_pub");

  std::vector<int> choose(static_cast<std::size_t>(k_pub));
  std::iota(choose.begin(), choose.end(), 0);
  std::vector<int> best;
  double best_value = -std::numeric_limits<double>::infinity();
  bool tie = false;
  while (true) {
    double value = 0.0;
    for (int a : choose)
      for (int b : choose) value += Mt(a, b);
    value /= static_cast<double>(k_pub);
    if (value > best_value + 1e-12) {
      best_value = value;
      best = choose;
      tie = false;
    } else if (value > best_value - 1e-12) {
      tie = true;
    }
    int i = k_pub - 1;
    while (i >= 0 && choose[static_cast<std::size_t>(i)] == n - k_pub + i) --i;
    if (i < 0) break;
    ++choose[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k_pub; ++j)
      choose[static_cast<std::size_t>(j)] = choose[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (tie) throw AmbiguousSupportError("exhaustive_public_support: tied maximizers");
  publearn::PublicSupport out;
  out.indices = best;
  return out;
}

// Slow-path hidden-sign solver: plain order over all 2^m sign patterns, a
// fresh normal-equations factorization (eigendecomposition of W^T W) per
// pattern, no incremental updates shared with the fast path.
inline std::vector<Eigen::VectorXd> naive_sign_solver(const Eigen::MatrixXd& W,
                                                      const Eigen::VectorXd& y_pub,
                                                      const Eigen::VectorXd& y, double tol) {
  const int m = static_cast<int>(W.rows());
  const int n = static_cast<int>(W.cols());
  if (m > 12) throw ResourceBoundError("naive_sign_solver: bounded to m <= 12");
  if (m < 1 || n < 1) throw std::invalid_argument("naive_sign_solver: empty system");
  if (y.size() != m || y_pub.size() != m)
    throw std::invalid_argument("naive_sign_solver: column length mismatch");
  if ((y.array() < 0.0).any())
    throw std::invalid_argument("naive_sign_solver: y must be entrywise nonnegative");

  const double zero_eps =
      1e-9 * (1.0 + y.cwiseAbs().maxCoeff() + y_pub.cwiseAbs().maxCoeff());
  std::vector<Eigen::VectorXd> found;
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    Eigen::VectorXd b(m);
    for (int j = 0; j < m; ++j) b[j] = ((mask >> j) & 1 ? -y[j] : y[j]) - y_pub[j];
    const Eigen::MatrixXd gram = W.transpose() * W;  // refactorized every pattern
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    Eigen::VectorXd inv_vals = eig.eigenvalues();
    const double cutoff = 1e-12 * std::max(1.0, inv_vals.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < inv_vals.size(); ++i)
      inv_vals[i] = inv_vals[i] > cutoff ? 1.0 / inv_vals[i] : 0.0;
    const Eigen::VectorXd z = eig.eigenvectors() * inv_vals.asDiagonal() *
                              eig.eigenvectors().transpose() * (W.transpose() * b);
    const Eigen::VectorXd s = W * z + y_pub;
    bool consistent = true;
    for (int j = 0; j < m && consistent; ++j) {
      if (std::fabs(s[j]) <= zero_eps) continue;
      const double want = (mask >> j) & 1 ? -1.0 : 1.0;
      if ((s[j] > 0 ? 1.0 : -1.0) != want) consistent = false;
    }
    if (!consistent) continue;
    if ((s.cwiseAbs() - y).norm() > tol) continue;
    bool duplicate = false;
    for (const auto& prev : found)
      if ((prev - z).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + z.cwiseAbs().maxCoeff())) {
        duplicate = true;
        break;
      }
    if (!duplicate) found.push_back(z);
  }
  return found;
}

}  // namespace mixrec::oracle
