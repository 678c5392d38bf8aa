#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mixrec/errors.hpp"
#include "mixrec/rng.hpp"

namespace mixrec::publearn {

// Weighted second-moment matrix of the public pixel rows:
//   Mt = (1/d) * sum_i (y_i^2 - center) * (r_i r_i^T - I)
// with r_i the i-th row of X_pub. Its expectation under the generative model
// is 2 * a a^T where a is the public part of the selection vector; the
// centering constant only affects the variance, and E[y^2] = 2 minimizes it.
inline Eigen::MatrixXd build_moment_matrix(const Eigen::VectorXd& y,
                                           const Eigen::MatrixXd& X_pub,
                                           double center = 2.0) {
  const Eigen::Index d = X_pub.rows();
  const Eigen::Index n_pub = X_pub.cols();
  if (d == 0) throw std::invalid_argument("build_moment_matrix: d must be >= 1");
  if (y.size() != d)
    throw std::invalid_argument("build_moment_matrix: y length != rows of X_pub");

  const Eigen::VectorXd s = y.array().square() - center;
  Eigen::MatrixXd Mt(n_pub, n_pub);
  // X^T diag(s) X, filled on the upper triangle and mirrored so the result
  // is exactly symmetric in floating point.
  Eigen::MatrixXd Xs = X_pub.array().colwise() * s.array();
  for (Eigen::Index a = 0; a < n_pub; ++a)
    for (Eigen::Index b = a; b < n_pub; ++b)
      Mt(a, b) = Mt(b, a) = X_pub.col(a).dot(Xs.col(b));
  const double trace_shift = s.sum();
  Mt.diagonal().array() -= trace_shift;
  return Mt / static_cast<double>(d);
}

namespace detail {

// Indices of the k largest |v_i|, deterministic under ties (smaller index wins).
inline std::vector<int> top_k_abs(const Eigen::VectorXd& v, int k) {
  std::vector<int> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::fabs(v[a]) > std::fabs(v[b]);
  });
  idx.resize(static_cast<std::size_t>(std::min<Eigen::Index>(k, v.size())));
  return idx;
}

inline Eigen::VectorXd truncate_to_k(const Eigen::VectorXd& v, int k) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (int i : top_k_abs(v, k)) out[i] = v[i];
  return out;
}

}  // namespace detail

// Desk-scale stand-in for the sparse spectral relaxation: truncated power
// iteration v <- normalize(truncate_k(Mt v)) from several random starts plus
// the deterministic start on the k heaviest columns; returns the iterate with
// the largest Rayleigh quotient. Degenerate spectra (e.g. Mt = I) admit many
// maximizers; some valid one is returned.
inline Eigen::VectorXd sparse_top_component(const Eigen::MatrixXd& Mt, int k,
                                            int iters = 100, int restarts = 20) {
  const Eigen::Index n = Mt.rows();
  if (k < 1) throw std::invalid_argument("sparse_top_component: k must be >= 1");
  if (Mt.cols() != n || (Mt - Mt.transpose()).cwiseAbs().maxCoeff() >
                            1e-9 * (1.0 + Mt.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("sparse_top_component: input must be symmetric");

  const auto rayleigh = [&](const Eigen::VectorXd& v) { return v.dot(Mt * v); };

  std::vector<Eigen::VectorXd> starts;
  {  // coordinate-mass start: indicator of the k heaviest columns
    Eigen::VectorXd mass(n);
    for (Eigen::Index j = 0; j < n; ++j) mass[j] = Mt.col(j).norm();
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n);
    for (int i : detail::top_k_abs(mass, k)) v0[i] = 1.0;
    v0.normalize();
    starts.push_back(v0);
  }
  Rng rng(0x70775f31746572ULL);  // fixed internal seed; the routine is deterministic
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.standard_normal();
    v.normalize();
    starts.push_back(v);
  }

  Eigen::VectorXd best = detail::truncate_to_k(starts.front(), k);
  if (best.norm() == 0.0) best = starts.front();
  best.normalize();
  double best_value = rayleigh(best);

  for (const auto& start : starts) {
    Eigen::VectorXd v = start;
    std::vector<int> prev_support;
    for (int t = 0; t < iters; ++t) {
      Eigen::VectorXd w = Mt * v;
      if (w.norm() == 0.0) break;
      std::vector<int> support = detail::top_k_abs(w, k);
      v = detail::truncate_to_k(w, k);
      v.normalize();
      const double value = rayleigh(v);
      if (value > best_value) {
        best_value = value;
        best = v;
      }
      std::sort(support.begin(), support.end());
      if (support == prev_support) break;  // fixed support; converged
      prev_support = std::move(support);
    }
  }
  return best;
}

struct PublicSupport {
  std::vector<int> indices;  // sorted, exactly k_pub of them
};

// Support of the public part of the selection vector behind one synthetic
// image: the k_pub largest-magnitude coordinates of the sparse top component.
inline PublicSupport learn_public_support(const Eigen::VectorXd& y,
                                          const Eigen::MatrixXd& X_pub, int k_pub) {
  const Eigen::Index n_pub = X_pub.cols();
  if (k_pub < 1 || k_pub > n_pub)
    throw std::invalid_argument("learn_public_support: need 1 <= k_pub <= n_pub");
  PublicSupport out;
  if (k_pub == n_pub) {  // forced: there is no choice to make
    out.indices.resize(static_cast<std::size_t>(n_pub));
    std::iota(out.indices.begin(), out.indices.end(), 0);
    return out;
  }
  const Eigen::MatrixXd Mt = build_moment_matrix(y, X_pub, 2.0);
  const Eigen::VectorXd v = sparse_top_component(Mt, k_pub);
  std::vector<int> order = detail::top_k_abs(v, static_cast<int>(n_pub));
  const double boundary = std::fabs(v[order[static_cast<std::size_t>(k_pub - 1)]]);
  const double next = std::fabs(v[order[static_cast<std::size_t>(k_pub)]]);
  if (boundary - next <= 1e-12)
    throw AmbiguousSupportError("learn_public_support: tie at the sparsity boundary");
  out.indices.assign(order.begin(), order.begin() + k_pub);
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

// Y_pub = W_pub X_pub^T / sqrt(k_pub); the public contribution to every
// synthetic image, exactly.
inline Eigen::MatrixXd public_contribution(const Eigen::MatrixXi& W_pub,
                                           const Eigen::MatrixXd& X_pub, int k_pub) {
  if (W_pub.cols() != X_pub.cols())
    throw std::invalid_argument("public_contribution: column count mismatch");
  if (k_pub == 0)
    return Eigen::MatrixXd::Zero(W_pub.rows(), X_pub.rows());
  return (W_pub.cast<double>() * X_pub.transpose()) / std::sqrt(static_cast<double>(k_pub));
}

}  // namespace mixrec::publearn
