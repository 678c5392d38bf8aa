#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "mixrec/core_data.hpp"
#include "mixrec/errors.hpp"

namespace mixrec::gram {

// E[|u||v|] for jointly Gaussian (u, v) with mean zero, common variance `var`
// and correlation `rho`.
inline double folded_moment(double rho, double var) {
  if (var <= 0.0) throw std::invalid_argument("folded_moment: var must be positive");
  if (std::fabs(rho) > 1.0)
    throw std::invalid_argument("folded_moment: |rho| must be <= 1");
  return var * (2.0 / M_PI) *
         (std::sqrt(std::max(0.0, 1.0 - rho * rho)) + rho * std::asin(rho));
}

// Inverse of rho -> folded_moment(rho, var) on [0, 1] by bisection to 1e-10.
// Moments outside the achievable range clamp to the nearest endpoint.
inline double invert_folded_moment(double moment, double var) {
  if (var <= 0.0)
    throw std::invalid_argument("invert_folded_moment: var must be positive");
  if (moment <= folded_moment(0.0, var)) return 0.0;
  if (moment >= folded_moment(1.0, var)) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (folded_moment(mid, var) < moment ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Values that <w_i, w_j> can take: a/k_pub + b/k_priv over all overlap counts.
inline std::vector<double> achievable_grid(const SplitSpec& split) {
  std::vector<double> grid;
  for (int a = 0; a <= split.k_pub; ++a) {
    for (int b = 0; b <= split.k_priv; ++b) {
      double v = 0.0;
      if (split.k_pub > 0) v += static_cast<double>(a) / split.k_pub;
      if (split.k_priv > 0) v += static_cast<double>(b) / split.k_priv;
      grid.push_back(v);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double x, double y) { return std::fabs(x - y) < 1e-12; }),
             grid.end());
  return grid;
}

struct GramEstimate {
  Eigen::MatrixXd M;        // grid-rounded estimate of W W^T
  Eigen::MatrixXd raw;      // pre-rounding estimate
  std::vector<double> grid;
};

// Estimates W W^T from the folded columns of Y in O(m^2 d) arithmetic.
//
// The overlap only enters the folded column distribution through rho^2, so
// the discriminating statistic is the empirical covariance of the squared
// values: E[(y_i^2/var - 1)(y_j^2/var - 1)] = 2 rho_ij^2. Estimating rho via
// E|y_i||y_j| and inverting the folded moment is unbiased too, but its
// sensitivity d moment / d rho vanishes at rho = 0, which at desk-scale d
// misrounds a large fraction of disjoint pairs; the squared-value statistic
// is the score statistic at rho = 0 and keeps every grid gap many standard
// errors wide at the d used by the pipeline.
//
// Each entry is rounded to the nearest achievable grid value, nearest in
// rho^2 (ties toward the smaller value); the diagonal is pinned to norm^2.
inline GramEstimate gram_extract(const SyntheticDataset& data, const SplitSpec& split) {
  split.validate();
  const Eigen::Index m = data.Y.rows();
  const Eigen::Index d = data.Y.cols();
  if (m < 2 || d < 2)
    throw std::invalid_argument("gram_extract: need m >= 2 and d >= 2");
  const double var = split.selection_norm_sq();
  if (var <= 0.0)
    throw std::invalid_argument("gram_extract: split selects no images");

  Eigen::MatrixXd Z = (data.Y.array().square() / var - 1.0).matrix();
  Eigen::MatrixXd T = (Z * Z.transpose()) / static_cast<double>(d);

  GramEstimate out;
  out.grid = achievable_grid(split);
  out.M.resize(m, m);
  out.raw.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.M(i, i) = var;
    out.raw(i, i) = var;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double theta = std::clamp(0.5 * T(i, j), 0.0, 1.0);  // rho^2
      out.raw(i, j) = out.raw(j, i) = var * std::sqrt(theta);
      double best = out.grid.front();
      double best_dist = std::numeric_limits<double>::infinity();
      for (double g : out.grid) {
        const double rho_g = g / var;
        const double dist = std::fabs(theta - rho_g * rho_g);
        if (dist < best_dist - 1e-15) {  // ties keep the smaller grid value
          best_dist = dist;
          best = g;
        }
      }
      out.M(i, j) = out.M(j, i) = best;
    }
  }
  return out;
}

struct PrivateGram {
  Eigen::MatrixXi M;  // symmetric, diagonal 2, off-diagonal in {0,1,2}
};

// M_priv = round(k_priv * (M - W_pub W_pub^T / k_pub)), validated entrywise.
// Any entry off the {0,1,2} lattice or asymmetry means the estimated Gram
// cannot come from a valid mixup matrix.
inline PrivateGram private_gram(const GramEstimate& gram, const Eigen::MatrixXi& W_pub,
                                const SplitSpec& split) {
  split.require_pipeline();
  const Eigen::Index m = gram.M.rows();
  if (gram.M.cols() != m) throw std::invalid_argument("private_gram: M must be square");
  if (W_pub.rows() != m || W_pub.cols() != split.n_pub)
    throw std::invalid_argument("private_gram: W_pub shape mismatch");
  for (Eigen::Index i = 0; i < m; ++i)
    if (W_pub.row(i).sum() != split.k_pub)
      throw std::invalid_argument("private_gram: W_pub rows must have exactly k_pub ones");

  Eigen::MatrixXd pub_part =
      (W_pub.cast<double>() * W_pub.cast<double>().transpose()) / split.k_pub;
  Eigen::MatrixXd real = split.k_priv * (gram.M - pub_part);

  PrivateGram out;
  out.M.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double v = real(i, j);
      const long r = std::lround(v);
      if (std::fabs(v - static_cast<double>(r)) > 0.25)
        throw InconsistentGramError("private_gram: entry off the integer lattice");
      if (r < 0 || r > 2)
        throw InconsistentGramError("private_gram: entry outside {0,1,2}");
      out.M(i, j) = static_cast<int>(r);
    }
    if (out.M(i, i) != 2)
      throw InconsistentGramError("private_gram: diagonal entry != 2");
  }
  if (out.M != out.M.transpose().eval())
    throw InconsistentGramError("private_gram: asymmetric result");
  return out;
}

}  // namespace mixrec::gram
