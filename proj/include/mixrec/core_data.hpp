#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mixrec/rng.hpp"

namespace mixrec {

// Public images occupy indices 0..n_pub-1, private images n_pub..n_pub+n_priv-1.
// Every matrix split in the project relies on this convention.
struct SplitSpec {
  int n_pub = 0;
  int n_priv = 0;
  int k_pub = 0;
  int k_priv = 2;

  int n_total() const { return n_pub + n_priv; }

  void validate() const {
    if (n_pub < 0 || n_priv < 0 || k_pub < 0 || k_priv < 0)
      throw std::invalid_argument("SplitSpec: counts must be nonnegative");
    if (k_pub > n_pub)
      throw std::invalid_argument("SplitSpec: k_pub exceeds n_pub");
    if (k_priv > n_priv)
      throw std::invalid_argument("SplitSpec: k_priv exceeds n_priv");
    if (n_total() < 1)
      throw std::invalid_argument("SplitSpec: need at least one image");
  }

  // The full recovery pipeline is specific to mixing exactly two private
  // images; every pipeline entry point rejects anything else up front.
  void require_pipeline() const {
    validate();
    if (k_priv != 2)
      throw std::invalid_argument("pipeline requires k_priv == 2");
    if (k_pub < 1)
      throw std::invalid_argument("pipeline requires k_pub >= 1");
  }

  // Squared norm of any dense selection vector under this split:
  // each nonempty side contributes k * (1/sqrt(k))^2 = 1.
  double selection_norm_sq() const {
    return (k_pub > 0 ? 1.0 : 0.0) + (k_priv > 0 ? 1.0 : 0.0);
  }
};

// d x n matrix of pixel values; column j is image j, row i is pixel i.
struct ImageMatrix {
  Eigen::MatrixXd values;

  int pixels() const { return static_cast<int>(values.rows()); }
  int images() const { return static_cast<int>(values.cols()); }
};

// Sparse mixing coefficients: k_pub public indices weighted 1/sqrt(k_pub)
// and k_priv private indices weighted 1/sqrt(k_priv). Supports are stored
// as sorted local indices (public side in [0,n_pub), private in [0,n_priv)).
struct SelectionVector {
  std::vector<int> pub_support;
  std::vector<int> priv_support;

  Eigen::VectorXd dense(const SplitSpec& split) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(split.n_total());
    if (!pub_support.empty()) {
      const double a = 1.0 / std::sqrt(static_cast<double>(pub_support.size()));
      for (int i : pub_support) {
        if (i < 0 || i >= split.n_pub)
          throw std::invalid_argument("SelectionVector: public index out of range");
        w[i] = a;
      }
    }
    if (!priv_support.empty()) {
      const double b = 1.0 / std::sqrt(static_cast<double>(priv_support.size()));
      for (int i : priv_support) {
        if (i < 0 || i >= split.n_priv)
          throw std::invalid_argument("SelectionVector: private index out of range");
        w[split.n_pub + i] = b;
      }
    }
    return w;
  }
};

// 0/1 support matrix of m selection vectors, with public/private column blocks.
struct MixupMatrix {
  int n_pub = 0;
  int n_priv = 0;
  Eigen::MatrixXi rows;  // m x (n_pub + n_priv)

  int m() const { return static_cast<int>(rows.rows()); }
  Eigen::MatrixXi pub_block() const { return rows.leftCols(n_pub); }
  Eigen::MatrixXi priv_block() const { return rows.rightCols(n_priv); }
};

// m x d matrix of synthetic images (entrywise absolute values, so >= 0),
// plus the split and seed it was generated from.
struct SyntheticDataset {
  Eigen::MatrixXd Y;
  SplitSpec split;
  std::uint64_t seed = 0;
};

inline ImageMatrix sample_image_matrix(int d, int n, std::uint64_t seed) {
  if (d < 1 || n < 1)
    throw std::invalid_argument("sample_image_matrix: dimensions must be >= 1");
  Rng rng = derive_stream(seed, Stream::images);
  ImageMatrix X;
  X.values.resize(d, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) X.values(i, j) = rng.standard_normal();
  return X;
}

// Uniform k_pub-subset of the public side and k_priv-subset of the private
// side. The caller owns the selection stream so that consecutive draws form
// one reproducible sequence.
inline SelectionVector sample_selection_vector(const SplitSpec& split, Rng& rng) {
  split.validate();
  SelectionVector w;
  w.pub_support = rng.sample_subset(split.n_pub, split.k_pub);
  w.priv_support = rng.sample_subset(split.n_priv, split.k_priv);
  return w;
}

// y = |X w| entrywise.
inline Eigen::VectorXd make_synthetic(const ImageMatrix& X, const SelectionVector& w,
                                      const SplitSpec& split) {
  if (X.images() != split.n_total())
    throw std::invalid_argument("make_synthetic: image count does not match split");
  return (X.values * w.dense(split)).cwiseAbs();
}

struct GeneratedData {
  ImageMatrix X;       // ground truth, evaluation only
  MixupMatrix W;       // ground truth, evaluation only
  SyntheticDataset Y;  // the observable dataset

  Eigen::MatrixXd X_pub() const { return X.values.leftCols(W.n_pub); }
  Eigen::MatrixXd X_priv() const { return X.values.rightCols(W.n_priv); }
};

// Draws X once from the image stream and m selection vectors from the
// selection stream, so changing m never perturbs X.
inline GeneratedData generate_dataset(const SplitSpec& split, int d, int m,
                                      std::uint64_t seed) {
  split.validate();
  if (m < 1) throw std::invalid_argument("generate_dataset: m must be >= 1");
  GeneratedData out;
  out.X = sample_image_matrix(d, split.n_total(), seed);
  out.W.n_pub = split.n_pub;
  out.W.n_priv = split.n_priv;
  out.W.rows = Eigen::MatrixXi::Zero(m, split.n_total());
  out.Y.Y.resize(m, d);
  out.Y.split = split;
  out.Y.seed = seed;

  Rng selection_stream = derive_stream(seed, Stream::selections);
  for (int j = 0; j < m; ++j) {
    const SelectionVector w = sample_selection_vector(split, selection_stream);
    for (int i : w.pub_support) out.W.rows(j, i) = 1;
    for (int i : w.priv_support) out.W.rows(j, split.n_pub + i) = 1;
    out.Y.Y.row(j) = make_synthetic(out.X, w, split).transpose();
  }
  return out;
}

}  // namespace mixrec
