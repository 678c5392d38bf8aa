#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "mixrec/errors.hpp"

namespace mixrec {

// Binary matrix file: 8-byte magic "MIXMAT01", u64 little-endian row count,
// u64 little-endian column count, then rows*cols IEEE-754 binary64 values,
// little-endian, row-major.
inline constexpr char kMatrixMagic[8] = {'M', 'I', 'X', 'M', 'A', 'T', '0', '1'};

namespace detail {

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
  return r;
}

inline std::uint64_t from_le(std::uint64_t v) { return to_le(v); }

}  // namespace detail

inline void save_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1)
    throw std::invalid_argument("save_matrix: refusing to write an empty matrix");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_matrix: cannot open " + path);
  out.write(kMatrixMagic, 8);
  const std::uint64_t dims[2] = {
      detail::to_le(static_cast<std::uint64_t>(m.rows())),
      detail::to_le(static_cast<std::uint64_t>(m.cols()))};
  out.write(reinterpret_cast<const char*>(dims), 16);
  std::vector<std::uint64_t> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::uint64_t bits;
      const double v = m(i, j);
      std::memcpy(&bits, &v, 8);
      row[static_cast<std::size_t>(j)] = detail::to_le(bits);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * 8));
  }
  if (!out) throw IoError("save_matrix: write failed for " + path);
}

inline Eigen::MatrixXd load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_matrix: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0)
    throw FormatError("load_matrix: bad magic in " + path);
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), 16);
  if (!in) throw FormatError("load_matrix: truncated header in " + path);
  const std::uint64_t rows = detail::from_le(dims[0]);
  const std::uint64_t cols = detail::from_le(dims[1]);
  if (rows < 1 || cols < 1 || rows > (1ULL << 32) || cols > (1ULL << 32))
    throw FormatError("load_matrix: implausible dimensions in " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<std::uint64_t> row(static_cast<std::size_t>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * 8));
    if (!in) throw FormatError("load_matrix: truncated payload in " + path);
    for (std::uint64_t j = 0; j < cols; ++j) {
      const std::uint64_t bits = detail::from_le(row[static_cast<std::size_t>(j)]);
      double v;
      std::memcpy(&v, &bits, 8);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return m;
}

}  // namespace mixrec
