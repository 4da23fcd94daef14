#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slackwise/types.hpp"

namespace slackwise::linalg {

/// Column-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  std::span<double> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  double frobenius_norm() const;
  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// Square blocking of an n x n matrix into ceil(n/b) block rows and columns.
/// The last block is short when b does not divide n.
class BlockLayout {
 public:
  BlockLayout(std::size_t n, std::size_t b);

  std::size_t n() const { return n_; }
  std::size_t b() const { return b_; }
  std::size_t n_blocks() const { return n_blocks_; }

  std::size_t begin(std::size_t block) const { return block * b_; }
  std::size_t size(std::size_t block) const;
  std::size_t end(std::size_t block) const { return begin(block) + size(block); }
  std::size_t block_of(std::size_t index) const { return index / b_; }

 private:
  std::size_t n_;
  std::size_t b_;
  std::size_t n_blocks_;
};

/// Half-open rectangle of blocks [row_begin, row_end) x [col_begin, col_end).
struct BlockRegion {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;

  bool empty() const { return row_begin >= row_end || col_begin >= col_end; }
  std::size_t block_count() const {
    return empty() ? 0 : (row_end - row_begin) * (col_end - col_begin);
  }
  bool contains(std::size_t bi, std::size_t bj) const {
    return bi >= row_begin && bi < row_end && bj >= col_begin && bj < col_end;
  }
};

/// Deterministic test inputs: SPD for Cholesky, strictly diagonally dominant
/// for LU, general dense for QR.
DenseMatrix generate_test_matrix(DecompositionKind kind, std::size_t n, std::uint64_t seed);

}  // namespace slackwise::linalg
