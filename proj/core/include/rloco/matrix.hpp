#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rloco {

// Dense row-major matrix of doubles. Kept deliberately small; linear-algebra
// heavy lifting is done through Eigen maps over the raw storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix select_rows(std::span<const int> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      auto src = row(static_cast<std::size_t>(idx[r]));
      std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
  }

  // Copy with column j removed.
  Matrix drop_column(std::size_t j) const {
    if (j >= cols_) throw std::out_of_range("drop_column: bad index");
    Matrix out(rows_, cols_ - 1);
    for (std::size_t i = 0; i < rows_; ++i) {
      std::size_t c = 0;
      for (std::size_t k = 0; k < cols_; ++k) {
        if (k == j) continue;
        out(i, c++) = (*this)(i, k);
      }
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace rloco
