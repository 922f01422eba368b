#pragma once

#include <cstddef>

#include "wimax60/dsp.hpp"

namespace wimax60 {

// Row-major [symbol k][subcarrier q] matrix of complex values.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool same_shape(const ComplexGrid& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  cplx& operator()(std::size_t k, std::size_t q) { return data_[k * cols_ + q]; }
  const cplx& operator()(std::size_t k, std::size_t q) const { return data_[k * cols_ + q]; }

  std::span<cplx> row(std::size_t k) { return {data_.data() + k * cols_, cols_}; }
  std::span<const cplx> row(std::size_t k) const { return {data_.data() + k * cols_, cols_}; }

  const CVec& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVec data_;
};

}  // namespace wimax60
