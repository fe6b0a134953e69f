#include "labtrick/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "labtrick/errors.hpp"

namespace labtrick {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data has " + std::to_string(data_.size()) + " values, expected " +
                         std::to_string(rows * cols));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void debug_check_finite([[maybe_unused]] const DenseMatrix& m, [[maybe_unused]] const char* where) {
#ifndef NDEBUG
  if (!m.all_finite()) throw NumericError(0, std::string("non-finite entry after ") + where);
#endif
}

}  // namespace labtrick
