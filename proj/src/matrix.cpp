#include "imbench/matrix.hpp"

#include <stdexcept>

namespace imbench {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("FeatureMatrix: value count does not match shape");
  }
}

void FeatureMatrix::append_row(std::span<const double> row) {
  if (rows_ == 0 && cols_ == 0) cols_ = row.size();
  if (row.size() != cols_) {
    throw std::invalid_argument("FeatureMatrix: appended row has wrong width");
  }
  values_.insert(values_.end(), row.begin(), row.end());
  ++rows_;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_cols(std::span<const std::size_t> order) const {
  FeatureMatrix out(rows_, order.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < order.size(); ++j) out(r, j) = (*this)(r, order[j]);
  }
  return out;
}

}  // namespace imbench
