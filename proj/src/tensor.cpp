// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bitmm/errors.hpp"

namespace bitmm {

namespace {

void check_dims(std::int64_t rows, std::int64_t cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("matrix dimensions must be non-negative");
}

std::size_t padded_words(std::int64_t cols, int lane_bits) {
  if (lane_bits <= 0 || lane_bits % 64 != 0)
    throw std::invalid_argument("lane_bits must be a positive multiple of 64");
  std::size_t lanes = (static_cast<std::size_t>(cols) + lane_bits - 1) / lane_bits;
  if (cols == 0) lanes = 0;
  return lanes * (static_cast<std::size_t>(lane_bits) / 64);
}

// Bits >= cols of the word holding the last logical column.
std::uint64_t tail_keep_mask(std::int64_t cols) {
  int rem = static_cast<int>(cols & 63);
  return rem == 0 ? ~std::uint64_t{0} : (~std::uint64_t{0} >> (64 - rem));
}

}  // namespace

DenseMatrix::DenseMatrix(std::int64_t rows, std::int64_t cols) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0f);
}

DenseMatrix::DenseMatrix(std::int64_t rows, std::int64_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("dense payload size does not match rows*cols");
  if (!all_finite()) throw std::invalid_argument("dense matrix entries must be finite");
}

bool DenseMatrix::all_finite() const {
  for (float v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

BitMatrix::BitMatrix(std::int64_t rows, std::int64_t cols, int lane_bits)
    : rows_(rows), cols_(cols), words_per_row_(padded_words(cols, lane_bits)) {
  check_dims(rows, cols);
  words_.assign(static_cast<std::size_t>(rows) * words_per_row_, 0);
}

BitMatrix BitMatrix::from_words(std::int64_t rows, std::int64_t cols, std::size_t words_per_row,
                                std::vector<std::uint64_t> words) {
  check_dims(rows, cols);
  if (words_per_row * 64 < static_cast<std::size_t>(cols))
    throw std::invalid_argument("words_per_row too small for the column count");
  if (words.size() != static_cast<std::size_t>(rows) * words_per_row)
    throw std::invalid_argument("bit payload size does not match rows*words_per_row");
  BitMatrix b;
  b.rows_ = rows;
  b.cols_ = cols;
  b.words_per_row_ = words_per_row;
  b.words_ = std::move(words);
  if (!b.padding_is_zero()) throw std::invalid_argument("bit matrix padding must be zero");
  return b;
}

bool BitMatrix::padding_is_zero() const {
  if (rows_ == 0 || words_per_row_ == 0) return true;
  std::size_t full = static_cast<std::size_t>(cols_) / 64;
  std::uint64_t keep = tail_keep_mask(cols_);
  for (std::int64_t r = 0; r < rows_; ++r) {
    const std::uint64_t* w = row_data(r);
    if (full < words_per_row_ && (cols_ & 63) != 0 && (w[full] & ~keep) != 0) return false;
    for (std::size_t i = full + ((cols_ & 63) != 0 ? 1 : 0); i < words_per_row_; ++i)
      if (w[i] != 0) return false;
  }
  return true;
}

CsrMatrix CsrMatrix::create(std::int64_t rows, std::int64_t cols,
                            std::vector<std::uint64_t> row_ptr,
                            std::vector<std::uint64_t> col_idx, std::vector<float> vals) {
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr = std::move(row_ptr);
  m.col_idx = std::move(col_idx);
  m.vals = std::move(vals);
  m.validate();
  return m;
}

void CsrMatrix::validate() const {
  check_dims(rows, cols);
  if (row_ptr.size() != static_cast<std::size_t>(rows) + 1)
    throw std::invalid_argument("csr row_ptr must have rows+1 entries");
  if (row_ptr.front() != 0) throw std::invalid_argument("csr row_ptr must start at 0");
  for (std::size_t r = 0; r + 1 < row_ptr.size(); ++r)
    if (row_ptr[r] > row_ptr[r + 1]) throw std::invalid_argument("csr row_ptr must be monotone");
  if (col_idx.size() != row_ptr.back() || vals.size() != row_ptr.back())
    throw std::invalid_argument("csr payload sizes must match nnz");
  for (std::size_t r = 0; r + 1 < row_ptr.size(); ++r) {
    for (std::uint64_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i) {
      if (col_idx[i] >= static_cast<std::uint64_t>(cols))
        throw std::invalid_argument("csr column index out of range");
      if (i > row_ptr[r] && col_idx[i - 1] >= col_idx[i])
        throw std::invalid_argument("csr column indices must be strictly increasing per row");
    }
  }
  for (float v : vals)
    if (!std::isfinite(v)) throw std::invalid_argument("csr values must be finite");
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::uint64_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i)
      d.at(r, static_cast<std::int64_t>(col_idx[i])) = vals[i];
  return d;
}

void ThmPlanes::validate() const {
  auto same_shape = [&](const BitMatrix& a, const BitMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           a.words_per_row() == b.words_per_row();
  };
  if (!same_shape(t, h) || !same_shape(t, m))
    throw InvalidEncoding("plane shapes differ");
  if (scale <= 0.0f) throw InvalidEncoding("plane scale must be positive");
  if (!t.padding_is_zero() || !h.padding_is_zero() || !m.padding_is_zero())
    throw InvalidEncoding("plane padding must be zero");
  for (std::int64_t r = 0; r < t.rows(); ++r) {
    const std::uint64_t* tw = t.row_data(r);
    const std::uint64_t* hw = h.row_data(r);
    const std::uint64_t* mw = m.row_data(r);
    for (std::size_t i = 0; i < t.words_per_row(); ++i) {
      if ((tw[i] & hw[i]) != 0) throw InvalidEncoding("t and h set on the same element");
      if ((tw[i] & ~mw[i]) != 0) throw InvalidEncoding("t requires m");
      if ((hw[i] & mw[i]) != 0) throw InvalidEncoding("h requires m clear");
    }
  }
}

BitMatrix pack_signs(const DenseMatrix& m, int lane_bits) {
  BitMatrix b(m.rows(), m.cols(), lane_bits);
  for (std::int64_t r = 0; r < m.rows(); ++r) {
    std::uint64_t* w = b.row_data(r);
    const float* src = m.row_data(r);
    for (std::int64_t i = 0; i < m.cols(); ++i)
      if (src[i] >= 0.0f) w[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  return b;
}

DenseMatrix unpack_signs(const BitMatrix& b) {
  DenseMatrix m(b.rows(), b.cols());
  for (std::int64_t r = 0; r < b.rows(); ++r)
    for (std::int64_t i = 0; i < b.cols(); ++i) m.at(r, i) = b.bit(r, i) ? 1.0f : -1.0f;
  return m;
}

BitMatrix complement_mask(const BitMatrix& m) {
  BitMatrix out = m;
  if (m.cols() == 0) return out;
  std::size_t full = static_cast<std::size_t>(m.cols()) / 64;
  std::uint64_t keep = tail_keep_mask(m.cols());
  bool has_tail = (m.cols() & 63) != 0;
  for (std::int64_t r = 0; r < m.rows(); ++r) {
    std::uint64_t* w = out.row_data(r);
    for (std::size_t i = 0; i < full; ++i) w[i] = ~w[i];
    if (has_tail) w[full] = ~w[full] & keep;
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols(), m.rows());
  for (std::int64_t r = 0; r < m.rows(); ++r)
    for (std::int64_t c = 0; c < m.cols(); ++c) t.at(c, r) = m.at(r, c);
  return t;
}

}  // namespace bitmm
