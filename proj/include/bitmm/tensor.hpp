// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bitmm {

// Rows of a BitMatrix are padded to a multiple of this many bits so that a
// row always fills whole SIMD registers. Padding bits are kept at zero, which
// makes every mask self-masking: AND-composed terms never pick up tail noise.
inline constexpr int kDefaultLaneBits = 512;

// Shared dimension limit. Kernel accumulators are signed 32-bit; with K
// capped here the worst-case magnitude 9*K + 9*K stays far below 2^31.
inline constexpr std::int64_t kMaxSharedDim = std::int64_t{1} << 20;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::int64_t rows, std::int64_t cols);
  DenseMatrix(std::int64_t rows, std::int64_t cols, std::vector<float> data);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }

  float at(std::int64_t r, std::int64_t c) const { return data_[idx(r, c)]; }
  float& at(std::int64_t r, std::int64_t c) { return data_[idx(r, c)]; }

  const float* row_data(std::int64_t r) const { return data_.data() + r * cols_; }
  float* row_data(std::int64_t r) { return data_.data() + r * cols_; }
  std::span<const float> row(std::int64_t r) const { return {row_data(r), static_cast<std::size_t>(cols_)}; }

  const std::vector<float>& data() const { return data_; }
  bool all_finite() const;

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t idx(std::int64_t r, std::int64_t c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<float> data_;
};

// Row-major bit-packed matrix. Bit i of row r lives in word i/64 at bit
// position i%64, so bit 0 of a word is the first (lowest-index) element.
// A stored bit b encodes the value 2b - 1, i.e. {0,1} -> {-1,+1}.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::int64_t rows, std::int64_t cols, int lane_bits = kDefaultLaneBits);

  // Adopts pre-packed words (rows*words_per_row of them, row-major) and
  // validates that every padding bit is zero.
  static BitMatrix from_words(std::int64_t rows, std::int64_t cols, std::size_t words_per_row,
                              std::vector<std::uint64_t> words);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_per_row_; }

  bool bit(std::int64_t r, std::int64_t i) const {
    return (words_[word_idx(r, i)] >> (i & 63)) & 1u;
  }
  void set_bit(std::int64_t r, std::int64_t i, bool value) {
    std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value)
      words_[word_idx(r, i)] |= mask;
    else
      words_[word_idx(r, i)] &= ~mask;
  }

  // Decoded value of one entry: {0,1} -> {-1,+1}.
  float sign_value(std::int64_t r, std::int64_t i) const { return bit(r, i) ? 1.0f : -1.0f; }

  const std::uint64_t* row_data(std::int64_t r) const {
    return words_.data() + static_cast<std::size_t>(r) * words_per_row_;
  }
  std::uint64_t* row_data(std::int64_t r) {
    return words_.data() + static_cast<std::size_t>(r) * words_per_row_;
  }
  std::span<const std::uint64_t> row(std::int64_t r) const { return {row_data(r), words_per_row_}; }

  const std::vector<std::uint64_t>& words() const { return words_; }
  bool padding_is_zero() const;

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.words_per_row_ == b.words_per_row_ &&
           a.words_ == b.words_;
  }

 private:
  std::size_t word_idx(std::int64_t r, std::int64_t i) const {
    return static_cast<std::size_t>(r) * words_per_row_ + static_cast<std::size_t>(i >> 6);
  }

  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

// Compressed sparse row matrix with strictly increasing column indices per row.
struct CsrMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<std::uint64_t> row_ptr;  // rows + 1 entries, monotone
  std::vector<std::uint64_t> col_idx;  // nnz entries
  std::vector<float> vals;             // nnz entries, finite

  static CsrMatrix create(std::int64_t rows, std::int64_t cols, std::vector<std::uint64_t> row_ptr,
                          std::vector<std::uint64_t> col_idx, std::vector<float> vals);

  std::uint64_t nnz() const { return row_ptr.empty() ? 0 : row_ptr.back(); }
  void validate() const;  // throws std::invalid_argument on any violated invariant
  DenseMatrix to_dense() const;
};

// Ternary bit-plane triple for 2-bit centered operands. Per element exactly
// one of four (t,h,m) states is legal:
//   -3/2 -> (0,0,1)   -1/2 -> (0,0,0)   +1/2 -> (0,1,0)   +3/2 -> (1,0,1)
// so t=1 implies m=1, h=1 implies m=0, and t,h are never both set.
struct ThmPlanes {
  BitMatrix t;
  BitMatrix h;
  BitMatrix m;
  float scale = 1.0f;          // quantization step of the 2-bit operand
  std::optional<float> gamma;  // extra scale when the planes ride along a binary operand

  std::int64_t rows() const { return t.rows(); }
  std::int64_t cols() const { return t.cols(); }

  void validate() const;  // throws InvalidEncoding (see errors.hpp)
};

// Packs the sign pattern of a dense matrix; sign(0) counts as +1.
BitMatrix pack_signs(const DenseMatrix& m, int lane_bits = kDefaultLaneBits);

// Expands a bit matrix to its decoded +-1.0f values.
DenseMatrix unpack_signs(const BitMatrix& b);

// Flips every logical bit while keeping the padding at zero.
BitMatrix complement_mask(const BitMatrix& m);

DenseMatrix transpose(const DenseMatrix& m);

}  // namespace bitmm
