// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bitmm/tensor.hpp"

namespace bitmm {

// Unsigned 2-bit levels p in {0,1,2,3} with value p * scale.
struct TwoBitMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<std::uint8_t> levels;
  float scale = 1.0f;

  std::uint8_t level(std::int64_t r, std::int64_t c) const {
    return levels[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
  DenseMatrix to_dense() const;  // decoded values p * scale
};

// level = clamp(round(value / s), 0, 3), rounding halves away from zero.
TwoBitMatrix quantize_uniform_2bit(const DenseMatrix& m, float s);

// Centered view of 2-bit levels: value (p - 3/2) * scale, offset mu = 1.5 * scale.
struct ZeroCentered {
  const TwoBitMatrix* q = nullptr;
  float mu = 0.0f;

  float value(std::int64_t r, std::int64_t c) const {
    return (static_cast<float>(q->level(r, c)) - 1.5f) * q->scale;
  }
  DenseMatrix to_dense() const;
};

ZeroCentered zero_center(const TwoBitMatrix& q);

// Splits centered 2-bit levels into the ternary planes (t, h, m):
//   level 0 (-3/2) -> (0,0,1)    level 1 (-1/2) -> (0,0,0)
//   level 2 (+1/2) -> (0,1,0)    level 3 (+3/2) -> (1,0,1)
ThmPlanes decompose_thm(const TwoBitMatrix& q, std::optional<float> gamma = std::nullopt,
                        int lane_bits = kDefaultLaneBits);

// Inverse of decompose_thm. Throws InvalidEncoding on inconsistent planes.
TwoBitMatrix recompose_thm(const ThmPlanes& p);

// Per-row constant restoring the uncentered product for a binary x 2-bit
// multiply: row r contributes gamma * mu * sum_i sign(w[r][i]).
std::vector<float> row_correction_1x2(const BitMatrix& w_bits, float gamma, float mu);

// Correction terms restoring the uncentered product for a 2-bit x 2-bit
// multiply. With centered operands wbar (M x K) and abar (K x N):
//   row_terms[r]  = mu_a * sum_k wbar[r][k]
//   col_terms[c]  = mu_w * sum_k abar[k][c]
//   const_term    = K * mu_w * mu_a
// and the full product is centered_product + row + col + const per cell.
struct Corrections2x2 {
  std::vector<float> row_terms;
  std::vector<float> col_terms;
  float const_term = 0.0f;
};

// `w` holds the first operand's planes packed along rows (M x K); `a_packed`
// holds the second operand's planes packed along K per output column, i.e.
// plane row c of `a_packed` is column c of the K x N operand.
Corrections2x2 corrections_2x2(const ThmPlanes& w, const ThmPlanes& a_packed);

}  // namespace bitmm
