// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/transform.hpp"

#include <cmath>
#include <stdexcept>

#include "bitmm/errors.hpp"

namespace bitmm {

DenseMatrix TwoBitMatrix::to_dense() const {
  DenseMatrix d(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) d.at(r, c) = static_cast<float>(level(r, c)) * scale;
  return d;
}

TwoBitMatrix quantize_uniform_2bit(const DenseMatrix& m, float s) {
  if (!(s > 0.0f)) throw std::invalid_argument("quantization step must be positive");
  TwoBitMatrix q;
  q.rows = m.rows();
  q.cols = m.cols();
  q.scale = s;
  q.levels.resize(static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()));
  std::size_t i = 0;
  for (float v : m.data()) {
    long p = std::lround(v / s);  // halves round away from zero
    if (p < 0) p = 0;
    if (p > 3) p = 3;
    q.levels[i++] = static_cast<std::uint8_t>(p);
  }
  return q;
}

DenseMatrix ZeroCentered::to_dense() const {
  DenseMatrix d(q->rows, q->cols);
  for (std::int64_t r = 0; r < q->rows; ++r)
    for (std::int64_t c = 0; c < q->cols; ++c) d.at(r, c) = value(r, c);
  return d;
}

ZeroCentered zero_center(const TwoBitMatrix& q) { return ZeroCentered{&q, 1.5f * q.scale}; }

ThmPlanes decompose_thm(const TwoBitMatrix& q, std::optional<float> gamma, int lane_bits) {
  ThmPlanes p;
  p.t = BitMatrix(q.rows, q.cols, lane_bits);
  p.h = BitMatrix(q.rows, q.cols, lane_bits);
  p.m = BitMatrix(q.rows, q.cols, lane_bits);
  p.scale = q.scale;
  p.gamma = gamma;
  for (std::int64_t r = 0; r < q.rows; ++r) {
    for (std::int64_t c = 0; c < q.cols; ++c) {
      switch (q.level(r, c)) {
        case 0:  // -3/2
          p.m.set_bit(r, c, true);
          break;
        case 1:  // -1/2
          break;
        case 2:  // +1/2
          p.h.set_bit(r, c, true);
          break;
        case 3:  // +3/2
          p.t.set_bit(r, c, true);
          p.m.set_bit(r, c, true);
          break;
        default:
          throw std::invalid_argument("2-bit level out of range");
      }
    }
  }
  return p;
}

TwoBitMatrix recompose_thm(const ThmPlanes& p) {
  p.validate();
  TwoBitMatrix q;
  q.rows = p.rows();
  q.cols = p.cols();
  q.scale = p.scale;
  q.levels.resize(static_cast<std::size_t>(q.rows) * static_cast<std::size_t>(q.cols));
  std::size_t i = 0;
  for (std::int64_t r = 0; r < q.rows; ++r) {
    for (std::int64_t c = 0; c < q.cols; ++c) {
      std::uint8_t level;
      if (p.m.bit(r, c))
        level = p.t.bit(r, c) ? 3 : 0;
      else
        level = p.h.bit(r, c) ? 2 : 1;
      q.levels[i++] = level;
    }
  }
  return q;
}

std::vector<float> row_correction_1x2(const BitMatrix& w_bits, float gamma, float mu) {
  std::vector<float> out(static_cast<std::size_t>(w_bits.rows()));
  for (std::int64_t r = 0; r < w_bits.rows(); ++r) {
    std::int64_t pop = 0;
    for (std::size_t i = 0; i < w_bits.words_per_row(); ++i)
      pop += __builtin_popcountll(w_bits.row_data(r)[i]);
    std::int64_t sign_sum = 2 * pop - w_bits.cols();
    out[r] = gamma * mu * static_cast<float>(sign_sum);
  }
  return out;
}

namespace {

// Sum of centered levels of one plane row in halves of the scale:
// sum_i (2*p_i - 3) = 3*(2*popcount(t) - popcount(m)) + (2*popcount(h) - (n - popcount(m))).
std::int64_t centered_halves_sum(const ThmPlanes& p, std::int64_t r) {
  std::int64_t pt = 0, ph = 0, pm = 0;
  for (std::size_t i = 0; i < p.t.words_per_row(); ++i) {
    pt += __builtin_popcountll(p.t.row_data(r)[i]);
    ph += __builtin_popcountll(p.h.row_data(r)[i]);
    pm += __builtin_popcountll(p.m.row_data(r)[i]);
  }
  return 3 * (2 * pt - pm) + (2 * ph - (p.cols() - pm));
}

}  // namespace

Corrections2x2 corrections_2x2(const ThmPlanes& w, const ThmPlanes& a_packed) {
  if (w.cols() != a_packed.cols())
    throw std::invalid_argument("shared dimension mismatch between operand planes");
  float mu_w = 1.5f * w.scale;
  float mu_a = 1.5f * a_packed.scale;
  Corrections2x2 c;
  c.row_terms.resize(static_cast<std::size_t>(w.rows()));
  c.col_terms.resize(static_cast<std::size_t>(a_packed.rows()));
  // centered sum = scale/2 * halves_sum
  for (std::int64_t r = 0; r < w.rows(); ++r)
    c.row_terms[r] = mu_a * 0.5f * w.scale * static_cast<float>(centered_halves_sum(w, r));
  for (std::int64_t r = 0; r < a_packed.rows(); ++r)
    c.col_terms[r] = mu_w * 0.5f * a_packed.scale * static_cast<float>(centered_halves_sum(a_packed, r));
  c.const_term = static_cast<float>(w.cols()) * mu_w * mu_a;
  return c;
}

}  // namespace bitmm
