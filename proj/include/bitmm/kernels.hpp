// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "bitmm/tensor.hpp"

namespace bitmm {

enum class Routine { ref_dense, k1x1, k1x2, k2x2, spmm, ref_1x32 };

const char* routine_name(Routine r);
Routine parse_routine(const std::string& name);  // throws std::invalid_argument

struct GemmProblem {
  std::int64_t m = 0;
  std::int64_t k = 0;
  std::int64_t n = 0;

  void validate() const;  // all dims > 0, k <= kMaxSharedDim
};

// Dot product of two +-1 rows stored as bit words: n - 2*popcount(u xor v).
// Both rows must carry the same word count with identical zero padding.
std::int64_t dot_binary(std::span<const std::uint64_t> u, std::span<const std::uint64_t> v,
                        std::int64_t n);

// Masked binary multiply: popcount(z) - 2*popcount((x xor y) and z), the
// +-1 dot of x and y restricted to the positions where z is set. The mask's
// zero padding keeps padded positions out of the sum.
std::int64_t mbm(std::span<const std::uint64_t> x, std::span<const std::uint64_t> y,
                 std::span<const std::uint64_t> z);

// Exact triple-loop reference product (k ascending, per-cell double
// accumulation, rounded to f32 once). a is M x K, b is K x N.
DenseMatrix gemm_ref_dense(const DenseMatrix& a, const DenseMatrix& b, int threads = 1);

// Binary x binary product. b_packed holds the second operand packed along K
// per output column: its row c is column c of the logical K x N operand.
// C[r][c] = gamma_a * gamma_b * (K - 2*popcount(a_row xor b_col)).
DenseMatrix gemm_1x1(const BitMatrix& a, const BitMatrix& b_packed, float gamma_a = 1.0f,
                     float gamma_b = 1.0f, int threads = 1);

// Binary x 2-bit product. `a_packed` carries the activation planes packed
// along K per output column with quantization step a_packed.scale. Per cell:
//   C[r][c] = gamma*s*( 3/2*mbm(w,t,m) + 1/2*mbm(w,h,~m) ) + gamma*mu*rowsum(w)
// with mu = 3/2*s. Internally one integer accumulates 3*mbm_t + mbm_h +
// 3*rowsum and converts to real once.
DenseMatrix gemm_1x2(const BitMatrix& w, float gamma, const ThmPlanes& a_packed, int threads = 1);

// 2-bit x 2-bit product via four masked binary multiplies plus row, column
// and constant corrections. `w` is plane-packed along rows (M x K),
// `a_packed` along K per output column. Per cell the integer
//   I = 9*mbm_tt + 3*mbm_th + 3*mbm_ht + mbm_hh + 3*(rw[r] + ca[c]) + 9*K
// converts once as C = s_w*s_a/4 * I.
DenseMatrix gemm_2x2(const ThmPlanes& w, const ThmPlanes& a_packed, int threads = 1);

// Binary x fp32 dot: 2*(sum of a_i where the weight bit is set) - total,
// where total = sum of all a_i (supplied or computed). Exposes the rescaling
// trick that turns a +-1 weighting into masked additions; it performs the
// same number of fp32 additions as a dense dot and is kept as a reference.
double dot_1x32_reference(std::span<const std::uint64_t> w, std::span<const float> a,
                          std::optional<double> total = std::nullopt);

// Row-major binary weights times dense activations through the
// dot_1x32_reference scheme, with column totals hoisted.
DenseMatrix gemm_1x32_ref(const BitMatrix& w, float gamma, const DenseMatrix& b, int threads = 1);

// Sparse x dense product; rows accumulate in col_idx order.
DenseMatrix spmm_csr(const CsrMatrix& a, const DenseMatrix& b, int threads = 1);

// Throughput-peak model for one SIMD port configuration.
//   dense fma routines:  values/cycle = fma_throughput * lane_bits / operand_bits
//   1/1 bitwise:         two updates of lane_bits values per three cycles
//                        (xor+popcount+add on two ports, popcount-bound)
//   1/2, 2/2:            the 1/1 peak divided by the 2x / 8x term costs
struct TppModel {
  double clock_ghz = 1.0;
  double fma_throughput = 2.0;
  int lane_bits = 512;
  int operand_bits = 32;

  void validate() const;  // all positive
};

struct TppEstimate {
  double values_per_cycle = 0.0;
  double cost_ratio_vs_1x1 = 0.0;  // cycles per value relative to the 1/1 kernel
  double updates_per_sec = 0.0;
};

TppEstimate tpp_model(const TppModel& m, Routine r);

}  // namespace bitmm
