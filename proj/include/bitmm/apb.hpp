// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bitmm/tensor.hpp"

namespace bitmm {

inline constexpr float kDeltaMin = 1e-8f;

struct ApbParams {
  float alpha = 0.0f;  // binarization magnitude, > 0
  float delta = 0.0f;  // interval half-width above alpha, >= kDeltaMin

  void validate() const;  // throws std::invalid_argument
};

// Prune-binarize forward map, elementwise:
//   |w| <= alpha + delta  ->  sign(w) * alpha     (sign(0) = +1)
//   otherwise             ->  w
DenseMatrix apb_forward(const DenseMatrix& w, const ApbParams& p);

// Membership mask of the binarized set: bit = 1 iff |w| <= alpha + delta,
// the direct form of (|w| - alpha) / delta <= 1.
BitMatrix chi_B(const DenseMatrix& w, const ApbParams& p, int lane_bits = kDefaultLaneBits);

// Straight-through weight gradient: the estimator g(x) = x passes the
// upstream gradient through unchanged.
DenseMatrix ste_weight_grad(const DenseMatrix& upstream);

// Parameter gradients, averaged over the n = rows*cols weights:
//   d/dalpha = -(1/n) * sum g * sign(w) * chi
//   d/ddelta = (1/(delta*n)) * sum g * sign(w) * (alpha - |w|) * chi
double grad_alpha(const DenseMatrix& g, const DenseMatrix& w, const ApbParams& p);
double grad_delta(const DenseMatrix& g, const DenseMatrix& w, const ApbParams& p);

// Binary component plus sparse full-precision residual of a forward output.
struct ApbLayer {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  float alpha = 0.0f;
  BitMatrix bin;       // sign pattern, decoded value alpha * sign
  // a_i - alpha*sign(a_i) at the non-binarized positions, rounded to nearest
  // with ties away from zero. reconstruct_apb rounds the add-back with ties
  // toward zero; the pairing makes the round trip reproduce a_i bit-exactly.
  CsrMatrix residual;
};

// Splits a matrix produced by apb_forward. Binarized entries are exactly
// +-alpha there, so membership is recovered by value.
ApbLayer decompose_apb(const DenseMatrix& a, float alpha, int lane_bits = kDefaultLaneBits);

// alpha * sign + residual, the inverse of decompose_apb.
DenseMatrix reconstruct_apb(const ApbLayer& l);

// (binary component) * b + residual * b, the binary part running through the
// masked-addition scheme of gemm_1x32_ref and the residual through spmm_csr.
DenseMatrix layer_forward(const ApbLayer& l, const DenseMatrix& b, int threads = 1);

// Storage model in bits for n weights of which s stay full precision:
//   exact  = (n - s)*1 + s*(b_v + b_p)
//   approx = n + s*(b_v + b_p)
struct MemoryBits {
  std::uint64_t exact_bits = 0;
  std::uint64_t approx_bits = 0;
  double avg_width_exact = 0.0;   // exact_bits / n
  double avg_width_approx = 0.0;  // approx_bits / n
};

MemoryBits memory_bits(std::uint64_t n, std::uint64_t s, std::uint32_t b_v, std::uint32_t b_p);

// Bits needed to address a position in the largest dimension:
//   b_p = max_i floor(log2(k_i - 1)) + 1, each k_i >= 2.
std::uint32_t position_bits(std::span<const std::uint64_t> dims);

// alpha = mean(|w|), delta = 3 * population-std(w), clamped to kDeltaMin.
ApbParams init_alpha_delta(const DenseMatrix& w);

// Stored as <prefix>.bin.btsr + <prefix>.res.btsr + <prefix>.json {"alpha": a}.
void store_apb_layer(const std::string& prefix, const ApbLayer& l);
ApbLayer load_apb_layer(const std::string& prefix);

}  // namespace bitmm
