// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/apb.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "bitmm/errors.hpp"
#include "bitmm/kernels.hpp"
#include "bitmm/tensor_io.hpp"

namespace bitmm {

namespace {

inline float sign_of(float v) { return v >= 0.0f ? 1.0f : -1.0f; }  // sign(0) = +1

// Round a double to float with an explicit tie rule. When x sits exactly
// midway between two consecutive floats, go away from or toward zero per the
// flag; otherwise round to nearest as usual.
//
// The pair matters for the split/reconstruct round trip. When a kept weight a
// and the base +-alpha share a binade, the exact difference a - base can land
// exactly halfway between floats; the two nearest sums base + r then both sit
// half an ulp from a, and ties-to-even picks the wrong neighbor for half of
// them. Storing the difference with ties away from zero makes any tie in the
// add-back overshoot in magnitude by exactly half an ulp, so rounding the sum
// with ties toward zero recovers a bit-exactly in every case.
inline float round_with_tie(double x, bool away_from_zero) {
  float near = static_cast<float>(x);  // nearest, ties to even
  double dn = static_cast<double>(near);
  if (dn == x) return near;
  float other = std::nextafterf(near, dn < x ? std::numeric_limits<float>::infinity()
                                             : -std::numeric_limits<float>::infinity());
  double err_near = std::fabs(x - dn);
  double err_other = std::fabs(static_cast<double>(other) - x);
  if (err_near != err_other) return err_near < err_other ? near : other;
  bool near_is_larger = std::fabs(dn) > std::fabs(static_cast<double>(other));
  return (near_is_larger == away_from_zero) ? near : other;
}

}  // namespace

void ApbParams::validate() const {
  if (!(alpha > 0.0f)) throw std::invalid_argument("alpha must be positive");
  if (!(delta >= kDeltaMin)) throw std::invalid_argument("delta must be at least the 1e-8 floor");
  if (!std::isfinite(alpha) || !std::isfinite(delta))
    throw std::invalid_argument("alpha and delta must be finite");
}

DenseMatrix apb_forward(const DenseMatrix& w, const ApbParams& p) {
  p.validate();
  float bound = p.alpha + p.delta;
  DenseMatrix out(w.rows(), w.cols());
  for (std::int64_t r = 0; r < w.rows(); ++r) {
    const float* src = w.row_data(r);
    float* dst = out.row_data(r);
    for (std::int64_t c = 0; c < w.cols(); ++c)
      dst[c] = std::fabs(src[c]) <= bound ? sign_of(src[c]) * p.alpha : src[c];
  }
  return out;
}

BitMatrix chi_B(const DenseMatrix& w, const ApbParams& p, int lane_bits) {
  p.validate();
  float bound = p.alpha + p.delta;
  BitMatrix mask(w.rows(), w.cols(), lane_bits);
  for (std::int64_t r = 0; r < w.rows(); ++r)
    for (std::int64_t c = 0; c < w.cols(); ++c)
      if (std::fabs(w.at(r, c)) <= bound) mask.set_bit(r, c, true);
  return mask;
}

DenseMatrix ste_weight_grad(const DenseMatrix& upstream) { return upstream; }

namespace {

template <typename Term>
double averaged_sum(const DenseMatrix& g, const DenseMatrix& w, const ApbParams& p, Term term) {
  p.validate();
  if (g.rows() != w.rows() || g.cols() != w.cols())
    throw std::invalid_argument("gradient and weight shapes differ");
  std::int64_t n = g.rows() * g.cols();
  if (n == 0) throw std::invalid_argument("empty weight matrix");
  float bound = p.alpha + p.delta;
  double acc = 0.0;
  for (std::int64_t r = 0; r < w.rows(); ++r) {
    const float* gv = g.row_data(r);
    const float* wv = w.row_data(r);
    for (std::int64_t c = 0; c < w.cols(); ++c)
      if (std::fabs(wv[c]) <= bound) acc += term(gv[c], wv[c]);
  }
  return acc / static_cast<double>(n);
}

}  // namespace

double grad_alpha(const DenseMatrix& g, const DenseMatrix& w, const ApbParams& p) {
  return -averaged_sum(g, w, p, [](float gv, float wv) {
    return static_cast<double>(gv) * static_cast<double>(sign_of(wv));
  });
}

double grad_delta(const DenseMatrix& g, const DenseMatrix& w, const ApbParams& p) {
  double alpha = p.alpha;
  double s = averaged_sum(g, w, p, [alpha](float gv, float wv) {
    return static_cast<double>(gv) * static_cast<double>(sign_of(wv)) *
           (alpha - std::fabs(static_cast<double>(wv)));
  });
  return s / static_cast<double>(p.delta);
}

ApbLayer decompose_apb(const DenseMatrix& a, float alpha, int lane_bits) {
  if (!(alpha > 0.0f)) throw std::invalid_argument("alpha must be positive");
  ApbLayer l;
  l.rows = a.rows();
  l.cols = a.cols();
  l.alpha = alpha;
  l.bin = pack_signs(a, lane_bits);
  std::vector<std::uint64_t> row_ptr(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<std::uint64_t> col_idx;
  std::vector<float> vals;
  for (std::int64_t r = 0; r < a.rows(); ++r) {
    const float* src = a.row_data(r);
    for (std::int64_t c = 0; c < a.cols(); ++c) {
      if (std::fabs(src[c]) == alpha) continue;  // binarized entries carry exactly +-alpha
      col_idx.push_back(static_cast<std::uint64_t>(c));
      double diff = static_cast<double>(src[c]) - static_cast<double>(alpha * sign_of(src[c]));
      vals.push_back(round_with_tie(diff, /*away_from_zero=*/true));
    }
    row_ptr[r + 1] = col_idx.size();
  }
  l.residual = CsrMatrix::create(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx),
                                 std::move(vals));
  return l;
}

DenseMatrix reconstruct_apb(const ApbLayer& l) {
  DenseMatrix out(l.rows, l.cols);
  for (std::int64_t r = 0; r < l.rows; ++r)
    for (std::int64_t c = 0; c < l.cols; ++c)
      out.at(r, c) = l.alpha * l.bin.sign_value(r, c);
  for (std::int64_t r = 0; r < l.rows; ++r)
    for (std::uint64_t i = l.residual.row_ptr[r]; i < l.residual.row_ptr[r + 1]; ++i) {
      std::int64_t c = static_cast<std::int64_t>(l.residual.col_idx[i]);
      double sum = static_cast<double>(out.at(r, c)) + static_cast<double>(l.residual.vals[i]);
      out.at(r, c) = round_with_tie(sum, /*away_from_zero=*/false);
    }
  return out;
}

DenseMatrix layer_forward(const ApbLayer& l, const DenseMatrix& b, int threads) {
  DenseMatrix bin_part = gemm_1x32_ref(l.bin, l.alpha, b, threads);
  DenseMatrix res_part = spmm_csr(l.residual, b, threads);
  for (std::int64_t r = 0; r < bin_part.rows(); ++r)
    for (std::int64_t c = 0; c < bin_part.cols(); ++c) bin_part.at(r, c) += res_part.at(r, c);
  return bin_part;
}

MemoryBits memory_bits(std::uint64_t n, std::uint64_t s, std::uint32_t b_v, std::uint32_t b_p) {
  if (s > n) throw std::invalid_argument("full-precision count cannot exceed the weight count");
  if (n == 0) throw std::invalid_argument("weight count must be positive");
  MemoryBits m;
  std::uint64_t per_sparse = static_cast<std::uint64_t>(b_v) + b_p;
  m.exact_bits = (n - s) + s * per_sparse;
  m.approx_bits = n + s * per_sparse;
  m.avg_width_exact = static_cast<double>(m.exact_bits) / static_cast<double>(n);
  m.avg_width_approx = static_cast<double>(m.approx_bits) / static_cast<double>(n);
  return m;
}

std::uint32_t position_bits(std::span<const std::uint64_t> dims) {
  if (dims.empty()) throw std::invalid_argument("at least one dimension required");
  std::uint32_t best = 0;
  for (std::uint64_t k : dims) {
    if (k < 2) throw std::invalid_argument("position dimensions must be at least 2");
    std::uint32_t bits = 1;
    std::uint64_t v = k - 1;
    while (v >>= 1) ++bits;  // floor(log2(k-1)) + 1
    best = std::max(best, bits);
  }
  return best;
}

ApbParams init_alpha_delta(const DenseMatrix& w) {
  std::int64_t n = w.rows() * w.cols();
  if (n == 0) throw std::invalid_argument("empty weight matrix");
  double abs_sum = 0.0, sum = 0.0;
  for (float v : w.data()) {
    abs_sum += std::fabs(static_cast<double>(v));
    sum += static_cast<double>(v);
  }
  double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (float v : w.data()) {
    double d = static_cast<double>(v) - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);  // population variance
  ApbParams p;
  p.alpha = static_cast<float>(abs_sum / static_cast<double>(n));
  p.delta = std::max(static_cast<float>(3.0 * std::sqrt(var)), kDeltaMin);
  return p;
}

void store_apb_layer(const std::string& prefix, const ApbLayer& l) {
  store_tensor(prefix + ".bin.btsr", l.bin);
  store_tensor(prefix + ".res.btsr", l.residual);
  nlohmann::json j;
  j["alpha"] = l.alpha;
  std::ofstream os(prefix + ".json");
  if (!os) throw IoError("cannot open for writing: " + prefix + ".json");
  os << j.dump(2) << "\n";
  if (!os) throw IoError("write failed: " + prefix + ".json");
}

ApbLayer load_apb_layer(const std::string& prefix) {
  ApbLayer l;
  l.bin = load_bit(prefix + ".bin.btsr");
  l.residual = load_csr(prefix + ".res.btsr");
  std::ifstream is(prefix + ".json");
  if (!is) throw IoError("cannot open for reading: " + prefix + ".json");
  nlohmann::json j;
  try {
    is >> j;
    l.alpha = j.at("alpha").get<float>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad sidecar: ") + e.what() + ": " + prefix + ".json");
  }
  if (l.bin.rows() != l.residual.rows || l.bin.cols() != l.residual.cols)
    throw IoError("binary and residual shapes differ: " + prefix);
  l.rows = l.bin.rows();
  l.cols = l.bin.cols();
  return l;
}

}  // namespace bitmm
