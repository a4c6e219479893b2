// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include "bitmm/simd.hpp"
#include "kernel_backend.hpp"

namespace bitmm {

namespace detail {

const KernelOps& kernel_ops(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return scalar_ops();
    case SimdLevel::avx2:
#ifdef BITMM_HAVE_AVX2
      return avx2_ops();
#else
      break;
#endif
    case SimdLevel::avx512:
#ifdef BITMM_HAVE_AVX512
      return avx512_ops();
#else
      break;
#endif
  }
  return scalar_ops();
}

}  // namespace detail

namespace {

using detail::kernel_ops;

// Splits [0, m) into contiguous row blocks, one per worker. A single worker
// runs inline; any worker count yields bit-identical results because cells
// are computed independently.
template <typename Fn>
void run_row_blocks(std::int64_t m, int threads, const Fn& fn) {
  if (threads < 1) throw std::invalid_argument("thread count must be at least 1");
  std::int64_t nt = std::min<std::int64_t>(threads, std::max<std::int64_t>(m, 1));
  if (nt == 1) {
    fn(0, m);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  std::int64_t chunk = (m + nt - 1) / nt;
  for (std::int64_t t = 0; t < nt; ++t) {
    std::int64_t r0 = t * chunk;
    std::int64_t r1 = std::min(m, r0 + chunk);
    if (r0 >= r1) break;
    pool.emplace_back([&fn, r0, r1] { fn(r0, r1); });
  }
  for (auto& th : pool) th.join();
}

void check_shared_dim(std::int64_t k) {
  if (k > kMaxSharedDim)
    throw std::invalid_argument("shared dimension exceeds the 2^20 accumulator bound");
}

std::size_t words_for(std::int64_t n) { return static_cast<std::size_t>((n + 63) / 64); }

// Per-plane-row popcounts with the dispatched reduction.
std::vector<std::int32_t> row_popcounts(const BitMatrix& b, const detail::KernelOps& ops) {
  std::vector<std::int32_t> out(static_cast<std::size_t>(b.rows()));
  for (std::int64_t r = 0; r < b.rows(); ++r)
    out[r] = static_cast<std::int32_t>(ops.popcount_row(b.row_data(r), b.words_per_row()));
  return out;
}

}  // namespace

const char* routine_name(Routine r) {
  switch (r) {
    case Routine::ref_dense:
      return "ref_dense";
    case Routine::k1x1:
      return "1x1";
    case Routine::k1x2:
      return "1x2";
    case Routine::k2x2:
      return "2x2";
    case Routine::spmm:
      return "spmm";
    case Routine::ref_1x32:
      return "1x32_ref";
  }
  return "unknown";
}

Routine parse_routine(const std::string& name) {
  if (name == "ref_dense") return Routine::ref_dense;
  if (name == "1x1") return Routine::k1x1;
  if (name == "1x2") return Routine::k1x2;
  if (name == "2x2") return Routine::k2x2;
  if (name == "spmm") return Routine::spmm;
  if (name == "1x32_ref") return Routine::ref_1x32;
  throw std::invalid_argument("unknown routine: " + name);
}

void GemmProblem::validate() const {
  if (m <= 0 || k <= 0 || n <= 0) throw std::invalid_argument("gemm dimensions must be positive");
  check_shared_dim(k);
}

std::int64_t dot_binary(std::span<const std::uint64_t> u, std::span<const std::uint64_t> v,
                        std::int64_t n) {
  if (u.size() != v.size()) throw std::invalid_argument("bit row word counts differ");
  if (n < 0 || words_for(n) > u.size())
    throw std::invalid_argument("logical length does not fit the row words");
  if (u.empty()) return 0;
  std::int32_t x = 0;
  kernel_ops(active_simd_level()).xor_popcount_many(u.data(), v.data(), u.size(), 1, &x);
  return n - 2 * static_cast<std::int64_t>(x);
}

std::int64_t mbm(std::span<const std::uint64_t> x, std::span<const std::uint64_t> y,
                 std::span<const std::uint64_t> z) {
  if (x.size() != y.size() || x.size() != z.size())
    throw std::invalid_argument("bit row word counts differ");
  if (x.empty()) return 0;
  const auto& ops = kernel_ops(active_simd_level());
  std::int64_t active = ops.popcount_row(z.data(), z.size());
  std::int64_t flipped = ops.mbm_row(x.data(), y.data(), z.data(), x.size());
  return active - 2 * flipped;
}

DenseMatrix gemm_ref_dense(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  if (a.cols() != b.rows()) throw std::invalid_argument("gemm dimension mismatch");
  GemmProblem{a.rows(), a.cols(), b.cols()}.validate();
  DenseMatrix c(a.rows(), b.cols());
  std::int64_t k = a.cols(), n = b.cols();
  run_row_blocks(a.rows(), threads, [&](std::int64_t r0, std::int64_t r1) {
    std::vector<double> acc(static_cast<std::size_t>(n));
    for (std::int64_t r = r0; r < r1; ++r) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::int64_t kk = 0; kk < k; ++kk) {
        double av = a.at(r, kk);
        const float* brow = b.row_data(kk);
        for (std::int64_t c2 = 0; c2 < n; ++c2) acc[c2] += av * static_cast<double>(brow[c2]);
      }
      float* crow = c.row_data(r);
      for (std::int64_t c2 = 0; c2 < n; ++c2) crow[c2] = static_cast<float>(acc[c2]);
    }
  });
  return c;
}

DenseMatrix gemm_1x1(const BitMatrix& a, const BitMatrix& b_packed, float gamma_a, float gamma_b,
                     int threads) {
  if (a.cols() != b_packed.cols() || a.words_per_row() != b_packed.words_per_row())
    throw std::invalid_argument("gemm dimension mismatch (packed rows must share K and padding)");
  GemmProblem{a.rows(), a.cols(), b_packed.rows()}.validate();
  const auto& ops = kernel_ops(active_simd_level());
  std::int64_t k = a.cols(), n = b_packed.rows();
  float scale = gamma_a * gamma_b;
  DenseMatrix c(a.rows(), n);
  run_row_blocks(a.rows(), threads, [&](std::int64_t r0, std::int64_t r1) {
    std::vector<std::int32_t> xors(static_cast<std::size_t>(n));
    for (std::int64_t r = r0; r < r1; ++r) {
      ops.xor_popcount_many(a.row_data(r), b_packed.row_data(0), a.words_per_row(), n,
                            xors.data());
      float* crow = c.row_data(r);
      for (std::int64_t c2 = 0; c2 < n; ++c2)
        crow[c2] = scale * static_cast<float>(k - 2 * static_cast<std::int64_t>(xors[c2]));
    }
  });
  return c;
}

DenseMatrix gemm_1x2(const BitMatrix& w, float gamma, const ThmPlanes& a_packed, int threads) {
  a_packed.validate();
  if (w.cols() != a_packed.cols() || w.words_per_row() != a_packed.t.words_per_row())
    throw std::invalid_argument("gemm dimension mismatch (packed rows must share K and padding)");
  GemmProblem{w.rows(), w.cols(), a_packed.rows()}.validate();
  const auto& ops = kernel_ops(active_simd_level());
  std::int64_t k = w.cols(), n = a_packed.rows();
  std::size_t wpr = w.words_per_row();
  float half_scale = 0.5f * gamma * a_packed.scale * a_packed.gamma.value_or(1.0f);

  std::vector<std::int32_t> pcm = row_popcounts(a_packed.m, ops);
  // 3 * sum of signs per weight row folds the uncentered correction into the
  // same integer as the centered planes product.
  std::vector<std::int32_t> row_corr(static_cast<std::size_t>(w.rows()));
  for (std::int64_t r = 0; r < w.rows(); ++r) {
    std::int64_t pop = ops.popcount_row(w.row_data(r), wpr);
    row_corr[r] = static_cast<std::int32_t>(3 * (2 * pop - k));
  }

  DenseMatrix c(w.rows(), n);
  run_row_blocks(w.rows(), threads, [&](std::int64_t r0, std::int64_t r1) {
    std::vector<std::int32_t> dt(static_cast<std::size_t>(n)), dh(static_cast<std::size_t>(n));
    for (std::int64_t r = r0; r < r1; ++r) {
      ops.mbm2_many(w.row_data(r), a_packed.t.row_data(0), a_packed.h.row_data(0),
                    a_packed.m.row_data(0), wpr, n, dt.data(), dh.data());
      float* crow = c.row_data(r);
      for (std::int64_t c2 = 0; c2 < n; ++c2) {
        std::int32_t mbm_t = pcm[c2] - 2 * dt[c2];
        std::int32_t mbm_h =
            static_cast<std::int32_t>(k) - pcm[c2] - 2 * dh[c2];
        std::int32_t units = 3 * mbm_t + mbm_h + row_corr[r];
        crow[c2] = half_scale * static_cast<float>(units);
      }
    }
  });
  return c;
}

DenseMatrix gemm_2x2(const ThmPlanes& w, const ThmPlanes& a_packed, int threads) {
  w.validate();
  a_packed.validate();
  if (w.cols() != a_packed.cols() || w.t.words_per_row() != a_packed.t.words_per_row())
    throw std::invalid_argument("gemm dimension mismatch (packed rows must share K and padding)");
  GemmProblem{w.rows(), w.cols(), a_packed.rows()}.validate();
  const auto& ops = kernel_ops(active_simd_level());
  std::int64_t k = w.cols(), n = a_packed.rows();
  std::size_t wpr = w.t.words_per_row();
  float quarter_scale = 0.25f * w.scale * a_packed.scale * w.gamma.value_or(1.0f) *
                        a_packed.gamma.value_or(1.0f);

  std::vector<std::int32_t> pc_tw = row_popcounts(w.t, ops);
  std::vector<std::int32_t> pc_hw = row_popcounts(w.h, ops);
  std::vector<std::int32_t> pc_mw = row_popcounts(w.m, ops);
  std::vector<std::int32_t> pc_ta = row_popcounts(a_packed.t, ops);
  std::vector<std::int32_t> pc_ha = row_popcounts(a_packed.h, ops);
  std::vector<std::int32_t> pc_ma = row_popcounts(a_packed.m, ops);

  // Centered row sums in halves of the scale: sum_i (2p - 3).
  auto halves = [k](std::int32_t pt, std::int32_t ph, std::int32_t pm) {
    return 3 * (2 * pt - pm) + (2 * ph - (static_cast<std::int32_t>(k) - pm));
  };
  std::vector<std::int32_t> rw(static_cast<std::size_t>(w.rows()));
  for (std::int64_t r = 0; r < w.rows(); ++r) rw[r] = halves(pc_tw[r], pc_hw[r], pc_mw[r]);
  std::vector<std::int32_t> ca(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) ca[r] = halves(pc_ta[r], pc_ha[r], pc_ma[r]);

  DenseMatrix c(w.rows(), n);
  std::int32_t k32 = static_cast<std::int32_t>(k);
  run_row_blocks(w.rows(), threads, [&](std::int64_t r0, std::int64_t r1) {
    std::size_t un = static_cast<std::size_t>(n);
    std::vector<std::int32_t> pmm(un), dtt(un), dth(un), dht(un), dhh(un);
    for (std::int64_t r = r0; r < r1; ++r) {
      ops.mbm4_many(w.t.row_data(r), w.h.row_data(r), w.m.row_data(r), a_packed.t.row_data(0),
                    a_packed.h.row_data(0), a_packed.m.row_data(0), wpr, n, pmm.data(),
                    dtt.data(), dth.data(), dht.data(), dhh.data());
      float* crow = c.row_data(r);
      std::int32_t pmw = pc_mw[r];
      for (std::int64_t c2 = 0; c2 < n; ++c2) {
        std::int32_t pma = pc_ma[c2];
        std::int32_t mbm_tt = pmm[c2] - 2 * dtt[c2];
        std::int32_t mbm_th = (pmw - pmm[c2]) - 2 * dth[c2];
        std::int32_t mbm_ht = (pma - pmm[c2]) - 2 * dht[c2];
        std::int32_t mbm_hh = (k32 - pmw - pma + pmm[c2]) - 2 * dhh[c2];
        std::int32_t units = 9 * mbm_tt + 3 * (mbm_th + mbm_ht) + mbm_hh +
                             3 * (rw[r] + ca[c2]) + 9 * k32;
        crow[c2] = quarter_scale * static_cast<float>(units);
      }
    }
  });
  return c;
}

double dot_1x32_reference(std::span<const std::uint64_t> w, std::span<const float> a,
                          std::optional<double> total) {
  std::int64_t n = static_cast<std::int64_t>(a.size());
  if (words_for(n) > w.size())
    throw std::invalid_argument("bit row too short for the dense operand");
  double t = 0.0;
  if (total) {
    t = *total;
  } else {
    for (float v : a) t += v;
  }
  double positive = 0.0;
  for (std::size_t wi = 0; wi < words_for(n); ++wi) {
    std::uint64_t word = w[wi];
    while (word) {
      int bit = __builtin_ctzll(word);
      positive += a[wi * 64 + static_cast<std::size_t>(bit)];
      word &= word - 1;
    }
  }
  return 2.0 * positive - t;
}

DenseMatrix gemm_1x32_ref(const BitMatrix& w, float gamma, const DenseMatrix& b, int threads) {
  if (w.cols() != b.rows()) throw std::invalid_argument("gemm dimension mismatch");
  GemmProblem{w.rows(), w.cols(), b.cols()}.validate();
  std::int64_t k = w.cols(), n = b.cols();
  // Double accumulation: the 2*acc - total rescale cancels catastrophically in
  // f32 at large K, and this routine serves as a reference.
  std::vector<double> totals(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t kk = 0; kk < k; ++kk) {
    const float* brow = b.row_data(kk);
    for (std::int64_t c2 = 0; c2 < n; ++c2) totals[c2] += brow[c2];
  }
  DenseMatrix c(w.rows(), n);
  run_row_blocks(w.rows(), threads, [&](std::int64_t r0, std::int64_t r1) {
    std::vector<double> acc(static_cast<std::size_t>(n));
    for (std::int64_t r = r0; r < r1; ++r) {
      std::fill(acc.begin(), acc.end(), 0.0);
      const std::uint64_t* words = w.row_data(r);
      for (std::size_t wi = 0; wi < w.words_per_row(); ++wi) {
        std::uint64_t word = words[wi];
        while (word) {
          int bit = __builtin_ctzll(word);
          const float* brow = b.row_data(static_cast<std::int64_t>(wi * 64) + bit);
          for (std::int64_t c2 = 0; c2 < n; ++c2) acc[c2] += brow[c2];
          word &= word - 1;
        }
      }
      float* crow = c.row_data(r);
      for (std::int64_t c2 = 0; c2 < n; ++c2)
        crow[c2] = static_cast<float>(gamma * (2.0 * acc[c2] - totals[c2]));
    }
  });
  return c;
}

DenseMatrix spmm_csr(const CsrMatrix& a, const DenseMatrix& b, int threads) {
  if (a.cols != b.rows()) throw std::invalid_argument("gemm dimension mismatch");
  if (a.rows <= 0 || b.cols() <= 0 || a.cols <= 0)
    throw std::invalid_argument("gemm dimensions must be positive");
  check_shared_dim(a.cols);
  std::int64_t n = b.cols();
  DenseMatrix c(a.rows, n);
  run_row_blocks(a.rows, threads, [&](std::int64_t r0, std::int64_t r1) {
    for (std::int64_t r = r0; r < r1; ++r) {
      float* crow = c.row_data(r);
      for (std::uint64_t i = a.row_ptr[r]; i < a.row_ptr[r + 1]; ++i) {
        float v = a.vals[i];
        const float* brow = b.row_data(static_cast<std::int64_t>(a.col_idx[i]));
        for (std::int64_t c2 = 0; c2 < n; ++c2) crow[c2] += v * brow[c2];
      }
    }
  });
  return c;
}

void TppModel::validate() const {
  if (!(clock_ghz > 0.0) || !(fma_throughput > 0.0) || lane_bits <= 0 || operand_bits <= 0)
    throw std::invalid_argument("throughput model parameters must be positive");
}

TppEstimate tpp_model(const TppModel& m, Routine r) {
  m.validate();
  // One xor, one popcount and one accumulate per register retire two updates
  // of lane_bits values every three cycles on the two relevant ports.
  double peak_1x1 = 2.0 * static_cast<double>(m.lane_bits) / 3.0;
  TppEstimate e;
  switch (r) {
    case Routine::k1x1:
      e.values_per_cycle = peak_1x1;
      break;
    case Routine::k1x2:
      e.values_per_cycle = peak_1x1 / 2.0;
      break;
    case Routine::k2x2:
      e.values_per_cycle = peak_1x1 / 8.0;
      break;
    case Routine::ref_dense:
    case Routine::spmm:
    case Routine::ref_1x32:
      e.values_per_cycle =
          m.fma_throughput * static_cast<double>(m.lane_bits) / static_cast<double>(m.operand_bits);
      break;
  }
  e.cost_ratio_vs_1x1 = peak_1x1 / e.values_per_cycle;
  e.updates_per_sec = m.clock_ghz * 1e9 * e.values_per_cycle;
  return e;
}

}  // namespace bitmm
