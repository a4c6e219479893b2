// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifdef BITMM_HAVE_AVX512

#include <immintrin.h>

#include "kernel_backend.hpp"

namespace bitmm::detail {

namespace {

// vpternlogq immediates, bit index (a << 2) | (b << 1) | c:
//   0x28 = (a ^ b) & c      0x14 = (a ^ b) & ~c
//   0x80 = a & b & c        0x40 = a & b & ~c
//   0x20 = a & ~b & c       0x10 = a & ~b & ~c

inline __m512i load(const std::uint64_t* p) { return _mm512_loadu_si512(p); }

std::int64_t popcount_row(const std::uint64_t* x, std::size_t w) {
  __m512i acc = _mm512_setzero_si512();
  std::size_t i = 0;
  for (; i + 8 <= w; i += 8) acc = _mm512_add_epi64(acc, _mm512_popcnt_epi64(load(x + i)));
  std::int64_t total = _mm512_reduce_add_epi64(acc);
  for (; i < w; ++i) total += __builtin_popcountll(x[i]);
  return total;
}

void xor_popcount_many(const std::uint64_t* a, const std::uint64_t* b, std::size_t wpr,
                       std::int64_t n, std::int32_t* out) {
  for (std::int64_t c = 0; c < n; ++c) {
    const std::uint64_t* bc = b + static_cast<std::size_t>(c) * wpr;
    __m512i acc = _mm512_setzero_si512();
    std::size_t i = 0;
    for (; i + 8 <= wpr; i += 8)
      acc = _mm512_add_epi64(
          acc, _mm512_popcnt_epi64(_mm512_xor_si512(load(a + i), load(bc + i))));
    std::int64_t total = _mm512_reduce_add_epi64(acc);
    for (; i < wpr; ++i) total += __builtin_popcountll(a[i] ^ bc[i]);
    out[c] = static_cast<std::int32_t>(total);
  }
}

std::int64_t mbm_row(const std::uint64_t* x, const std::uint64_t* y, const std::uint64_t* z,
                     std::size_t w) {
  __m512i acc = _mm512_setzero_si512();
  std::size_t i = 0;
  for (; i + 8 <= w; i += 8) {
    __m512i d = _mm512_ternarylogic_epi64(load(x + i), load(y + i), load(z + i), 0x28);
    acc = _mm512_add_epi64(acc, _mm512_popcnt_epi64(d));
  }
  std::int64_t total = _mm512_reduce_add_epi64(acc);
  for (; i < w; ++i) total += __builtin_popcountll((x[i] ^ y[i]) & z[i]);
  return total;
}

void mbm2_many(const std::uint64_t* w, const std::uint64_t* t, const std::uint64_t* h,
               const std::uint64_t* m, std::size_t wpr, std::int64_t n, std::int32_t* dt,
               std::int32_t* dh) {
  for (std::int64_t c = 0; c < n; ++c) {
    std::size_t off = static_cast<std::size_t>(c) * wpr;
    const std::uint64_t* tc = t + off;
    const std::uint64_t* hc = h + off;
    const std::uint64_t* mc = m + off;
    __m512i at = _mm512_setzero_si512();
    __m512i ah = _mm512_setzero_si512();
    std::size_t i = 0;
    for (; i + 8 <= wpr; i += 8) {
      __m512i wv = load(w + i);
      __m512i mv = load(mc + i);
      __m512i vt = _mm512_ternarylogic_epi64(wv, load(tc + i), mv, 0x28);
      __m512i vh = _mm512_ternarylogic_epi64(wv, load(hc + i), mv, 0x14);
      at = _mm512_add_epi64(at, _mm512_popcnt_epi64(vt));
      ah = _mm512_add_epi64(ah, _mm512_popcnt_epi64(vh));
    }
    std::int64_t st = _mm512_reduce_add_epi64(at);
    std::int64_t sh = _mm512_reduce_add_epi64(ah);
    for (; i < wpr; ++i) {
      st += __builtin_popcountll((w[i] ^ tc[i]) & mc[i]);
      sh += __builtin_popcountll((w[i] ^ hc[i]) & ~mc[i]);
    }
    dt[c] = static_cast<std::int32_t>(st);
    dh[c] = static_cast<std::int32_t>(sh);
  }
}

void mbm4_many(const std::uint64_t* tw, const std::uint64_t* hw, const std::uint64_t* mw,
               const std::uint64_t* t, const std::uint64_t* h, const std::uint64_t* m,
               std::size_t wpr, std::int64_t n, std::int32_t* pmm, std::int32_t* dtt,
               std::int32_t* dth, std::int32_t* dht, std::int32_t* dhh) {
  for (std::int64_t c = 0; c < n; ++c) {
    std::size_t off = static_cast<std::size_t>(c) * wpr;
    const std::uint64_t* tc = t + off;
    const std::uint64_t* hc = h + off;
    const std::uint64_t* mc = m + off;
    __m512i amm = _mm512_setzero_si512();
    __m512i att = _mm512_setzero_si512();
    __m512i ath = _mm512_setzero_si512();
    __m512i aht = _mm512_setzero_si512();
    __m512i ahh = _mm512_setzero_si512();
    std::size_t i = 0;
    for (; i + 8 <= wpr; i += 8) {
      __m512i twv = load(tw + i);
      __m512i hwv = load(hw + i);
      __m512i mwv = load(mw + i);
      __m512i tcv = load(tc + i);
      __m512i hcv = load(hc + i);
      __m512i mcv = load(mc + i);
      amm = _mm512_add_epi64(amm, _mm512_popcnt_epi64(_mm512_and_si512(mwv, mcv)));
      __m512i x1 = _mm512_xor_si512(twv, tcv);
      att = _mm512_add_epi64(
          att, _mm512_popcnt_epi64(_mm512_ternarylogic_epi64(x1, mwv, mcv, 0x80)));
      __m512i x2 = _mm512_xor_si512(twv, hcv);
      ath = _mm512_add_epi64(
          ath, _mm512_popcnt_epi64(_mm512_ternarylogic_epi64(x2, mwv, mcv, 0x40)));
      __m512i x3 = _mm512_xor_si512(hwv, tcv);
      aht = _mm512_add_epi64(
          aht, _mm512_popcnt_epi64(_mm512_ternarylogic_epi64(x3, mwv, mcv, 0x20)));
      __m512i x4 = _mm512_xor_si512(hwv, hcv);
      ahh = _mm512_add_epi64(
          ahh, _mm512_popcnt_epi64(_mm512_ternarylogic_epi64(x4, mwv, mcv, 0x10)));
    }
    std::int64_t smm = _mm512_reduce_add_epi64(amm);
    std::int64_t stt = _mm512_reduce_add_epi64(att);
    std::int64_t sth = _mm512_reduce_add_epi64(ath);
    std::int64_t sht = _mm512_reduce_add_epi64(aht);
    std::int64_t shh = _mm512_reduce_add_epi64(ahh);
    for (; i < wpr; ++i) {
      std::uint64_t both = mw[i] & mc[i];
      smm += __builtin_popcountll(both);
      stt += __builtin_popcountll((tw[i] ^ tc[i]) & both);
      sth += __builtin_popcountll((tw[i] ^ hc[i]) & mw[i] & ~mc[i]);
      sht += __builtin_popcountll((hw[i] ^ tc[i]) & ~mw[i] & mc[i]);
      shh += __builtin_popcountll((hw[i] ^ hc[i]) & ~(mw[i] | mc[i]));
    }
    pmm[c] = static_cast<std::int32_t>(smm);
    dtt[c] = static_cast<std::int32_t>(stt);
    dth[c] = static_cast<std::int32_t>(sth);
    dht[c] = static_cast<std::int32_t>(sht);
    dhh[c] = static_cast<std::int32_t>(shh);
  }
}

}  // namespace

const KernelOps& avx512_ops() {
  static const KernelOps ops{"avx512", popcount_row, xor_popcount_many,
                             mbm_row,  mbm2_many,    mbm4_many};
  return ops;
}

}  // namespace bitmm::detail

#endif  // BITMM_HAVE_AVX512
