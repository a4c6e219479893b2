// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifdef BITMM_HAVE_AVX2

#include <immintrin.h>

#include "kernel_backend.hpp"

namespace bitmm::detail {

namespace {

// Nibble-lookup byte popcount summed into the four 64-bit lanes.
inline __m256i popcount256(__m256i v) {
  const __m256i lookup =
      _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1,
                       2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i lo = _mm256_and_si256(v, low_mask);
  __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
  return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

inline std::int64_t reduce256(__m256i acc) {
  return _mm256_extract_epi64(acc, 0) + _mm256_extract_epi64(acc, 1) +
         _mm256_extract_epi64(acc, 2) + _mm256_extract_epi64(acc, 3);
}

inline __m256i load(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

std::int64_t popcount_row(const std::uint64_t* x, std::size_t w) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= w; i += 4) acc = _mm256_add_epi64(acc, popcount256(load(x + i)));
  std::int64_t total = reduce256(acc);
  for (; i < w; ++i) total += __builtin_popcountll(x[i]);
  return total;
}

void xor_popcount_many(const std::uint64_t* a, const std::uint64_t* b, std::size_t wpr,
                       std::int64_t n, std::int32_t* out) {
  for (std::int64_t c = 0; c < n; ++c) {
    const std::uint64_t* bc = b + static_cast<std::size_t>(c) * wpr;
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= wpr; i += 4)
      acc = _mm256_add_epi64(acc, popcount256(_mm256_xor_si256(load(a + i), load(bc + i))));
    std::int64_t total = reduce256(acc);
    for (; i < wpr; ++i) total += __builtin_popcountll(a[i] ^ bc[i]);
    out[c] = static_cast<std::int32_t>(total);
  }
}

std::int64_t mbm_row(const std::uint64_t* x, const std::uint64_t* y, const std::uint64_t* z,
                     std::size_t w) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= w; i += 4) {
    __m256i d = _mm256_and_si256(_mm256_xor_si256(load(x + i), load(y + i)), load(z + i));
    acc = _mm256_add_epi64(acc, popcount256(d));
  }
  std::int64_t total = reduce256(acc);
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
    __m256i at = _mm256_setzero_si256();
    __m256i ah = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= wpr; i += 4) {
      __m256i wv = load(w + i);
      __m256i mv = load(mc + i);
      __m256i vt = _mm256_and_si256(_mm256_xor_si256(wv, load(tc + i)), mv);
      __m256i vh = _mm256_andnot_si256(mv, _mm256_xor_si256(wv, load(hc + i)));
      at = _mm256_add_epi64(at, popcount256(vt));
      ah = _mm256_add_epi64(ah, popcount256(vh));
    }
    std::int64_t st = reduce256(at);
    std::int64_t sh = reduce256(ah);
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
    __m256i amm = _mm256_setzero_si256();
    __m256i att = _mm256_setzero_si256();
    __m256i ath = _mm256_setzero_si256();
    __m256i aht = _mm256_setzero_si256();
    __m256i ahh = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= wpr; i += 4) {
      __m256i twv = load(tw + i);
      __m256i hwv = load(hw + i);
      __m256i mwv = load(mw + i);
      __m256i tcv = load(tc + i);
      __m256i hcv = load(hc + i);
      __m256i mcv = load(mc + i);
      __m256i both = _mm256_and_si256(mwv, mcv);
      __m256i wonly = _mm256_andnot_si256(mcv, mwv);
      __m256i conly = _mm256_andnot_si256(mwv, mcv);
      __m256i neither = _mm256_andnot_si256(_mm256_or_si256(mwv, mcv), _mm256_set1_epi64x(-1));
      amm = _mm256_add_epi64(amm, popcount256(both));
      att = _mm256_add_epi64(att, popcount256(_mm256_and_si256(_mm256_xor_si256(twv, tcv), both)));
      ath = _mm256_add_epi64(ath, popcount256(_mm256_and_si256(_mm256_xor_si256(twv, hcv), wonly)));
      aht = _mm256_add_epi64(aht, popcount256(_mm256_and_si256(_mm256_xor_si256(hwv, tcv), conly)));
      ahh = _mm256_add_epi64(ahh, popcount256(_mm256_and_si256(_mm256_xor_si256(hwv, hcv), neither)));
    }
    std::int64_t smm = reduce256(amm);
    std::int64_t stt = reduce256(att);
    std::int64_t sth = reduce256(ath);
    std::int64_t sht = reduce256(aht);
    std::int64_t shh = reduce256(ahh);
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

const KernelOps& avx2_ops() {
  static const KernelOps ops{"avx2",  popcount_row, xor_popcount_many,
                             mbm_row, mbm2_many,    mbm4_many};
  return ops;
}

}  // namespace bitmm::detail

#endif  // BITMM_HAVE_AVX2
