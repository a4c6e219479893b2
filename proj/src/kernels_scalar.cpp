// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "kernel_backend.hpp"

namespace bitmm::detail {

namespace {

inline std::int64_t popcnt64(std::uint64_t x) { return __builtin_popcountll(x); }

std::int64_t popcount_row(const std::uint64_t* x, std::size_t w) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < w; ++i) acc += popcnt64(x[i]);
  return acc;
}

void xor_popcount_many(const std::uint64_t* a, const std::uint64_t* b, std::size_t wpr,
                       std::int64_t n, std::int32_t* out) {
  for (std::int64_t c = 0; c < n; ++c) {
    const std::uint64_t* bc = b + static_cast<std::size_t>(c) * wpr;
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < wpr; ++i) acc += popcnt64(a[i] ^ bc[i]);
    out[c] = static_cast<std::int32_t>(acc);
  }
}

std::int64_t mbm_row(const std::uint64_t* x, const std::uint64_t* y, const std::uint64_t* z,
                     std::size_t w) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < w; ++i) acc += popcnt64((x[i] ^ y[i]) & z[i]);
  return acc;
}

void mbm2_many(const std::uint64_t* w, const std::uint64_t* t, const std::uint64_t* h,
               const std::uint64_t* m, std::size_t wpr, std::int64_t n, std::int32_t* dt,
               std::int32_t* dh) {
  for (std::int64_t c = 0; c < n; ++c) {
    std::size_t off = static_cast<std::size_t>(c) * wpr;
    const std::uint64_t* tc = t + off;
    const std::uint64_t* hc = h + off;
    const std::uint64_t* mc = m + off;
    std::int64_t at = 0, ah = 0;
    for (std::size_t i = 0; i < wpr; ++i) {
      // (w ^ h) has zero padding, so masking with ~m stays tail-safe.
      at += popcnt64((w[i] ^ tc[i]) & mc[i]);
      ah += popcnt64((w[i] ^ hc[i]) & ~mc[i]);
    }
    dt[c] = static_cast<std::int32_t>(at);
    dh[c] = static_cast<std::int32_t>(ah);
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
    std::int64_t amm = 0, att = 0, ath = 0, aht = 0, ahh = 0;
    for (std::size_t i = 0; i < wpr; ++i) {
      std::uint64_t both = mw[i] & mc[i];
      amm += popcnt64(both);
      att += popcnt64((tw[i] ^ tc[i]) & both);
      ath += popcnt64((tw[i] ^ hc[i]) & mw[i] & ~mc[i]);
      aht += popcnt64((hw[i] ^ tc[i]) & ~mw[i] & mc[i]);
      ahh += popcnt64((hw[i] ^ hc[i]) & ~(mw[i] | mc[i]));
    }
    pmm[c] = static_cast<std::int32_t>(amm);
    dtt[c] = static_cast<std::int32_t>(att);
    dth[c] = static_cast<std::int32_t>(ath);
    dht[c] = static_cast<std::int32_t>(aht);
    dhh[c] = static_cast<std::int32_t>(ahh);
  }
}

}  // namespace

const KernelOps& scalar_ops() {
  static const KernelOps ops{"scalar", popcount_row, xor_popcount_many,
                             mbm_row,  mbm2_many,    mbm4_many};
  return ops;
}

}  // namespace bitmm::detail
