// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>

#include "bitmm/simd.hpp"

namespace bitmm::detail {

// Raw popcount reductions over word arrays, one implementation per SIMD
// level. Each *_many variant runs one packed row against `n` consecutive
// packed rows (stride `wpr` words) and writes one count per row, which keeps
// the dispatch overhead out of the inner GEMM loops.
struct KernelOps {
  const char* name;

  // popcount over one row
  std::int64_t (*popcount_row)(const std::uint64_t* x, std::size_t w);

  // out[i] = popcount(a ^ b_i)
  void (*xor_popcount_many)(const std::uint64_t* a, const std::uint64_t* b, std::size_t wpr,
                            std::int64_t n, std::int32_t* out);

  // popcount((x ^ y) & z) over one row triple
  std::int64_t (*mbm_row)(const std::uint64_t* x, const std::uint64_t* y, const std::uint64_t* z,
                          std::size_t w);

  // dt[i] = popcount((w ^ t_i) & m_i), dh[i] = popcount((w ^ h_i) & ~m_i)
  void (*mbm2_many)(const std::uint64_t* w, const std::uint64_t* t, const std::uint64_t* h,
                    const std::uint64_t* m, std::size_t wpr, std::int64_t n, std::int32_t* dt,
                    std::int32_t* dh);

  // Against row planes (tw,hw,mw) and each of n column plane rows:
  //   pmm[i]  = popcount(mw & m_i)
  //   dtt[i]  = popcount((tw ^ t_i) & mw & m_i)
  //   dth[i]  = popcount((tw ^ h_i) & mw & ~m_i)
  //   dht[i]  = popcount((hw ^ t_i) & ~mw & m_i)
  //   dhh[i]  = popcount((hw ^ h_i) & ~mw & ~m_i)
  void (*mbm4_many)(const std::uint64_t* tw, const std::uint64_t* hw, const std::uint64_t* mw,
                    const std::uint64_t* t, const std::uint64_t* h, const std::uint64_t* m,
                    std::size_t wpr, std::int64_t n, std::int32_t* pmm, std::int32_t* dtt,
                    std::int32_t* dth, std::int32_t* dht, std::int32_t* dhh);
};

const KernelOps& scalar_ops();
#ifdef BITMM_HAVE_AVX2
const KernelOps& avx2_ops();
#endif
#ifdef BITMM_HAVE_AVX512
const KernelOps& avx512_ops();
#endif

const KernelOps& kernel_ops(SimdLevel level);

}  // namespace bitmm::detail
