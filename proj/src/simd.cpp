// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/simd.hpp"

#include <cstdlib>
#include <stdexcept>

namespace bitmm {

namespace {

bool cpu_supports(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return true;
#if defined(__x86_64__) || defined(__i386__)
    case SimdLevel::avx2:
#ifdef BITMM_HAVE_AVX2
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case SimdLevel::avx512:
#ifdef BITMM_HAVE_AVX512
      return __builtin_cpu_supports("avx512f") != 0 &&
             __builtin_cpu_supports("avx512vpopcntdq") != 0;
#else
      return false;
#endif
#else
    case SimdLevel::avx2:
    case SimdLevel::avx512:
      return false;
#endif
  }
  return false;
}

SimdLevel initial_level() {
  if (const char* env = std::getenv("BITMM_SIMD")) {
    try {
      SimdLevel level = parse_simd_level(env);
      if (cpu_supports(level)) return level;
    } catch (const std::invalid_argument&) {
      // Unknown names fall through to detection.
    }
  }
  return detect_simd_level();
}

SimdLevel& active_level_ref() {
  static SimdLevel level = initial_level();
  return level;
}

}  // namespace

const char* simd_level_name(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return "scalar";
    case SimdLevel::avx2:
      return "avx2";
    case SimdLevel::avx512:
      return "avx512";
  }
  return "unknown";
}

SimdLevel detect_simd_level() {
  if (cpu_supports(SimdLevel::avx512)) return SimdLevel::avx512;
  if (cpu_supports(SimdLevel::avx2)) return SimdLevel::avx2;
  return SimdLevel::scalar;
}

std::vector<SimdLevel> available_simd_levels() {
  std::vector<SimdLevel> out{SimdLevel::scalar};
  if (cpu_supports(SimdLevel::avx2)) out.push_back(SimdLevel::avx2);
  if (cpu_supports(SimdLevel::avx512)) out.push_back(SimdLevel::avx512);
  return out;
}

SimdLevel active_simd_level() { return active_level_ref(); }

void set_simd_level(SimdLevel level) {
  if (!cpu_supports(level))
    throw std::invalid_argument(std::string("simd level not available: ") + simd_level_name(level));
  active_level_ref() = level;
}

SimdLevel parse_simd_level(const std::string& name) {
  if (name == "scalar") return SimdLevel::scalar;
  if (name == "avx2") return SimdLevel::avx2;
  if (name == "avx512") return SimdLevel::avx512;
  throw std::invalid_argument("unknown simd level: " + name);
}

}  // namespace bitmm
