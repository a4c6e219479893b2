// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <vector>

namespace bitmm {

enum class SimdLevel { scalar = 0, avx2 = 1, avx512 = 2 };

const char* simd_level_name(SimdLevel level);

// Best level the running CPU supports among the compiled-in backends.
SimdLevel detect_simd_level();

// Every level that can run on this CPU, scalar first.
std::vector<SimdLevel> available_simd_levels();

// Level used by the dispatched kernels. Defaults to detect_simd_level(),
// overridable by the BITMM_SIMD environment variable (scalar|avx2|avx512)
// read once at startup, then by set_simd_level().
SimdLevel active_simd_level();

// Throws std::invalid_argument when the CPU cannot run the requested level.
void set_simd_level(SimdLevel level);

// Parses a level name; throws std::invalid_argument on unknown names.
SimdLevel parse_simd_level(const std::string& name);

}  // namespace bitmm
