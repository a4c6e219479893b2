// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace bitmm {

struct VerifyOptions {
  std::uint64_t seed = 1;
  // Exhaustive row-op sweeps: all sign pairs up to this length for the plain
  // dot, all (x,y,z) triples up to the smaller cap for the masked dot, then
  // every (xor-pattern, mask) class up to the larger cap.
  int dot_exhaustive_n = 10;
  int mbm_exhaustive_n = 6;
  int mbm_class_n = 10;
  int random_rowop_cases = 2000;
  int rowop_max_n = 4096;
  int gemm_cases = 60;        // random shapes, every dim in [1, gemm_max_dim]
  int gemm_max_dim = 96;
  int gemm_large_cases = 3;   // K stretched to gemm_large_k
  int gemm_large_k = 2048;
  int threads = 1;
  bool inject_fault = false;  // flips one output bit to prove failure reporting
};

struct SuiteResult {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t mismatches = 0;
  std::string first_failure;  // routine, shape and cell of the first mismatch
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed = false;
  std::uint64_t total_cases = 0;
};

// Cross-checks every kernel against scalar oracles. Deterministic for a
// fixed option set: equal seeds produce identical reports.
VerifyReport run_verification(const VerifyOptions& opt);

void print_report(std::ostream& os, const VerifyReport& report);

}  // namespace bitmm
