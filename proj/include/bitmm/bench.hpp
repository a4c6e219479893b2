// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bitmm/kernels.hpp"

namespace bitmm {

// Lowered GEMM dimensions of a convolution:
//   M = c_out, K = c_in*kh*kw, N = h_out*w_out
//   h_out = (h + 2*pad - kh) / stride + 1 (floored), same for w.
// Throws std::invalid_argument when a kernel exceeds the padded input or any
// parameter is out of range.
GemmProblem im2col_shape(std::int64_t c_in, std::int64_t c_out, std::int64_t kh, std::int64_t kw,
                         std::int64_t h, std::int64_t w, std::int64_t stride = 1,
                         std::int64_t pad = 0);

struct BenchOptions {
  int reps = 9;
  int warmup = 2;
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<double> clock_ghz;  // supplied by the user, never probed
  float density = 0.02f;            // nonzero fraction for the spmm routine
};

struct BenchRecord {
  Routine routine = Routine::ref_dense;
  std::int64_t m = 0;
  std::int64_t k = 0;
  std::int64_t n = 0;
  int reps = 0;
  int warmup = 0;
  int threads = 1;
  std::string simd;
  double seconds = 0.0;              // median over reps
  double gops = 0.0;                 // logical m*k*n updates per second / 1e9
  double gflops = 0.0;               // 2*m*k*n flops-equivalent per second / 1e9
  std::optional<double> tpp_gops;    // model peak at the supplied clock
  std::optional<double> pct_tpp;     // 100 * gops / tpp_gops
};

// Builds deterministic random operands for the routine, runs warmup + reps
// and reports the median.
BenchRecord bench_routine(Routine r, const GemmProblem& p, const BenchOptions& opt);

// CSV schema, one line per record:
// routine,m,k,n,reps,warmup,threads,simd,seconds,gops,gflops,tpp_gops,pct_tpp
// The last two columns stay empty when no clock was supplied.
void write_csv_header(std::ostream& os);
void write_csv_record(std::ostream& os, const BenchRecord& rec);

}  // namespace bitmm
