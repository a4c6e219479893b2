// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "bitmm/simd.hpp"
#include "bitmm/transform.hpp"

namespace bitmm {

GemmProblem im2col_shape(std::int64_t c_in, std::int64_t c_out, std::int64_t kh, std::int64_t kw,
                         std::int64_t h, std::int64_t w, std::int64_t stride, std::int64_t pad) {
  if (c_in <= 0 || c_out <= 0 || kh <= 0 || kw <= 0 || h <= 0 || w <= 0)
    throw std::invalid_argument("convolution dimensions must be positive");
  if (stride <= 0) throw std::invalid_argument("stride must be positive");
  if (pad < 0) throw std::invalid_argument("padding must be non-negative");
  std::int64_t h_span = h + 2 * pad - kh;
  std::int64_t w_span = w + 2 * pad - kw;
  if (h_span < 0 || w_span < 0)
    throw std::invalid_argument("kernel larger than the padded input");
  GemmProblem p;
  p.m = c_out;
  p.k = c_in * kh * kw;
  p.n = (h_span / stride + 1) * (w_span / stride + 1);
  p.validate();
  return p;
}

namespace {

BitMatrix random_bits(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng) {
  BitMatrix b(rows, cols);
  std::bernoulli_distribution coin(0.5);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      if (coin(rng)) b.set_bit(r, c, true);
  return b;
}

ThmPlanes random_planes(std::int64_t rows, std::int64_t cols, float scale, std::mt19937_64& rng) {
  TwoBitMatrix q;
  q.rows = rows;
  q.cols = cols;
  q.scale = scale;
  q.levels.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  std::uniform_int_distribution<int> level(0, 3);
  for (auto& l : q.levels) l = static_cast<std::uint8_t>(level(rng));
  return decompose_thm(q);
}

DenseMatrix random_dense(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng) {
  DenseMatrix d(rows, cols);
  std::uniform_real_distribution<float> unit(-1.0f, 1.0f);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) d.at(r, c) = unit(rng);
  return d;
}

CsrMatrix random_csr(std::int64_t rows, std::int64_t cols, float density, std::mt19937_64& rng) {
  std::bernoulli_distribution hit(density);
  std::uniform_real_distribution<float> unit(-1.0f, 1.0f);
  std::vector<std::uint64_t> row_ptr{0};
  std::vector<std::uint64_t> col_idx;
  std::vector<float> vals;
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      if (hit(rng)) {
        col_idx.push_back(static_cast<std::uint64_t>(c));
        vals.push_back(unit(rng));
      }
    }
    row_ptr.push_back(col_idx.size());
  }
  return CsrMatrix::create(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(vals));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

BenchRecord bench_routine(Routine r, const GemmProblem& p, const BenchOptions& opt) {
  p.validate();
  if (opt.reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (opt.warmup < 0) throw std::invalid_argument("warmup must be non-negative");
  std::mt19937_64 rng(opt.seed);

  // Operands are built once outside the timed region.
  BitMatrix bit_a, bit_b;
  ThmPlanes planes_w, planes_a;
  DenseMatrix dense_a, dense_b;
  CsrMatrix sparse_a;
  switch (r) {
    case Routine::ref_dense:
      dense_a = random_dense(p.m, p.k, rng);
      dense_b = random_dense(p.k, p.n, rng);
      break;
    case Routine::k1x1:
      bit_a = random_bits(p.m, p.k, rng);
      bit_b = random_bits(p.n, p.k, rng);
      break;
    case Routine::k1x2:
      bit_a = random_bits(p.m, p.k, rng);
      planes_a = random_planes(p.n, p.k, 0.5f, rng);
      break;
    case Routine::k2x2:
      planes_w = random_planes(p.m, p.k, 0.25f, rng);
      planes_a = random_planes(p.n, p.k, 0.5f, rng);
      break;
    case Routine::spmm:
      sparse_a = random_csr(p.m, p.k, opt.density, rng);
      dense_b = random_dense(p.k, p.n, rng);
      break;
    case Routine::ref_1x32:
      bit_a = random_bits(p.m, p.k, rng);
      dense_b = random_dense(p.k, p.n, rng);
      break;
  }

  volatile float sink = 0.0f;  // keeps the produced matrices observable
  auto run_once = [&]() {
    DenseMatrix c;
    switch (r) {
      case Routine::ref_dense:
        c = gemm_ref_dense(dense_a, dense_b, opt.threads);
        break;
      case Routine::k1x1:
        c = gemm_1x1(bit_a, bit_b, 1.0f, 1.0f, opt.threads);
        break;
      case Routine::k1x2:
        c = gemm_1x2(bit_a, 1.0f, planes_a, opt.threads);
        break;
      case Routine::k2x2:
        c = gemm_2x2(planes_w, planes_a, opt.threads);
        break;
      case Routine::spmm:
        c = spmm_csr(sparse_a, dense_b, opt.threads);
        break;
      case Routine::ref_1x32:
        c = gemm_1x32_ref(bit_a, 1.0f, dense_b, opt.threads);
        break;
    }
    sink = sink + c.at(0, 0);
  };

  for (int i = 0; i < opt.warmup; ++i) run_once();
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(opt.reps));
  for (int i = 0; i < opt.reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    run_once();
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }

  BenchRecord rec;
  rec.routine = r;
  rec.m = p.m;
  rec.k = p.k;
  rec.n = p.n;
  rec.reps = opt.reps;
  rec.warmup = opt.warmup;
  rec.threads = opt.threads;
  rec.simd = simd_level_name(active_simd_level());
  rec.seconds = median(times);
  double updates = static_cast<double>(p.m) * static_cast<double>(p.k) * static_cast<double>(p.n);
  rec.gops = updates / rec.seconds / 1e9;
  rec.gflops = 2.0 * rec.gops;
  if (opt.clock_ghz) {
    TppModel model;
    model.clock_ghz = *opt.clock_ghz;
    TppEstimate est = tpp_model(model, r);
    rec.tpp_gops = est.updates_per_sec / 1e9;
    rec.pct_tpp = 100.0 * rec.gops / *rec.tpp_gops;
  }
  return rec;
}

void write_csv_header(std::ostream& os) {
  os << "routine,m,k,n,reps,warmup,threads,simd,seconds,gops,gflops,tpp_gops,pct_tpp\n";
}

void write_csv_record(std::ostream& os, const BenchRecord& rec) {
  os << routine_name(rec.routine) << ',' << rec.m << ',' << rec.k << ',' << rec.n << ','
     << rec.reps << ',' << rec.warmup << ',' << rec.threads << ',' << rec.simd << ','
     << rec.seconds << ',' << rec.gops << ',' << rec.gflops << ',';
  if (rec.tpp_gops) os << *rec.tpp_gops;
  os << ',';
  if (rec.pct_tpp) os << *rec.pct_tpp;
  os << '\n';
}

}  // namespace bitmm
