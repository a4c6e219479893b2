// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include "bitmm/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bitmm/kernels.hpp"
#include "bitmm/tensor.hpp"
#include "bitmm/transform.hpp"

namespace bitmm {

namespace {

// Brute-force oracles, decoded bit by bit.

std::int64_t oracle_dot(std::uint64_t u, std::uint64_t v, int n) {
  std::int64_t acc = 0;
  for (int i = 0; i < n; ++i) {
    int su = (u >> i) & 1 ? 1 : -1;
    int sv = (v >> i) & 1 ? 1 : -1;
    acc += su * sv;
  }
  return acc;
}

std::int64_t oracle_mbm(std::uint64_t x, std::uint64_t y, std::uint64_t z, int n) {
  std::int64_t acc = 0;
  for (int i = 0; i < n; ++i) {
    if (((z >> i) & 1) == 0) continue;
    int sx = (x >> i) & 1 ? 1 : -1;
    int sy = (y >> i) & 1 ? 1 : -1;
    acc += sx * sy;
  }
  return acc;
}

std::int64_t oracle_dot_rows(const BitMatrix& u, const BitMatrix& v) {
  std::int64_t acc = 0;
  for (std::int64_t i = 0; i < u.cols(); ++i)
    acc += (u.bit(0, i) ? 1 : -1) * (v.bit(0, i) ? 1 : -1);
  return acc;
}

std::int64_t oracle_mbm_rows(const BitMatrix& x, const BitMatrix& y, const BitMatrix& z) {
  std::int64_t acc = 0;
  for (std::int64_t i = 0; i < x.cols(); ++i)
    if (z.bit(0, i)) acc += (x.bit(0, i) ? 1 : -1) * (y.bit(0, i) ? 1 : -1);
  return acc;
}

BitMatrix random_bits(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng) {
  BitMatrix b(rows, cols);
  std::bernoulli_distribution coin(0.5);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      if (coin(rng)) b.set_bit(r, c, true);
  return b;
}

TwoBitMatrix random_levels(std::int64_t rows, std::int64_t cols, float scale,
                           std::mt19937_64& rng) {
  TwoBitMatrix q;
  q.rows = rows;
  q.cols = cols;
  q.scale = scale;
  q.levels.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  std::uniform_int_distribution<int> level(0, 3);
  for (auto& l : q.levels) l = static_cast<std::uint8_t>(level(rng));
  return q;
}

void record(SuiteResult& suite, bool ok, const std::string& desc) {
  ++suite.cases;
  if (!ok) {
    ++suite.mismatches;
    if (suite.first_failure.empty()) suite.first_failure = desc;
  }
}

std::string cell_desc(const char* routine, std::int64_t m, std::int64_t k, std::int64_t n,
                      std::int64_t r, std::int64_t c, float got, float expected) {
  std::ostringstream os;
  os << "routine=" << routine << " M=" << m << " K=" << k << " N=" << n << " cell=(" << r << ","
     << c << ") got=" << got << " expected=" << expected;
  return os.str();
}

// Exhaustive sign-dot sweep over every operand pair up to n_max bits.
SuiteResult sweep_dot_exhaustive(int n_max) {
  SuiteResult suite{"dot-binary-exhaustive", 0, 0, {}};
  for (int n = 1; n <= n_max; ++n) {
    std::uint64_t lim = std::uint64_t{1} << n;
    for (std::uint64_t u = 0; u < lim; ++u) {
      for (std::uint64_t v = 0; v < lim; ++v) {
        std::uint64_t uw = u, vw = v;
        std::int64_t got = dot_binary({&uw, 1}, {&vw, 1}, n);
        std::int64_t want = oracle_dot(u, v, n);
        if (got != want) {
          std::ostringstream os;
          os << "dot n=" << n << " u=" << u << " v=" << v << " got=" << got << " want=" << want;
          record(suite, false, os.str());
        } else {
          record(suite, true, {});
        }
      }
    }
  }
  return suite;
}

// Exhaustive masked-dot sweep: every (x, y, z) triple up to triple_n bits,
// then every (xor-pattern, mask) class up to class_n bits with the base
// operand drawn pseudorandomly. The masked dot depends on its operands only
// through their xor, so the class sweep covers every distinguishable input
// while staying polynomial.
SuiteResult sweep_mbm_exhaustive(int triple_n, int class_n, std::mt19937_64& rng) {
  SuiteResult suite{"mbm-exhaustive", 0, 0, {}};
  for (int n = 1; n <= triple_n; ++n) {
    std::uint64_t lim = std::uint64_t{1} << n;
    for (std::uint64_t x = 0; x < lim; ++x) {
      for (std::uint64_t y = 0; y < lim; ++y) {
        for (std::uint64_t z = 0; z < lim; ++z) {
          std::uint64_t xw = x, yw = y, zw = z;
          std::int64_t got = mbm({&xw, 1}, {&yw, 1}, {&zw, 1});
          std::int64_t want = oracle_mbm(x, y, z, n);
          if (got != want) {
            std::ostringstream os;
            os << "mbm n=" << n << " x=" << x << " y=" << y << " z=" << z << " got=" << got
               << " want=" << want;
            record(suite, false, os.str());
          } else {
            record(suite, true, {});
          }
        }
      }
    }
  }
  for (int n = triple_n + 1; n <= class_n; ++n) {
    std::uint64_t lim = std::uint64_t{1} << n;
    std::uint64_t keep = lim - 1;
    for (std::uint64_t d = 0; d < lim; ++d) {
      for (std::uint64_t z = 0; z < lim; ++z) {
        std::uint64_t x = rng() & keep;
        std::uint64_t y = x ^ d;
        std::uint64_t xw = x, yw = y, zw = z;
        std::int64_t got = mbm({&xw, 1}, {&yw, 1}, {&zw, 1});
        std::int64_t want = oracle_mbm(x, y, z, n);
        if (got != want) {
          std::ostringstream os;
          os << "mbm n=" << n << " x=" << x << " y=" << y << " z=" << z << " got=" << got
             << " want=" << want;
          record(suite, false, os.str());
        } else {
          record(suite, true, {});
        }
      }
    }
  }
  return suite;
}

SuiteResult sweep_rowops_random(const VerifyOptions& opt, std::mt19937_64& rng) {
  SuiteResult suite{"rowops-random", 0, 0, {}};
  std::uniform_int_distribution<std::int64_t> pick_n(1, opt.rowop_max_n);
  for (int i = 0; i < opt.random_rowop_cases; ++i) {
    std::int64_t n = pick_n(rng);
    BitMatrix u = random_bits(1, n, rng);
    BitMatrix v = random_bits(1, n, rng);
    BitMatrix z = random_bits(1, n, rng);
    std::int64_t dot_got = dot_binary(u.row(0), v.row(0), n);
    std::int64_t dot_want = oracle_dot_rows(u, v);
    std::int64_t mbm_got = mbm(u.row(0), v.row(0), z.row(0));
    std::int64_t mbm_want = oracle_mbm_rows(u, v, z);
    if (dot_got != dot_want || mbm_got != mbm_want) {
      std::ostringstream os;
      os << "rowop n=" << n << " dot got=" << dot_got << " want=" << dot_want
         << " mbm got=" << mbm_got << " want=" << mbm_want;
      record(suite, false, os.str());
    } else {
      record(suite, true, {});
    }
  }
  return suite;
}

// Scaled-integer oracles per cell, written against the decoded levels.

std::int64_t oracle_units_1x1(const BitMatrix& a, const BitMatrix& b, std::int64_t r,
                              std::int64_t c) {
  std::int64_t acc = 0;
  for (std::int64_t i = 0; i < a.cols(); ++i)
    acc += (a.bit(r, i) ? 1 : -1) * (b.bit(c, i) ? 1 : -1);
  return acc;
}

std::int64_t oracle_units_1x2(const BitMatrix& w, const TwoBitMatrix& a, std::int64_t r,
                              std::int64_t c) {
  std::int64_t acc = 0;
  for (std::int64_t i = 0; i < w.cols(); ++i)
    acc += (w.bit(r, i) ? 1 : -1) * 2 * a.level(c, i);
  return acc;
}

std::int64_t oracle_units_2x2(const TwoBitMatrix& w, const TwoBitMatrix& a, std::int64_t r,
                              std::int64_t c) {
  std::int64_t acc = 0;
  for (std::int64_t i = 0; i < w.cols; ++i)
    acc += 4 * static_cast<std::int64_t>(w.level(r, i)) * a.level(c, i);
  return acc;
}

double frobenius_rel_err(const DenseMatrix& got, const DenseMatrix& want) {
  double num = 0.0, den = 0.0;
  for (std::int64_t r = 0; r < got.rows(); ++r) {
    for (std::int64_t c = 0; c < got.cols(); ++c) {
      double d = static_cast<double>(got.at(r, c)) - want.at(r, c);
      num += d * d;
      den += static_cast<double>(want.at(r, c)) * want.at(r, c);
    }
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

struct GemmSweepConfig {
  int cases;
  std::int64_t max_dim;
  std::int64_t k_override;  // 0 means random K in [1, max_dim]
};

void sweep_gemms(const GemmSweepConfig& cfg, int threads, bool inject_fault,
                 std::mt19937_64& rng, SuiteResult& bitwise, SuiteResult& dense_like) {
  std::uniform_int_distribution<std::int64_t> dim(1, cfg.max_dim);
  const float gammas[] = {1.0f, 0.5f, 1.25f, 0.75f};
  const float scales[] = {1.0f, 0.5f, 0.25f, 0.3f};
  std::uniform_int_distribution<int> pick4(0, 3);
  for (int cse = 0; cse < cfg.cases; ++cse) {
    std::int64_t m = dim(rng), n = dim(rng);
    std::int64_t k = cfg.k_override > 0 ? cfg.k_override : dim(rng);
    float gamma = gammas[pick4(rng)];
    float gamma_b = gammas[pick4(rng)];
    float sw = scales[pick4(rng)];
    float sa = scales[pick4(rng)];

    BitMatrix wb = random_bits(m, k, rng);
    BitMatrix bb = random_bits(n, k, rng);
    TwoBitMatrix wq = random_levels(m, k, sw, rng);
    TwoBitMatrix aq = random_levels(n, k, sa, rng);
    ThmPlanes wp = decompose_thm(wq);
    ThmPlanes ap = decompose_thm(aq);

    DenseMatrix c11 = gemm_1x1(wb, bb, gamma, gamma_b, threads);
    if (inject_fault && cse == 0) c11.at(0, 0) += 1.0f;
    DenseMatrix c12 = gemm_1x2(wb, gamma, ap, threads);
    DenseMatrix c22 = gemm_2x2(wp, ap, threads);

    float scale11 = gamma * gamma_b;
    float half12 = 0.5f * gamma * sa;
    float quarter22 = 0.25f * sw * sa;
    bool ok = true;
    std::string desc;
    for (std::int64_t r = 0; r < m && ok; ++r) {
      for (std::int64_t c = 0; c < n && ok; ++c) {
        float want11 = scale11 * static_cast<float>(oracle_units_1x1(wb, bb, r, c));
        if (c11.at(r, c) != want11) {
          ok = false;
          desc = cell_desc("1x1", m, k, n, r, c, c11.at(r, c), want11);
          break;
        }
        float want12 = half12 * static_cast<float>(oracle_units_1x2(wb, aq, r, c));
        if (c12.at(r, c) != want12) {
          ok = false;
          desc = cell_desc("1x2", m, k, n, r, c, c12.at(r, c), want12);
          break;
        }
        float want22 = quarter22 * static_cast<float>(oracle_units_2x2(wq, aq, r, c));
        if (c22.at(r, c) != want22) {
          ok = false;
          desc = cell_desc("2x2", m, k, n, r, c, c22.at(r, c), want22);
          break;
        }
      }
    }
    record(bitwise, ok, desc);

    // Float-path routines against the dense reference on the decoded values.
    DenseMatrix wd = unpack_signs(wb);
    DenseMatrix bd = transpose(aq.to_dense());
    DenseMatrix ref = gemm_ref_dense(wd, bd, threads);
    DenseMatrix via_1x32 = gemm_1x32_ref(wb, 1.0f, bd, threads);
    double err = frobenius_rel_err(via_1x32, ref);
    bool ok2 = err < 1e-4;
    std::string desc2;
    if (!ok2) {
      std::ostringstream os;
      os << "routine=1x32_ref M=" << m << " K=" << k << " N=" << n << " frobenius_err=" << err;
      desc2 = os.str();
    }
    record(dense_like, ok2, desc2);
  }
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

SuiteResult sweep_spmm(int cases, std::int64_t max_dim, int threads, std::mt19937_64& rng) {
  SuiteResult suite{"spmm-vs-dense", 0, 0, {}};
  std::uniform_int_distribution<std::int64_t> dim(1, max_dim);
  std::uniform_real_distribution<float> unit(-1.0f, 1.0f);
  for (int cse = 0; cse < cases; ++cse) {
    std::int64_t m = dim(rng), k = dim(rng), n = dim(rng);
    CsrMatrix a = random_csr(m, k, 0.05f, rng);
    DenseMatrix b(k, n);
    for (std::int64_t r = 0; r < k; ++r)
      for (std::int64_t c = 0; c < n; ++c) b.at(r, c) = unit(rng);
    DenseMatrix got = spmm_csr(a, b, threads);
    DenseMatrix want = gemm_ref_dense(a.to_dense(), b, threads);
    double err = frobenius_rel_err(got, want);
    bool ok = err < 1e-4;
    std::string desc;
    if (!ok) {
      std::ostringstream os;
      os << "routine=spmm M=" << m << " K=" << k << " N=" << n << " frobenius_err=" << err;
      desc = os.str();
    }
    record(suite, ok, desc);
  }
  return suite;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  VerifyReport report;

  report.suites.push_back(sweep_dot_exhaustive(opt.dot_exhaustive_n));
  report.suites.push_back(sweep_mbm_exhaustive(opt.mbm_exhaustive_n, opt.mbm_class_n, rng));
  report.suites.push_back(sweep_rowops_random(opt, rng));

  SuiteResult bitwise{"gemm-bitwise-vs-oracle", 0, 0, {}};
  SuiteResult dense_like{"gemm-1x32-vs-dense", 0, 0, {}};
  sweep_gemms({opt.gemm_cases, opt.gemm_max_dim, 0}, opt.threads, opt.inject_fault, rng, bitwise,
              dense_like);
  sweep_gemms({opt.gemm_large_cases, opt.gemm_max_dim, opt.gemm_large_k}, opt.threads, false, rng,
              bitwise, dense_like);
  report.suites.push_back(bitwise);
  report.suites.push_back(dense_like);
  report.suites.push_back(sweep_spmm(20, opt.gemm_max_dim, opt.threads, rng));

  report.passed = true;
  for (const auto& s : report.suites) {
    report.total_cases += s.cases;
    if (s.mismatches != 0) report.passed = false;
  }
  return report;
}

void print_report(std::ostream& os, const VerifyReport& report) {
  for (const auto& s : report.suites) {
    os << "suite " << s.name << " cases=" << s.cases << " mismatches=" << s.mismatches;
    if (!s.first_failure.empty()) os << "\n  first failure: " << s.first_failure;
    os << "\n";
  }
  if (report.passed)
    os << "all suites passed (" << report.total_cases << " cases)\n";
  else
    os << "verification FAILED\n";
}

}  // namespace bitmm
