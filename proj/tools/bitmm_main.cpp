// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bitmm/apb.hpp"
#include "bitmm/bench.hpp"
#include "bitmm/errors.hpp"
#include "bitmm/kernels.hpp"
#include "bitmm/simd.hpp"
#include "bitmm/tensor_io.hpp"
#include "bitmm/transform.hpp"
#include "bitmm/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct SquareRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t step = 0;
};

// LO..HI[:STEP], step defaulting to LO.
SquareRange parse_square(const std::string& text) {
  SquareRange r;
  auto dots = text.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--square", "expected LO..HI[:STEP]");
  auto colon = text.find(':', dots + 2);
  try {
    r.lo = std::stoll(text.substr(0, dots));
    r.hi = std::stoll(text.substr(dots + 2, colon == std::string::npos ? std::string::npos
                                                                       : colon - dots - 2));
    r.step = colon == std::string::npos ? r.lo : std::stoll(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--square", "expected LO..HI[:STEP]");
  }
  if (r.lo <= 0 || r.hi < r.lo || r.step <= 0)
    throw CLI::ValidationError("--square", "range must satisfy 0 < LO <= HI, STEP > 0");
  return r;
}

void apply_simd(const std::string& name) {
  if (!name.empty()) bitmm::set_simd_level(bitmm::parse_simd_level(name));
}

int cmd_verify(std::uint64_t seed, int gemm_cases, std::int64_t max_dim, int threads,
               bool inject_fault) {
  bitmm::VerifyOptions opt;
  opt.seed = seed;
  opt.gemm_cases = gemm_cases;
  opt.gemm_max_dim = max_dim;
  opt.threads = threads;
  opt.inject_fault = inject_fault;
  bitmm::VerifyReport report = bitmm::run_verification(opt);
  bitmm::print_report(std::cout, report);
  return report.passed ? kExitOk : kExitVerifyFailure;
}

int cmd_bench(const std::vector<std::string>& routines, std::int64_t m, std::int64_t k,
              std::int64_t n, const std::string& square, const bitmm::BenchOptions& opt,
              const std::string& csv_path) {
  std::vector<bitmm::GemmProblem> problems;
  if (!square.empty()) {
    SquareRange r = parse_square(square);
    for (std::int64_t d = r.lo; d <= r.hi; d += r.step) problems.push_back({d, d, d});
  } else {
    problems.push_back({m, k, n});
  }
  std::vector<bitmm::Routine> rs;
  for (const auto& name : routines) rs.push_back(bitmm::parse_routine(name));
  if (rs.empty()) rs = {bitmm::Routine::k1x1, bitmm::Routine::k1x2, bitmm::Routine::k2x2};

  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    if (!csv) throw bitmm::IoError("cannot open for writing: " + csv_path);
    bitmm::write_csv_header(csv);
  }
  for (const auto& p : problems) {
    for (bitmm::Routine r : rs) {
      bitmm::BenchRecord rec = bitmm::bench_routine(r, p, opt);
      std::printf("%-9s m=%lld k=%lld n=%lld simd=%s threads=%d median=%.6fs gops=%.3f",
                  bitmm::routine_name(rec.routine), static_cast<long long>(rec.m),
                  static_cast<long long>(rec.k), static_cast<long long>(rec.n), rec.simd.c_str(),
                  rec.threads, rec.seconds, rec.gops);
      if (rec.pct_tpp) {
        std::printf(" tpp_gops=%.2f pct_tpp=%.2f%%", *rec.tpp_gops, *rec.pct_tpp);
        if (*rec.pct_tpp > 110.0)
          std::fprintf(stderr, "warning: pct_tpp %.2f above 110%%, clock likely wrong\n",
                       *rec.pct_tpp);
      }
      std::printf("\n");
      if (csv.is_open()) bitmm::write_csv_record(csv, rec);
    }
  }
  if (csv.is_open() && !csv) throw bitmm::IoError("write failed: " + csv_path);
  return kExitOk;
}

int cmd_tpp(std::optional<double> clock_ghz, int lane_bits, double fma_throughput) {
  bitmm::TppModel model;
  model.clock_ghz = clock_ghz.value_or(1.0);
  model.fma_throughput = fma_throughput;
  model.lane_bits = lane_bits;
  model.operand_bits = 32;
  const bitmm::Routine rows[] = {bitmm::Routine::ref_dense, bitmm::Routine::k1x1,
                                 bitmm::Routine::k1x2, bitmm::Routine::k2x2};
  double fp32_vpc =
      bitmm::tpp_model(model, bitmm::Routine::ref_dense).values_per_cycle;
  std::printf("%-9s %16s %12s %15s", "routine", "values/cycle", "cost_vs_1x1", "speedup_vs_fp32");
  if (clock_ghz) std::printf(" %12s", "peak_gops");
  std::printf("\n");
  for (bitmm::Routine r : rows) {
    bitmm::TppEstimate e = bitmm::tpp_model(model, r);
    const char* name = r == bitmm::Routine::ref_dense ? "fp32" : bitmm::routine_name(r);
    std::printf("%-9s %16.2f %12.2f %15.2f", name, e.values_per_cycle, e.cost_ratio_vs_1x1,
                e.values_per_cycle / fp32_vpc);
    if (clock_ghz) std::printf(" %12.2f", e.updates_per_sec / 1e9);
    std::printf("\n");
  }
  return kExitOk;
}

int cmd_apb_stats(const std::string& weights_path, std::optional<float> alpha,
                  std::optional<float> delta, std::uint32_t b_v,
                  std::vector<std::uint64_t> dims) {
  bitmm::DenseMatrix w = bitmm::load_dense(weights_path);
  bitmm::ApbParams params;
  if (alpha && delta) {
    params.alpha = *alpha;
    params.delta = *delta;
  } else if (!alpha && !delta) {
    params = bitmm::init_alpha_delta(w);
  } else {
    throw std::invalid_argument("--alpha and --delta must be given together");
  }
  params.validate();

  std::uint64_t n = static_cast<std::uint64_t>(w.rows()) * static_cast<std::uint64_t>(w.cols());
  float bound = params.alpha + params.delta;
  std::uint64_t s = 0;
  for (float v : w.data())
    if (std::fabs(v) > bound) ++s;

  if (dims.empty())
    dims = {static_cast<std::uint64_t>(w.rows()), static_cast<std::uint64_t>(w.cols())};
  std::uint32_t b_p = bitmm::position_bits(dims);
  bitmm::MemoryBits mem = bitmm::memory_bits(n, s, b_v, b_p);

  nlohmann::json j;
  j["n"] = n;
  j["s"] = s;
  j["full_precision_fraction"] = n == 0 ? 0.0 : static_cast<double>(s) / static_cast<double>(n);
  j["alpha"] = params.alpha;
  j["delta"] = params.delta;
  j["b_v"] = b_v;
  j["b_p"] = b_p;
  j["exact_bits"] = mem.exact_bits;
  j["approx_bits"] = mem.approx_bits;
  j["avg_width_exact"] = mem.avg_width_exact;
  j["avg_width_approx"] = mem.avg_width_approx;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_pack(const std::string& input, const std::string& output, const std::string& mode,
             std::optional<float> step, std::optional<float> alpha, std::optional<float> delta) {
  bitmm::DenseMatrix w = bitmm::load_dense(input);
  if (mode == "sign") {
    bitmm::store_tensor(output, bitmm::pack_signs(w));
    std::printf("packed signs: %lld x %lld -> %s\n", static_cast<long long>(w.rows()),
                static_cast<long long>(w.cols()), output.c_str());
  } else if (mode == "thm") {
    if (!step) throw std::invalid_argument("--step is required for thm packing");
    bitmm::TwoBitMatrix q = bitmm::quantize_uniform_2bit(w, *step);
    bitmm::store_thm_planes(output, bitmm::decompose_thm(q));
    std::printf("packed planes: %lld x %lld step=%g -> %s.{t,h,m}.btsr + %s.json\n",
                static_cast<long long>(w.rows()), static_cast<long long>(w.cols()),
                static_cast<double>(*step), output.c_str(), output.c_str());
  } else if (mode == "apb") {
    bitmm::ApbParams params;
    if (alpha && delta) {
      params.alpha = *alpha;
      params.delta = *delta;
    } else if (!alpha && !delta) {
      params = bitmm::init_alpha_delta(w);
    } else {
      throw std::invalid_argument("--alpha and --delta must be given together");
    }
    bitmm::DenseMatrix fwd = bitmm::apb_forward(w, params);
    bitmm::ApbLayer layer = bitmm::decompose_apb(fwd, params.alpha);
    bitmm::store_apb_layer(output, layer);
    std::printf("packed layer: %lld x %lld alpha=%g nnz=%llu -> %s.{bin,res}.btsr + %s.json\n",
                static_cast<long long>(w.rows()), static_cast<long long>(w.cols()),
                static_cast<double>(params.alpha),
                static_cast<unsigned long long>(layer.residual.nnz()), output.c_str(),
                output.c_str());
  } else {
    throw std::invalid_argument("unknown pack mode: " + mode);
  }
  return kExitOk;
}

int cmd_shapes(std::int64_t c_in, std::int64_t c_out, std::int64_t kh, std::int64_t kw,
               std::int64_t h, std::int64_t w, std::int64_t stride, std::int64_t pad) {
  bitmm::GemmProblem p = bitmm::im2col_shape(c_in, c_out, kh, kw, h, w, stride, pad);
  std::printf("M=%lld K=%lld N=%lld\n", static_cast<long long>(p.m), static_cast<long long>(p.k),
              static_cast<long long>(p.n));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bitmm: bitwise low-bit matrix multiplication engine"};
  app.require_subcommand(1);

  std::string simd_name;
  app.add_option("--simd", simd_name, "force a kernel backend (scalar|avx2|avx512)");

  // verify
  auto* verify = app.add_subcommand("verify", "cross-check kernels against scalar oracles");
  std::uint64_t v_seed = 1;
  int v_gemm_cases = 60;
  std::int64_t v_max_dim = 96;
  int v_threads = 1;
  bool v_inject = false;
  verify->add_option("--seed", v_seed, "RNG seed");
  verify->add_option("--gemm-cases", v_gemm_cases, "number of random GEMM shapes")
      ->check(CLI::PositiveNumber);
  verify->add_option("--max-dim", v_max_dim, "largest random dimension")
      ->check(CLI::PositiveNumber);
  verify->add_option("--threads", v_threads, "worker count")->check(CLI::PositiveNumber);
  verify->add_flag("--inject-fault", v_inject,
                   "flip one output cell to demonstrate failure reporting");

  // bench
  auto* bench = app.add_subcommand("bench", "time routines and report gops");
  std::vector<std::string> b_routines;
  std::int64_t b_m = 1024, b_k = 1024, b_n = 1024;
  std::string b_square;
  std::string b_csv;
  bitmm::BenchOptions b_opt;
  double b_clock = 0.0;
  bench->add_option("--routine", b_routines,
                    "routine to time (ref_dense|1x1|1x2|2x2|spmm|1x32_ref), repeatable");
  bench->add_option("--m", b_m, "rows of the first operand")->check(CLI::PositiveNumber);
  bench->add_option("--k", b_k, "shared dimension")->check(CLI::PositiveNumber);
  bench->add_option("--n", b_n, "columns of the second operand")->check(CLI::PositiveNumber);
  bench->add_option("--square", b_square, "sweep square sizes LO..HI[:STEP]");
  bench->add_option("--reps", b_opt.reps, "timed repetitions (median reported)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--warmup", b_opt.warmup, "untimed repetitions")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", b_opt.seed, "RNG seed for operand data");
  bench->add_option("--threads", b_opt.threads, "worker count")->check(CLI::PositiveNumber);
  bench->add_option("--clock-ghz", b_clock,
                    "machine clock for %-of-peak reporting (never auto-detected)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--csv", b_csv, "write records to this CSV file");
  bench->add_option("--density", b_opt.density, "nonzero fraction for spmm operands")
      ->check(CLI::Range(0.0f, 1.0f));

  // tpp
  auto* tpp = app.add_subcommand("tpp", "print the analytic throughput-peak table");
  double t_clock = 0.0;
  int t_lane = 512;
  double t_fma = 2.0;
  tpp->add_option("--clock-ghz", t_clock, "clock for absolute gops")->check(CLI::PositiveNumber);
  tpp->add_option("--lane-bits", t_lane, "SIMD register width")->check(CLI::PositiveNumber);
  tpp->add_option("--fma-throughput", t_fma, "fma issues per cycle")->check(CLI::PositiveNumber);

  // apb-stats
  auto* stats = app.add_subcommand("apb-stats", "sparsity and memory model of a weight tensor");
  std::string s_weights;
  double s_alpha = 0.0, s_delta = 0.0;
  std::uint32_t s_bv = 32;
  std::vector<std::uint64_t> s_dims;
  stats->add_option("--weights", s_weights, "dense weight container")->required();
  stats->add_option("--alpha", s_alpha, "binarization magnitude (defaults to mean |w|)");
  stats->add_option("--delta", s_delta, "interval half-width (defaults to 3*std(w))");
  stats->add_option("--bv", s_bv, "value bits per full-precision weight");
  stats->add_option("--dims", s_dims, "dimensions addressed by position indices")
      ->delimiter(',');

  // pack
  auto* pack = app.add_subcommand("pack", "convert a dense container to a packed form");
  std::string p_in, p_out, p_mode = "sign";
  double p_step = 0.0, p_alpha = 0.0, p_delta = 0.0;
  pack->add_option("--input", p_in, "dense input container")->required();
  pack->add_option("--output", p_out, "output path (file for sign, prefix otherwise)")
      ->required();
  pack->add_option("--mode", p_mode, "sign|thm|apb");
  pack->add_option("--step", p_step, "quantization step for thm");
  pack->add_option("--alpha", p_alpha, "binarization magnitude for apb");
  pack->add_option("--delta", p_delta, "interval half-width for apb");

  // shapes
  auto* shapes = app.add_subcommand("shapes", "lowered GEMM dimensions of a convolution");
  std::int64_t sh_cin = 0, sh_cout = 0, sh_kh = 0, sh_kw = 0, sh_h = 0, sh_w = 0, sh_stride = 1,
               sh_pad = 0;
  shapes->add_option("--cin", sh_cin, "input channels")->required();
  shapes->add_option("--cout", sh_cout, "output channels")->required();
  shapes->add_option("--kh", sh_kh, "kernel height")->required();
  shapes->add_option("--kw", sh_kw, "kernel width")->required();
  shapes->add_option("--height", sh_h, "input height")->required();
  shapes->add_option("--width", sh_w, "input width")->required();
  shapes->add_option("--stride", sh_stride, "stride");
  shapes->add_option("--pad", sh_pad, "zero padding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  try {
    apply_simd(simd_name);
    if (verify->parsed()) return cmd_verify(v_seed, v_gemm_cases, v_max_dim, v_threads, v_inject);
    if (bench->parsed()) {
      if (bench->count("--clock-ghz")) b_opt.clock_ghz = b_clock;
      return cmd_bench(b_routines, b_m, b_k, b_n, b_square, b_opt, b_csv);
    }
    if (tpp->parsed())
      return cmd_tpp(tpp->count("--clock-ghz") ? std::optional<double>(t_clock) : std::nullopt,
                     t_lane, t_fma);
    if (stats->parsed())
      return cmd_apb_stats(
          s_weights,
          stats->count("--alpha") ? std::optional<float>(static_cast<float>(s_alpha))
                                  : std::nullopt,
          stats->count("--delta") ? std::optional<float>(static_cast<float>(s_delta))
                                  : std::nullopt,
          s_bv, s_dims);
    if (pack->parsed())
      return cmd_pack(
          p_in, p_out, p_mode,
          pack->count("--step") ? std::optional<float>(static_cast<float>(p_step)) : std::nullopt,
          pack->count("--alpha") ? std::optional<float>(static_cast<float>(p_alpha))
                                 : std::nullopt,
          pack->count("--delta") ? std::optional<float>(static_cast<float>(p_delta))
                                 : std::nullopt);
    if (shapes->parsed())
      return cmd_shapes(sh_cin, sh_cout, sh_kh, sh_kw, sh_h, sh_w, sh_stride, sh_pad);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const bitmm::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
