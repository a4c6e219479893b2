// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bitmm/apb.hpp"
#include "bitmm/bench.hpp"
#include "bitmm/tensor_io.hpp"
#include "bitmm/transform.hpp"

using namespace bitmm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bitmm_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
  int exit_code = -1;
  std::string output;

  bool contains(const std::string& needle) const {
    return output.find(needle) != std::string::npos;
  }
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + BITMM_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, got);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("convolution lowering frozen shapes") {
  GemmProblem p = im2col_shape(64, 128, 3, 3, 56, 56, 1, 1);
  CHECK(p.m == 128);
  CHECK(p.k == 576);
  CHECK(p.n == 3136);

  GemmProblem strided = im2col_shape(64, 128, 3, 3, 56, 56, 2, 1);
  CHECK(strided.n == 784);  // floor(55/2)+1 = 28 per axis

  GemmProblem pointwise = im2col_shape(3, 8, 1, 1, 10, 10);
  CHECK(pointwise.m == 8);
  CHECK(pointwise.k == 3);
  CHECK(pointwise.n == 100);

  CHECK_THROWS_AS(im2col_shape(1, 1, 9, 9, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(im2col_shape(0, 1, 1, 1, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(im2col_shape(1, 1, 1, 1, 3, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(im2col_shape(1, 1, 1, 1, 3, 3, 1, -1), std::invalid_argument);
}

TEST_CASE("bench runner fills the record") {
  GemmProblem p{16, 256, 16};
  BenchOptions opt;
  opt.reps = 3;
  opt.warmup = 1;
  opt.seed = 7;

  BenchRecord rec = bench_routine(Routine::k1x1, p, opt);
  CHECK(rec.routine == Routine::k1x1);
  CHECK(rec.m == 16);
  CHECK(rec.k == 256);
  CHECK(rec.n == 16);
  CHECK(rec.reps == 3);
  CHECK(rec.warmup == 1);
  CHECK(!rec.simd.empty());
  CHECK(rec.seconds >= 0.0);
  CHECK(rec.gops >= 0.0);
  CHECK(rec.gflops == 2.0 * rec.gops);
  CHECK_FALSE(rec.tpp_gops.has_value());
  CHECK_FALSE(rec.pct_tpp.has_value());

  opt.clock_ghz = 3.0;
  BenchRecord clocked = bench_routine(Routine::k2x2, p, opt);
  REQUIRE(clocked.tpp_gops.has_value());
  REQUIRE(clocked.pct_tpp.has_value());
  // 2/2 peak at 3 GHz: 3e9 * (1024/3)/8 updates/s
  CHECK(*clocked.tpp_gops == doctest::Approx(3.0 * 1024.0 / 24.0).epsilon(1e-9));

  CHECK_THROWS_AS(bench_routine(Routine::k1x1, GemmProblem{0, 1, 1}, opt),
                  std::invalid_argument);
}

TEST_CASE("csv schema") {
  std::ostringstream os;
  write_csv_header(os);
  CHECK(os.str() == "routine,m,k,n,reps,warmup,threads,simd,seconds,gops,gflops,tpp_gops,pct_tpp\n");

  BenchRecord rec;
  rec.routine = Routine::k1x1;
  rec.m = 1;
  rec.k = 2;
  rec.n = 3;
  rec.reps = 4;
  rec.warmup = 5;
  rec.threads = 6;
  rec.simd = "scalar";
  rec.seconds = 0.5;
  rec.gops = 1.5;
  rec.gflops = 3.0;
  std::ostringstream line;
  write_csv_record(line, rec);
  CHECK(line.str() == "1x1,1,2,3,4,5,6,scalar,0.5,1.5,3,,\n");

  rec.tpp_gops = 2.0;
  rec.pct_tpp = 75.0;
  std::ostringstream full;
  write_csv_record(full, rec);
  CHECK(full.str() == "1x1,1,2,3,4,5,6,scalar,0.5,1.5,3,2,75\n");
}

TEST_CASE("cli usage errors") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
  CHECK(run_cli("verify --gemm-cases 0").exit_code == 2);
  CHECK(run_cli("--simd sse9 verify").exit_code == 2);

  CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.contains("bitmm"));
}

TEST_CASE("cli shapes") {
  CliResult res = run_cli("shapes --cin 64 --cout 128 --kh 3 --kw 3 --height 56 --width 56 --pad 1");
  CHECK(res.exit_code == 0);
  CHECK(res.contains("M=128 K=576 N=3136"));

  CHECK(run_cli("shapes --cin 1 --cout 1 --kh 9 --kw 9 --height 3 --width 3").exit_code == 2);
  CHECK(run_cli("shapes --cin 1 --cout 1").exit_code == 2);  // missing required options
}

TEST_CASE("cli tpp table") {
  CliResult res = run_cli("tpp");
  CHECK(res.exit_code == 0);
  CHECK(res.contains("fp32"));
  CHECK(res.contains("341.33"));  // 1/1 values per cycle at 512-bit lanes
  CHECK(res.contains("10.67"));   // fp32 cost relative to the 1/1 kernel
  CHECK(res.contains("8.00"));    // 2/2 cost ratio
  CHECK_FALSE(res.contains("peak_gops"));

  CliResult clocked = run_cli("tpp --clock-ghz 2.0");
  CHECK(clocked.exit_code == 0);
  CHECK(clocked.contains("peak_gops"));

  CliResult wide = run_cli("tpp --lane-bits 256");
  CHECK(wide.exit_code == 0);
  CHECK(wide.contains("170.67"));  // 2*256/3
}

TEST_CASE("cli verify") {
  CliResult ok = run_cli("verify --gemm-cases 4 --max-dim 20 --seed 3");
  CHECK(ok.exit_code == 0);
  CHECK(ok.contains("all suites passed"));
  CHECK(ok.contains("suite dot-binary-exhaustive"));
  CHECK(ok.contains("mismatches=0"));

  CliResult scalar = run_cli("--simd scalar verify --gemm-cases 2 --max-dim 10");
  CHECK(scalar.exit_code == 0);

  CliResult fault = run_cli("verify --gemm-cases 2 --max-dim 12 --inject-fault");
  CHECK(fault.exit_code == 1);
  CHECK(fault.contains("verification FAILED"));
  CHECK(fault.contains("first failure"));
  CHECK(fault.contains("routine=1x1"));
  CHECK(fault.contains("cell=(0,0)"));
}

TEST_CASE("cli bench") {
  TempDir tmp;
  std::string csv_path = tmp.file("bench.csv");
  CliResult res = run_cli("bench --routine 1x1 --m 8 --k 128 --n 8 --reps 3 --warmup 1 "
                          "--clock-ghz 3.0 --csv " + csv_path);
  CHECK(res.exit_code == 0);
  CHECK(res.contains("1x1"));
  CHECK(res.contains("pct_tpp="));

  std::ifstream csv(csv_path);
  REQUIRE(csv.good());
  std::string header, line;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "routine,m,k,n,reps,warmup,threads,simd,seconds,gops,gflops,tpp_gops,pct_tpp");
  REQUIRE(std::getline(csv, line));
  CHECK(line.rfind("1x1,8,128,8,3,1,1,", 0) == 0);
  CHECK(std::count(line.begin(), line.end(), ',') == 12);
  CHECK(line.back() != ',');  // pct_tpp filled when a clock is given
  CHECK_FALSE(std::getline(csv, line));

  CliResult sweep = run_cli("bench --routine 1x1 --square 8..16:8 --reps 2 --warmup 0");
  CHECK(sweep.exit_code == 0);
  std::vector<std::string> lines = split_lines(sweep.output);
  CHECK(lines.size() == 2);
  CHECK(lines[0].find("m=8 ") != std::string::npos);
  CHECK(lines[1].find("m=16 ") != std::string::npos);

  CHECK(run_cli("bench --square nonsense").exit_code == 2);
  CHECK(run_cli("bench --routine warp9 --m 4 --k 4 --n 4").exit_code == 2);
}

TEST_CASE("cli pack and stats") {
  TempDir tmp;
  DenseMatrix w(2, 2, {0.5f, -0.5f, 2.0f, 0.5f});
  std::string in = tmp.file("w.btsr");
  store_tensor(in, w);

  SUBCASE("sign packing") {
    std::string out = tmp.file("signs.btsr");
    CliResult res = run_cli("pack --input " + in + " --output " + out + " --mode sign");
    CHECK(res.exit_code == 0);
    CHECK(res.contains("packed signs"));
    CHECK(load_bit(out) == pack_signs(w));
  }

  SUBCASE("plane packing") {
    std::string prefix = tmp.file("planes");
    CliResult res = run_cli("pack --input " + in + " --output " + prefix +
                            " --mode thm --step 0.5");
    CHECK(res.exit_code == 0);
    ThmPlanes got = load_thm_planes(prefix);
    ThmPlanes want = decompose_thm(quantize_uniform_2bit(w, 0.5f));
    CHECK(got.t == want.t);
    CHECK(got.h == want.h);
    CHECK(got.m == want.m);
    CHECK(got.scale == 0.5f);
    CHECK_FALSE(got.gamma.has_value());

    CHECK(run_cli("pack --input " + in + " --output " + prefix + " --mode thm").exit_code == 2);
  }

  SUBCASE("layer packing") {
    std::string prefix = tmp.file("layer");
    CliResult res = run_cli("pack --input " + in + " --output " + prefix +
                            " --mode apb --alpha 0.5 --delta 0.1");
    CHECK(res.exit_code == 0);
    CHECK(res.contains("packed layer"));
    ApbLayer layer = load_apb_layer(prefix);
    ApbParams params{0.5f, 0.1f};
    CHECK(reconstruct_apb(layer) == apb_forward(w, params));
    CHECK(layer.residual.nnz() == 1);  // only the 2.0 entry stays full precision
  }

  SUBCASE("stats json") {
    CliResult res = run_cli("apb-stats --weights " + in + " --alpha 0.5 --delta 0.1 --bv 32");
    CHECK(res.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(res.output);
    CHECK(j.at("n").get<std::uint64_t>() == 4);
    CHECK(j.at("s").get<std::uint64_t>() == 1);
    CHECK(j.at("alpha").get<double>() == doctest::Approx(0.5));
    CHECK(j.at("b_p").get<int>() == 1);  // dims default to {2, 2}
    CHECK(j.at("b_v").get<int>() == 32);
    CHECK(j.at("exact_bits").get<std::uint64_t>() == 36);   // 3 + 33
    CHECK(j.at("approx_bits").get<std::uint64_t>() == 37);  // 4 + 33
    CHECK(j.at("full_precision_fraction").get<double>() == doctest::Approx(0.25));

    CliResult dims = run_cli("apb-stats --weights " + in +
                             " --alpha 0.5 --delta 0.1 --dims 1024,1024");
    nlohmann::json jd = nlohmann::json::parse(dims.output);
    CHECK(jd.at("b_p").get<int>() == 10);

    CHECK(run_cli("apb-stats --weights " + in + " --alpha 0.5").exit_code == 2);
    CHECK(run_cli("apb-stats --alpha 0.5 --delta 0.1").exit_code == 2);
  }

  SUBCASE("io failures") {
    CHECK(run_cli("pack --input " + tmp.file("missing.btsr") + " --output " +
                  tmp.file("o.btsr") + " --mode sign").exit_code == 3);
    CHECK(run_cli("apb-stats --weights " + tmp.file("missing.btsr")).exit_code == 3);
  }
}
