// Copyright (C) 2026 bitmm contributors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>

#include "bitmm/errors.hpp"
#include "bitmm/transform.hpp"

using namespace bitmm;

TEST_CASE("uniform 2-bit quantizer") {
  DenseMatrix m(1, 4, {0.0f, 0.9f, 2.2f, 7.0f});
  TwoBitMatrix q = quantize_uniform_2bit(m, 1.0f);
  CHECK(q.level(0, 0) == 0);
  CHECK(q.level(0, 1) == 1);
  CHECK(q.level(0, 2) == 2);
  CHECK(q.level(0, 3) == 3);  // clamped high
  CHECK(q.scale == 1.0f);

  DenseMatrix neg(1, 3, {-5.0f, 0.5f, 1.5f});
  TwoBitMatrix qn = quantize_uniform_2bit(neg, 1.0f);
  CHECK(qn.level(0, 0) == 0);  // clamped low
  CHECK(qn.level(0, 1) == 1);  // ties round away from zero
  CHECK(qn.level(0, 2) == 2);

  TwoBitMatrix qs = quantize_uniform_2bit(DenseMatrix(1, 1, {1.2f}), 0.5f);
  CHECK(qs.level(0, 0) == 2);

  CHECK_THROWS_AS(quantize_uniform_2bit(m, 0.0f), std::invalid_argument);
  CHECK_THROWS_AS(quantize_uniform_2bit(m, -1.0f), std::invalid_argument);
}

TEST_CASE("levels decode as p times scale") {
  TwoBitMatrix q{2, 3, {0, 1, 2, 3, 0, 2}, 2.0f};
  DenseMatrix d = q.to_dense();
  CHECK(d.at(0, 0) == 0.0f);
  CHECK(d.at(0, 1) == 2.0f);
  CHECK(d.at(0, 2) == 4.0f);
  CHECK(d.at(1, 0) == 6.0f);
  CHECK(d.at(1, 2) == 4.0f);
}

TEST_CASE("zero centering of levels") {
  TwoBitMatrix q{1, 4, {0, 1, 2, 3}, 1.0f};
  ZeroCentered z = zero_center(q);
  CHECK(z.mu == 1.5f);
  CHECK(z.value(0, 0) == -1.5f);
  CHECK(z.value(0, 1) == -0.5f);
  CHECK(z.value(0, 2) == 0.5f);
  CHECK(z.value(0, 3) == 1.5f);
  DenseMatrix d = z.to_dense();
  CHECK(d.at(0, 3) == 1.5f);

  TwoBitMatrix qh{1, 1, {3}, 0.5f};
  ZeroCentered zh = zero_center(qh);
  CHECK(zh.mu == 0.75f);
  CHECK(zh.value(0, 0) == 0.75f);
}

TEST_CASE("plane decomposition frozen table") {
  TwoBitMatrix q{1, 4, {0, 1, 2, 3}, 1.0f};
  ThmPlanes planes = decompose_thm(q);
  planes.validate();
  CHECK(planes.scale == 1.0f);
  CHECK_FALSE(planes.gamma.has_value());

  // level 0, centered -3/2: t=0 h=0 m=1
  CHECK_FALSE(planes.t.bit(0, 0));
  CHECK_FALSE(planes.h.bit(0, 0));
  CHECK(planes.m.bit(0, 0));
  // level 1, centered -1/2: t=0 h=0 m=0
  CHECK_FALSE(planes.t.bit(0, 1));
  CHECK_FALSE(planes.h.bit(0, 1));
  CHECK_FALSE(planes.m.bit(0, 1));
  // level 2, centered +1/2: t=0 h=1 m=0
  CHECK_FALSE(planes.t.bit(0, 2));
  CHECK(planes.h.bit(0, 2));
  CHECK_FALSE(planes.m.bit(0, 2));
  // level 3, centered +3/2: t=1 h=0 m=1
  CHECK(planes.t.bit(0, 3));
  CHECK_FALSE(planes.h.bit(0, 3));
  CHECK(planes.m.bit(0, 3));

  ThmPlanes with_gamma = decompose_thm(q, 0.5f);
  REQUIRE(with_gamma.gamma.has_value());
  CHECK(*with_gamma.gamma == 0.5f);
}

TEST_CASE("plane decomposition is a bijection on level strings") {
  constexpr std::int64_t kCols = 6;
  TwoBitMatrix q{1, kCols, std::vector<std::uint8_t>(kCols, 0), 1.0f};
  for (std::uint32_t code = 0; code < (1u << (2 * kCols)); ++code) {
    for (std::int64_t c = 0; c < kCols; ++c)
      q.levels[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>((code >> (2 * c)) & 3u);
    ThmPlanes planes = decompose_thm(q);
    TwoBitMatrix back = recompose_thm(planes);
    REQUIRE(back.levels.size() == q.levels.size());
    for (std::int64_t c = 0; c < kCols; ++c) CHECK(back.level(0, c) == q.level(0, c));
  }
}

TEST_CASE("recompose rejects inconsistent planes") {
  ThmPlanes p;
  p.t = BitMatrix(1, 2);
  p.h = BitMatrix(1, 2);
  p.m = BitMatrix(1, 2);
  p.scale = 1.0f;
  p.t.set_bit(0, 0, true);  // t set without m
  CHECK_THROWS_AS(recompose_thm(p), InvalidEncoding);
}

TEST_CASE("row correction for sign times centered operand") {
  DenseMatrix w(1, 4, {1.0f, -1.0f, 1.0f, 1.0f});
  BitMatrix wb = pack_signs(w);
  std::vector<float> corr = row_correction_1x2(wb, 1.0f, 1.5f);
  REQUIRE(corr.size() == 1);
  CHECK(corr[0] == 3.0f);  // 1.0 * 1.5 * (+1 -1 +1 +1)

  std::vector<float> scaled = row_correction_1x2(wb, 0.5f, 2.0f);
  CHECK(scaled[0] == 2.0f);
}

TEST_CASE("mean corrections for the two-bit by two-bit product") {
  // w row levels [3, 1], a column levels [0, 2], unit scales
  TwoBitMatrix wq{1, 2, {3, 1}, 1.0f};
  TwoBitMatrix aq{1, 2, {0, 2}, 1.0f};  // packed along the shared dimension
  ThmPlanes wp = decompose_thm(wq);
  ThmPlanes ap = decompose_thm(aq);

  Corrections2x2 c = corrections_2x2(wp, ap);
  REQUIRE(c.row_terms.size() == 1);
  REQUIRE(c.col_terms.size() == 1);
  // mu_a * sum of centered w = 1.5 * (1.5 - 0.5)
  CHECK(c.row_terms[0] == doctest::Approx(1.5).epsilon(1e-12));
  // mu_w * sum of centered a = 1.5 * (-1.5 + 0.5)
  CHECK(c.col_terms[0] == doctest::Approx(-1.5).epsilon(1e-12));
  // K * mu_w * mu_a = 2 * 1.5 * 1.5
  CHECK(c.const_term == doctest::Approx(4.5).epsilon(1e-12));

  // full product check: sum_k level_w[k]*level_a[k] = 3*0 + 1*2 = 2
  double centered = 1.5 * (-1.5) + (-0.5) * 0.5;
  CHECK(centered + c.row_terms[0] + c.col_terms[0] + c.const_term ==
        doctest::Approx(2.0).epsilon(1e-12));

  TwoBitMatrix bad{1, 3, {0, 0, 0}, 1.0f};
  CHECK_THROWS_AS(corrections_2x2(wp, decompose_thm(bad)), std::invalid_argument);
}
