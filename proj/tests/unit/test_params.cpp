// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "gatroute/error.hpp"
#include "gatroute/params.hpp"

using namespace gatroute;

namespace {

ParamSet scalar(double v) {
  ParamSet p({{"w", 1, 1, 0}});
  p.values()[0] = v;
  return p;
}

ParamSet two_blocks() {
  ParamSet p({{"a", 2, 3, 0}, {"b", 1, 2, 0}});
  for (std::size_t k = 0; k < p.size(); ++k) p.values()[k] = 0.1 * static_cast<double>(k) - 0.3;
  return p;
}

}  // namespace

TEST_CASE("blocks are laid out back to back") {
  auto p = two_blocks();
  CHECK(p.size() == 8);
  CHECK(p.block_info("b").offset == 6);
  CHECK(p.block("b").size() == 2);
  CHECK(p.block("b")[0] == doctest::Approx(0.3));
  CHECK_THROWS_AS(p.block("c"), ContractViolation);
}

TEST_CASE("sgd_step") {
  auto p = scalar(1.0);
  sgd_step(p, scalar(2.0), 0.1);
  CHECK(p.values()[0] == doctest::Approx(0.8));
  auto q = two_blocks();
  auto keep = q;
  auto zero = q;
  zero.fill(0.0);
  sgd_step(q, zero, 0.5);
  CHECK(q == keep);
  sgd_step(q, keep, 0.0);
  CHECK(q == keep);
  CHECK_THROWS_AS(sgd_step(q, scalar(1), 0.1), ContractViolation);
}

TEST_CASE("soft_update") {
  auto target = scalar(0.0);
  soft_update(target, scalar(2.0), 0.5);
  CHECK(target.values()[0] == doctest::Approx(1.0));
  auto main = two_blocks();
  auto t1 = main;
  t1.fill(-4.0);
  auto keep = t1;
  soft_update(t1, main, 0.0);
  CHECK(t1 == keep);
  soft_update(t1, main, 1.0);
  CHECK(t1 == main);
}

TEST_CASE("checkpoint round-trip is exact") {
  auto p = two_blocks();
  p.values()[3] = 1.0 / 3.0;
  p.values()[4] = -std::numeric_limits<double>::denorm_min();
  std::string kind;
  auto back = from_checkpoint(to_checkpoint(p, "dgatr"), &kind);
  CHECK(kind == "dgatr");
  CHECK(back == p);
  CHECK(back.layout() == p.layout());
}

TEST_CASE("malformed checkpoints") {
  CHECK_THROWS_AS(from_checkpoint("hello"), ParseError);
  auto text = to_checkpoint(scalar(1.5), "dqn");
  CHECK_THROWS_AS(from_checkpoint(text.substr(0, text.size() - 4)), ParseError);
}

TEST_CASE("all_finite") {
  auto p = scalar(1.0);
  CHECK(p.all_finite());
  p.values()[0] = std::nan("");
  CHECK_FALSE(p.all_finite());
}
