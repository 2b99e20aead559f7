// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "gatroute/error.hpp"

namespace gatroute {

ParamSet::ParamSet(std::vector<ParamBlock> blocks) {
  std::size_t offset = 0;
  for (auto& b : blocks) {
    if (b.rows <= 0 || b.cols <= 0) throw ContractViolation("parameter block " + b.name + " has empty shape");
    b.offset = offset;
    offset += b.size();
  }
  layout_ = std::make_shared<const std::vector<ParamBlock>>(std::move(blocks));
  values_.assign(offset, 0.0);
}

const ParamBlock& ParamSet::block_info(std::string_view name) const {
  for (const auto& b : *layout_) {
    if (b.name == name) return b;
  }
  throw ContractViolation("no parameter block named " + std::string(name));
}

std::span<double> ParamSet::block(std::string_view name) {
  const auto& b = block_info(name);
  return std::span<double>(values_).subspan(b.offset, b.size());
}

std::span<const double> ParamSet::block(std::string_view name) const {
  const auto& b = block_info(name);
  return std::span<const double>(values_).subspan(b.offset, b.size());
}

bool ParamSet::same_layout(const ParamSet& other) const {
  return layout_ == other.layout_ || *layout_ == *other.layout_;
}

void ParamSet::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool ParamSet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void sgd_step(ParamSet& p, const Gradient& grad, double alpha) {
  if (!p.same_layout(grad)) throw ContractViolation("gradient shape does not match parameters");
  auto w = p.values();
  auto g = grad.values();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] -= alpha * g[k];
}

void soft_update(ParamSet& target, const ParamSet& main, double tau) {
  if (!target.same_layout(main)) throw ContractViolation("target and main networks differ in shape");
  auto t = target.values();
  auto m = main.values();
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = tau * m[k] + (1.0 - tau) * t[k];
}

namespace {

constexpr std::string_view kMagic = "gatroute-params";
constexpr int kVersion = 1;

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string to_checkpoint(const ParamSet& p, std::string_view model_kind) {
  std::string out;
  out.reserve(p.size() * 22 + 256);
  out += kMagic;
  out += " v" + std::to_string(kVersion) + " " + std::string(model_kind) + "\n";
  for (const auto& b : p.layout()) {
    out += b.name + " " + std::to_string(b.rows) + " " + std::to_string(b.cols) + "\n";
    auto vals = p.values().subspan(b.offset, b.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      append_double(out, vals[k]);
      out += ((k + 1) % static_cast<std::size_t>(b.cols) == 0) ? '\n' : ' ';
    }
  }
  return out;
}

ParamSet from_checkpoint(std::string_view text, std::string* model_kind) {
  std::istringstream in{std::string(text)};
  std::string magic, version, kind;
  if (!(in >> magic >> version >> kind) || magic != kMagic) throw ParseError("not a gatroute checkpoint", 1);
  if (version != "v" + std::to_string(kVersion)) throw ParseError("unsupported checkpoint version " + version, 1);
  std::vector<ParamBlock> blocks;
  std::vector<double> values;
  std::string name;
  while (in >> name) {
    ParamBlock b;
    b.name = name;
    if (!(in >> b.rows >> b.cols) || b.rows <= 0 || b.cols <= 0) throw ParseError("bad shape for block " + name, 0);
    for (std::size_t k = 0; k < b.size(); ++k) {
      std::string tok;
      double v = 0.0;
      if (!(in >> tok)) throw ParseError("truncated block " + name, 0);
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw ParseError("bad value in block " + name, 0);
      values.push_back(v);
    }
    blocks.push_back(std::move(b));
  }
  ParamSet p(std::move(blocks));
  std::copy(values.begin(), values.end(), p.values().begin());
  if (model_kind) *model_kind = kind;
  return p;
}

}  // namespace gatroute
