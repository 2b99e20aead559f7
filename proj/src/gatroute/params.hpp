// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gatroute {

struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  friend bool operator==(const ParamBlock&, const ParamBlock&) = default;
};

/// Flat vector of learnable values partitioned into named row-major blocks.
/// Gradients use the same type and layout as the parameters they belong to.
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::vector<ParamBlock> blocks);

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  const std::vector<ParamBlock>& layout() const noexcept { return *layout_; }
  const ParamBlock& block_info(std::string_view name) const;
  std::span<double> block(std::string_view name);
  std::span<const double> block(std::string_view name) const;

  bool same_layout(const ParamSet& other) const;
  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const ParamSet& a, const ParamSet& b) { return a.same_layout(b) && a.values_ == b.values_; }

 private:
  std::shared_ptr<const std::vector<ParamBlock>> layout_ = std::make_shared<const std::vector<ParamBlock>>();
  std::vector<double> values_;
};

using Gradient = ParamSet;

/// p <- p - alpha * grad
void sgd_step(ParamSet& p, const Gradient& grad, double alpha);
/// target <- tau * main + (1 - tau) * target
void soft_update(ParamSet& target, const ParamSet& main, double tau);

/// Plain-text checkpoint: header line, then per block `name rows cols` and
/// its values in shortest round-trip decimal form.
std::string to_checkpoint(const ParamSet& p, std::string_view model_kind);
ParamSet from_checkpoint(std::string_view text, std::string* model_kind = nullptr);

}  // namespace gatroute
