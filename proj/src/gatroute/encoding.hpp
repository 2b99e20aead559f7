// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gatroute/topology.hpp"

namespace gatroute {

/// What a router sees when it holds a packet: itself, its neighbors and the
/// packet's destination.
struct Observation {
  NodeId current = 0;
  std::vector<NodeId> neighbors;  // sorted, excludes current
  NodeId destination = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

Observation observe(const Topology& t, NodeId current, NodeId destination);

/// N x 3 indicator matrix, row-major. Column 0 marks the current node,
/// column 1 its neighbors, column 2 the destination. Columns are
/// independent, so a neighbor that is also the destination reads [0, 1, 1].
class FeatureMatrix {
 public:
  static constexpr int kColumns = 3;

  explicit FeatureMatrix(int nodes) : nodes_(nodes), x_(static_cast<std::size_t>(nodes) * kColumns, 0.0) {}

  int nodes() const noexcept { return nodes_; }
  double operator()(int row, int col) const { return x_[static_cast<std::size_t>(row) * kColumns + col]; }
  double& operator()(int row, int col) { return x_[static_cast<std::size_t>(row) * kColumns + col]; }
  std::span<const double> row(int r) const { return {x_.data() + static_cast<std::size_t>(r) * kColumns, kColumns}; }
  std::span<const double> flat() const noexcept { return x_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  int nodes_;
  std::vector<double> x_;
};

FeatureMatrix encode(const Observation& obs, int nodes);

}  // namespace gatroute
