// Copyright (c) 2026 The gatroute Authors
// SPDX-License-Identifier: Apache-2.0

#include "gatroute/encoding.hpp"

#include "gatroute/error.hpp"

namespace gatroute {

Observation observe(const Topology& t, NodeId current, NodeId destination) {
  auto nb = t.neighbors(current);
  if (!t.valid(destination)) throw ContractViolation("destination out of range");
  return Observation{current, {nb.begin(), nb.end()}, destination};
}

FeatureMatrix encode(const Observation& obs, int nodes) {
  auto check = [nodes](NodeId id) {
    if (id < 0 || id >= nodes) {
      throw ContractViolation("node " + std::to_string(id) + " out of range for N=" + std::to_string(nodes));
    }
  };
  check(obs.current);
  check(obs.destination);
  FeatureMatrix x(nodes);
  x(obs.current, 0) = 1.0;
  for (NodeId j : obs.neighbors) {
    check(j);
    x(j, 1) = 1.0;
  }
  x(obs.destination, 2) = 1.0;
  return x;
}

}  // namespace gatroute
