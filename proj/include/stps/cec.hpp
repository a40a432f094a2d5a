// SPDX-License-Identifier: Apache-2.0
//
// Combinational equivalence checking of two networks.

#pragma once

#include "stps/network.hpp"

#include <string>
#include <utility>
#include <vector>

namespace stps {

struct CecResult {
  bool equivalent = false;
  /// "exhaustive" or "sat"
  std::string method;
  /// For an inequivalent pair: the first differing PO (by name) and a PI
  /// assignment, in the PI order of the first network, that exposes it.
  std::string failing_po;
  std::vector<std::pair<std::string, bool>> ce;
};

/// PIs and POs are matched by name when both networks use the same name
/// sets, otherwise by position. Networks with at most `exhaustive_max_pis`
/// PIs are compared by exhaustive simulation; larger ones through one SAT
/// miter per PO. Throws std::invalid_argument on an interface mismatch.
CecResult check_equivalence(const Network &a, const Network &b,
                            unsigned exhaustive_max_pis = 14);

} // namespace stps
