// SPDX-License-Identifier: Apache-2.0
//
// Greedy set cover over coverage atoms: pick the path covering the most
// still-uncovered atoms until every atom is covered.
#pragma once

#include <vector>

#include "palm/path_analysis.hpp"

namespace palm {

// Selection order is preserved; ties break toward the lowest path id.
std::vector<ConditionChain> minimize(const std::vector<ConditionChain>& paths);

struct CoverageSummary {
  std::size_t atoms_covered = 0;
  std::size_t atoms_total = 0;
  double ratio = 0.0;
  std::vector<CoverageAtom> uncovered;
};

CoverageSummary coverage_report(const std::vector<ConditionChain>& selected,
                                const std::vector<ConditionChain>& all);

}  // namespace palm
