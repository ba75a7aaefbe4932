// SPDX-License-Identifier: Apache-2.0
#include "palm/minimize.hpp"

#include <algorithm>
#include <cassert>

namespace palm {

std::vector<ConditionChain> minimize(const std::vector<ConditionChain>& paths) {
  std::vector<std::set<CoverageAtom>> path_atoms;
  path_atoms.reserve(paths.size());
  std::set<CoverageAtom> uncovered;
  for (const auto& p : paths) {
    path_atoms.push_back(atoms_of(p));
    uncovered.insert(path_atoms.back().begin(), path_atoms.back().end());
  }

  std::vector<ConditionChain> selected;
  std::vector<bool> taken(paths.size(), false);
  while (!uncovered.empty()) {
    std::size_t best = paths.size();
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (taken[i]) continue;
      std::size_t gain = 0;
      for (const auto& atom : path_atoms[i]) {
        if (uncovered.count(atom)) ++gain;
      }
      const bool wins =
          gain > best_gain ||
          (gain == best_gain && gain > 0 && best < paths.size() &&
           paths[i].path_id < paths[best].path_id);
      if (wins) {
        best = i;
        best_gain = gain;
      }
    }
    // The universe is built from these same paths, so some path must gain.
    assert(best < paths.size() && best_gain > 0);
    taken[best] = true;
    selected.push_back(paths[best]);
    for (const auto& atom : path_atoms[best]) uncovered.erase(atom);
  }
  return selected;
}

CoverageSummary coverage_report(const std::vector<ConditionChain>& selected,
                                const std::vector<ConditionChain>& all) {
  std::set<CoverageAtom> universe;
  for (const auto& p : all) {
    auto atoms = atoms_of(p);
    universe.insert(atoms.begin(), atoms.end());
  }
  std::set<CoverageAtom> covered;
  for (const auto& p : selected) {
    for (const auto& atom : atoms_of(p)) {
      if (universe.count(atom)) covered.insert(atom);
    }
  }
  CoverageSummary summary;
  summary.atoms_total = universe.size();
  summary.atoms_covered = covered.size();
  summary.ratio = universe.empty()
                      ? 1.0
                      : static_cast<double>(covered.size()) / universe.size();
  for (const auto& atom : universe) {
    if (!covered.count(atom)) summary.uncovered.push_back(atom);
  }
  return summary;
}

}  // namespace palm
