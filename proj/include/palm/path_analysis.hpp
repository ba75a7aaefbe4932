// SPDX-License-Identifier: Apache-2.0
//
// Step I: enumerate execution paths of a focal method's CFG as condition
// chains, with bounded loop revisits and loop-terminating markers.
#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "palm/model.hpp"

namespace palm {

struct TraversalConfig {
  // At the final allowed occurrence of a branch site only loop-exiting
  // outcomes are explored; the default of 2 gives one repeated loop
  // evaluation with the second marked loop-terminating.
  int max_occurrences_per_site = 2;
  int max_paths = 4096;
};

struct ConditionStep {
  int site = 0;  // block id of the branch site
  int occurrence = 1;
  std::string outcome;
  bool loop_terminating = false;
  ConditionExpr expr;
};

struct ConditionChain {
  int path_id = 0;
  std::vector<ConditionStep> steps;
  std::string return_descriptor = "unit";
};

struct CoverageAtom {
  int site = 0;
  int occurrence = 1;
  std::string outcome;

  auto operator<=>(const CoverageAtom&) const = default;
};

std::vector<ConditionChain> enumerate_paths(const ControlFlowGraph& cfg,
                                            const TraversalConfig& config = {});

std::set<CoverageAtom> atoms_of(const ConditionChain& chain);

nlohmann::json chains_to_json(const std::string& focal_id,
                              const std::vector<ConditionChain>& chains);
std::vector<ConditionChain> chains_from_json(const nlohmann::json& j,
                                             std::string* focal_id = nullptr);

}  // namespace palm
