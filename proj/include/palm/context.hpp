// SPDX-License-Identifier: Apache-2.0
//
// Step II: assemble the focal context (structure + dependency) and the test
// context that accompany a focal method in prompts.
#pragma once

#include <string>
#include <vector>

#include "palm/model.hpp"

namespace palm {

enum class Rank { Direct, Indirect, Ambient };

struct ContextItem {
  ItemKind kind = ItemKind::TypeDecl;
  std::string text;
  std::string origin;
  Rank rank = Rank::Indirect;
};

struct FocalContext {
  std::vector<ContextItem> structure;
  std::vector<ContextItem> dependency;
  std::vector<ContextItem> test_context;
  long token_estimate = 0;  // ceil(total characters / 4)
  // Mandatory items alone exceed the budget.
  bool overflow = false;
};

// Items are emitted in fixed order: ambient, container definition + fields,
// directly called member methods as full defs, other member methods as
// signatures, direct dependencies as full defs, indirect dependencies as
// declarations, trait bounds, return types. Over budget, droppable items go
// in reverse priority: indirect, then non-called signatures, then bounds,
// then return-type info; the container definition and direct dependencies
// are never dropped.
FocalContext build_context(const FocalMethod& focal,
                           const ProgramModelDump& model, long budget_tokens);

std::string render_context(const FocalContext& ctx);

// Section renderers used for prompt assembly (focal context vs test context).
std::string render_section(const std::vector<ContextItem>& items,
                           const std::string& header);
std::string render_focal_sections(const FocalContext& ctx);

long estimate_tokens_for_chars(std::size_t chars);

}  // namespace palm
