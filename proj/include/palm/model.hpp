// SPDX-License-Identifier: Apache-2.0
//
// Shared domain types: the program-model dump (CFGs, source text, context
// references) that the pipeline ingests, plus test artifacts.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "palm/errors.hpp"

namespace palm {

enum class TermKind { Branch, Return, Goto, Call };

enum class CondShape { SingleBoundary, RangeBased, Other };

struct ConditionExpr {
  std::string text;
  CondShape shape = CondShape::Other;  // classified from text at ingest
  std::optional<CondShape> declared_shape;
};

struct TargetEdge {
  std::string label;
  int to = 0;
};

struct Terminator {
  TermKind kind = TermKind::Return;
  std::optional<ConditionExpr> condition;  // Branch only
  std::vector<TargetEdge> targets;         // Branch >=2, Goto/Call ==1, Return 0
  std::optional<std::string> return_expr;  // Return only
};

struct BasicBlock {
  int id = 0;
  std::pair<int, int> source_span{0, 0};
  Terminator terminator;
};

struct ControlFlowGraph {
  std::vector<BasicBlock> blocks;
  int entry = 0;
  std::vector<int> exits;
  // Computed at ingest: edges whose target dominates their source.
  std::vector<std::pair<int, int>> back_edges;
  // Present only when the dump declared them; cross-checked by validation.
  std::optional<std::vector<std::pair<int, int>>> declared_back_edges;

  const BasicBlock* block(int id) const;
  bool is_exit(int id) const;
};

// Context-reference entries are either inline items or references to another
// function in the model (resolved to its definition or signature).
enum class ItemKind {
  UseStatement,
  GlobalDef,
  ContainerDef,
  FieldDecl,
  MethodSignature,
  MethodFullDef,
  TypeFullDef,
  TypeDecl,
  FunctionFullDef,
  FunctionSignature,
  TraitBound,
  ReturnTypeInfo,
};

struct RefItem {
  std::optional<ItemKind> kind;  // required for inline items
  std::string text;
  std::string origin;
  std::optional<std::string> ref;  // function id to resolve instead
};

struct ContainerRefs {
  std::optional<RefItem> def;
  std::vector<RefItem> fields;
  std::vector<std::pair<RefItem, bool>> methods;  // (item, called)
};

struct ContextRefs {
  std::vector<RefItem> ambient;
  std::optional<ContainerRefs> container;
  std::vector<RefItem> direct;
  std::vector<RefItem> indirect;
  std::vector<RefItem> bounds;
  std::vector<RefItem> returns;
  std::vector<RefItem> test;
};

struct FocalMethod {
  std::string id;
  std::string name;
  std::string signature;
  std::string body;
  std::string file_path;
  std::optional<std::string> container;
  ControlFlowGraph cfg;
  std::optional<ContextRefs> context_refs;
};

struct ProgramModelDump {
  int version = 1;
  std::vector<FocalMethod> functions;

  const FocalMethod* find(const std::string& id) const;
};

struct ValidationIssue {
  std::string entity;
  std::string message;
};

// Generated-test bookkeeping. Status moves forward only:
// Generated -> Compiled -> {Passed, Failed}; Unrepairable is terminal from
// Generated.
enum class TestStatus { Generated, Compiled, Passed, Failed, Unrepairable };

struct TestArtifact {
  std::string test_id;
  std::string focal_id;
  std::string path_tag;  // "path4", "path4/boundary-low", ...
  std::string source;
  TestStatus status = TestStatus::Generated;
  int repair_rounds_used = 0;
  long tokens_in = 0;
  long tokens_out = 0;
  std::string failure_note;
  bool budget_exhausted = false;
};

void advance_status(TestArtifact& artifact, TestStatus next);
std::string to_string(TestStatus status);
TestStatus test_status_from_string(const std::string& text);

ProgramModelDump parse_model(const nlohmann::json& j);
ProgramModelDump load_model(const std::filesystem::path& path);
nlohmann::json model_to_json(const ProgramModelDump& model);

// Canonical form: sorted keys, no insignificant whitespace, computed shapes
// and back edges materialized, absent optionals omitted.
std::string canonical_json(const nlohmann::json& j);

std::vector<ValidationIssue> validate_model(const ProgramModelDump& model);

// Syntactic classification over the predicate text. "x > 10" is a single
// boundary; "x >= 0 && x <= 10" is range-based; anything unparsed is Other.
CondShape classify_condition(const std::string& text);

// The conjunct(s) a boundary test should target: one entry for a single
// boundary, two for a range, none otherwise.
std::vector<std::string> boundary_targets(const std::string& text);

std::vector<std::pair<int, int>> compute_back_edges(const ControlFlowGraph& cfg);

std::string to_string(ItemKind kind);
ItemKind item_kind_from_string(const std::string& text);

}  // namespace palm
