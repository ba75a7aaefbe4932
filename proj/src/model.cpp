// SPDX-License-Identifier: Apache-2.0
#include "palm/model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <regex>
#include <set>
#include <sstream>

namespace palm {

using nlohmann::json;

const BasicBlock* ControlFlowGraph::block(int id) const {
  for (const auto& b : blocks) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

bool ControlFlowGraph::is_exit(int id) const {
  return std::find(exits.begin(), exits.end(), id) != exits.end();
}

const FocalMethod* ProgramModelDump::find(const std::string& id) const {
  for (const auto& f : functions) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

void advance_status(TestArtifact& artifact, TestStatus next) {
  const TestStatus cur = artifact.status;
  bool ok = false;
  switch (next) {
    case TestStatus::Compiled:
      ok = cur == TestStatus::Generated;
      break;
    case TestStatus::Passed:
    case TestStatus::Failed:
      ok = cur == TestStatus::Compiled;
      break;
    case TestStatus::Unrepairable:
      ok = cur == TestStatus::Generated;
      break;
    case TestStatus::Generated:
      ok = false;
      break;
  }
  if (!ok) {
    throw std::logic_error("illegal test status transition: " +
                           to_string(cur) + " -> " + to_string(next));
  }
  artifact.status = next;
}

std::string to_string(TestStatus status) {
  switch (status) {
    case TestStatus::Generated: return "generated";
    case TestStatus::Compiled: return "compiled";
    case TestStatus::Passed: return "passed";
    case TestStatus::Failed: return "failed";
    case TestStatus::Unrepairable: return "unrepairable";
  }
  return "unknown";
}

TestStatus test_status_from_string(const std::string& text) {
  if (text == "generated") return TestStatus::Generated;
  if (text == "compiled") return TestStatus::Compiled;
  if (text == "passed") return TestStatus::Passed;
  if (text == "failed") return TestStatus::Failed;
  if (text == "unrepairable") return TestStatus::Unrepairable;
  throw DumpParseError("unknown test status: " + text);
}

std::string to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::UseStatement: return "UseStatement";
    case ItemKind::GlobalDef: return "GlobalDef";
    case ItemKind::ContainerDef: return "ContainerDef";
    case ItemKind::FieldDecl: return "FieldDecl";
    case ItemKind::MethodSignature: return "MethodSignature";
    case ItemKind::MethodFullDef: return "MethodFullDef";
    case ItemKind::TypeFullDef: return "TypeFullDef";
    case ItemKind::TypeDecl: return "TypeDecl";
    case ItemKind::FunctionFullDef: return "FunctionFullDef";
    case ItemKind::FunctionSignature: return "FunctionSignature";
    case ItemKind::TraitBound: return "TraitBound";
    case ItemKind::ReturnTypeInfo: return "ReturnTypeInfo";
  }
  return "Unknown";
}

ItemKind item_kind_from_string(const std::string& text) {
  static const std::map<std::string, ItemKind> table = {
      {"UseStatement", ItemKind::UseStatement},
      {"GlobalDef", ItemKind::GlobalDef},
      {"ContainerDef", ItemKind::ContainerDef},
      {"FieldDecl", ItemKind::FieldDecl},
      {"MethodSignature", ItemKind::MethodSignature},
      {"MethodFullDef", ItemKind::MethodFullDef},
      {"TypeFullDef", ItemKind::TypeFullDef},
      {"TypeDecl", ItemKind::TypeDecl},
      {"FunctionFullDef", ItemKind::FunctionFullDef},
      {"FunctionSignature", ItemKind::FunctionSignature},
      {"TraitBound", ItemKind::TraitBound},
      {"ReturnTypeInfo", ItemKind::ReturnTypeInfo},
  };
  auto it = table.find(text);
  if (it == table.end()) throw DumpParseError("unknown context item kind: " + text);
  return it->second;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// One comparison of an identifier against a numeric bound, either side.
bool is_comparison(const std::string& text, std::string* var) {
  static const std::regex ident_op_num(
      R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(<=|>=|==|!=|<|>)\s*[+-]?[0-9]+(\.[0-9]+)?\s*$)");
  static const std::regex num_op_ident(
      R"(^\s*[+-]?[0-9]+(\.[0-9]+)?\s*(<=|>=|==|!=|<|>)\s*([A-Za-z_][A-Za-z0-9_]*)\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, ident_op_num)) {
    if (var) *var = m[1].str();
    return true;
  }
  if (std::regex_match(text, m, num_op_ident)) {
    if (var) *var = m[3].str();
    return true;
  }
  return false;
}

}  // namespace

CondShape classify_condition(const std::string& text) {
  const size_t amp = text.find("&&");
  if (amp == std::string::npos) {
    return is_comparison(text, nullptr) ? CondShape::SingleBoundary
                                        : CondShape::Other;
  }
  if (text.find("&&", amp + 2) != std::string::npos) return CondShape::Other;
  std::string lhs = text.substr(0, amp);
  std::string rhs = text.substr(amp + 2);
  std::string v1, v2;
  if (is_comparison(lhs, &v1) && is_comparison(rhs, &v2) && v1 == v2) {
    return CondShape::RangeBased;
  }
  return CondShape::Other;
}

std::vector<std::string> boundary_targets(const std::string& text) {
  switch (classify_condition(text)) {
    case CondShape::SingleBoundary:
      return {trim(text)};
    case CondShape::RangeBased: {
      const size_t amp = text.find("&&");
      return {trim(text.substr(0, amp)), trim(text.substr(amp + 2))};
    }
    case CondShape::Other:
      return {};
  }
  return {};
}

namespace {

std::string shape_to_string(CondShape s) {
  switch (s) {
    case CondShape::SingleBoundary: return "single";
    case CondShape::RangeBased: return "range";
    case CondShape::Other: return "other";
  }
  return "other";
}

CondShape shape_from_string(const std::string& s) {
  if (s == "single") return CondShape::SingleBoundary;
  if (s == "range") return CondShape::RangeBased;
  if (s == "other") return CondShape::Other;
  throw DumpParseError("unknown condition shape: " + s);
}

TermKind term_kind_from_string(const std::string& s) {
  if (s == "branch") return TermKind::Branch;
  if (s == "return") return TermKind::Return;
  if (s == "goto") return TermKind::Goto;
  if (s == "call") return TermKind::Call;
  throw DumpParseError("unknown terminator kind: " + s);
}

std::string term_kind_to_string(TermKind k) {
  switch (k) {
    case TermKind::Branch: return "branch";
    case TermKind::Return: return "return";
    case TermKind::Goto: return "goto";
    case TermKind::Call: return "call";
  }
  return "return";
}

RefItem parse_ref_item(const json& j, const std::string& where) {
  if (!j.is_object()) throw DumpParseError(where + ": context item must be an object");
  RefItem item;
  if (j.contains("ref")) {
    item.ref = j.at("ref").get<std::string>();
    return item;
  }
  if (!j.contains("kind") || !j.contains("text")) {
    throw DumpParseError(where + ": inline context item needs kind and text");
  }
  item.kind = item_kind_from_string(j.at("kind").get<std::string>());
  item.text = j.at("text").get<std::string>();
  item.origin = j.value("origin", "");
  return item;
}

json ref_item_to_json(const RefItem& item) {
  json j = json::object();
  if (item.ref) {
    j["ref"] = *item.ref;
    return j;
  }
  j["kind"] = to_string(item.kind.value());
  j["text"] = item.text;
  if (!item.origin.empty()) j["origin"] = item.origin;
  return j;
}

ContextRefs parse_context_refs(const json& j, const std::string& where) {
  ContextRefs refs;
  auto parse_list = [&](const char* key, std::vector<RefItem>* out) {
    if (!j.contains(key)) return;
    for (const auto& e : j.at(key)) out->push_back(parse_ref_item(e, where));
  };
  parse_list("ambient", &refs.ambient);
  parse_list("direct", &refs.direct);
  parse_list("indirect", &refs.indirect);
  parse_list("bounds", &refs.bounds);
  parse_list("returns", &refs.returns);
  parse_list("test", &refs.test);
  if (j.contains("container")) {
    const json& c = j.at("container");
    ContainerRefs cont;
    if (c.contains("def")) cont.def = parse_ref_item(c.at("def"), where);
    if (c.contains("fields")) {
      for (const auto& e : c.at("fields")) cont.fields.push_back(parse_ref_item(e, where));
    }
    if (c.contains("methods")) {
      for (const auto& e : c.at("methods")) {
        if (!e.contains("item")) throw DumpParseError(where + ": container method needs item");
        cont.methods.emplace_back(parse_ref_item(e.at("item"), where),
                                  e.value("called", false));
      }
    }
    refs.container = std::move(cont);
  }
  return refs;
}

json context_refs_to_json(const ContextRefs& refs) {
  json j = json::object();
  auto put_list = [&](const char* key, const std::vector<RefItem>& items) {
    if (items.empty()) return;
    json arr = json::array();
    for (const auto& it : items) arr.push_back(ref_item_to_json(it));
    j[key] = std::move(arr);
  };
  put_list("ambient", refs.ambient);
  put_list("direct", refs.direct);
  put_list("indirect", refs.indirect);
  put_list("bounds", refs.bounds);
  put_list("returns", refs.returns);
  put_list("test", refs.test);
  if (refs.container) {
    json c = json::object();
    if (refs.container->def) c["def"] = ref_item_to_json(*refs.container->def);
    if (!refs.container->fields.empty()) {
      json arr = json::array();
      for (const auto& f : refs.container->fields) arr.push_back(ref_item_to_json(f));
      c["fields"] = std::move(arr);
    }
    if (!refs.container->methods.empty()) {
      json arr = json::array();
      for (const auto& [item, called] : refs.container->methods) {
        arr.push_back(json{{"item", ref_item_to_json(item)}, {"called", called}});
      }
      c["methods"] = std::move(arr);
    }
    j["container"] = std::move(c);
  }
  return j;
}

ControlFlowGraph parse_cfg(const json& j, const std::string& where) {
  ControlFlowGraph cfg;
  cfg.entry = j.at("entry").get<int>();
  for (const auto& e : j.at("exits")) cfg.exits.push_back(e.get<int>());
  for (const auto& bj : j.at("blocks")) {
    BasicBlock b;
    b.id = bj.at("id").get<int>();
    if (bj.contains("span")) {
      b.source_span = {bj.at("span").at(0).get<int>(), bj.at("span").at(1).get<int>()};
    }
    const json& t = bj.at("term");
    b.terminator.kind = term_kind_from_string(t.at("kind").get<std::string>());
    if (t.contains("cond")) {
      ConditionExpr expr;
      expr.text = t.at("cond").get<std::string>();
      expr.shape = classify_condition(expr.text);
      if (t.contains("shape")) {
        // Declared shape is advisory; the classifier is authoritative and
        // validation reports disagreements.
        expr.declared_shape = shape_from_string(t.at("shape").get<std::string>());
      }
      b.terminator.condition = std::move(expr);
    }
    if (t.contains("targets")) {
      for (const auto& tj : t.at("targets")) {
        b.terminator.targets.push_back(
            {tj.at("label").get<std::string>(), tj.at("to").get<int>()});
      }
    }
    if (t.contains("ret")) b.terminator.return_expr = t.at("ret").get<std::string>();
    cfg.blocks.push_back(std::move(b));
  }
  if (j.contains("back_edges")) {
    std::vector<std::pair<int, int>> declared;
    for (const auto& e : j.at("back_edges")) {
      declared.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    cfg.declared_back_edges = std::move(declared);
  }
  cfg.back_edges = compute_back_edges(cfg);
  (void)where;
  return cfg;
}

json cfg_to_json(const ControlFlowGraph& cfg) {
  json j = json::object();
  j["entry"] = cfg.entry;
  json exits = json::array();
  std::vector<int> sorted_exits = cfg.exits;
  std::sort(sorted_exits.begin(), sorted_exits.end());
  for (int e : sorted_exits) exits.push_back(e);
  j["exits"] = std::move(exits);
  json blocks = json::array();
  for (const auto& b : cfg.blocks) {
    json bj = json::object();
    bj["id"] = b.id;
    bj["span"] = json::array({b.source_span.first, b.source_span.second});
    json t = json::object();
    t["kind"] = term_kind_to_string(b.terminator.kind);
    if (b.terminator.condition) {
      t["cond"] = b.terminator.condition->text;
      t["shape"] = shape_to_string(b.terminator.condition->shape);
    }
    if (!b.terminator.targets.empty()) {
      json targets = json::array();
      for (const auto& e : b.terminator.targets) {
        targets.push_back(json{{"label", e.label}, {"to", e.to}});
      }
      t["targets"] = std::move(targets);
    }
    if (b.terminator.return_expr) t["ret"] = *b.terminator.return_expr;
    bj["term"] = std::move(t);
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  std::vector<std::pair<int, int>> sorted_back = cfg.back_edges;
  std::sort(sorted_back.begin(), sorted_back.end());
  json back = json::array();
  for (const auto& [f, t] : sorted_back) back.push_back(json::array({f, t}));
  j["back_edges"] = std::move(back);
  return j;
}

}  // namespace

ProgramModelDump parse_model(const json& j) {
  ProgramModelDump model;
  if (!j.is_object() || !j.contains("version") || !j.contains("functions")) {
    throw DumpParseError("program model dump needs version and functions");
  }
  model.version = j.at("version").get<int>();
  for (const auto& fj : j.at("functions")) {
    FocalMethod f;
    f.id = fj.at("id").get<std::string>();
    const std::string where = "function " + f.id;
    f.name = fj.at("name").get<std::string>();
    f.signature = fj.at("signature").get<std::string>();
    f.body = fj.at("body").get<std::string>();
    f.file_path = fj.at("file").get<std::string>();
    if (fj.contains("container") && !fj.at("container").is_null()) {
      std::string c = fj.at("container").get<std::string>();
      if (!c.empty()) f.container = std::move(c);
    }
    f.cfg = parse_cfg(fj.at("cfg"), where);
    if (fj.contains("context_refs")) {
      f.context_refs = parse_context_refs(fj.at("context_refs"), where);
    }
    model.functions.push_back(std::move(f));
  }
  return model;
}

ProgramModelDump load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DumpParseError("cannot open dump: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DumpParseError(std::string("dump parse error: ") + e.what());
  }
  return parse_model(j);
}

json model_to_json(const ProgramModelDump& model) {
  json j = json::object();
  j["version"] = model.version;
  json fns = json::array();
  for (const auto& f : model.functions) {
    json fj = json::object();
    fj["id"] = f.id;
    fj["name"] = f.name;
    fj["signature"] = f.signature;
    fj["body"] = f.body;
    fj["file"] = f.file_path;
    if (f.container) fj["container"] = *f.container;
    fj["cfg"] = cfg_to_json(f.cfg);
    if (f.context_refs) fj["context_refs"] = context_refs_to_json(*f.context_refs);
    fns.push_back(std::move(fj));
  }
  j["functions"] = std::move(fns);
  return j;
}

std::string canonical_json(const json& j) {
  // nlohmann::json keeps object keys sorted; a plain dump is canonical.
  return j.dump();
}

namespace {

// Iterative dominator sets over blocks reachable from entry.
std::map<int, std::set<int>> dominator_sets(const ControlFlowGraph& cfg) {
  std::set<int> reachable;
  std::queue<int> work;
  work.push(cfg.entry);
  reachable.insert(cfg.entry);
  while (!work.empty()) {
    int cur = work.front();
    work.pop();
    const BasicBlock* b = cfg.block(cur);
    if (!b) continue;
    for (const auto& t : b->terminator.targets) {
      if (reachable.insert(t.to).second) work.push(t.to);
    }
  }

  std::map<int, std::vector<int>> preds;
  for (const auto& b : cfg.blocks) {
    if (!reachable.count(b.id)) continue;
    for (const auto& t : b.terminator.targets) {
      if (reachable.count(t.to)) preds[t.to].push_back(b.id);
    }
  }

  std::map<int, std::set<int>> dom;
  for (int n : reachable) {
    if (n == cfg.entry) {
      dom[n] = {n};
    } else {
      dom[n] = reachable;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int n : reachable) {
      if (n == cfg.entry) continue;
      std::set<int> next = reachable;
      bool first = true;
      for (int p : preds[n]) {
        if (first) {
          next = dom[p];
          first = false;
        } else {
          std::set<int> inter;
          std::set_intersection(next.begin(), next.end(), dom[p].begin(),
                                dom[p].end(), std::inserter(inter, inter.begin()));
          next = std::move(inter);
        }
      }
      if (first) next.clear();  // unreachable via preds; keep empty
      next.insert(n);
      if (next != dom[n]) {
        dom[n] = std::move(next);
        changed = true;
      }
    }
  }
  return dom;
}

}  // namespace

std::vector<std::pair<int, int>> compute_back_edges(const ControlFlowGraph& cfg) {
  auto dom = dominator_sets(cfg);
  std::vector<std::pair<int, int>> back;
  for (const auto& b : cfg.blocks) {
    auto it = dom.find(b.id);
    if (it == dom.end()) continue;  // unreachable source
    for (const auto& t : b.terminator.targets) {
      if (it->second.count(t.to)) back.emplace_back(b.id, t.to);
    }
  }
  std::sort(back.begin(), back.end());
  return back;
}

std::vector<ValidationIssue> validate_model(const ProgramModelDump& model) {
  std::vector<ValidationIssue> issues;
  auto add = [&](const std::string& entity, const std::string& message) {
    issues.push_back({entity, message});
  };

  if (model.version != 1) add("dump", "unsupported version");

  std::set<std::string> seen_ids;
  for (const auto& f : model.functions) {
    const std::string fn = "function " + f.id;
    if (!seen_ids.insert(f.id).second) add(fn, "duplicate function id");

    const ControlFlowGraph& cfg = f.cfg;
    std::set<int> block_ids;
    for (const auto& b : cfg.blocks) {
      if (!block_ids.insert(b.id).second) {
        add(fn + " block " + std::to_string(b.id), "duplicate block id");
      }
    }
    if (!block_ids.count(cfg.entry)) add(fn, "entry names a missing block");
    if (cfg.exits.empty()) add(fn, "exits set is empty");
    for (int e : cfg.exits) {
      if (!block_ids.count(e)) {
        add(fn, "exit " + std::to_string(e) + " names a missing block");
      }
    }

    for (const auto& b : cfg.blocks) {
      const std::string bn = fn + " block " + std::to_string(b.id);
      const Terminator& t = b.terminator;
      for (const auto& edge : t.targets) {
        if (!block_ids.count(edge.to)) {
          add(bn, "dangling edge to block " + std::to_string(edge.to));
        }
      }
      switch (t.kind) {
        case TermKind::Branch: {
          if (t.targets.size() < 2) add(bn, "branch arity: needs >=2 targets");
          std::set<std::string> labels;
          for (const auto& edge : t.targets) {
            if (!labels.insert(edge.label).second) {
              add(bn, "duplicate outcome label '" + edge.label + "'");
            }
          }
          if (!t.condition) add(bn, "branch without condition");
          break;
        }
        case TermKind::Goto:
        case TermKind::Call:
          if (t.targets.size() != 1) add(bn, "goto/call needs exactly 1 target");
          break;
        case TermKind::Return:
          if (!t.targets.empty()) add(bn, "return must have 0 targets");
          if (!cfg.is_exit(b.id)) add(bn, "return block not listed in exits");
          break;
      }
      if (t.kind != TermKind::Return && cfg.is_exit(b.id)) {
        add(bn, "exit block does not return");
      }
      if (t.kind != TermKind::Branch && t.condition) {
        add(bn, "condition on non-branch terminator");
      }
      if (t.condition && t.condition->declared_shape &&
          *t.condition->declared_shape != t.condition->shape) {
        add(bn, "declared condition shape disagrees with classification");
      }
    }

    // entry should have no incoming edge other than back edges
    for (const auto& b : cfg.blocks) {
      for (const auto& edge : b.terminator.targets) {
        if (edge.to == cfg.entry) {
          auto is_back = std::find(cfg.back_edges.begin(), cfg.back_edges.end(),
                                   std::make_pair(b.id, edge.to)) != cfg.back_edges.end();
          if (!is_back) {
            add(fn, "entry has incoming non-back edge from block " +
                        std::to_string(b.id));
          }
        }
      }
    }

    if (cfg.declared_back_edges) {
      std::vector<std::pair<int, int>> declared = *cfg.declared_back_edges;
      std::sort(declared.begin(), declared.end());
      if (declared != cfg.back_edges) {
        add(fn, "declared back_edges disagree with dominator analysis");
      }
    }
  }
  return issues;
}

}  // namespace palm
