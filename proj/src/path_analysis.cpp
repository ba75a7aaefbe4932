// SPDX-License-Identifier: Apache-2.0
#include "palm/path_analysis.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace palm {

namespace {

class PathWalker {
 public:
  PathWalker(const ControlFlowGraph& cfg, const TraversalConfig& config)
      : cfg_(cfg), config_(config) {
    if (config.max_occurrences_per_site < 1) {
      throw MalformedCfg("max_occurrences_per_site must be >= 1");
    }
    index_blocks();
    compute_reachability();
  }

  std::vector<ConditionChain> run() {
    walk(cfg_.entry);
    return std::move(chains_);
  }

 private:
  void index_blocks() {
    for (const auto& b : cfg_.blocks) {
      by_id_[b.id] = &b;
    }
    if (!by_id_.count(cfg_.entry)) throw MalformedCfg("entry block missing");
  }

  // reach_[a] holds every block reachable from a, a itself included.
  void compute_reachability() {
    for (const auto& [id, blk] : by_id_) {
      std::set<int>& r = reach_[id];
      std::queue<int> work;
      work.push(id);
      r.insert(id);
      while (!work.empty()) {
        int cur = work.front();
        work.pop();
        auto it = by_id_.find(cur);
        if (it == by_id_.end()) continue;
        for (const auto& t : it->second->terminator.targets) {
          if (r.insert(t.to).second) work.push(t.to);
        }
      }
      (void)blk;
    }
  }

  // Taking this outcome keeps the walk inside a cycle through the site.
  bool edge_reenters(int site, int target) const {
    auto it = reach_.find(target);
    return it != reach_.end() && it->second.count(site) > 0;
  }

  bool on_cycle(int site) const {
    const BasicBlock* b = by_id_.at(site);
    for (const auto& t : b->terminator.targets) {
      if (edge_reenters(site, t.to)) return true;
    }
    return false;
  }

  const BasicBlock& block(int id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
      throw MalformedCfg("edge to missing block " + std::to_string(id));
    }
    return *it->second;
  }

  void emit_chain(const std::optional<std::string>& return_expr) {
    if (static_cast<int>(chains_.size()) >= config_.max_paths) {
      throw PathBudgetExceeded(config_.max_paths);
    }
    ConditionChain chain;
    chain.path_id = static_cast<int>(chains_.size());
    chain.steps = steps_;
    chain.return_descriptor = return_expr.value_or("unit");
    chains_.push_back(std::move(chain));
  }

  void walk(int start) {
    // Follow single-successor edges until a branch or return; a repeated
    // block inside such a run is a goto-only cycle with no way out.
    int cur = start;
    std::set<int> run_seen;
    while (true) {
      if (!run_seen.insert(cur).second) return;
      const BasicBlock& b = block(cur);
      switch (b.terminator.kind) {
        case TermKind::Return:
          emit_chain(b.terminator.return_expr);
          return;
        case TermKind::Goto:
        case TermKind::Call:
          if (b.terminator.targets.size() != 1) {
            throw MalformedCfg("goto/call without single target at block " +
                               std::to_string(cur));
          }
          cur = b.terminator.targets[0].to;
          continue;
        case TermKind::Branch:
          branch(cur, b);
          return;
      }
    }
  }

  void branch(int site, const BasicBlock& b) {
    if (b.terminator.targets.size() < 2 || !b.terminator.condition) {
      throw MalformedCfg("malformed branch at block " + std::to_string(site));
    }
    int& occ_slot = occurrences_[site];
    if (occ_slot >= config_.max_occurrences_per_site) return;  // prune
    ++occ_slot;
    const int occ = occ_slot;
    const bool final_occurrence = occ == config_.max_occurrences_per_site;
    const bool cyclic = on_cycle(site);

    for (const auto& target : b.terminator.targets) {
      if (final_occurrence && edge_reenters(site, target.to)) {
        // Another occurrence would be needed beyond the bound.
        continue;
      }
      ConditionStep step;
      step.site = site;
      step.occurrence = occ;
      step.outcome = target.label;
      step.loop_terminating = final_occurrence && cyclic;
      step.expr = *b.terminator.condition;
      steps_.push_back(std::move(step));
      walk(target.to);
      steps_.pop_back();
    }
    --occ_slot;
  }

  const ControlFlowGraph& cfg_;
  const TraversalConfig& config_;
  std::map<int, const BasicBlock*> by_id_;
  std::map<int, std::set<int>> reach_;
  std::map<int, int> occurrences_;
  std::vector<ConditionStep> steps_;
  std::vector<ConditionChain> chains_;
};

}  // namespace

std::vector<ConditionChain> enumerate_paths(const ControlFlowGraph& cfg,
                                            const TraversalConfig& config) {
  PathWalker walker(cfg, config);
  return walker.run();
}

std::set<CoverageAtom> atoms_of(const ConditionChain& chain) {
  std::set<CoverageAtom> atoms;
  for (const auto& step : chain.steps) {
    atoms.insert({step.site, step.occurrence, step.outcome});
  }
  return atoms;
}

nlohmann::json chains_to_json(const std::string& focal_id,
                              const std::vector<ConditionChain>& chains) {
  nlohmann::json j = nlohmann::json::object();
  j["focal_id"] = focal_id;
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& chain : chains) {
    nlohmann::json pj = nlohmann::json::object();
    pj["id"] = chain.path_id;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& step : chain.steps) {
      steps.push_back(nlohmann::json{{"site", step.site},
                                     {"occ", step.occurrence},
                                     {"outcome", step.outcome},
                                     {"loop_term", step.loop_terminating}});
    }
    pj["steps"] = std::move(steps);
    pj["ret"] = chain.return_descriptor;
    paths.push_back(std::move(pj));
  }
  j["paths"] = std::move(paths);
  return j;
}

std::vector<ConditionChain> chains_from_json(const nlohmann::json& j,
                                             std::string* focal_id) {
  if (focal_id) *focal_id = j.value("focal_id", "");
  std::vector<ConditionChain> chains;
  for (const auto& pj : j.at("paths")) {
    ConditionChain chain;
    chain.path_id = pj.at("id").get<int>();
    for (const auto& sj : pj.at("steps")) {
      ConditionStep step;
      step.site = sj.at("site").get<int>();
      step.occurrence = sj.at("occ").get<int>();
      step.outcome = sj.at("outcome").get<std::string>();
      step.loop_terminating = sj.at("loop_term").get<bool>();
      chain.steps.push_back(std::move(step));
    }
    chain.return_descriptor = pj.value("ret", "unit");
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace palm
