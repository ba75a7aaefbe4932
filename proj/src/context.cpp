// SPDX-License-Identifier: Apache-2.0
#include "palm/context.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace palm {

namespace {

enum class Slot {
  Ambient,
  ContainerDef,
  Field,
  CalledMethod,
  OtherMethodSig,
  Direct,
  Indirect,
  Bound,
  Return,
  Test,
};

struct SlottedItem {
  Slot slot;
  ContextItem item;
};

ContextItem resolve(const RefItem& ref, const ProgramModelDump& model,
                    bool full_definition, Rank rank) {
  ContextItem item;
  item.rank = rank;
  if (ref.ref) {
    const FocalMethod* target = model.find(*ref.ref);
    if (!target) throw UnknownDependencyRef(*ref.ref);
    item.origin = target->file_path;
    if (full_definition) {
      item.kind = target->container ? ItemKind::MethodFullDef
                                    : ItemKind::FunctionFullDef;
      item.text = target->signature + "\n" + target->body;
    } else {
      item.kind = target->container ? ItemKind::MethodSignature
                                    : ItemKind::FunctionSignature;
      item.text = target->signature;
    }
    return item;
  }
  item.kind = ref.kind.value();
  item.text = ref.text;
  item.origin = ref.origin;
  return item;
}

long items_chars(const std::vector<SlottedItem>& items) {
  std::size_t total = 0;
  for (const auto& s : items) total += s.item.text.size();
  return static_cast<long>(total);
}

}  // namespace

long estimate_tokens_for_chars(std::size_t chars) {
  return static_cast<long>((chars + 3) / 4);
}

FocalContext build_context(const FocalMethod& focal,
                           const ProgramModelDump& model, long budget_tokens) {
  std::vector<SlottedItem> items;
  std::set<std::pair<ItemKind, std::string>> seen;
  auto push = [&](Slot slot, ContextItem item) {
    if (!seen.insert({item.kind, item.text}).second) return;
    items.push_back({slot, std::move(item)});
  };

  if (focal.context_refs) {
    const ContextRefs& refs = *focal.context_refs;
    for (const auto& r : refs.ambient) {
      push(Slot::Ambient, resolve(r, model, false, Rank::Ambient));
    }
    if (refs.container) {
      if (refs.container->def) {
        push(Slot::ContainerDef,
             resolve(*refs.container->def, model, true, Rank::Direct));
      }
      for (const auto& f : refs.container->fields) {
        push(Slot::Field, resolve(f, model, false, Rank::Indirect));
      }
      for (const auto& [m, called] : refs.container->methods) {
        if (called) {
          push(Slot::CalledMethod, resolve(m, model, true, Rank::Direct));
        } else {
          push(Slot::OtherMethodSig, resolve(m, model, false, Rank::Indirect));
        }
      }
    }
    for (const auto& r : refs.direct) {
      push(Slot::Direct, resolve(r, model, true, Rank::Direct));
    }
    for (const auto& r : refs.indirect) {
      push(Slot::Indirect, resolve(r, model, false, Rank::Indirect));
    }
    for (const auto& r : refs.bounds) {
      push(Slot::Bound, resolve(r, model, false, Rank::Indirect));
    }
    for (const auto& r : refs.returns) {
      push(Slot::Return, resolve(r, model, false, Rank::Indirect));
    }
    for (const auto& r : refs.test) {
      push(Slot::Test, resolve(r, model, false, Rank::Indirect));
    }
  }

  bool overflow = false;
  if (budget_tokens >= 0 &&
      estimate_tokens_for_chars(items_chars(items)) > budget_tokens) {
    // Drop classes in priority order, each from its last item backwards.
    const Slot drop_order[] = {Slot::Indirect, Slot::OtherMethodSig,
                               Slot::Bound, Slot::Return};
    for (Slot victim : drop_order) {
      while (estimate_tokens_for_chars(items_chars(items)) > budget_tokens) {
        auto it = std::find_if(items.rbegin(), items.rend(),
                               [&](const SlottedItem& s) { return s.slot == victim; });
        if (it == items.rend()) break;
        items.erase(std::next(it).base());
      }
      if (estimate_tokens_for_chars(items_chars(items)) <= budget_tokens) break;
    }
    overflow = estimate_tokens_for_chars(items_chars(items)) > budget_tokens;
  }

  FocalContext ctx;
  for (auto& s : items) {
    switch (s.slot) {
      case Slot::Ambient:
      case Slot::ContainerDef:
      case Slot::Field:
      case Slot::CalledMethod:
      case Slot::OtherMethodSig:
        ctx.structure.push_back(std::move(s.item));
        break;
      case Slot::Direct:
      case Slot::Indirect:
      case Slot::Bound:
      case Slot::Return:
        ctx.dependency.push_back(std::move(s.item));
        break;
      case Slot::Test:
        ctx.test_context.push_back(std::move(s.item));
        break;
    }
  }
  std::size_t chars = 0;
  for (const auto& list : {&ctx.structure, &ctx.dependency, &ctx.test_context}) {
    for (const auto& item : *list) chars += item.text.size();
  }
  ctx.token_estimate = estimate_tokens_for_chars(chars);
  ctx.overflow = overflow;
  return ctx;
}

std::string render_section(const std::vector<ContextItem>& items,
                           const std::string& header) {
  if (items.empty()) return "";
  std::ostringstream out;
  out << "// " << header << "\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out << "\n\n";
    out << items[i].text;
  }
  return out.str();
}

std::string render_focal_sections(const FocalContext& ctx) {
  std::string structure = render_section(ctx.structure, "structure context");
  std::string dependency = render_section(ctx.dependency, "dependency context");
  if (structure.empty()) return dependency;
  if (dependency.empty()) return structure;
  return structure + "\n\n" + dependency;
}

std::string render_context(const FocalContext& ctx) {
  std::string focal = render_focal_sections(ctx);
  std::string test = render_section(ctx.test_context, "test context");
  if (focal.empty()) return test;
  if (test.empty()) return focal;
  return focal + "\n\n" + test;
}

}  // namespace palm
