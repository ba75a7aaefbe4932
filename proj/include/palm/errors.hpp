// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace palm {

// Input artifacts (dumps, configs, scripts) that fail to parse.
struct DumpParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A CFG that violates structural invariants badly enough to stop analysis.
struct MalformedCfg : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Path enumeration would emit more chains than the configured budget.
struct PathBudgetExceeded : std::runtime_error {
  explicit PathBudgetExceeded(int max_paths)
      : std::runtime_error("path budget exceeded: more than " +
                           std::to_string(max_paths) + " paths"),
        max_paths(max_paths) {}
  int max_paths;
};

// A context_refs entry names a function id that is not in the model.
struct UnknownDependencyRef : std::runtime_error {
  explicit UnknownDependencyRef(const std::string& ref)
      : std::runtime_error("unknown dependency ref: " + ref), ref(ref) {}
  std::string ref;
};

// Test budget smaller than the number of minimized paths.
struct BudgetTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProviderUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedResponse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyExtraction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnparseableChangeLog : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A change-log edit whose ORIGINAL no longer matches file content.
struct StaleEdit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ToolchainMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoverageToolMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommandTimeout : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace palm
