#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lpsem/program.hpp"
#include "lpsem/term.hpp"
#include "lpsem/unify.hpp"

namespace lpsem {

/// Built-in fixture programs.
std::string_view natlist_source();
std::string_view ground_source();

/// Atoms p(t1..tk) with argument depth <= arg_depth whose variables are
/// x1..xj in order of first occurrence, in every context j..max_context
/// (j itself only, when pad_contexts is false).
std::vector<Atom> fixture_atoms(const Program& p, int max_context, int arg_depth,
                                bool pad_contexts);

struct CheckConfig {
  Program program;         // non-ground fixture
  Program ground_program;  // ground fixture
  /// Overrides; negative values select each suite's default.
  int depth = -1;
  int subst_depth = -1;
  int max_vars = -1;
  int max_steps = 8;
  int cases = 100;
  std::uint64_t seed = 7;
  /// Goal for the goal-level soundness suite; empty selects the default.
  std::string goal;
};

/// Config over the built-in fixtures.
CheckConfig default_check_config();

enum class CheckStatus { Pass, Fail, Skip };
const char* to_string(CheckStatus s);

struct PropertyResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  int cases = 0;
  int skipped = 0;       // cases dropped by the bounds-closure precondition
  std::string detail;    // first counterexample, or why the check was skipped
};

struct SuiteReport {
  std::string suite;
  std::vector<PropertyResult> properties;
  double seconds = 0;
  bool passed() const;
  std::string to_json() const;
  std::string to_text() const;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument on an unknown suite name.
SuiteReport run_suite(std::string_view name, const CheckConfig& cfg);

}  // namespace lpsem
