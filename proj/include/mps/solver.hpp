#pragma once

// Entailment between guard propositions over finite role sets, roles,
// booleans and linear integer arithmetic.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mps/syntax.hpp"

namespace mps {

struct Assumptions {
  std::vector<StaticPtr> props;
  std::map<std::string, std::vector<int>> set_vars;  // name -> universe
  std::vector<std::string> int_vars;
  std::vector<std::string> bool_vars;
  std::optional<std::vector<int>> universe;  // meaning of `full` and `compl`
};

struct SolverValue {
  enum class Kind { Int, Bool, Set };
  Kind kind = Kind::Int;
  std::int64_t i = 0;
  bool b = false;
  std::vector<int> set;

  std::string str() const;
  bool operator==(const SolverValue&) const = default;
};

using Assignment = std::map<std::string, SolverValue>;

struct Verdict {
  enum class Kind { Valid, Invalid, Unknown };
  Kind kind = Kind::Unknown;
  Assignment counterexample;  // set when Invalid
  std::string reason;         // set when Unknown
  std::uint64_t enumerated = 0;

  bool valid() const { return kind == Kind::Valid; }
  std::string str() const;
};

struct SolverOptions {
  std::uint64_t budget = std::uint64_t{1} << 16;
};

Verdict entails(const Assumptions& a, const StaticPtr& goal, const SolverOptions& opts = {});

/// Enumeration over set, role and boolean variables; integer variables must
/// be bounded by the assumptions or the verdict is Unknown.
Verdict solve_fragment_setvars(const Assumptions& a, const StaticPtr& goal,
                               const SolverOptions& opts = {});

/// Linear integer reasoning; Unknown when set variables are present.
Verdict solve_fragment_ints(const Assumptions& a, const StaticPtr& goal,
                            const SolverOptions& opts = {});

/// Evaluates a closed-under-`env` proposition. Relations over an undefined
/// disjoint union (overlapping operands) are false. Empty when some variable
/// is unassigned.
std::optional<bool> evaluate_prop(const StaticPtr& prop, const Assignment& env,
                                  const std::optional<std::vector<int>>& universe);

}  // namespace mps
