#pragma once

// Generators and independent oracles shared by the unit tests and the
// acceptance binary.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mps/dfcheck.hpp"
#include "mps/solver.hpp"
#include "mps/syntax.hpp"

namespace mps::testing {

using Rng = std::mt19937_64;

std::string corpus_path(const std::string& name);
std::string read_text(const std::string& path);
std::vector<std::string> mutant_files();
/// The `// expect: CODE` header of a mutant.
std::string expected_code(const std::string& path);

// ------------------------------------------------------------ syntax

/// Declares protocols `p` (universe {0,1}) and `q(n: int)` (universe {0,1,2}).
const Program& generator_context();

/// Well-sorted random static term of the given sort with free variables
/// drawn from `scope`.
StaticPtr gen_static(Rng& rng, const SortPtr& sort, int depth,
                     std::vector<std::pair<std::string, SortPtr>> scope = {});
/// Random closed expression (not necessarily well-typed).
TermPtr gen_term(Rng& rng, int depth);

/// Structural equality; statics compared up to bound-variable renaming.
bool term_equal(const Term& a, const Term& b);

// ------------------------------------------------------------ solver

struct Entailment {
  Assumptions assumptions;
  StaticPtr goal;
};

/// Set, bool and bounded int variables over the universe {0, 1, 2}.
Entailment gen_entailment(Rng& rng);

/// Test-side evaluator; relations over an undefined disjoint union are false.
bool oracle_holds(const StaticPtr& prop, const Assignment& env, const std::vector<int>& universe);

struct OracleVerdict {
  bool valid = true;
  std::optional<Assignment> counterexample;
};
OracleVerdict brute_force(const Entailment& e);

// ------------------------------------------------------------ collections

/// Up to `max_channels` channels spread over up to `max_sets` sets; half of
/// the instances are built forest-shaped.
Collection gen_collection(Rng& rng, int max_channels = 5, int max_sets = 6);

}  // namespace mps::testing
