#pragma once

// Type checking and elaboration of dynamic terms, dc-types of the session
// API, and typing of thread pools.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mps/solver.hpp"
#include "mps/statics.hpp"
#include "mps/syntax.hpp"

namespace mps {

struct Diagnostic {
  std::string code;
  Span span;
  std::string message;
  std::string guard;           // pretty-printed guard, when one is involved
  std::string solver_verdict;  // "valid", "invalid ...", "unknown ..."
};

class TypeError : public std::runtime_error {
 public:
  explicit TypeError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
  Diagnostic diag;
};

/// Dependent constant type of a session or primitive API function. Variables
/// in `quantified` are instantiated at every call site. Session APIs carry an
/// extra last quantified set `U`, the universe of the channel involved; it
/// is what `full` means in the guard.
struct DcType {
  std::vector<std::pair<std::string, SortPtr>> quantified;
  StaticPtr guard;  // null when trivially true
  std::vector<StaticPtr> params;
  StaticPtr result;
};

const DcType& api_signature(Api api);

struct CheckOptions {
  SolverOptions solver;
  /// Accept guards the solver cannot decide; the interpreter re-checks them.
  bool assert_runtime = false;
};

struct ChannelState {
  StaticPtr session;
  std::vector<int> universe;
};

/// Current protocol state of each live channel.
using Signature = std::map<ChannelId, ChannelState>;

struct Typed {
  TermPtr term;  // elaborated: every implicit static argument made explicit
  StaticPtr type;
};

/// Checks a closed term. `sig` types the endpoint literals it contains; each
/// such endpoint must be consumed exactly once.
Typed typecheck_expr(const Program& program, const TermPtr& e, const Signature& sig = {},
                     const CheckOptions& opts = {});

/// Checks every protocol and the program's main term, with the definitions
/// bound around it.
Typed check_program(const Program& program, const CheckOptions& opts = {});

/// Thread 0 may have any type, every other thread must have type unit, and
/// the endpoints of each live channel must partition its universe.
void typecheck_pool(const Program& program, const std::map<int, TermPtr>& threads,
                    const Signature& sig, const CheckOptions& opts = {});

/// Equality of types up to normalization and solver-validated equality of
/// indices under the assumptions `props`.
bool type_equal(const Program& program, const StaticPtr& a, const StaticPtr& b,
                const Assumptions& props = {}, const CheckOptions& opts = {});

/// The universe a protocol state lives in, taken from its protocol head.
std::optional<std::vector<int>> session_universe(const StaticPtr& session, const Program& program);

/// A type holds resources and must be used exactly once. Type variables are
/// linear unless `ctx` gives them sort type.
bool is_linear_type(const StaticPtr& t, const SortCtx* ctx = nullptr);

/// Guard of an elaborated API call, instantiated with its static arguments.
StaticPtr instantiate_guard(Api api, const std::vector<StaticPtr>& statics);

}  // namespace mps
