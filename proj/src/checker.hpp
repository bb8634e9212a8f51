#pragma once

// Internal state of the bidirectional checker, shared by the files that
// implement it.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mps/statics.hpp"
#include "mps/typing.hpp"

namespace mps::detail {

struct Mismatch {
  std::string code;
  std::string message;
  std::string guard;
  std::string verdict;
};

class Checker {
 public:
  Checker(const Program& program, const CheckOptions& opts, const Signature* sig = nullptr);

  Typed synth(const TermPtr& e);
  TermPtr check(const TermPtr& e, const StaticPtr& expected);

  /// Preloads the endpoints a thread owns as linear resources.
  void add_resources(const std::vector<Endpoint>& eps, Span span);
  /// Fails unless every linear resource was consumed.
  void require_resources_consumed(Span span) const;

  // ---- types
  StaticPtr whnf_type(const StaticPtr& t, const std::optional<std::vector<int>>& universe = std::nullopt);
  std::optional<Mismatch> subtype(const StaticPtr& actual, const StaticPtr& expected);
  std::optional<Mismatch> equal(const StaticPtr& a, const StaticPtr& b,
                                const std::optional<std::vector<int>>& universe);
  void require_subtype(const StaticPtr& actual, const StaticPtr& expected, Span span);
  bool linear(const StaticPtr& t) const;

  /// First-order matching of `pattern` (free variables in `metas` are
  /// unknowns) against `actual`. Subterms that cannot be matched directly
  /// are queued in `deferred` as equations.
  struct Match {
    std::map<std::string, SortPtr> metas;
    std::map<std::string, StaticPtr> env;
    std::vector<std::pair<StaticPtr, StaticPtr>> deferred;
    std::optional<std::vector<int>> universe;
  };
  std::optional<Mismatch> match(const StaticPtr& pattern, const StaticPtr& actual, Match& m);

  // ---- solver
  Assumptions assumptions() const;
  Verdict prove(const StaticPtr& goal);
  SortCtx all_sorts() const;
  std::string fresh_static(const std::string& base, SortPtr sort);
  bool static_in_scope(const std::string& name) const;

  [[noreturn]] void fail(const std::string& code, Span span, const std::string& msg,
                         const std::string& guard = "", const std::string& verdict = "") const;
  [[noreturn]] void fail(const Mismatch& m, Span span) const;

  const Program& program;
  CheckOptions opts;
  const Signature* sig;

  SortCtx sorts;
  std::vector<std::pair<std::string, SortPtr>> globals;  // fresh index variables
  std::vector<StaticPtr> props;

  struct Binding {
    std::string name;
    StaticPtr type;
    bool linear = false;
    bool consumed = false;
  };
  std::vector<Binding> vars;

  struct Resource {
    Endpoint ep;
    StaticPtr type;
    bool consumed = false;
  };
  std::vector<Resource> resources;

  struct State {
    std::vector<bool> vars;
    std::vector<bool> resources;
    bool operator==(const State&) const = default;
  };
  State state() const;
  void restore(const State& s);
  /// Names of linear things consumed in `after` but not in `before`, among
  /// the first `nvars` variables.
  std::vector<std::string> newly_consumed(const State& before, const State& after,
                                          std::size_t nvars) const;

 private:
  Typed synth_api(const TermPtr& e, bool under_forall_elim);
  Typed synth_forall_elim(const TermPtr& e, const StaticPtr& expected);
  TermPtr check_lambda(const TermPtr& e, const StaticPtr& expected);
  Typed synth_lambda(const TermPtr& e);
  Typed synth_let(const TermPtr& e, const StaticPtr& expected);
  Typed branches(const TermPtr& e, const StaticPtr& expected);
  StaticPtr annotation(const StaticPtr& t, Span span);
  Typed bind_and_run(const std::string& name, const StaticPtr& type, const TermPtr& body,
                     const StaticPtr& expected, Span span);
  Typed run(const TermPtr& e, const StaticPtr& expected);
  int counter_ = 0;
};

/// Rewrites channel types without a universe to live in `universe`.
StaticPtr stamp_universe(const StaticPtr& t, const std::vector<int>& universe);

}  // namespace mps::detail
