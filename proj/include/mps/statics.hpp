#pragma once

// Sorting, normalization and well-formedness of static terms.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mps/syntax.hpp"

namespace mps {

class StaticError : public std::runtime_error {
 public:
  StaticError(std::string code, Span span, const std::string& msg)
      : std::runtime_error(msg), code(std::move(code)), span(span) {}
  std::string code;
  Span span;
};

/// Ordered sort bindings; later entries shadow earlier ones.
class SortCtx {
 public:
  void push(std::string name, SortPtr sort) { bindings_.emplace_back(std::move(name), std::move(sort)); }
  void pop() { bindings_.pop_back(); }
  SortPtr lookup(const std::string& name) const;
  const std::vector<std::pair<std::string, SortPtr>>& bindings() const { return bindings_; }

 private:
  std::vector<std::pair<std::string, SortPtr>> bindings_;
};

/// A ground role set together with the universe it lives in.
struct RoleSetValue {
  std::vector<int> universe;
  std::vector<int> members;

  static RoleSetValue make(std::vector<int> universe, std::vector<int> members);
  RoleSetValue complement() const;
  RoleSetValue unite(const RoleSetValue& o) const;
  RoleSetValue intersect(const RoleSetValue& o) const;
  RoleSetValue minus(const RoleSetValue& o) const;
  /// Disjoint union; empty when the operands overlap.
  std::optional<RoleSetValue> disjoint_union(const RoleSetValue& o) const;
  bool contains(int r) const;
  bool operator==(const RoleSetValue& o) const = default;
};

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_inter(const std::vector<int>& a, const std::vector<int>& b);
std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b);

/// Sort of a static term. Throws StaticError with code "unbound", "arity" or
/// "sort-mismatch". `program` resolves protocol references.
SortPtr sort_of(const SortCtx& ctx, const Static& s, const Program* program = nullptr);

/// Whether a term of sort `have` may stand where `want` is expected
/// (type is a subsort of vtype).
bool subsort(const Sort& have, const Sort& want);

std::set<std::string> free_vars(const Static& s);

/// Capture-avoiding substitution of `value` for the free variable `name`.
StaticPtr subst(const StaticPtr& s, const std::string& name, const StaticPtr& value);
StaticPtr subst(const StaticPtr& s, const std::map<std::string, StaticPtr>& env);

/// A variable name that does not occur in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

/// Normal form: substitutes `env`, contracts static beta-redexes, evaluates
/// ground operators. `Full` and complements are resolved against `universe`
/// when given; a channel type resolves them against its own universe.
/// Throws StaticError "div-by-zero" on a ground division by zero.
StaticPtr normalize_static(const std::map<std::string, StaticPtr>& env, const StaticPtr& s,
                           const std::optional<std::vector<int>>& universe = std::nullopt);
StaticPtr normalize(const StaticPtr& s, const std::optional<std::vector<int>>& universe = std::nullopt);

/// Normalizes and unfolds protocol references at the head until the head is
/// a session or type constructor.
StaticPtr whnf(const StaticPtr& s, const Program& program,
               const std::optional<std::vector<int>>& universe = std::nullopt);

/// Syntactic equality up to renaming of bound variables. Channel universes
/// are compared only when both sides know theirs.
bool alpha_equal(const Static& a, const Static& b);
bool alpha_equal(const StaticPtr& a, const StaticPtr& b);

/// Checks roles against the universe, self-loops and contractivity of fix.
/// Throws StaticError "role-out-of-universe", "self-loop" or
/// "non-contractive-fix".
void wellformed_stype(const SortCtx& ctx, const std::vector<int>& universe, const StaticPtr& s,
                      const Program& program);

/// Checks every protocol declaration: sorts, well-formedness, and role
/// constants against the declared universe.
void check_protocols(const Program& program);

bool is_ground(const Static& s);

}  // namespace mps
