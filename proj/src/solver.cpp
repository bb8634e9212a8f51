#include "mps/solver.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "mps/pretty.hpp"
#include "mps/statics.hpp"

namespace mps {

std::string SolverValue::str() const {
  switch (kind) {
    case Kind::Int: return std::to_string(i);
    case Kind::Bool: return b ? "true" : "false";
    case Kind::Set: return pretty_roles(set);
  }
  return "?";
}

std::string Verdict::str() const {
  switch (kind) {
    case Kind::Valid: return "valid";
    case Kind::Unknown: return "unknown (" + reason + ")";
    case Kind::Invalid: {
      std::string r = "invalid {";
      bool first = true;
      for (const auto& [k, v] : counterexample) {
        if (!first) r += ", ";
        first = false;
        r += k + "=" + v.str();
      }
      return r + "}";
    }
  }
  return "?";
}

namespace {

struct Unsupported {
  std::string reason;
};

// ------------------------------------------------------------ compiled evaluator

struct Val {
  std::int64_t i = 0;
  std::uint64_t m = 0;
  bool b = false;
  bool undef = false;
};

struct CNode {
  enum class K { Lit, Var, Op } k = K::Lit;
  SOp op = SOp::Eq;
  int slot = -1;
  Val lit;
  int a = -1, b = -1, c = -1;
};

class Program_ {
 public:
  // Role domain: sorted values, each mapped to one bit.
  std::vector<int> domain;
  std::uint64_t universe_mask = 0;
  bool has_universe = false;
  std::vector<CNode> nodes;
  std::map<std::string, int> slots;

  std::uint64_t mask_of(const std::vector<int>& roles) const {
    std::uint64_t m = 0;
    for (int r : roles) {
      auto it = std::lower_bound(domain.begin(), domain.end(), r);
      if (it == domain.end() || *it != r) throw Unsupported{"role outside the solver domain"};
      m |= std::uint64_t{1} << (it - domain.begin());
    }
    return m;
  }

  int bit_of(std::int64_t r) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), r);
    if (it == domain.end() || *it != r) return -1;
    return static_cast<int>(it - domain.begin());
  }

  std::vector<int> roles_of(std::uint64_t m) const {
    std::vector<int> r;
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (m >> i & 1) r.push_back(domain[i]);
    return r;
  }

  int compile(const Static& s) {
    CNode n;
    switch (s.kind) {
      case SKind::Int: n.lit.i = s.value; break;
      case SKind::Bool: n.lit.b = s.value != 0; break;
      case SKind::Set: n.lit.m = mask_of(s.roles); break;
      case SKind::Full:
        if (!has_universe) throw Unsupported{"universe unknown"};
        n.lit.m = universe_mask;
        break;
      case SKind::Var: {
        auto it = slots.find(s.name);
        if (it == slots.end()) throw Unsupported{"undeclared variable '" + s.name + "'"};
        n.k = CNode::K::Var;
        n.slot = it->second;
        break;
      }
      case SKind::Op: {
        if (s.op == SOp::Compl && !has_universe) throw Unsupported{"universe unknown"};
        n.k = CNode::K::Op;
        n.op = s.op;
        int kids[3] = {-1, -1, -1};
        for (std::size_t i = 0; i < s.kids.size() && i < 3; ++i) kids[i] = compile(*s.kids[i]);
        n.a = kids[0];
        n.b = kids[1];
        n.c = kids[2];
        break;
      }
      default: throw Unsupported{"unsupported proposition " + pretty(s)};
    }
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }

  Val eval(int idx, const std::vector<Val>& env) const {
    const CNode& n = nodes[idx];
    if (n.k == CNode::K::Lit) return n.lit;
    if (n.k == CNode::K::Var) return env[n.slot];
    Val r;
    auto A = [&] { return eval(n.a, env); };
    switch (n.op) {
      case SOp::Union:
      case SOp::DUnion:
      case SOp::Inter:
      case SOp::Minus: {
        Val x = A(), y = eval(n.b, env);
        if (x.undef || y.undef) return Val{0, 0, false, true};
        if (n.op == SOp::Union) r.m = x.m | y.m;
        if (n.op == SOp::Inter) r.m = x.m & y.m;
        if (n.op == SOp::Minus) r.m = x.m & ~y.m;
        if (n.op == SOp::DUnion) {
          if (x.m & y.m) return Val{0, 0, false, true};
          r.m = x.m | y.m;
        }
        return r;
      }
      case SOp::Compl: {
        Val x = A();
        if (x.undef) return x;
        r.m = universe_mask & ~x.m;
        return r;
      }
      case SOp::In:
      case SOp::NotIn: {
        Val x = A(), y = eval(n.b, env);
        if (x.undef || y.undef) return r;
        int bit = bit_of(x.i);
        bool in = bit >= 0 && (y.m >> bit & 1);
        r.b = n.op == SOp::In ? in : !in;
        return r;
      }
      case SOp::Subset: {
        Val x = A(), y = eval(n.b, env);
        if (x.undef || y.undef) return r;
        r.b = (x.m & ~y.m) == 0;
        return r;
      }
      case SOp::Eq:
      case SOp::Neq: {
        Val x = A(), y = eval(n.b, env);
        if (x.undef || y.undef) return r;
        bool eq = x.i == y.i && x.m == y.m && x.b == y.b;
        r.b = n.op == SOp::Eq ? eq : !eq;
        return r;
      }
      case SOp::Lt:
      case SOp::Le:
      case SOp::Gt:
      case SOp::Ge: {
        Val x = A(), y = eval(n.b, env);
        if (x.undef || y.undef) return r;
        std::int64_t p = x.i, q = y.i;
        r.b = n.op == SOp::Lt ? p < q : n.op == SOp::Le ? p <= q : n.op == SOp::Gt ? p > q : p >= q;
        return r;
      }
      case SOp::Add:
      case SOp::Sub:
      case SOp::Mul:
      case SOp::Div: {
        Val x = A(), y = eval(n.b, env);
        if (x.undef || y.undef) return Val{0, 0, false, true};
        if (n.op == SOp::Add) r.i = x.i + y.i;
        if (n.op == SOp::Sub) r.i = x.i - y.i;
        if (n.op == SOp::Mul) r.i = x.i * y.i;
        if (n.op == SOp::Div) {
          if (y.i == 0) return Val{0, 0, false, true};
          r.i = x.i / y.i;
        }
        return r;
      }
      case SOp::Neg: {
        Val x = A();
        if (x.undef) return x;
        r.i = -x.i;
        return r;
      }
      case SOp::Not: r.b = !A().b; return r;
      case SOp::And: r.b = A().b && eval(n.b, env).b; return r;
      case SOp::Or: r.b = A().b || eval(n.b, env).b; return r;
      case SOp::Imp: r.b = !A().b || eval(n.b, env).b; return r;
      case SOp::Ite: return A().b ? eval(n.b, env) : eval(n.c, env);
    }
    return r;
  }
};

// ------------------------------------------------------------ classification

enum class VarKind { Set, Role, Bool, Int };

void collect_literals(const Static& s, std::set<int>& roles) {
  if (s.kind == SKind::Set) roles.insert(s.roles.begin(), s.roles.end());
  if (s.kind == SKind::Op &&
      (s.op == SOp::In || s.op == SOp::NotIn || s.op == SOp::Eq || s.op == SOp::Neq)) {
    for (const auto& k : s.kids)
      if (k->kind == SKind::Int) roles.insert(static_cast<int>(k->value));
  }
  for (const auto& k : s.kids) collect_literals(*k, roles);
}

// Integer variables that only meet role-set membership and equality with
// constants or other such variables range over a finite role domain.
void mark_arith(const Static& s, const std::set<std::string>& ints, std::set<std::string>& arith,
                std::vector<std::pair<std::string, std::string>>& links) {
  auto is_var = [&](const StaticPtr& k) { return k->kind == SKind::Var && ints.count(k->name); };
  if (s.kind == SKind::Var) {
    if (ints.count(s.name)) arith.insert(s.name);
    return;
  }
  if (s.kind == SKind::Op && (s.op == SOp::In || s.op == SOp::NotIn)) {
    if (!is_var(s.kids[0])) mark_arith(*s.kids[0], ints, arith, links);
    mark_arith(*s.kids[1], ints, arith, links);
    return;
  }
  if (s.kind == SKind::Op && (s.op == SOp::Eq || s.op == SOp::Neq)) {
    const auto& a = s.kids[0];
    const auto& b = s.kids[1];
    bool simple_a = is_var(a) || a->kind == SKind::Int;
    bool simple_b = is_var(b) || b->kind == SKind::Int;
    if (simple_a && simple_b && (is_var(a) || is_var(b))) {
      if (is_var(a) && is_var(b)) links.emplace_back(a->name, b->name);
      return;
    }
  }
  for (const auto& k : s.kids) mark_arith(*k, ints, arith, links);
}

// ------------------------------------------------------------ linear arithmetic

using Coeffs = std::map<std::string, std::int64_t>;

struct Lin {  // sum coef*x + c <= 0
  Coeffs coef;
  std::int64_t c = 0;
};

std::optional<Lin> linearize(const Static& s) {
  if (s.kind == SKind::Int) return Lin{{}, s.value};
  if (s.kind == SKind::Var) return Lin{{{s.name, 1}}, 0};
  if (s.kind != SKind::Op) return std::nullopt;
  auto scale = [](Lin l, std::int64_t k) {
    for (auto& [v, a] : l.coef) a *= k;
    l.c *= k;
    return l;
  };
  auto add = [](Lin a, const Lin& b) {
    for (const auto& [v, k] : b.coef) a.coef[v] += k;
    a.c += b.c;
    return a;
  };
  switch (s.op) {
    case SOp::Add:
    case SOp::Sub: {
      auto a = linearize(*s.kids[0]);
      auto b = linearize(*s.kids[1]);
      if (!a || !b) return std::nullopt;
      return add(*a, s.op == SOp::Add ? *b : scale(*b, -1));
    }
    case SOp::Neg: {
      auto a = linearize(*s.kids[0]);
      if (!a) return std::nullopt;
      return scale(*a, -1);
    }
    case SOp::Mul: {
      auto a = linearize(*s.kids[0]);
      auto b = linearize(*s.kids[1]);
      if (!a || !b) return std::nullopt;
      if (a->coef.empty()) return scale(*b, a->c);
      if (b->coef.empty()) return scale(*a, b->c);
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

using Conj = std::vector<Lin>;
using Dnf = std::vector<Conj>;

constexpr std::size_t kMaxDisjuncts = 4096;

Dnf dnf_true() { return {Conj{}}; }

Dnf dnf_or(Dnf a, const Dnf& b) {
  a.insert(a.end(), b.begin(), b.end());
  if (a.size() > kMaxDisjuncts) throw Unsupported{"disjunction too large"};
  return a;
}

Dnf dnf_and(const Dnf& a, const Dnf& b) {
  Dnf r;
  for (const auto& x : a)
    for (const auto& y : b) {
      Conj c = x;
      c.insert(c.end(), y.begin(), y.end());
      r.push_back(std::move(c));
      if (r.size() > kMaxDisjuncts) throw Unsupported{"disjunction too large"};
    }
  return r;
}

bool boolish(const Static& s) {
  if (s.kind == SKind::Bool) return true;
  if (s.kind != SKind::Op) return false;
  switch (s.op) {
    case SOp::In:
    case SOp::NotIn:
    case SOp::Eq:
    case SOp::Neq:
    case SOp::Subset:
    case SOp::Lt:
    case SOp::Le:
    case SOp::Gt:
    case SOp::Ge:
    case SOp::And:
    case SOp::Or:
    case SOp::Not:
    case SOp::Imp: return true;
    default: return false;
  }
}

Lin neg(Lin l) {
  for (auto& [v, a] : l.coef) a = -a;
  l.c = -l.c;
  return l;
}

// lhs - rhs as a linear form, or empty when non-linear.
std::optional<Lin> diff(const Static& a, const Static& b) {
  auto x = linearize(a);
  auto y = linearize(b);
  if (!x || !y) return std::nullopt;
  Lin r = *x;
  for (const auto& [v, k] : y->coef) r.coef[v] -= k;
  r.c -= y->c;
  return r;
}

Dnf to_dnf(const Static& s, bool pos);

Dnf relation(SOp op, const Static& a, const Static& b, bool pos) {
  if ((op == SOp::Eq || op == SOp::Neq) && (boolish(a) || boolish(b))) {
    bool eq = (op == SOp::Eq) == pos;
    Dnf both = dnf_and(to_dnf(a, true), to_dnf(b, true));
    Dnf neither = dnf_and(to_dnf(a, false), to_dnf(b, false));
    Dnf differ = dnf_or(dnf_and(to_dnf(a, true), to_dnf(b, false)),
                        dnf_and(to_dnf(a, false), to_dnf(b, true)));
    return eq ? dnf_or(both, neither) : differ;
  }
  auto d = diff(a, b);
  if (!d) return dnf_true();  // non-linear atoms are dropped, a sound relaxation
  Lin L = *d;
  auto lt = [](Lin l) {  // l < 0  <=>  l + 1 <= 0
    l.c += 1;
    return l;
  };
  if (!pos) {
    switch (op) {
      case SOp::Eq: op = SOp::Neq; break;
      case SOp::Neq: op = SOp::Eq; break;
      case SOp::Lt: op = SOp::Ge; break;
      case SOp::Le: op = SOp::Gt; break;
      case SOp::Gt: op = SOp::Le; break;
      case SOp::Ge: op = SOp::Lt; break;
      default: break;
    }
  }
  switch (op) {
    case SOp::Eq: return {Conj{L, neg(L)}};
    case SOp::Neq: return {Conj{lt(L)}, Conj{lt(neg(L))}};
    case SOp::Lt: return {Conj{lt(L)}};
    case SOp::Le: return {Conj{L}};
    case SOp::Gt: return {Conj{lt(neg(L))}};
    case SOp::Ge: return {Conj{neg(L)}};
    default: return dnf_true();
  }
}

Dnf to_dnf(const Static& s, bool pos) {
  if (s.kind == SKind::Bool) return (s.value != 0) == pos ? dnf_true() : Dnf{};
  if (s.kind != SKind::Op) return dnf_true();
  const auto& k = s.kids;
  switch (s.op) {
    case SOp::Not: return to_dnf(*k[0], !pos);
    case SOp::And:
      return pos ? dnf_and(to_dnf(*k[0], true), to_dnf(*k[1], true))
                 : dnf_or(to_dnf(*k[0], false), to_dnf(*k[1], false));
    case SOp::Or:
      return pos ? dnf_or(to_dnf(*k[0], true), to_dnf(*k[1], true))
                 : dnf_and(to_dnf(*k[0], false), to_dnf(*k[1], false));
    case SOp::Imp:
      return pos ? dnf_or(to_dnf(*k[0], false), to_dnf(*k[1], true))
                 : dnf_and(to_dnf(*k[0], true), to_dnf(*k[1], false));
    case SOp::Ite:
      return dnf_or(dnf_and(to_dnf(*k[0], true), to_dnf(*k[1], pos)),
                    dnf_and(to_dnf(*k[0], false), to_dnf(*k[2], pos)));
    case SOp::Eq:
    case SOp::Neq:
    case SOp::Lt:
    case SOp::Le:
    case SOp::Gt:
    case SOp::Ge: return relation(s.op, *k[0], *k[1], pos);
    case SOp::In:
    case SOp::NotIn: {
      if (k[1]->kind != SKind::Set) return dnf_true();
      bool in = (s.op == SOp::In) == pos;
      Dnf r = in ? Dnf{} : dnf_true();
      for (int m : k[1]->roles) {
        auto lit = st::integer(m);
        r = in ? dnf_or(r, relation(SOp::Eq, *k[0], *lit, true))
               : dnf_and(r, relation(SOp::Neq, *k[0], *lit, true));
      }
      return r;
    }
    default: return dnf_true();
  }
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Normalizes by the gcd of the coefficients, tightening the constant.
bool tighten(Lin& l) {
  std::int64_t g = 0;
  for (auto it = l.coef.begin(); it != l.coef.end();) {
    if (it->second == 0) {
      it = l.coef.erase(it);
    } else {
      g = std::gcd(g, it->second < 0 ? -it->second : it->second);
      ++it;
    }
  }
  if (g > 1) {
    for (auto& [v, a] : l.coef) a /= g;
    l.c = -floor_div(-l.c, g);
  }
  return true;
}

// Fourier-Motzkin over the rationals with integer tightening; returns false
// only when the conjunction has no integer solution.
bool feasible(Conj cs) {
  constexpr std::size_t kMaxConstraints = 4000;
  constexpr std::int64_t kLimit = std::int64_t{1} << 40;
  for (;;) {
    std::set<std::string> vars;
    Conj next;
    for (auto& l : cs) {
      tighten(l);
      if (l.coef.empty()) {
        if (l.c > 0) return false;
        continue;
      }
      for (const auto& [v, a] : l.coef) vars.insert(v);
      next.push_back(l);
    }
    cs = std::move(next);
    if (vars.empty()) return true;
    std::string best;
    std::size_t best_cost = SIZE_MAX;
    for (const auto& v : vars) {
      std::size_t p = 0, n = 0;
      for (const auto& l : cs) {
        auto it = l.coef.find(v);
        if (it == l.coef.end()) continue;
        (it->second > 0 ? p : n)++;
      }
      if (p * n < best_cost) {
        best_cost = p * n;
        best = v;
      }
    }
    Conj pos, negs, rest;
    for (auto& l : cs) {
      auto it = l.coef.find(best);
      if (it == l.coef.end()) rest.push_back(l);
      else if (it->second > 0) pos.push_back(l);
      else negs.push_back(l);
    }
    for (const auto& p : pos)
      for (const auto& q : negs) {
        std::int64_t a = p.coef.at(best), b = -q.coef.at(best);
        Lin r;
        for (const auto& [v, k] : p.coef) r.coef[v] += b * k;
        for (const auto& [v, k] : q.coef) r.coef[v] += a * k;
        r.coef.erase(best);
        r.c = b * p.c + a * q.c;
        for (const auto& [v, k] : r.coef)
          if (k > kLimit || k < -kLimit) return true;
        if (r.c > kLimit || r.c < -kLimit) return true;
        rest.push_back(std::move(r));
        if (rest.size() > kMaxConstraints) return true;
      }
    cs = std::move(rest);
  }
}

// ------------------------------------------------------------ the engine

struct Choice {
  int slot;
  std::vector<Val> values;
};

class Engine {
 public:
  Engine(const Assumptions& a, const StaticPtr& goal, const SolverOptions& opts)
      : a_(a), goal_(goal), opts_(opts) {}

  Verdict run(bool require_no_sets, bool require_bounded) {
    Verdict v;
    try {
      prepare();
      if (require_no_sets && !sets_.empty()) throw Unsupported{"set variables present"};
      return search(require_bounded);
    } catch (const Unsupported& u) {
      v.kind = Verdict::Kind::Unknown;
      v.reason = u.reason;
      return v;
    } catch (const StaticError& e) {
      v.kind = Verdict::Kind::Unknown;
      v.reason = e.what();
      return v;
    }
  }

 private:
  void prepare() {
    std::set<std::string> fv;
    for (const auto& p : a_.props) {
      auto f = free_vars(*p);
      fv.insert(f.begin(), f.end());
    }
    auto gf = free_vars(*goal_);
    fv.insert(gf.begin(), gf.end());

    std::set<std::string> ints;
    for (const auto& n : fv) {
      if (a_.set_vars.count(n)) {
        sets_.push_back(n);
      } else if (std::count(a_.bool_vars.begin(), a_.bool_vars.end(), n)) {
        bools_.push_back(n);
      } else if (std::count(a_.int_vars.begin(), a_.int_vars.end(), n)) {
        ints.insert(n);
      } else {
        throw Unsupported{"undeclared variable '" + n + "'"};
      }
    }
    std::set<std::string> arith;
    std::vector<std::pair<std::string, std::string>> links;
    for (const auto& p : a_.props) mark_arith(*p, ints, arith, links);
    mark_arith(*goal_, ints, arith, links);
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [x, y] : links)
        if (arith.count(x) != arith.count(y)) {
          arith.insert(x);
          arith.insert(y);
          changed = true;
        }
    }
    for (const auto& n : ints) (arith.count(n) ? ints_ : roles_).push_back(n);

    std::set<int> dom;
    if (a_.universe) dom.insert(a_.universe->begin(), a_.universe->end());
    for (const auto& n : sets_) {
      const auto& u = a_.set_vars.at(n);
      dom.insert(u.begin(), u.end());
    }
    for (const auto& p : a_.props) collect_literals(*p, dom);
    collect_literals(*goal_, dom);
    int top = dom.empty() ? 0 : *dom.rbegin() + 1;
    for (std::size_t i = 0; i < roles_.size(); ++i) dom.insert(top + static_cast<int>(i));
    if (dom.size() > 64) throw Unsupported{"role domain too large"};
    prog_.domain.assign(dom.begin(), dom.end());
    if (a_.universe) {
      prog_.has_universe = true;
      prog_.universe_mask = prog_.mask_of(*a_.universe);
    }
    int slot = 0;
    for (const auto* group : {&sets_, &roles_, &bools_, &ints_})
      for (const auto& n : *group) prog_.slots[n] = slot++;

    StaticPtr formula = st::op(SOp::Not, {goal_});
    for (const auto& p : a_.props) formula = st::op(SOp::And, {p, formula});
    formula_ = normalize(formula, a_.universe);
    root_ = prog_.compile(*formula_);

    for (const auto& n : sets_) {
      std::uint64_t um = prog_.mask_of(a_.set_vars.at(n));
      Choice c{prog_.slots[n], {}};
      for (std::uint64_t sub = um;; sub = (sub - 1) & um) {
        Val v;
        v.m = sub;
        c.values.push_back(v);
        if (sub == 0) break;
      }
      std::reverse(c.values.begin(), c.values.end());
      finite_.push_back(std::move(c));
    }
    for (const auto& n : roles_) {
      Choice c{prog_.slots[n], {}};
      for (int r : prog_.domain) {
        Val v;
        v.i = r;
        c.values.push_back(v);
      }
      finite_.push_back(std::move(c));
    }
    for (const auto& n : bools_) {
      Val f, t;
      t.b = true;
      finite_.push_back(Choice{prog_.slots[n], {f, t}});
    }
    derive_bounds();
  }

  void derive_bounds() {
    std::vector<const Static*> atoms;
    std::vector<const Static*> todo;
    for (const auto& p : a_.props) todo.push_back(p.get());
    while (!todo.empty()) {
      const Static* s = todo.back();
      todo.pop_back();
      if (s->kind == SKind::Op && s->op == SOp::And) {
        todo.push_back(s->kids[0].get());
        todo.push_back(s->kids[1].get());
      } else {
        atoms.push_back(s);
      }
    }
    auto tighten_lo = [&](const std::string& v, std::int64_t x) {
      auto& b = bounds_[v];
      if (!b.first || *b.first < x) b.first = x;
    };
    auto tighten_hi = [&](const std::string& v, std::int64_t x) {
      auto& b = bounds_[v];
      if (!b.second || *b.second > x) b.second = x;
    };
    for (const auto& n : ints_) bounds_[n];
    for (int round = 0; round < 4; ++round) {
      for (const Static* s : atoms) {
        if (s->kind != SKind::Op || s->kids.size() != 2) continue;
        const Static& l = *s->kids[0];
        const Static& r = *s->kids[1];
        SOp op = s->op;
        const Static* var = nullptr;
        std::int64_t c = 0;
        if (l.kind == SKind::Var && bounds_.count(l.name) && r.kind == SKind::Int) {
          var = &l;
          c = r.value;
        } else if (r.kind == SKind::Var && bounds_.count(r.name) && l.kind == SKind::Int) {
          var = &r;
          c = l.value;
          switch (op) {  // mirror so that the variable is on the left
            case SOp::Lt: op = SOp::Gt; break;
            case SOp::Le: op = SOp::Ge; break;
            case SOp::Gt: op = SOp::Lt; break;
            case SOp::Ge: op = SOp::Le; break;
            default: break;
          }
        } else if (op == SOp::Eq && l.kind == SKind::Var && r.kind == SKind::Var &&
                   bounds_.count(l.name) && bounds_.count(r.name)) {
          auto bl = bounds_[l.name], br = bounds_[r.name];
          if (br.first) tighten_lo(l.name, *br.first);
          if (br.second) tighten_hi(l.name, *br.second);
          if (bl.first) tighten_lo(r.name, *bl.first);
          if (bl.second) tighten_hi(r.name, *bl.second);
          continue;
        }
        if (!var) continue;
        switch (op) {
          case SOp::Eq: tighten_lo(var->name, c); tighten_hi(var->name, c); break;
          case SOp::Lt: tighten_hi(var->name, c - 1); break;
          case SOp::Le: tighten_hi(var->name, c); break;
          case SOp::Gt: tighten_lo(var->name, c + 1); break;
          case SOp::Ge: tighten_lo(var->name, c); break;
          default: break;
        }
      }
    }
  }

  static std::uint64_t product(const std::vector<Choice>& cs) {
    std::uint64_t total = 1;
    for (const auto& c : cs) {
      std::uint64_t n = c.values.size();
      if (n == 0) return 0;
      if (total > (std::uint64_t{1} << 62) / n) return UINT64_MAX;
      total *= n;
    }
    return total;
  }

  static std::vector<Val> int_range(std::int64_t lo, std::int64_t hi) {
    std::vector<Val> out;
    for (std::int64_t x = lo; x <= hi; ++x) {
      Val v;
      v.i = x;
      out.push_back(v);
    }
    return out;
  }

  static std::vector<Val> centered(std::int64_t radius) {
    std::vector<Val> out;
    for (std::int64_t k = 0; k <= radius; ++k) {
      Val v;
      v.i = k;
      out.push_back(v);
      if (k) {
        v.i = -k;
        out.push_back(v);
      }
    }
    return out;
  }

  // Iterates every combination of `cs`; stops when `fn` returns true.
  bool for_each(const std::vector<Choice>& cs, std::vector<Val>& env,
                const std::function<bool()>& fn) {
    std::vector<std::size_t> idx(cs.size(), 0);
    for (std::size_t i = 0; i < cs.size(); ++i) env[cs[i].slot] = cs[i].values[0];
    for (;;) {
      if (fn()) return true;
      std::size_t i = 0;
      for (; i < cs.size(); ++i) {
        if (++idx[i] < cs[i].values.size()) {
          env[cs[i].slot] = cs[i].values[idx[i]];
          break;
        }
        idx[i] = 0;
        env[cs[i].slot] = cs[i].values[0];
      }
      if (i == cs.size()) return false;
    }
  }

  Assignment to_assignment(const std::vector<Val>& env) const {
    Assignment out;
    for (const auto& n : sets_) {
      SolverValue v;
      v.kind = SolverValue::Kind::Set;
      v.set = prog_.roles_of(env[prog_.slots.at(n)].m);
      out[n] = v;
    }
    for (const auto* group : {&roles_, &ints_})
      for (const auto& n : *group) {
        SolverValue v;
        v.i = env[prog_.slots.at(n)].i;
        out[n] = v;
      }
    for (const auto& n : bools_) {
      SolverValue v;
      v.kind = SolverValue::Kind::Bool;
      v.b = env[prog_.slots.at(n)].b;
      out[n] = v;
    }
    return out;
  }

  Verdict invalid(const std::vector<Val>& env, std::uint64_t count) const {
    Verdict v;
    v.kind = Verdict::Kind::Invalid;
    v.counterexample = to_assignment(env);
    v.enumerated = count;
    return v;
  }

  Verdict search(bool require_bounded) {
    std::vector<Val> env(prog_.slots.size());
    std::vector<Choice> bounded_ints;
    std::vector<std::string> unbounded;
    for (const auto& n : ints_) {
      const auto& b = bounds_[n];
      if (b.first && b.second) {
        if (*b.first > *b.second) {
          Verdict v;
          v.kind = Verdict::Kind::Valid;
          return v;  // the assumptions are contradictory
        }
        if (*b.second - *b.first > static_cast<std::int64_t>(opts_.budget))
          unbounded.push_back(n);
        else
          bounded_ints.push_back(Choice{prog_.slots[n], int_range(*b.first, *b.second)});
      } else {
        unbounded.push_back(n);
      }
    }
    std::vector<Choice> all = finite_;
    all.insert(all.end(), bounded_ints.begin(), bounded_ints.end());
    std::uint64_t count = 0;

    if (unbounded.empty()) {
      if (product(all) > opts_.budget) throw Unsupported{"enumeration budget exceeded"};
      bool found = for_each(all, env, [&] {
        ++count;
        return prog_.eval(root_, env).b;
      });
      if (found) return invalid(env, count);
      Verdict v;
      v.kind = Verdict::Kind::Valid;
      v.enumerated = count;
      return v;
    }
    if (require_bounded) throw Unsupported{"integer variable without bounds"};

    // Some integers are unbounded: look for a small counterexample first,
    // then refute the remaining cases symbolically.
    std::vector<Choice> box = all;
    for (const auto& n : unbounded) box.push_back(Choice{prog_.slots[n], centered(8)});
    if (product(box) <= opts_.budget) {
      bool found = for_each(box, env, [&] {
        ++count;
        return prog_.eval(root_, env).b;
      });
      if (found) return invalid(env, count);
    }
    if (product(finite_) > opts_.budget) throw Unsupported{"enumeration budget exceeded"};
    bool open = for_each(finite_, env, [&] {
      ++count;
      std::map<std::string, StaticPtr> fix;
      for (const auto& n : sets_) fix[n] = st::set(prog_.roles_of(env[prog_.slots[n]].m));
      for (const auto& n : roles_) fix[n] = st::integer(env[prog_.slots[n]].i);
      for (const auto& n : bools_) fix[n] = st::boolean(env[prog_.slots[n]].b);
      StaticPtr residual = normalize_static(fix, formula_, a_.universe);
      for (const auto& conj : to_dnf(*residual, true))
        if (feasible(conj)) return true;
      return false;
    });
    if (open) throw Unsupported{"integer reasoning incomplete for unbounded variables"};
    Verdict v;
    v.kind = Verdict::Kind::Valid;
    v.enumerated = count;
    return v;
  }

  const Assumptions& a_;
  StaticPtr goal_;
  SolverOptions opts_;
  Program_ prog_;
  StaticPtr formula_;
  int root_ = -1;
  std::vector<std::string> sets_, roles_, bools_, ints_;
  std::vector<Choice> finite_;
  std::map<std::string, std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>>> bounds_;
};

}  // namespace

Verdict entails(const Assumptions& a, const StaticPtr& goal, const SolverOptions& opts) {
  return Engine(a, goal, opts).run(false, false);
}

Verdict solve_fragment_setvars(const Assumptions& a, const StaticPtr& goal, const SolverOptions& opts) {
  return Engine(a, goal, opts).run(false, true);
}

Verdict solve_fragment_ints(const Assumptions& a, const StaticPtr& goal, const SolverOptions& opts) {
  return Engine(a, goal, opts).run(true, false);
}

std::optional<bool> evaluate_prop(const StaticPtr& prop, const Assignment& env,
                                  const std::optional<std::vector<int>>& universe) {
  for (const auto& v : free_vars(*prop))
    if (!env.count(v)) return std::nullopt;
  Program_ p;
  std::set<int> dom;
  if (universe) dom.insert(universe->begin(), universe->end());
  collect_literals(*prop, dom);
  for (const auto& [n, v] : env) {
    if (v.kind == SolverValue::Kind::Set) dom.insert(v.set.begin(), v.set.end());
    if (v.kind == SolverValue::Kind::Int && v.i >= INT32_MIN && v.i <= INT32_MAX)
      dom.insert(static_cast<int>(v.i));
  }
  if (dom.size() > 64) return std::nullopt;
  p.domain.assign(dom.begin(), dom.end());
  if (universe) {
    p.has_universe = true;
    p.universe_mask = p.mask_of(*universe);
  }
  std::vector<Val> vals;
  for (const auto& [n, v] : env) {
    p.slots[n] = static_cast<int>(vals.size());
    Val x;
    x.i = v.i;
    x.b = v.b;
    if (v.kind == SolverValue::Kind::Set) x.m = p.mask_of(v.set);
    vals.push_back(x);
  }
  try {
    int root = p.compile(*prop);
    return p.eval(root, vals).b;
  } catch (const Unsupported&) {
    return std::nullopt;
  }
}

}  // namespace mps
