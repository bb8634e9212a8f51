#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mps/parser.hpp"
#include "mps/statics.hpp"

namespace mps::testing {

std::string corpus_path(const std::string& name) { return std::string(MPS_CORPUS_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> mutant_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_path("mutants")))
    if (e.path().extension() == ".mps") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string expected_code(const std::string& path) {
  std::string text = read_text(path);
  const std::string tag = "// expect: ";
  if (text.rfind(tag, 0) != 0) throw std::runtime_error(path + " lacks an expect header");
  return text.substr(tag.size(), text.find('\n') - tag.size());
}

// ------------------------------------------------------------ statics

const Program& generator_context() {
  static const Program p = parse_program(
      "protocol p roles A = 0, B = 1 universe {0, 1} = msg(A, int) :: end(A);\n"
      "protocol q(n: int) roles X = 0, Y = 1, Z = 2 universe {0, 1, 2} = msg(X -> Y, int(n)) :: end(Z);\n");
  return p;
}

namespace {

using Scope = std::vector<std::pair<std::string, SortPtr>>;

struct StaticGen {
  Rng& rng;
  Scope scope;
  bool solver_fragment = false;
  int counter = 0;

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
  bool chance(int percent) { return pick(100) < percent; }

  std::string fresh() { return "v" + std::to_string(counter++); }

  StaticPtr var_of(const SortPtr& s) {
    std::vector<std::string> names;
    for (const auto& [n, so] : scope)
      if (sort_equal(*so, *s)) names.push_back(n);
    if (names.empty()) return nullptr;
    // The innermost binding of a name shadows the others.
    std::string n = names[pick(static_cast<int>(names.size()))];
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == n) return sort_equal(*it->second, *s) ? st::var(n) : nullptr;
    return nullptr;
  }

  StaticPtr bound(const std::string& name, const SortPtr& s, const std::function<StaticPtr()>& body) {
    scope.emplace_back(name, s);
    StaticPtr b = body();
    scope.pop_back();
    return b;
  }

  StaticPtr role_set_literal() {
    std::vector<int> r;
    for (int i = 0; i < 3; ++i)
      if (chance(50)) r.push_back(i);
    return st::set(r);
  }

  StaticPtr role(int d) {
    if (chance(50))
      if (auto v = var_of(sort_int())) return v;
    (void)d;
    return st::integer(pick(3));
  }

  StaticPtr proto_ref(const std::string& name) {
    const ProtocolDecl* d = generator_context().find_protocol(name);
    auto p = std::make_shared<Static>(*st::proto(name));
    p->roles = d->universe;
    return p;
  }

  SortPtr simple_sort() {
    switch (pick(5)) {
      case 0: return sort_int();
      case 1: return sort_bool();
      case 2: return sort_set();
      case 3: return sort_stype();
      default: return sort_type();
    }
  }

  StaticPtr gen(const SortPtr& s, int d) {
    switch (s->kind) {
      case Sort::Kind::Int: return gen_int(d);
      case Sort::Kind::Bool: return gen_bool(d);
      case Sort::Kind::Set: return gen_set(d);
      case Sort::Kind::SType: return gen_stype(d);
      case Sort::Kind::Type: return gen_type(d, false);
      case Sort::Kind::VType: return gen_type(d, true);
      case Sort::Kind::Arrow: {
        std::string a = fresh();
        SortPtr dom = s->dom;
        return st::lam(a, dom, bound(a, dom, [&] { return gen(s->cod, d - 1); }));
      }
    }
    return st::unit();
  }

  StaticPtr gen_int(int d) {
    if (d <= 0 || chance(30)) {
      if (chance(50))
        if (auto v = var_of(sort_int())) return v;
      return st::integer(pick(13) - 3);
    }
    switch (pick(solver_fragment ? 5 : 6)) {
      case 0: return st::op(SOp::Add, {gen_int(d - 1), gen_int(d - 1)});
      case 1: return st::op(SOp::Sub, {gen_int(d - 1), gen_int(d - 1)});
      case 2: return st::op(SOp::Mul, {st::integer(pick(5) - 1), gen_int(d - 1)});
      case 3: return st::op(SOp::Neg, {gen_int(d - 1)});
      case 4: return st::op(SOp::Ite, {gen_bool(d - 1), gen_int(d - 1), gen_int(d - 1)});
      default: {
        std::string a = fresh();
        return st::app(st::lam(a, sort_int(), bound(a, sort_int(), [&] { return gen_int(d - 1); })),
                       gen_int(d - 1));
      }
    }
  }

  StaticPtr gen_bool(int d) {
    if (d <= 0 || chance(20)) {
      if (chance(50))
        if (auto v = var_of(sort_bool())) return v;
      return st::boolean(chance(50));
    }
    static const SOp rel[] = {SOp::Eq, SOp::Neq, SOp::Lt, SOp::Le, SOp::Gt, SOp::Ge};
    switch (pick(9)) {
      case 0:
      case 1: return st::op(rel[pick(6)], {gen_int(d - 1), gen_int(d - 1)});
      case 2: return st::op(chance(50) ? SOp::In : SOp::NotIn, {role(d), gen_set(d - 1)});
      case 3: return st::op(SOp::Subset, {gen_set(d - 1), gen_set(d - 1)});
      case 4: return st::op(chance(50) ? SOp::Eq : SOp::Neq, {gen_set(d - 1), gen_set(d - 1)});
      case 5: return st::op(SOp::And, {gen_bool(d - 1), gen_bool(d - 1)});
      case 6: return st::op(SOp::Or, {gen_bool(d - 1), gen_bool(d - 1)});
      case 7: return st::op(SOp::Imp, {gen_bool(d - 1), gen_bool(d - 1)});
      default: return st::op(SOp::Not, {gen_bool(d - 1)});
    }
  }

  StaticPtr gen_set(int d) {
    if (d <= 0 || chance(35)) {
      if (chance(50))
        if (auto v = var_of(sort_set())) return v;
      return chance(10) ? st::full() : role_set_literal();
    }
    switch (pick(5)) {
      case 0: return st::op(SOp::Union, {gen_set(d - 1), gen_set(d - 1)});
      case 1: return st::op(SOp::DUnion, {gen_set(d - 1), gen_set(d - 1)});
      case 2: return st::op(SOp::Inter, {gen_set(d - 1), gen_set(d - 1)});
      case 3: return st::op(SOp::Minus, {gen_set(d - 1), gen_set(d - 1)});
      default: return st::op(SOp::Compl, {gen_set(d - 1)});
    }
  }

  StaticPtr gen_stype(int d) {
    if (d <= 0 || chance(25)) {
      switch (pick(4)) {
        case 0:
          if (auto v = var_of(sort_stype())) return v;
          [[fallthrough]];
        case 1: return st::end(role(d));
        case 2: return proto_ref("p");
        default: return st::app(proto_ref("q"), gen_int(d - 1));
      }
    }
    switch (pick(6)) {
      case 0: return st::bmsg(role(d), gen_type(d - 1, false), gen_stype(d - 1));
      case 1: {
        int r1 = pick(3);
        return st::pmsg(st::integer(r1), st::integer((r1 + 1 + pick(2)) % 3), gen_type(d - 1), gen_stype(d - 1));
      }
      case 2: {
        std::string a = fresh();
        SortPtr so = chance(50) ? sort_int() : sort_type();
        return st::quan(role(d), st::lam(a, so, bound(a, so, [&] { return gen_stype(d - 1); })));
      }
      case 3: return st::branch(role(d), gen_stype(d - 1), gen_stype(d - 1));
      case 4: {
        std::string a = fresh();
        return st::fix(st::lam(a, sort_stype(), bound(a, sort_stype(), [&] { return gen_stype(d - 1); })));
      }
      default: return st::op(SOp::Ite, {gen_bool(d - 1), gen_stype(d - 1), gen_stype(d - 1)});
    }
  }

  StaticPtr chan(int d) {
    StaticPtr session = gen_stype(d - 1);
    const Static* h = session.get();
    while (h->kind == SKind::App) h = h->kids[0].get();
    std::optional<std::vector<int>> u;
    if (h->kind == SKind::Proto) u = h->roles;
    return st::chan(role_set_literal(), session, u);
  }

  StaticPtr gen_type(int d, bool linear = true) {
    if (d <= 0 || chance(25)) {
      switch (pick(6)) {
        case 0:
          if (auto v = var_of(sort_type())) return v;
          [[fallthrough]];
        case 1: return st::unit();
        case 2: return st::base("string");
        case 3: return st::base("int");
        case 4: return st::base("int", {gen_int(d - 1)});
        default: return st::base("bool", {gen_bool(d - 1)});
      }
    }
    switch (pick(9)) {
      case 0:
      case 1:
        if (linear) return chan(d);
        return st::pair(gen_type(d - 1, false), gen_type(d - 1, false));
      case 2: return st::pair(gen_type(d - 1, linear), gen_type(d - 1, linear));
      case 3: return st::fun(gen_type(d - 1, linear), gen_type(d - 1, linear), linear && chance(50));
      case 4: return st::sum(gen_type(d - 1, linear), gen_type(d - 1, linear));
      case 5: return st::guard(gen_bool(d - 1), gen_type(d - 1, linear));
      case 6: return st::assertion(gen_bool(d - 1), gen_type(d - 1, linear));
      default: {
        std::string a = fresh();
        SortPtr so = simple_sort();
        StaticPtr body = bound(a, so, [&] { return gen_type(d - 1, linear); });
        return chance(50) ? st::forall(a, so, body) : st::exists(a, so, body);
      }
    }
  }
};

struct TermGen {
  Rng& rng;
  StaticGen statics;
  std::vector<std::string> vars;
  int counter = 0;

  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
  bool chance(int percent) { return pick(100) < percent; }
  std::string fresh() { return "x" + std::to_string(counter++); }

  TermPtr under(const std::vector<std::string>& names, int d) {
    for (const auto& n : names) vars.push_back(n);
    TermPtr e = gen(d);
    vars.resize(vars.size() - names.size());
    return e;
  }

  StaticPtr type(int d) { return statics.gen_type(std::min(d, 2)); }

  TermPtr leaf() {
    switch (pick(6)) {
      case 0:
        if (!vars.empty()) return dy::var(vars[pick(static_cast<int>(vars.size()))]);
        [[fallthrough]];
      case 1: return dy::unit();
      case 2: return dy::integer(pick(40) - 10);
      case 3: return dy::boolean(chance(50));
      case 4: {
        static const char* texts[] = {"", "hi", "a b", "say \"x\"", "back\\slash"};
        return dy::str(texts[pick(5)]);
      }
      default: return dy::integer(pick(5));
    }
  }

  TermPtr gen(int d) {
    if (d <= 0 || chance(15)) return leaf();
    switch (pick(26)) {
      case 0: {
        std::string x = fresh();
        return dy::lam(x, chance(50) ? type(d) : nullptr, under({x}, d - 1));
      }
      case 1: {
        std::string g = fresh(), x = fresh();
        return dy::fix(g, x, type(d), type(d), under({g, x}, d - 1));
      }
      case 2:
      case 3: return dy::app(gen(d - 1), gen(d - 1));
      case 4: return dy::pair(gen(d - 1), gen(d - 1));
      case 5: return dy::fst(gen(d - 1));
      case 6: return dy::snd(gen(d - 1));
      case 7: {
        std::string x = fresh(), y = fresh();
        TermPtr b = gen(d - 1);
        return dy::let_pair(x, y, b, under({x, y}, d - 1));
      }
      case 8: return dy::if_(gen(d - 1), gen(d - 1), gen(d - 1));
      case 9: return dy::guard_intro(gen(d - 1));
      case 10: return dy::guard_elim(gen(d - 1));
      case 11: return dy::assert_intro(gen(d - 1));
      case 12: {
        std::string x = fresh();
        TermPtr b = gen(d - 1);
        return dy::let_assert(x, b, under({x}, d - 1));
      }
      case 13: {
        std::string a = statics.fresh();
        SortPtr so = statics.simple_sort();
        statics.scope.emplace_back(a, so);
        TermPtr body = gen(d - 1);
        statics.scope.pop_back();
        return dy::forall_intro(a, so, body);
      }
      case 14: return dy::forall_elim(gen(d - 1), chance(80) ? statics.gen_int(1) : nullptr);
      case 15: {
        StaticPtr w = chance(70) ? statics.gen_int(1) : nullptr;
        StaticPtr t = chance(50) ? type(d) : nullptr;
        return dy::exists_intro(gen(d - 1), w, t);
      }
      case 16: {
        std::string a = chance(70) ? statics.fresh() : std::string();
        std::string x = fresh();
        TermPtr b = gen(d - 1);
        if (!a.empty()) statics.scope.emplace_back(a, sort_int());
        TermPtr body = under({x}, d - 1);
        if (!a.empty()) statics.scope.pop_back();
        return dy::let_exists(a, x, b, body);
      }
      case 17: return dy::inl(gen(d - 1), chance(50) ? st::sum(type(d), type(d)) : nullptr);
      case 18: return dy::inr(gen(d - 1), chance(50) ? st::sum(type(d), type(d)) : nullptr);
      case 19: {
        std::string x = fresh(), y = fresh();
        TermPtr s = gen(d - 1);
        TermPtr l = under({x}, d - 1);
        return dy::case_(s, x, l, y, under({y}, d - 1));
      }
      case 20: return dy::annot(gen(d - 1), type(d));
      case 21:
      case 22: {
        Api api = static_cast<Api>(pick(static_cast<int>(Api::Not) + 1));
        std::vector<TermPtr> args;
        for (int i = 0; i < api_arity(api); ++i) args.push_back(gen(d - 1));
        return dy::call(api, args);
      }
      case 23:
      case 24: {
        std::string x = fresh();
        TermPtr b = gen(d - 1);
        return dy::let(x, b, under({x}, d - 1));
      }
      default: return dy::seq(gen(d - 1), gen(d - 1));
    }
  }
};

bool static_ptr_equal(const StaticPtr& a, const StaticPtr& b) {
  if (!a || !b) return !a && !b;
  return alpha_equal(a, b);
}

}  // namespace

StaticPtr gen_static(Rng& rng, const SortPtr& sort, int depth, std::vector<std::pair<std::string, SortPtr>> scope) {
  StaticGen g{rng, std::move(scope)};
  return g.gen(sort, depth);
}

TermPtr gen_term(Rng& rng, int depth) {
  TermGen g{rng, StaticGen{rng, {}}};
  return g.gen(depth);
}

bool term_equal(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.name != b.name || a.name2 != b.name2 || a.value != b.value || a.text != b.text)
    return false;
  if (a.kind == TKind::Endpoint && a.endpoint != b.endpoint) return false;
  if (a.kind == TKind::ApiCall && a.api != b.api) return false;
  if (static_cast<bool>(a.sort) != static_cast<bool>(b.sort)) return false;
  if (a.sort && !sort_equal(*a.sort, *b.sort)) return false;
  if (a.kids.size() != b.kids.size() || a.statics.size() != b.statics.size()) return false;
  for (std::size_t i = 0; i < a.statics.size(); ++i)
    if (!static_ptr_equal(a.statics[i], b.statics[i])) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!term_equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

// ------------------------------------------------------------ solver

Entailment gen_entailment(Rng& rng) {
  StaticGen g{rng, {}, true};
  Entailment e;
  const std::vector<int> universe{0, 1, 2};
  e.assumptions.universe = universe;
  if (g.chance(80)) {
    e.assumptions.set_vars["S0"] = universe;
    g.scope.emplace_back("S0", sort_set());
  }
  if (g.chance(50)) {
    e.assumptions.set_vars["S1"] = universe;
    g.scope.emplace_back("S1", sort_set());
  }
  if (g.chance(40)) {
    e.assumptions.bool_vars.push_back("b0");
    g.scope.emplace_back("b0", sort_bool());
  }
  for (const char* n : {"n0", "n1"}) {
    if (!g.chance(50)) continue;
    e.assumptions.int_vars.push_back(n);
    g.scope.emplace_back(n, sort_int());
    e.assumptions.props.push_back(st::op(SOp::And, {st::op(SOp::Le, {st::integer(0), st::var(n)}),
                                                    st::op(SOp::Le, {st::var(n), st::integer(3)})}));
  }
  int extra = g.pick(3);
  for (int i = 0; i < extra; ++i) e.assumptions.props.push_back(g.gen_bool(2));
  e.goal = g.gen_bool(3);
  return e;
}

namespace {

struct OVal {
  enum class K { Int, Bool, Set } k = K::Bool;
  std::int64_t i = 0;
  bool b = false;
  std::set<int> s;
  bool undef = false;
};

OVal oeval(const Static& p, const Assignment& env, const std::vector<int>& universe) {
  OVal r;
  auto E = [&](std::size_t i) { return oeval(*p.kids[i], env, universe); };
  auto boolean = [](bool b) {
    OVal v;
    v.b = b;
    return v;
  };
  auto integer = [](std::int64_t i) {
    OVal v;
    v.k = OVal::K::Int;
    v.i = i;
    return v;
  };
  auto set = [](std::set<int> s) {
    OVal v;
    v.k = OVal::K::Set;
    v.s = std::move(s);
    return v;
  };
  auto undef_set = [] {
    OVal v;
    v.k = OVal::K::Set;
    v.undef = true;
    return v;
  };
  switch (p.kind) {
    case SKind::Int: return integer(p.value);
    case SKind::Bool: return boolean(p.value != 0);
    case SKind::Set: return set({p.roles.begin(), p.roles.end()});
    case SKind::Full: return set({universe.begin(), universe.end()});
    case SKind::Var: {
      const SolverValue& v = env.at(p.name);
      if (v.kind == SolverValue::Kind::Int) return integer(v.i);
      if (v.kind == SolverValue::Kind::Bool) return boolean(v.b);
      return set({v.set.begin(), v.set.end()});
    }
    case SKind::Op: break;
    default: throw std::runtime_error("oracle: unsupported static");
  }
  switch (p.op) {
    case SOp::Union:
    case SOp::DUnion:
    case SOp::Inter:
    case SOp::Minus: {
      OVal a = E(0), b = E(1);
      if (a.undef || b.undef) return undef_set();
      std::set<int> out;
      if (p.op == SOp::Union || p.op == SOp::DUnion) {
        if (p.op == SOp::DUnion)
          for (int x : a.s)
            if (b.s.count(x)) return undef_set();
        out = a.s;
        out.insert(b.s.begin(), b.s.end());
      } else if (p.op == SOp::Inter) {
        for (int x : a.s)
          if (b.s.count(x)) out.insert(x);
      } else {
        for (int x : a.s)
          if (!b.s.count(x)) out.insert(x);
      }
      return set(out);
    }
    case SOp::Compl: {
      OVal a = E(0);
      if (a.undef) return a;
      std::set<int> out;
      for (int x : universe)
        if (!a.s.count(x)) out.insert(x);
      return set(out);
    }
    case SOp::In:
    case SOp::NotIn: {
      OVal a = E(0), b = E(1);
      if (b.undef) return boolean(false);
      bool in = b.s.count(static_cast<int>(a.i)) > 0;
      return boolean(p.op == SOp::In ? in : !in);
    }
    case SOp::Subset: {
      OVal a = E(0), b = E(1);
      if (a.undef || b.undef) return boolean(false);
      return boolean(std::includes(b.s.begin(), b.s.end(), a.s.begin(), a.s.end()));
    }
    case SOp::Eq:
    case SOp::Neq: {
      OVal a = E(0), b = E(1);
      if (a.undef || b.undef) return boolean(false);
      bool eq = a.k == OVal::K::Set ? a.s == b.s : a.k == OVal::K::Int ? a.i == b.i : a.b == b.b;
      return boolean(p.op == SOp::Eq ? eq : !eq);
    }
    case SOp::Lt: return boolean(E(0).i < E(1).i);
    case SOp::Le: return boolean(E(0).i <= E(1).i);
    case SOp::Gt: return boolean(E(0).i > E(1).i);
    case SOp::Ge: return boolean(E(0).i >= E(1).i);
    case SOp::Add: return integer(E(0).i + E(1).i);
    case SOp::Sub: return integer(E(0).i - E(1).i);
    case SOp::Mul: return integer(E(0).i * E(1).i);
    case SOp::Neg: return integer(-E(0).i);
    case SOp::Not: return boolean(!E(0).b);
    case SOp::And: return boolean(E(0).b && E(1).b);
    case SOp::Or: return boolean(E(0).b || E(1).b);
    case SOp::Imp: return boolean(!E(0).b || E(1).b);
    case SOp::Ite: return E(0).b ? E(1) : E(2);
    default: throw std::runtime_error("oracle: unsupported operator");
  }
}

}  // namespace

bool oracle_holds(const StaticPtr& prop, const Assignment& env, const std::vector<int>& universe) {
  return oeval(*prop, env, universe).b;
}

OracleVerdict brute_force(const Entailment& e) {
  const Assumptions& a = e.assumptions;
  std::vector<int> universe = a.universe.value_or(std::vector<int>{});
  struct Slot {
    std::string name;
    std::vector<SolverValue> values;
  };
  std::vector<Slot> slots;
  for (const auto& [n, u] : a.set_vars) {
    Slot s{n, {}};
    for (unsigned m = 0; m < (1u << u.size()); ++m) {
      SolverValue v;
      v.kind = SolverValue::Kind::Set;
      for (std::size_t i = 0; i < u.size(); ++i)
        if (m >> i & 1) v.set.push_back(u[i]);
      s.values.push_back(v);
    }
    slots.push_back(s);
  }
  for (const auto& n : a.bool_vars) {
    Slot s{n, {}};
    for (bool b : {false, true}) {
      SolverValue v;
      v.kind = SolverValue::Kind::Bool;
      v.b = b;
      s.values.push_back(v);
    }
    slots.push_back(s);
  }
  for (const auto& n : a.int_vars) {
    Slot s{n, {}};
    for (int i = -2; i <= 6; ++i) {
      SolverValue v;
      v.kind = SolverValue::Kind::Int;
      v.i = i;
      s.values.push_back(v);
    }
    slots.push_back(s);
  }
  std::vector<std::size_t> idx(slots.size(), 0);
  for (;;) {
    Assignment env;
    for (std::size_t i = 0; i < slots.size(); ++i) env[slots[i].name] = slots[i].values[idx[i]];
    bool assumed = std::all_of(a.props.begin(), a.props.end(),
                               [&](const StaticPtr& p) { return oracle_holds(p, env, universe); });
    if (assumed && !oracle_holds(e.goal, env, universe)) return OracleVerdict{false, env};
    std::size_t k = 0;
    while (k < slots.size() && ++idx[k] == slots[k].values.size()) idx[k++] = 0;
    if (k == slots.size()) return OracleVerdict{true, std::nullopt};
  }
}

// ------------------------------------------------------------ collections

Collection gen_collection(Rng& rng, int max_channels, int max_sets) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  Collection m;
  int nsets = 1 + pick(max_sets);
  int nchans = pick(max_channels + 1);
  bool forest = pick(2) == 0;
  m.sets.resize(nsets);
  std::vector<int> comp(nsets);
  std::iota(comp.begin(), comp.end(), 0);

  for (int c = 0; c < nchans; ++c) {
    int usize = 2 + pick(3);
    std::vector<int> universe(usize);
    std::iota(universe.begin(), universe.end(), 0);
    // Random partition of the universe into endpoints.
    std::vector<std::vector<int>> parts(1 + pick(usize));
    for (int r : universe) parts[pick(static_cast<int>(parts.size()))].push_back(r);
    parts.erase(std::remove_if(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }), parts.end());

    std::vector<int> owners;
    if (forest) {
      // One set per distinct component keeps the incidence graph acyclic.
      std::vector<int> reps;
      for (int s = 0; s < nsets; ++s)
        if (std::find_if(reps.begin(), reps.end(), [&](int t) { return comp[t] == comp[s]; }) == reps.end())
          reps.push_back(s);
      std::shuffle(reps.begin(), reps.end(), rng);
      if (reps.size() < parts.size()) {
        // Fold surplus endpoints into the last one.
        while (parts.size() > std::max<std::size_t>(1, reps.size())) {
          auto last = parts.back();
          parts.pop_back();
          parts.back().insert(parts.back().end(), last.begin(), last.end());
          std::sort(parts.back().begin(), parts.back().end());
        }
      }
      int target = comp[reps[0]];
      for (std::size_t i = 0; i < parts.size(); ++i) {
        owners.push_back(reps[i]);
        int old = comp[reps[i]];
        for (int& x : comp)
          if (x == old) x = target;
      }
    } else {
      for (std::size_t i = 0; i < parts.size(); ++i) owners.push_back(pick(nsets));
    }
    m.universes[c] = universe;
    for (std::size_t i = 0; i < parts.size(); ++i) m.sets[owners[i]].insert(Endpoint{c, parts[i]});
  }
  return m;
}

}  // namespace mps::testing
