#include <algorithm>

#include "checker.hpp"
#include "mps/pretty.hpp"

namespace mps {

namespace detail {

namespace {

bool session_ctor(SKind k) {
  switch (k) {
    case SKind::End:
    case SKind::BMsg:
    case SKind::PMsg:
    case SKind::Quan:
    case SKind::Branch:
    case SKind::Fix:
      return true;
    default:
      return false;
  }
}

bool proto_headed(const Static& s) {
  const Static* h = &s;
  while (h->kind == SKind::App) h = h->kids[0].get();
  return h->kind == SKind::Proto;
}

bool binder(SKind k) { return k == SKind::Lam || k == SKind::Forall || k == SKind::Exists; }

bool is_index_sort(const SortPtr& s) {
  return s && (s->kind == Sort::Kind::Int || s->kind == Sort::Kind::Bool || s->kind == Sort::Kind::Set);
}

std::string head_name(const Static& s) {
  switch (s.kind) {
    case SKind::End: return "end";
    case SKind::BMsg:
    case SKind::PMsg: return "msg";
    case SKind::Quan: return "quan";
    case SKind::Branch: return "branch";
    case SKind::Fix: return "fix";
    default: return pretty(s);
  }
}

}  // namespace

StaticPtr stamp_universe(const StaticPtr& t, const std::vector<int>& universe) {
  if (!t) return t;
  std::vector<StaticPtr> kids;
  bool changed = false;
  for (const auto& k : t->kids) {
    kids.push_back(stamp_universe(k, universe));
    changed = changed || kids.back() != k;
  }
  if (t->kind == SKind::Chan && t->value == 0) {
    auto n = std::make_shared<Static>(*t);
    n->kids = std::move(kids);
    n->value = 1;
    n->roles = universe;
    return n;
  }
  return changed ? st::with_kids(t, std::move(kids)) : t;
}

Checker::Checker(const Program& program, const CheckOptions& opts, const Signature* sig)
    : program(program), opts(opts), sig(sig) {}

void Checker::fail(const std::string& code, Span span, const std::string& msg, const std::string& guard,
                   const std::string& verdict) const {
  throw TypeError(Diagnostic{code, span, msg, guard, verdict});
}

void Checker::fail(const Mismatch& m, Span span) const { fail(m.code, span, m.message, m.guard, m.verdict); }

SortCtx Checker::all_sorts() const {
  SortCtx ctx;
  for (const auto& [n, s] : globals) ctx.push(n, s);
  for (const auto& [n, s] : sorts.bindings()) ctx.push(n, s);
  return ctx;
}

bool Checker::static_in_scope(const std::string& name) const {
  if (sorts.lookup(name)) return true;
  return std::any_of(globals.begin(), globals.end(), [&](const auto& g) { return g.first == name; });
}

std::string Checker::fresh_static(const std::string& base, SortPtr sort) {
  std::string stem = base.substr(0, base.find('\''));
  std::string name;
  do {
    name = stem + "'" + std::to_string(++counter_);
  } while (static_in_scope(name));
  globals.emplace_back(name, std::move(sort));
  return name;
}

Assumptions Checker::assumptions() const {
  Assumptions a;
  a.props = props;
  auto universe = program.global_universe();
  std::set<std::string> seen;
  auto ctx = all_sorts();
  const auto& b = ctx.bindings();
  for (auto it = b.rbegin(); it != b.rend(); ++it) {
    if (!seen.insert(it->first).second || !it->second) continue;
    switch (it->second->kind) {
      case Sort::Kind::Set: a.set_vars[it->first] = universe; break;
      case Sort::Kind::Int: a.int_vars.push_back(it->first); break;
      case Sort::Kind::Bool: a.bool_vars.push_back(it->first); break;
      default: break;
    }
  }
  return a;
}

Verdict Checker::prove(const StaticPtr& goal) {
  StaticPtr g = normalize(goal);
  if (g->kind == SKind::Bool) {
    Verdict v;
    v.kind = g->value ? Verdict::Kind::Valid : Verdict::Kind::Invalid;
    if (g->value) return v;
  }
  return entails(assumptions(), g, opts.solver);
}

bool Checker::linear(const StaticPtr& t) const {
  auto ctx = all_sorts();
  return is_linear_type(t, &ctx);
}

Checker::State Checker::state() const {
  State s;
  for (const auto& v : vars) s.vars.push_back(v.consumed);
  for (const auto& r : resources) s.resources.push_back(r.consumed);
  return s;
}

void Checker::restore(const State& s) {
  for (std::size_t i = 0; i < vars.size() && i < s.vars.size(); ++i) vars[i].consumed = s.vars[i];
  for (std::size_t i = 0; i < resources.size(); ++i) resources[i].consumed = s.resources[i];
}

std::vector<std::string> Checker::newly_consumed(const State& before, const State& after,
                                                 std::size_t nvars) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < nvars && i < before.vars.size() && i < after.vars.size(); ++i)
    if (after.vars[i] != before.vars[i]) out.push_back(vars[i].name);
  for (std::size_t i = 0; i < before.resources.size(); ++i)
    if (after.resources[i] != before.resources[i]) out.push_back(pretty(resources[i].ep));
  return out;
}

// ------------------------------------------------------------- whnf

namespace {

StaticPtr resolve_ite(Checker& c, StaticPtr s, const std::optional<std::vector<int>>& universe) {
  for (int i = 0; i < 1000; ++i) {
    s = whnf(s, c.program, universe);
    if (s->kind != SKind::Op || s->op != SOp::Ite) return s;
    if (c.prove(s->kids[0]).valid())
      s = s->kids[1];
    else if (c.prove(st::op(SOp::Not, {s->kids[0]})).valid())
      s = s->kids[2];
    else
      return s;
  }
  return s;
}

}  // namespace

StaticPtr Checker::whnf_type(const StaticPtr& t, const std::optional<std::vector<int>>& universe) {
  StaticPtr cur = resolve_ite(*this, t, universe);
  if (cur->kind == SKind::Chan) {
    auto cu = chan_universe(*cur);
    if (!cu) cu = session_universe(cur->kids[1], program);
    StaticPtr session = resolve_ite(*this, cur->kids[1], cu);
    StaticPtr roles = normalize(cur->kids[0], cu);
    return st::chan(roles, session, cu);
  }
  return cur;
}

// ------------------------------------------------------------- equality

std::optional<Mismatch> Checker::equal(const StaticPtr& a0, const StaticPtr& b0,
                                       const std::optional<std::vector<int>>& universe) {
  if (alpha_equal(a0, b0)) return std::nullopt;
  StaticPtr a = normalize(a0, universe);
  StaticPtr b = normalize(b0, universe);
  if (alpha_equal(a, b)) return std::nullopt;
  bool unfold = proto_headed(*a) || proto_headed(*b) || (a->kind == SKind::Op && a->op == SOp::Ite) ||
                (b->kind == SKind::Op && b->op == SOp::Ite);
  if (unfold) {
    a = resolve_ite(*this, a, universe);
    b = resolve_ite(*this, b, universe);
    if (alpha_equal(a, b)) return std::nullopt;
  }

  auto index_like = [&](const Static& s) {
    switch (s.kind) {
      case SKind::Int:
      case SKind::Bool:
      case SKind::Set:
      case SKind::Full:
        return true;
      case SKind::Op:
        return s.op != SOp::Ite;
      case SKind::Var:
        return is_index_sort(all_sorts().lookup(s.name));
      default:
        return false;
    }
  };
  if (index_like(*a) || index_like(*b)) {
    SortPtr sa;
    try {
      sa = sort_of(all_sorts(), index_like(*a) ? *a : *b, &program);
    } catch (const StaticError&) {
    }
    StaticPtr goal;
    if (sa && sa->kind == Sort::Kind::Bool)
      goal = st::op(SOp::And, {st::op(SOp::Imp, {a, b}), st::op(SOp::Imp, {b, a})});
    else
      goal = st::op(SOp::Eq, {a, b});
    goal = normalize(goal, universe);
    Verdict v = prove(goal);
    if (v.valid()) return std::nullopt;
    return Mismatch{"guard-unprovable", "cannot show " + pretty(a) + " equals " + pretty(b), pretty(goal),
                    v.str()};
  }

  if (a->kind != b->kind) {
    bool sess = session_ctor(a->kind) && session_ctor(b->kind);
    return Mismatch{sess ? "protocol-head-mismatch" : "type-mismatch",
                    "expected " + (sess ? head_name(*b) : pretty(b)) + ", found " +
                        (sess ? head_name(*a) : pretty(a)),
                    "", ""};
  }
  auto mismatch = [&] {
    return Mismatch{"type-mismatch", "expected " + pretty(b) + ", found " + pretty(a), "", ""};
  };
  switch (a->kind) {
    case SKind::Var:
    case SKind::Proto:
    case SKind::Unit:
      return mismatch();
    case SKind::Base:
      if (a->name != b->name || a->kids.size() != b->kids.size()) return mismatch();
      break;
    case SKind::Fun:
      if (a->value != b->value) return mismatch();
      break;
    case SKind::Chan: {
      auto ua = chan_universe(*a), ub = chan_universe(*b);
      if (ua && ub && *ua != *ub) return mismatch();
      auto u = ua ? ua : ub;
      if (auto m = equal(a->kids[0], b->kids[0], u)) return m;
      return equal(a->kids[1], b->kids[1], u);
    }
    default:
      break;
  }
  if (binder(a->kind)) {
    if (a->sort && b->sort && !sort_equal(*a->sort, *b->sort)) return mismatch();
    SortPtr s = a->sort ? a->sort : b->sort;
    std::string n = a->name;
    if (static_in_scope(n) || free_vars(*b).count(n)) {
      std::set<std::string> avoid = free_vars(*a);
      for (const auto& f : free_vars(*b)) avoid.insert(f);
      SortCtx all = all_sorts();
      for (const auto& [x, _] : all.bindings()) avoid.insert(x);
      n = fresh_name(a->name, avoid);
    }
    sorts.push(n, s);
    auto r = equal(subst(a->kids[0], a->name, st::var(n)), subst(b->kids[0], b->name, st::var(n)), universe);
    sorts.pop();
    return r;
  }
  if (a->kids.size() != b->kids.size()) return mismatch();
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (auto m = equal(a->kids[i], b->kids[i], universe)) return m;
  return std::nullopt;
}

std::optional<Mismatch> Checker::subtype(const StaticPtr& actual, const StaticPtr& expected) {
  StaticPtr a = whnf_type(actual);
  StaticPtr e = whnf_type(expected);
  if (a->kind == SKind::Base && e->kind == SKind::Base && a->name == e->name && e->kids.empty())
    return std::nullopt;
  if (a->kind == e->kind) {
    switch (a->kind) {
      case SKind::Fun:
        if (a->value == 1 && e->value == 0)
          return Mismatch{"type-mismatch", "expected a nonlinear function, found " + pretty(a), "", ""};
        if (auto m = subtype(e->kids[0], a->kids[0])) return m;
        return subtype(a->kids[1], e->kids[1]);
      case SKind::Pair:
      case SKind::Sum:
        if (auto m = subtype(a->kids[0], e->kids[0])) return m;
        return subtype(a->kids[1], e->kids[1]);
      case SKind::Guard:
      case SKind::Assert:
        if (auto m = equal(a->kids[0], e->kids[0], std::nullopt)) return m;
        return subtype(a->kids[1], e->kids[1]);
      case SKind::Forall:
      case SKind::Exists: {
        if (a->sort && e->sort && !sort_equal(*a->sort, *e->sort)) break;
        std::set<std::string> avoid = free_vars(*a);
        for (const auto& f : free_vars(*e)) avoid.insert(f);
        SortCtx all = all_sorts();
      for (const auto& [x, _] : all.bindings()) avoid.insert(x);
        std::string n = fresh_name(a->name, avoid);
        sorts.push(n, a->sort);
        auto r = subtype(subst(a->kids[0], a->name, st::var(n)), subst(e->kids[0], e->name, st::var(n)));
        sorts.pop();
        return r;
      }
      default:
        break;
    }
  }
  return equal(a, e, std::nullopt);
}

void Checker::require_subtype(const StaticPtr& actual, const StaticPtr& expected, Span span) {
  if (auto m = subtype(actual, expected)) fail(*m, span);
}

// ------------------------------------------------------------- matching

std::optional<Mismatch> Checker::match(const StaticPtr& p, const StaticPtr& actual, Match& m) {
  auto mismatch = [&](const StaticPtr& a, const std::string& what) {
    return Mismatch{"type-mismatch", "expected " + what + ", found " + pretty(a), "", ""};
  };
  switch (p->kind) {
    case SKind::Var: {
      auto it = m.metas.find(p->name);
      if (it != m.metas.end() && !m.env.count(p->name)) {
        m.env[p->name] = normalize(actual, m.universe);
        return std::nullopt;
      }
      m.deferred.emplace_back(p, actual);
      return std::nullopt;
    }
    case SKind::Chan: {
      StaticPtr a = whnf_type(actual);
      if (a->kind != SKind::Chan) return mismatch(a, "a channel");
      auto cu = chan_universe(*a);
      if (!m.universe && cu) m.universe = cu;
      if (auto r = match(p->kids[0], a->kids[0], m)) return r;
      const StaticPtr& ps = p->kids[1];
      if (!session_ctor(ps->kind)) return match(ps, a->kids[1], m);
      StaticPtr as = resolve_ite(*this, a->kids[1], cu);
      if (as->kind != ps->kind)
        return Mismatch{"protocol-head-mismatch",
                        "operation expects " + head_name(*ps) + " but the protocol is at " + pretty(as), "", ""};
      for (std::size_t i = 0; i < ps->kids.size(); ++i)
        if (auto r = match(ps->kids[i], as->kids[i], m)) return r;
      return std::nullopt;
    }
    case SKind::Fun:
    case SKind::Pair:
    case SKind::Sum: {
      StaticPtr a = whnf_type(actual);
      if (a->kind != p->kind) return mismatch(a, pretty(p));
      for (std::size_t i = 0; i < p->kids.size(); ++i)
        if (auto r = match(p->kids[i], a->kids[i], m)) return r;
      return std::nullopt;
    }
    case SKind::Unit: {
      StaticPtr a = whnf_type(actual);
      if (a->kind != SKind::Unit) return mismatch(a, "unit");
      return std::nullopt;
    }
    case SKind::Base: {
      StaticPtr a = whnf_type(actual);
      if (a->kind != SKind::Base || a->name != p->name) return mismatch(a, p->name);
      if (a->kids.empty() && !p->kids.empty()) {
        for (const auto& k : p->kids) {
          if (k->kind == SKind::Var && m.metas.count(k->name) && !m.env.count(k->name))
            m.env[k->name] = st::var(fresh_static(k->name, m.metas[k->name]));
        }
        return std::nullopt;
      }
      if (a->kids.size() != p->kids.size()) return mismatch(a, pretty(p));
      for (std::size_t i = 0; i < p->kids.size(); ++i)
        if (auto r = match(p->kids[i], a->kids[i], m)) return r;
      return std::nullopt;
    }
    case SKind::End:
    case SKind::BMsg:
    case SKind::PMsg:
    case SKind::Quan:
    case SKind::Branch:
    case SKind::Fix: {
      StaticPtr a = resolve_ite(*this, actual, m.universe);
      if (a->kind != p->kind)
        return Mismatch{"protocol-head-mismatch", "expected " + head_name(*p) + ", found " + pretty(a), "", ""};
      for (std::size_t i = 0; i < p->kids.size(); ++i)
        if (auto r = match(p->kids[i], a->kids[i], m)) return r;
      return std::nullopt;
    }
    default:
      m.deferred.emplace_back(p, actual);
      return std::nullopt;
  }
}

}  // namespace detail

// ------------------------------------------------------------- public helpers

std::optional<std::vector<int>> session_universe(const StaticPtr& session, const Program& program) {
  const Static* h = session.get();
  while (h->kind == SKind::App) h = h->kids[0].get();
  if (h->kind != SKind::Proto) return std::nullopt;
  if (const ProtocolDecl* d = program.find_protocol(h->name)) return d->universe;
  if (!h->roles.empty()) return h->roles;
  return std::nullopt;
}

bool is_linear_type(const StaticPtr& t, const SortCtx* ctx) {
  switch (t->kind) {
    case SKind::Chan:
      return true;
    case SKind::Fun:
      return t->value == 1;
    case SKind::Pair:
    case SKind::Sum:
      return is_linear_type(t->kids[0], ctx) || is_linear_type(t->kids[1], ctx);
    case SKind::Guard:
    case SKind::Assert:
      return is_linear_type(t->kids[1], ctx);
    case SKind::Forall:
    case SKind::Exists:
      return is_linear_type(t->kids[0], ctx);
    case SKind::Var: {
      if (!ctx) return true;
      SortPtr s = ctx->lookup(t->name);
      return !(s && s->kind == Sort::Kind::Type);
    }
    case SKind::Op:
      if (t->op == SOp::Ite) return is_linear_type(t->kids[1], ctx) || is_linear_type(t->kids[2], ctx);
      return false;
    default:
      return false;
  }
}

bool type_equal(const Program& program, const StaticPtr& a, const StaticPtr& b, const Assumptions& props,
                const CheckOptions& opts) {
  detail::Checker c(program, opts);
  c.props = props.props;
  for (const auto& [n, _] : props.set_vars) c.globals.emplace_back(n, sort_set());
  for (const auto& n : props.int_vars) c.globals.emplace_back(n, sort_int());
  for (const auto& n : props.bool_vars) c.globals.emplace_back(n, sort_bool());
  try {
    return !c.equal(c.whnf_type(a), c.whnf_type(b), props.universe).has_value();
  } catch (const StaticError&) {
    return false;
  }
}

}  // namespace mps
