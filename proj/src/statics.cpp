#include "mps/statics.hpp"

#include <algorithm>

#include "mps/pretty.hpp"

namespace mps {

SortPtr SortCtx::lookup(const std::string& name) const {
  for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it)
    if (it->first == name) return it->second;
  return nullptr;
}

// ------------------------------------------------------------ role sets

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
std::vector<int> set_inter(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

RoleSetValue RoleSetValue::make(std::vector<int> universe, std::vector<int> members) {
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (!std::includes(universe.begin(), universe.end(), members.begin(), members.end()))
    throw StaticError("role-out-of-universe", {}, "role set not within its universe");
  return {std::move(universe), std::move(members)};
}
RoleSetValue RoleSetValue::complement() const { return {universe, set_minus(universe, members)}; }
RoleSetValue RoleSetValue::unite(const RoleSetValue& o) const {
  return {universe, set_union(members, o.members)};
}
RoleSetValue RoleSetValue::intersect(const RoleSetValue& o) const {
  return {universe, set_inter(members, o.members)};
}
RoleSetValue RoleSetValue::minus(const RoleSetValue& o) const {
  return {universe, set_minus(members, o.members)};
}
std::optional<RoleSetValue> RoleSetValue::disjoint_union(const RoleSetValue& o) const {
  if (!set_inter(members, o.members).empty()) return std::nullopt;
  return unite(o);
}
bool RoleSetValue::contains(int r) const {
  return std::binary_search(members.begin(), members.end(), r);
}

// ------------------------------------------------------------ sorting

namespace {

bool typeish(const Sort& s) { return s.kind == Sort::Kind::Type || s.kind == Sort::Kind::VType; }

[[noreturn]] void mismatch(const Static& s, const std::string& msg) {
  throw StaticError("sort-mismatch", s.span, msg + " in " + pretty(s));
}

class Sorter {
 public:
  Sorter(const SortCtx& ctx, const Program* program) : ctx_(ctx), program_(program) {}

  SortPtr sort(const Static& s) {
    switch (s.kind) {
      case SKind::Var: {
        if (SortPtr so = ctx_.lookup(s.name)) return so;
        throw StaticError("unbound", s.span, "unbound static variable '" + s.name + "'");
      }
      case SKind::Int: return sort_int();
      case SKind::Bool: return sort_bool();
      case SKind::Set:
      case SKind::Full: return sort_set();
      case SKind::Op: return op(s);
      case SKind::Lam: {
        ctx_.push(s.name, s.sort);
        SortPtr body = sort(*s.kids[0]);
        ctx_.pop();
        return Sort::arrow(s.sort, body);
      }
      case SKind::App: {
        SortPtr f = sort(*s.kids[0]);
        if (f->kind != Sort::Kind::Arrow) mismatch(s, "applying a non-function");
        want(*s.kids[1], *f->dom);
        return f->cod;
      }
      case SKind::Proto: {
        const ProtocolDecl* d = program_ ? program_->find_protocol(s.name) : nullptr;
        if (!d) throw StaticError("unbound", s.span, "unknown protocol '" + s.name + "'");
        SortPtr r = sort_stype();
        for (auto it = d->params.rbegin(); it != d->params.rend(); ++it) r = Sort::arrow(it->second, r);
        return r;
      }
      case SKind::End:
        want(*s.kids[0], *sort_int());
        return sort_stype();
      case SKind::BMsg:
        want(*s.kids[0], *sort_int());
        want(*s.kids[1], *sort_type());
        want(*s.kids[2], *sort_stype());
        return sort_stype();
      case SKind::PMsg:
        want(*s.kids[0], *sort_int());
        want(*s.kids[1], *sort_int());
        want(*s.kids[2], *sort_vtype());
        want(*s.kids[3], *sort_stype());
        return sort_stype();
      case SKind::Quan: {
        want(*s.kids[0], *sort_int());
        SortPtr b = sort(*s.kids[1]);
        if (b->kind != Sort::Kind::Arrow || b->cod->kind != Sort::Kind::SType ||
            b->dom->kind == Sort::Kind::Arrow)
          mismatch(s, "quan binder must have sort sigma -> stype");
        return sort_stype();
      }
      case SKind::Branch:
        want(*s.kids[0], *sort_int());
        want(*s.kids[1], *sort_stype());
        want(*s.kids[2], *sort_stype());
        return sort_stype();
      case SKind::Fix:
        want(*s.kids[0], *Sort::arrow(sort_stype(), sort_stype()));
        return sort_stype();
      case SKind::Unit: return sort_type();
      case SKind::Base: {
        if (s.name == "int" || s.name == "bool") {
          if (s.kids.size() > 1) throw StaticError("arity", s.span, "too many indices");
          if (!s.kids.empty()) want(*s.kids[0], s.name == "int" ? *sort_int() : *sort_bool());
        } else if (!s.kids.empty()) {
          throw StaticError("arity", s.span, "'" + s.name + "' takes no indices");
        }
        return sort_type();
      }
      case SKind::Chan:
        want(*s.kids[0], *sort_set());
        want(*s.kids[1], *sort_stype());
        return sort_vtype();
      case SKind::Pair:
      case SKind::Sum: {
        SortPtr a = type(*s.kids[0]);
        SortPtr b = type(*s.kids[1]);
        return a->kind == Sort::Kind::VType || b->kind == Sort::Kind::VType ? sort_vtype() : sort_type();
      }
      case SKind::Fun:
        type(*s.kids[0]);
        type(*s.kids[1]);
        return s.value ? sort_vtype() : sort_type();
      case SKind::Guard:
      case SKind::Assert:
        want(*s.kids[0], *sort_bool());
        return type(*s.kids[1]);
      case SKind::Forall:
      case SKind::Exists: {
        ctx_.push(s.name, s.sort);
        SortPtr body = type(*s.kids[0]);
        ctx_.pop();
        return body;
      }
    }
    mismatch(s, "unknown static");
  }

 private:
  SortPtr type(const Static& s) {
    SortPtr so = sort(s);
    if (!typeish(*so)) mismatch(s, "expected a type, found sort " + to_string(*so));
    return so;
  }

  void want(const Static& s, const Sort& w) {
    SortPtr so = sort(s);
    if (!subsort(*so, w))
      mismatch(s, "expected sort " + to_string(w) + ", found " + to_string(*so));
  }

  SortPtr op(const Static& s) {
    if (static_cast<int>(s.kids.size()) != op_arity(s.op))
      throw StaticError("arity", s.span, std::string("operator ") + op_name(s.op) + " arity");
    auto all = [&](const SortPtr& so) {
      for (const auto& k : s.kids) want(*k, *so);
    };
    switch (s.op) {
      case SOp::Union:
      case SOp::DUnion:
      case SOp::Inter:
      case SOp::Minus:
      case SOp::Compl: all(sort_set()); return sort_set();
      case SOp::In:
      case SOp::NotIn:
        want(*s.kids[0], *sort_int());
        want(*s.kids[1], *sort_set());
        return sort_bool();
      case SOp::Subset: all(sort_set()); return sort_bool();
      case SOp::Eq:
      case SOp::Neq: {
        SortPtr a = sort(*s.kids[0]);
        if (a->kind == Sort::Kind::Arrow) mismatch(s, "equality on functions");
        want(*s.kids[1], *a);
        return sort_bool();
      }
      case SOp::Lt:
      case SOp::Le:
      case SOp::Gt:
      case SOp::Ge: all(sort_int()); return sort_bool();
      case SOp::Add:
      case SOp::Sub:
      case SOp::Mul:
      case SOp::Div:
      case SOp::Neg: all(sort_int()); return sort_int();
      case SOp::And:
      case SOp::Or:
      case SOp::Not:
      case SOp::Imp: all(sort_bool()); return sort_bool();
      case SOp::Ite: {
        want(*s.kids[0], *sort_bool());
        SortPtr a = sort(*s.kids[1]);
        want(*s.kids[2], *a);
        return a;
      }
    }
    mismatch(s, "unknown operator");
  }

  SortCtx ctx_;
  const Program* program_;
};

}  // namespace

bool subsort(const Sort& have, const Sort& want) {
  if (have.kind == Sort::Kind::Type && want.kind == Sort::Kind::VType) return true;
  return sort_equal(have, want);
}

SortPtr sort_of(const SortCtx& ctx, const Static& s, const Program* program) {
  return Sorter(ctx, program).sort(s);
}

// ------------------------------------------------------------ variables

namespace {

bool binds(const Static& s) {
  return s.kind == SKind::Lam || s.kind == SKind::Forall || s.kind == SKind::Exists;
}

void collect_free(const Static& s, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (s.kind == SKind::Var) {
    if (std::find(bound.begin(), bound.end(), s.name) == bound.end()) out.insert(s.name);
    return;
  }
  if (binds(s)) bound.push_back(s.name);
  for (const auto& k : s.kids) collect_free(*k, bound, out);
  if (binds(s)) bound.pop_back();
}

void collect_all(const Static& s, std::set<std::string>& out) {
  if (s.kind == SKind::Var || binds(s)) out.insert(s.name);
  for (const auto& k : s.kids) collect_all(*k, out);
}

StaticPtr subst_map(const StaticPtr& s, const std::map<std::string, StaticPtr>& env,
                    const std::set<std::string>& env_fv) {
  if (env.empty()) return s;
  if (s->kind == SKind::Var) {
    auto it = env.find(s->name);
    return it == env.end() ? s : it->second;
  }
  if (binds(*s)) {
    auto inner = env;
    inner.erase(s->name);
    if (inner.empty()) return s;
    StaticPtr body = s->kids[0];
    std::string name = s->name;
    if (env_fv.count(name)) {
      std::set<std::string> avoid = env_fv;
      collect_all(*body, avoid);
      name = fresh_name(name, avoid);
      body = subst_map(body, {{s->name, st::var(name)}}, {name});
    }
    auto n = std::make_shared<Static>(*s);
    n->name = name;
    n->kids = {subst_map(body, inner, env_fv)};
    return n;
  }
  std::vector<StaticPtr> kids;
  kids.reserve(s->kids.size());
  for (const auto& k : s->kids) kids.push_back(subst_map(k, env, env_fv));
  return st::with_kids(s, std::move(kids));
}

}  // namespace

std::set<std::string> free_vars(const Static& s) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(s, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base.substr(0, base.find('\''));
  for (int i = 1;; ++i) {
    std::string c = stem + "'" + std::to_string(i);
    if (!avoid.count(c)) return c;
  }
}

StaticPtr subst(const StaticPtr& s, const std::map<std::string, StaticPtr>& env) {
  std::set<std::string> fv;
  for (const auto& [k, v] : env) {
    auto f = free_vars(*v);
    fv.insert(f.begin(), f.end());
  }
  return subst_map(s, env, fv);
}

StaticPtr subst(const StaticPtr& s, const std::string& name, const StaticPtr& value) {
  return subst(s, std::map<std::string, StaticPtr>{{name, value}});
}

bool is_ground(const Static& s) { return free_vars(s).empty(); }

// ------------------------------------------------------------ normalization

namespace {

using Universe = std::optional<std::vector<int>>;

std::optional<std::vector<int>> proto_universe(const Static& session) {
  const Static* h = &session;
  while (h->kind == SKind::App) h = h->kids[0].get();
  if (h->kind == SKind::Proto && !h->roles.empty()) return h->roles;
  return std::nullopt;
}

StaticPtr norm(const StaticPtr& s, const Universe& u);

StaticPtr norm_op(const StaticPtr& s, std::vector<StaticPtr> k, const Universe& u) {
  auto is = [&](std::size_t i, SKind kind) { return k[i]->kind == kind; };
  auto all = [&](SKind kind) {
    return std::all_of(k.begin(), k.end(), [&](const StaticPtr& x) { return x->kind == kind; });
  };
  switch (s->op) {
    case SOp::Union:
      if (all(SKind::Set)) return st::set(set_union(k[0]->roles, k[1]->roles));
      break;
    case SOp::DUnion:
      if (all(SKind::Set) && set_inter(k[0]->roles, k[1]->roles).empty())
        return st::set(set_union(k[0]->roles, k[1]->roles));
      break;
    case SOp::Inter:
      if (all(SKind::Set)) return st::set(set_inter(k[0]->roles, k[1]->roles));
      break;
    case SOp::Minus:
      if (all(SKind::Set)) return st::set(set_minus(k[0]->roles, k[1]->roles));
      break;
    case SOp::Compl:
      if (all(SKind::Set) && u) return st::set(set_minus(*u, k[0]->roles));
      break;
    case SOp::In:
    case SOp::NotIn:
      if (is(0, SKind::Int) && is(1, SKind::Set)) {
        bool in = std::binary_search(k[1]->roles.begin(), k[1]->roles.end(),
                                     static_cast<int>(k[0]->value));
        return st::boolean(s->op == SOp::In ? in : !in);
      }
      break;
    case SOp::Subset:
      if (all(SKind::Set))
        return st::boolean(std::includes(k[1]->roles.begin(), k[1]->roles.end(),
                                         k[0]->roles.begin(), k[0]->roles.end()));
      break;
    case SOp::Eq:
    case SOp::Neq: {
      std::optional<bool> eq;
      if (all(SKind::Int) || all(SKind::Bool)) eq = k[0]->value == k[1]->value;
      if (all(SKind::Set)) eq = k[0]->roles == k[1]->roles;
      if (eq) return st::boolean(s->op == SOp::Eq ? *eq : !*eq);
      break;
    }
    case SOp::Lt:
    case SOp::Le:
    case SOp::Gt:
    case SOp::Ge:
      if (all(SKind::Int)) {
        std::int64_t a = k[0]->value, b = k[1]->value;
        bool r = s->op == SOp::Lt ? a < b : s->op == SOp::Le ? a <= b : s->op == SOp::Gt ? a > b : a >= b;
        return st::boolean(r);
      }
      break;
    case SOp::Add:
    case SOp::Sub:
    case SOp::Mul:
    case SOp::Div:
      if (all(SKind::Int)) {
        std::int64_t a = k[0]->value, b = k[1]->value;
        if (s->op == SOp::Add) return st::integer(a + b);
        if (s->op == SOp::Sub) return st::integer(a - b);
        if (s->op == SOp::Mul) return st::integer(a * b);
        if (b == 0) throw StaticError("div-by-zero", s->span, "static division by zero");
        return st::integer(a / b);
      }
      if (s->op == SOp::Div && is(1, SKind::Int) && k[1]->value == 0)
        throw StaticError("div-by-zero", s->span, "static division by zero");
      break;
    case SOp::Neg:
      if (all(SKind::Int)) return st::integer(-k[0]->value);
      break;
    case SOp::Not:
      if (all(SKind::Bool)) return st::boolean(!k[0]->value);
      break;
    case SOp::And:
      if (is(0, SKind::Bool)) return k[0]->value ? k[1] : k[0];
      if (is(1, SKind::Bool)) return k[1]->value ? k[0] : k[1];
      break;
    case SOp::Or:
      if (is(0, SKind::Bool)) return k[0]->value ? k[0] : k[1];
      if (is(1, SKind::Bool)) return k[1]->value ? k[1] : k[0];
      break;
    case SOp::Imp:
      if (is(0, SKind::Bool)) return k[0]->value ? k[1] : st::boolean(true);
      if (is(1, SKind::Bool) && k[1]->value) return k[1];
      break;
    case SOp::Ite:
      if (is(0, SKind::Bool)) return k[0]->value ? k[1] : k[2];
      break;
  }
  return st::with_kids(s, std::move(k));
}

StaticPtr norm(const StaticPtr& s, const Universe& u) {
  switch (s->kind) {
    case SKind::Full:
      return u ? st::set(*u) : s;
    case SKind::Op: {
      std::vector<StaticPtr> k;
      for (const auto& x : s->kids) k.push_back(norm(x, u));
      return norm_op(s, std::move(k), u);
    }
    case SKind::App: {
      StaticPtr f = norm(s->kids[0], u);
      StaticPtr a = norm(s->kids[1], u);
      if (f->kind == SKind::Lam) return norm(subst(f->kids[0], f->name, a), u);
      return st::with_kids(s, {f, a});
    }
    case SKind::Chan: {
      StaticPtr session = norm(s->kids[1], std::nullopt);
      Universe cu = chan_universe(*s);
      if (!cu) cu = proto_universe(*session);
      StaticPtr roles = norm(s->kids[0], cu);
      if (cu) session = norm(s->kids[1], cu);
      return st::chan(roles, session, cu);
    }
    default: {
      if (s->kids.empty()) return s;
      std::vector<StaticPtr> k;
      for (const auto& x : s->kids) k.push_back(norm(x, u));
      return st::with_kids(s, std::move(k));
    }
  }
}

}  // namespace

StaticPtr normalize_static(const std::map<std::string, StaticPtr>& env, const StaticPtr& s,
                           const std::optional<std::vector<int>>& universe) {
  return norm(env.empty() ? s : subst(s, env), universe);
}

StaticPtr normalize(const StaticPtr& s, const std::optional<std::vector<int>>& universe) {
  return norm(s, universe);
}

StaticPtr whnf(const StaticPtr& s, const Program& program,
               const std::optional<std::vector<int>>& universe) {
  StaticPtr cur = norm(s, universe);
  for (int guard = 0; guard < 10000; ++guard) {
    std::vector<StaticPtr> args;
    const Static* h = cur.get();
    while (h->kind == SKind::App) {
      args.push_back(h->kids[1]);
      h = h->kids[0].get();
    }
    if (h->kind != SKind::Proto) return cur;
    const ProtocolDecl* d = program.find_protocol(h->name);
    if (!d) throw StaticError("unbound", h->span, "unknown protocol '" + h->name + "'");
    std::reverse(args.begin(), args.end());
    if (args.size() != d->params.size()) return cur;
    std::map<std::string, StaticPtr> env;
    for (std::size_t i = 0; i < args.size(); ++i) env[d->params[i].first] = args[i];
    cur = norm(subst(d->def, env), d->universe);
  }
  throw StaticError("non-contractive-fix", s->span, "protocol unfolding does not terminate");
}

// ------------------------------------------------------------ alpha equality

namespace {

struct AlphaEq {
  std::vector<std::string> left, right;

  static int depth(const std::vector<std::string>& b, const std::string& n) {
    for (int i = static_cast<int>(b.size()) - 1; i >= 0; --i)
      if (b[i] == n) return static_cast<int>(b.size()) - 1 - i;
    return -1;
  }

  bool eq(const Static& a, const Static& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case SKind::Var: {
        int da = depth(left, a.name), db = depth(right, b.name);
        if (da != db) return false;
        return da >= 0 || a.name == b.name;
      }
      case SKind::Int:
      case SKind::Bool: return a.value == b.value;
      case SKind::Set: return a.roles == b.roles;
      case SKind::Proto:
      case SKind::Base:
        if (a.name != b.name) return false;
        break;
      case SKind::Op:
        if (a.op != b.op) return false;
        break;
      case SKind::Fun:
        if (a.value != b.value) return false;
        break;
      case SKind::Chan:
        if (a.value && b.value && a.roles != b.roles) return false;
        break;
      case SKind::Lam:
      case SKind::Forall:
      case SKind::Exists: {
        if (!sort_equal(*a.sort, *b.sort)) return false;
        left.push_back(a.name);
        right.push_back(b.name);
        bool r = eq(*a.kids[0], *b.kids[0]);
        left.pop_back();
        right.pop_back();
        return r;
      }
      default: break;
    }
    if (a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
      if (!eq(*a.kids[i], *b.kids[i])) return false;
    return true;
  }
};

}  // namespace

bool alpha_equal(const Static& a, const Static& b) { return AlphaEq{}.eq(a, b); }

bool alpha_equal(const StaticPtr& a, const StaticPtr& b) {
  if (!a || !b) return a == b;
  return a == b || alpha_equal(*a, *b);
}

// ------------------------------------------------------------ well-formedness

namespace {

class WfChecker {
 public:
  WfChecker(const std::vector<int>& universe, const Program& program)
      : universe_(universe), program_(program) {}

  void session(const StaticPtr& s) {
    switch (s->kind) {
      case SKind::End: role(s->kids[0]); return;
      case SKind::BMsg:
        role(s->kids[0]);
        session(s->kids[2]);
        return;
      case SKind::PMsg:
        role(s->kids[0]);
        role(s->kids[1]);
        if (alpha_equal(s->kids[0], s->kids[1]))
          throw StaticError("self-loop", s->span, "self-looping message in " + pretty(*s));
        session(s->kids[3]);
        return;
      case SKind::Quan:
        role(s->kids[0]);
        if (s->kids[1]->kind == SKind::Lam) session(s->kids[1]->kids[0]);
        return;
      case SKind::Branch:
        role(s->kids[0]);
        session(s->kids[1]);
        session(s->kids[2]);
        return;
      case SKind::Fix: {
        const StaticPtr& b = s->kids[0];
        if (b->kind == SKind::Lam) {
          contractive(b->kids[0], {b->name});
          session(b->kids[0]);
        }
        return;
      }
      case SKind::Op:
        if (s->op == SOp::Ite) {
          session(s->kids[1]);
          session(s->kids[2]);
        }
        return;
      default: return;
    }
  }

 private:
  void role(const StaticPtr& r) {
    if (r->kind == SKind::Int &&
        !std::binary_search(universe_.begin(), universe_.end(), static_cast<int>(r->value)))
      throw StaticError("role-out-of-universe", r->span,
                        "role " + std::to_string(r->value) + " is outside the universe " +
                            pretty_roles(universe_));
  }

  void contractive(const StaticPtr& body, std::vector<std::string> vars) {
    StaticPtr h = whnf(body, program_, universe_);
    if (h->kind == SKind::Var && std::count(vars.begin(), vars.end(), h->name))
      throw StaticError("non-contractive-fix", body->span,
                        "recursion variable '" + h->name + "' is not guarded");
    if (h->kind == SKind::Fix && h->kids[0]->kind == SKind::Lam) {
      vars.push_back(h->kids[0]->name);
      contractive(h->kids[0]->kids[0], vars);
    }
    if (h->kind == SKind::Op && h->op == SOp::Ite) {
      contractive(h->kids[1], vars);
      contractive(h->kids[2], vars);
    }
  }

  const std::vector<int>& universe_;
  const Program& program_;
};

}  // namespace

void wellformed_stype(const SortCtx& ctx, const std::vector<int>& universe, const StaticPtr& s,
                      const Program& program) {
  SortPtr so = sort_of(ctx, *s, &program);
  if (so->kind != Sort::Kind::SType)
    throw StaticError("sort-mismatch", s->span, "expected a session type, found sort " + to_string(*so));
  WfChecker(universe, program).session(normalize(s, universe));
}

namespace {

// Whether a reference to protocol `name` occurs before any session constructor.
bool unguarded_ref(const Static& s, const std::string& name) {
  switch (s.kind) {
    case SKind::Proto: return s.name == name;
    case SKind::App: return unguarded_ref(*s.kids[0], name);
    case SKind::Lam: return unguarded_ref(*s.kids[0], name);
    case SKind::Fix: return unguarded_ref(*s.kids[0], name);
    case SKind::Op:
      return s.op == SOp::Ite && (unguarded_ref(*s.kids[1], name) || unguarded_ref(*s.kids[2], name));
    default: return false;
  }
}

}  // namespace

void check_protocols(const Program& program) {
  for (const auto& d : program.protocols) {
    for (const auto& [alias, r] : d.roles)
      if (!std::binary_search(d.universe.begin(), d.universe.end(), r))
        throw StaticError("role-out-of-universe", d.span,
                          "role " + alias + " of protocol " + d.name + " is outside its universe");
    SortCtx ctx;
    for (const auto& [n, so] : d.params) ctx.push(n, so);
    wellformed_stype(ctx, d.universe, d.def, program);
    if (unguarded_ref(*d.def, d.name))
      throw StaticError("non-contractive-fix", d.span, "protocol " + d.name + " refers to itself unguarded");
  }
}

}  // namespace mps
