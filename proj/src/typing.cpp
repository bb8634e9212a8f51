#include <algorithm>

#include "checker.hpp"
#include "mps/parser.hpp"
#include "mps/pretty.hpp"
#include "mps/terms.hpp"

namespace mps {

namespace detail {

namespace {

bool contains_chan(const Static& s) {
  if (s.kind == SKind::Chan) return true;
  return std::any_of(s.kids.begin(), s.kids.end(), [](const StaticPtr& k) { return contains_chan(*k); });
}

bool is_let(const Term& e) {
  return e.kind == TKind::App && e.kids[0]->kind == TKind::Lam && e.kids[0]->statics.empty();
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

StaticPtr with_sort(const StaticPtr& s, SortPtr sort) {
  auto n = std::make_shared<Static>(*s);
  n->sort = std::move(sort);
  return n;
}

}  // namespace

void Checker::add_resources(const std::vector<Endpoint>& eps, Span span) {
  for (const auto& ep : eps) {
    auto it = sig ? sig->find(ep.channel) : Signature::const_iterator{};
    if (!sig || it == sig->end())
      fail("DanglingEndpoint", span, "endpoint " + pretty(ep) + " refers to no live channel");
    for (const auto& r : resources)
      if (r.ep == ep) fail("linear-var-reused", span, "endpoint " + pretty(ep) + " occurs twice");
    StaticPtr type = normalize(st::chan(st::set(ep.roles), it->second.session, it->second.universe));
    resources.push_back(Resource{ep, type, false});
  }
}

void Checker::require_resources_consumed(Span span) const {
  for (const auto& r : resources)
    if (!r.consumed) fail("linear-var-unused", span, "endpoint " + pretty(r.ep) + " is never used");
}

StaticPtr Checker::annotation(const StaticPtr& t, Span span) {
  SortPtr s;
  try {
    s = sort_of(all_sorts(), *t, &program);
  } catch (const StaticError& e) {
    fail(e.code, e.span.line ? e.span : span, e.what());
  }
  if (!subsort(*s, *sort_vtype()))
    fail("sort-mismatch", span, "expected a type, found a static term of sort " + to_string(*s));
  try {
    return normalize(t);
  } catch (const StaticError& e) {
    fail(e.code, span, e.what());
  }
}

Typed Checker::bind_and_run(const std::string& name, const StaticPtr& type, const TermPtr& body,
                            const StaticPtr& expected, Span span) {
  bool lin = linear(type);
  vars.push_back(Binding{name, type, lin, false});
  Typed r = run(body, expected);
  if (lin && !vars.back().consumed) fail("linear-var-unused", span, "linear variable '" + name + "' is never used");
  vars.pop_back();
  return r;
}

Typed Checker::synth(const TermPtr& e) { return run(e, nullptr); }

TermPtr Checker::check(const TermPtr& e, const StaticPtr& expected) { return run(e, expected).term; }

Typed Checker::synth_lambda(const TermPtr& e) {
  bool annotated = !e->statics.empty() && e->statics[0];
  StaticPtr param = annotated ? annotation(e->statics[0], e->span) : st::var(fresh_static("t", sort_vtype()));
  State before = state();
  std::size_t nv = vars.size();
  Typed body = bind_and_run(e->name, param, e->kid(0), nullptr, e->span);
  bool captures = !newly_consumed(before, state(), nv).empty();
  TermPtr t = dy::with_statics(dy::with_kids(e, {body.term}), {param});
  return {t, st::fun(param, body.type, !annotated || captures)};
}

TermPtr Checker::check_lambda(const TermPtr& e, const StaticPtr& expected) {
  StaticPtr x = whnf_type(expected);
  if (x->kind != SKind::Fun) {
    Typed s = synth_lambda(e);
    require_subtype(s.type, expected, e->span);
    return s.term;
  }
  StaticPtr param = x->kids[0];
  if (!e->statics.empty() && e->statics[0]) {
    StaticPtr ann = annotation(e->statics[0], e->span);
    require_subtype(param, ann, e->span);
  }
  State before = state();
  std::size_t nv = vars.size();
  Typed body = bind_and_run(e->name, param, e->kid(0), x->kids[1], e->span);
  auto captured = newly_consumed(before, state(), nv);
  if (x->value == 0 && !captured.empty())
    fail("nonlinear-capture-of-linear", e->span,
         "a nonlinear function may not capture linear " + join(captured));
  return dy::with_statics(dy::with_kids(e, {body.term}), {param});
}

Typed Checker::synth_let(const TermPtr& e, const StaticPtr& expected) {
  const TermPtr& lam = e->kid(0);
  Typed bound = synth(e->kid(1));
  Typed body = bind_and_run(lam->name, bound.type, lam->kid(0), expected, lam->span);
  return {dy::with_kids(e, {dy::with_kids(lam, {body.term}), bound.term}), body.type};
}

Typed Checker::branches(const TermPtr& e, const StaticPtr& expected) {
  Typed scrut = synth(e->kid(0));
  StaticPtr st_ = whnf_type(scrut.type);
  State before = state();
  Typed left, right;
  if (e->kind == TKind::If) {
    if (st_->kind != SKind::Base || st_->name != "bool")
      fail("type-mismatch", e->kid(0)->span, "condition has type " + pretty(st_) + ", expected bool");
    StaticPtr cond = st_->kids.empty() ? nullptr : st_->kids[0];
    // An arm whose assumptions are contradictory is unreachable; it is left
    // unchecked and takes the linear usage of the other arm.
    auto unreachable = [&](const StaticPtr& p) {
      if (!p) return false;
      props.push_back(p);
      bool dead = prove(st::boolean(false)).valid();
      props.pop_back();
      return dead;
    };
    StaticPtr neg = cond ? st::op(SOp::Not, {cond}) : nullptr;
    if (unreachable(cond) || unreachable(neg)) {
      bool left_dead = unreachable(cond);
      const TermPtr& live = e->kid(left_dead ? 2 : 1);
      props.push_back(left_dead ? neg : cond);
      Typed t = run(live, expected);
      props.pop_back();
      auto kids = left_dead ? std::vector<TermPtr>{scrut.term, e->kid(1), t.term}
                            : std::vector<TermPtr>{scrut.term, t.term, e->kid(2)};
      return {dy::with_kids(e, std::move(kids)), expected ? expected : t.type};
    }
    if (cond) props.push_back(cond);
    left = run(e->kid(1), expected);
    if (cond) props.pop_back();
    State after = state();
    restore(before);
    if (cond) props.push_back(neg);
    right = run(e->kid(2), expected ? expected : left.type);
    if (cond) props.pop_back();
    if (state() != after)
      fail("linear-var-unused", e->span,
           "branches differ in linear use: " + join(newly_consumed(after, state(), vars.size())) +
               join(newly_consumed(state(), after, vars.size())));
  } else {
    if (st_->kind != SKind::Sum) fail("type-mismatch", e->kid(0)->span, "case on non-sum " + pretty(st_));
    left = bind_and_run(e->name, st_->kids[0], e->kid(1), expected, e->span);
    State after = state();
    restore(before);
    right = bind_and_run(e->name2, st_->kids[1], e->kid(2), expected ? expected : left.type, e->span);
    if (state() != after)
      fail("linear-var-unused", e->span,
           "branches differ in linear use: " + join(newly_consumed(after, state(), vars.size())) +
               join(newly_consumed(state(), after, vars.size())));
  }
  return {dy::with_kids(e, {scrut.term, left.term, right.term}), expected ? expected : left.type};
}

Typed Checker::synth_forall_elim(const TermPtr& e, const StaticPtr& expected) {
  const TermPtr& inner = e->kid(0);
  Typed f = inner->kind == TKind::ApiCall && inner->api == Api::Unify ? synth_api(inner, true) : synth(inner);
  StaticPtr fa = whnf_type(f.type);
  if (fa->kind != SKind::Forall)
    fail("type-mismatch", e->span, "static application of a term of type " + pretty(fa));
  StaticPtr arg = e->statics.empty() ? nullptr : e->statics[0];
  if (arg) {
    SortPtr s;
    try {
      s = sort_of(all_sorts(), *arg, &program);
      arg = normalize(arg);
    } catch (const StaticError& err) {
      fail(err.code, e->span, err.what());
    }
    if (fa->sort && !subsort(*s, *fa->sort))
      fail("sort-mismatch", e->span,
           "static argument has sort " + to_string(*s) + ", expected " + to_string(*fa->sort));
  } else if (expected) {
    Match m;
    m.metas[fa->name] = fa->sort;
    if (auto mm = match(fa->kids[0], expected, m)) fail(*mm, e->span);
    auto it = m.env.find(fa->name);
    if (it == m.env.end())
      fail("annotation-required", e->span, "cannot infer the static argument of this instantiation");
    arg = it->second;
  } else {
    fail("annotation-required", e->span, "static argument required here");
  }
  StaticPtr t = normalize(subst(fa->kids[0], fa->name, arg));
  if (expected) require_subtype(t, expected, e->span);
  return {dy::with_statics(dy::with_kids(e, {f.term}), {arg}), expected ? expected : t};
}

Typed Checker::synth_api(const TermPtr& e, bool under_forall_elim) {
  Api api = e->api;
  if (api == Api::Unify && !under_forall_elim)
    fail("uninstantiated-unify", e->span, "the result of unify must be instantiated immediately");
  const DcType& d = api_signature(api);
  Match m;
  for (const auto& [n, s] : d.quantified) m.metas[n] = s;
  std::size_t n = d.params.size();
  if (e->kids.size() != n) fail("type-mismatch", e->span, std::string(api_name(api)) + ": wrong number of arguments");
  std::vector<TermPtr> elab(n);
  std::vector<StaticPtr> actual(n);
  std::vector<bool> synthesized(n, false);

  for (std::size_t i = 0; i < n; ++i) {
    if (!contains_chan(*d.params[i])) continue;
    Typed a = synth(e->kid(i));
    elab[i] = a.term;
    actual[i] = a.type;
    synthesized[i] = true;
    if (auto mm = match(d.params[i], a.type, m)) fail(*mm, e->kid(i)->span);
  }

  bool session = is_session_api(api);
  if (session && !m.universe) {
    for (const auto& [name, v] : m.env)
      if (auto u = session_universe(v, program)) {
        m.universe = u;
        break;
      }
    if (!m.universe) fail("annotation-required", e->span, "cannot determine the universe of the channel");
  }
  if (session) m.env["U"] = st::set(*m.universe);

  auto inst = [&](const StaticPtr& p) {
    StaticPtr s = session ? stamp_universe(p, *m.universe) : p;
    return normalize(subst(s, m.env), m.universe);
  };
  auto unbound_in = [&](const StaticPtr& p) {
    for (const auto& v : free_vars(*p))
      if (m.metas.count(v) && !m.env.count(v)) return true;
    return false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (synthesized[i]) continue;
    if (!unbound_in(d.params[i])) {
      StaticPtr p = inst(d.params[i]);
      elab[i] = check(e->kid(i), p);
      actual[i] = p;
      continue;
    }
    Typed a = synth(e->kid(i));
    elab[i] = a.term;
    actual[i] = a.type;
    synthesized[i] = true;
    if (auto mm = match(d.params[i], a.type, m)) fail(*mm, e->kid(i)->span);
  }

  // Role sets determined only through a disjoint union: X = B \ A.
  auto eqs = m.deferred;
  if (d.guard && d.guard->kind == SKind::Op && d.guard->op == SOp::Eq) eqs.emplace_back(d.guard->kids[0], inst(d.guard->kids[1]));
  for (bool progress = true; progress;) {
    progress = false;
    for (const auto& [pat, act] : eqs) {
      if (pat->kind != SKind::Op || pat->op != SOp::DUnion) continue;
      StaticPtr whole = normalize(act, m.universe);
      if (whole->kind != SKind::Set) continue;
      for (int side = 0; side < 2; ++side) {
        const StaticPtr& x = pat->kids[side];
        const StaticPtr& known = pat->kids[1 - side];
        if (x->kind != SKind::Var || !m.metas.count(x->name) || m.env.count(x->name) || unbound_in(known)) continue;
        StaticPtr k = inst(known);
        if (k->kind != SKind::Set) continue;
        m.env[x->name] = st::set(set_minus(whole->roles, k->roles));
        progress = true;
      }
    }
  }
  for (const auto& [name, _] : d.quantified)
    if (!m.env.count(name))
      fail("annotation-required", e->span, std::string("cannot infer ") + name + " for " + api_name(api));

  for (std::size_t i = 0; i < n; ++i)
    if (synthesized[i]) require_subtype(actual[i], inst(d.params[i]), e->kid(i)->span);

  if (d.guard) {
    StaticPtr g;
    try {
      g = inst(d.guard);
    } catch (const StaticError& err) {
      fail(err.code, e->span, err.what());
    }
    Verdict v = prove(g);
    if (!v.valid() && !(opts.assert_runtime && v.kind == Verdict::Kind::Unknown))
      fail("guard-unprovable", e->span, std::string("guard of ") + api_name(api) + " does not hold", pretty(g),
           v.str());
  }

  StaticPtr result = d.result;
  if ((result->kind == SKind::Forall || result->kind == SKind::Exists) && !result->sort) {
    StaticPtr f = m.env.at("f");
    SortPtr dom;
    if (f->kind == SKind::Lam) {
      dom = f->sort;
    } else {
      SortPtr fs = sort_of(all_sorts(), *f, &program);
      if (fs->kind != Sort::Kind::Arrow) fail("sort-mismatch", e->span, "quantifier body is not a function");
      dom = fs->dom;
    }
    result = with_sort(result, dom);
  }
  std::vector<StaticPtr> statics;
  for (const auto& [name, _] : d.quantified) statics.push_back(normalize(m.env.at(name), m.universe));
  return {dy::with_statics(dy::with_kids(e, elab), statics), inst(result)};
}

Typed Checker::run(const TermPtr& e, const StaticPtr& expected) {
  auto fallback = [&](Typed t) -> Typed {
    if (expected) {
      require_subtype(t.type, expected, e->span);
      t.type = expected;
    }
    return t;
  };
  auto expect = [&](SKind kind, const char* what) {
    StaticPtr x = whnf_type(expected);
    if (x->kind != kind) fail("type-mismatch", e->span, std::string("expected ") + pretty(x) + ", found " + what);
    return x;
  };

  switch (e->kind) {
    case TKind::Var: {
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        if (it->name != e->name) continue;
        if (it->linear) {
          if (it->consumed) fail("linear-var-reused", e->span, "linear variable '" + e->name + "' used twice");
          it->consumed = true;
        }
        return fallback({e, it->type});
      }
      fail("unbound-name", e->span, "unbound variable '" + e->name + "'");
    }
    case TKind::Unit: return fallback({e, st::unit()});
    case TKind::Int: return fallback({e, st::base("int", {st::integer(e->value)})});
    case TKind::Bool: return fallback({e, st::base("bool", {st::boolean(e->value != 0)})});
    case TKind::Str: return fallback({e, st::base("string")});
    case TKind::Endpoint: {
      bool seen = false;
      for (auto& r : resources) {
        if (r.ep != e->endpoint) continue;
        seen = true;
        if (r.consumed) continue;
        r.consumed = true;
        return fallback({e, r.type});
      }
      if (seen) fail("linear-var-reused", e->span, "endpoint " + pretty(e->endpoint) + " used twice");
      fail("DanglingEndpoint", e->span, "endpoint " + pretty(e->endpoint) + " is not owned by this thread");
    }
    case TKind::Lam:
      if (expected) return {check_lambda(e, expected), expected};
      return synth_lambda(e);
    case TKind::Fix: {
      StaticPtr param = annotation(e->statics.at(0), e->span);
      StaticPtr res = annotation(e->statics.at(1), e->span);
      StaticPtr ft = st::fun(param, res, false);
      State before = state();
      std::size_t nv = vars.size();
      vars.push_back(Binding{e->name, ft, false, false});
      Typed body = bind_and_run(e->name2, param, e->kid(0), res, e->span);
      vars.pop_back();
      auto captured = newly_consumed(before, state(), nv);
      if (!captured.empty())
        fail("nonlinear-capture-of-linear", e->span, "a recursive function may not capture linear " + join(captured));
      return fallback({dy::with_statics(dy::with_kids(e, {body.term}), {param, res}), ft});
    }
    case TKind::App: {
      if (is_let(*e)) return synth_let(e, expected);
      Typed f = synth(e->kid(0));
      StaticPtr ft = whnf_type(f.type);
      if (ft->kind != SKind::Fun) fail("type-mismatch", e->span, "applying a term of type " + pretty(ft));
      TermPtr a = check(e->kid(1), ft->kids[0]);
      return fallback({dy::with_kids(e, {f.term, a}), ft->kids[1]});
    }
    case TKind::Pair: {
      if (expected) {
        StaticPtr x = whnf_type(expected);
        if (x->kind == SKind::Pair) {
          TermPtr a = check(e->kid(0), x->kids[0]);
          TermPtr b = check(e->kid(1), x->kids[1]);
          return {dy::with_kids(e, {a, b}), expected};
        }
      }
      Typed a = synth(e->kid(0));
      Typed b = synth(e->kid(1));
      return fallback({dy::with_kids(e, {a.term, b.term}), st::pair(a.type, b.type)});
    }
    case TKind::Fst:
    case TKind::Snd: {
      Typed p = synth(e->kid(0));
      StaticPtr pt = whnf_type(p.type);
      if (pt->kind != SKind::Pair) fail("type-mismatch", e->span, "projection from " + pretty(pt));
      std::size_t keep = e->kind == TKind::Fst ? 0 : 1;
      if (linear(pt->kids[1 - keep]))
        fail("linear-var-unused", e->span, "discarding a linear value of type " + pretty(pt->kids[1 - keep]));
      return fallback({dy::with_kids(e, {p.term}), pt->kids[keep]});
    }
    case TKind::LetPair: {
      Typed b = synth(e->kid(0));
      StaticPtr pt = whnf_type(b.type);
      if (pt->kind != SKind::Pair) fail("type-mismatch", e->span, "pair pattern on " + pretty(pt));
      bool l1 = linear(pt->kids[0]), l2 = linear(pt->kids[1]);
      vars.push_back(Binding{e->name, pt->kids[0], l1, false});
      vars.push_back(Binding{e->name2, pt->kids[1], l2, false});
      Typed body = run(e->kid(1), expected);
      if (l2 && !vars.back().consumed) fail("linear-var-unused", e->span, "linear variable '" + e->name2 + "' is never used");
      vars.pop_back();
      if (l1 && !vars.back().consumed) fail("linear-var-unused", e->span, "linear variable '" + e->name + "' is never used");
      vars.pop_back();
      return {dy::with_kids(e, {b.term, body.term}), body.type};
    }
    case TKind::If:
    case TKind::Case:
      return branches(e, expected);
    case TKind::GuardIntro: {
      if (!expected) fail("annotation-required", e->span, "guard introduction needs a known type");
      StaticPtr x = expect(SKind::Guard, "a guarded value");
      props.push_back(x->kids[0]);
      TermPtr v = check(e->kid(0), x->kids[1]);
      props.pop_back();
      return {dy::with_kids(e, {v}), expected};
    }
    case TKind::GuardElim: {
      Typed g = synth(e->kid(0));
      StaticPtr gt = whnf_type(g.type);
      if (gt->kind != SKind::Guard) fail("type-mismatch", e->span, "unguarding a term of type " + pretty(gt));
      Verdict v = prove(gt->kids[0]);
      if (!v.valid() && !(opts.assert_runtime && v.kind == Verdict::Kind::Unknown))
        fail("guard-unprovable", e->span, "guard does not hold", pretty(gt->kids[0]), v.str());
      return fallback({dy::with_kids(e, {g.term}), gt->kids[1]});
    }
    case TKind::AssertIntro: {
      if (!expected) fail("annotation-required", e->span, "assertion introduction needs a known type");
      StaticPtr x = expect(SKind::Assert, "an asserted value");
      Verdict v = prove(x->kids[0]);
      if (!v.valid() && !(opts.assert_runtime && v.kind == Verdict::Kind::Unknown))
        fail("guard-unprovable", e->span, "asserted proposition does not hold", pretty(x->kids[0]), v.str());
      TermPtr t = check(e->kid(0), x->kids[1]);
      return {dy::with_kids(e, {t}), expected};
    }
    case TKind::LetAssert: {
      Typed b = synth(e->kid(0));
      StaticPtr at = whnf_type(b.type);
      if (at->kind != SKind::Assert) fail("type-mismatch", e->span, "assertion pattern on " + pretty(at));
      props.push_back(at->kids[0]);
      Typed body = bind_and_run(e->name, at->kids[1], e->kid(1), expected, e->span);
      props.pop_back();
      return {dy::with_kids(e, {b.term, body.term}), body.type};
    }
    case TKind::ForallIntro: {
      std::string a = e->name;
      TermPtr v = e->kid(0);
      if (static_in_scope(a)) {
        std::set<std::string> avoid;
        SortCtx all = all_sorts();
        for (const auto& [x, _] : all.bindings()) avoid.insert(x);
        a = fresh_name(a, avoid);
        v = subst_static_in_term(v, e->name, st::var(a));
      }
      TermPtr out;
      StaticPtr type;
      if (expected) {
        StaticPtr x = expect(SKind::Forall, "a static abstraction");
        if (e->sort && x->sort && !sort_equal(*e->sort, *x->sort))
          fail("sort-mismatch", e->span, "static abstraction over " + to_string(*e->sort) + ", expected " + to_string(*x->sort));
        sorts.push(a, x->sort);
        v = check(v, subst(x->kids[0], x->name, st::var(a)));
        sorts.pop();
        type = expected;
      } else {
        sorts.push(a, e->sort);
        Typed b = synth(v);
        sorts.pop();
        v = b.term;
        type = st::forall(a, e->sort, b.type);
      }
      auto n = std::make_shared<Term>(*dy::with_kids(e, {v}));
      n->name = a;
      return {n, type};
    }
    case TKind::ForallElim:
      return synth_forall_elim(e, expected);
    case TKind::ExistsIntro: {
      StaticPtr target = expected;
      if (!target) {
        if (e->statics.size() < 2 || !e->statics[1]) fail("annotation-required", e->span, "pack needs a known type");
        target = annotation(e->statics[1], e->span);
      }
      StaticPtr x = whnf_type(target);
      if (x->kind != SKind::Exists) fail("type-mismatch", e->span, "expected " + pretty(x) + ", found a package");
      StaticPtr w = e->statics.empty() ? nullptr : e->statics[0];
      TermPtr body;
      if (w) {
        try {
          SortPtr s = sort_of(all_sorts(), *w, &program);
          if (x->sort && !subsort(*s, *x->sort)) fail("sort-mismatch", e->span, "witness has sort " + to_string(*s));
          w = normalize(w);
        } catch (const StaticError& err) {
          fail(err.code, e->span, err.what());
        }
        body = check(e->kid(0), normalize(subst(x->kids[0], x->name, w)));
      } else {
        Typed b = synth(e->kid(0));
        Match m;
        m.metas[x->name] = x->sort;
        if (auto mm = match(x->kids[0], b.type, m)) fail(*mm, e->span);
        auto it = m.env.find(x->name);
        if (it == m.env.end()) fail("annotation-required", e->span, "cannot infer the witness of this package");
        w = it->second;
        require_subtype(b.type, normalize(subst(x->kids[0], x->name, w)), e->span);
        body = b.term;
      }
      return {dy::with_statics(dy::with_kids(e, {body}), {w, x}), target};
    }
    case TKind::LetExists: {
      Typed b = synth(e->kid(0));
      StaticPtr xt = whnf_type(b.type);
      if (xt->kind != SKind::Exists) fail("type-mismatch", e->span, "unpacking a term of type " + pretty(xt));
      std::string a = e->name;
      TermPtr body = e->kid(1);
      if (static_in_scope(a)) {
        std::set<std::string> avoid;
        SortCtx all = all_sorts();
        for (const auto& [x, _] : all.bindings()) avoid.insert(x);
        a = fresh_name(a, avoid);
        body = subst_static_in_term(body, e->name, st::var(a));
      }
      sorts.push(a, xt->sort);
      Typed r = bind_and_run(e->name2, normalize(subst(xt->kids[0], xt->name, st::var(a))), body, expected, e->span);
      sorts.pop();
      if (!expected && free_vars(*r.type).count(a))
        fail("type-mismatch", e->span, "static variable '" + a + "' escapes its scope");
      auto n = std::make_shared<Term>(*dy::with_kids(e, {b.term, r.term}));
      n->name = a;
      return {n, r.type};
    }
    case TKind::Inl:
    case TKind::Inr: {
      StaticPtr target = expected;
      StaticPtr ann = e->statics.empty() ? nullptr : e->statics[0];
      if (ann) {
        ann = annotation(ann, e->span);
        if (expected) require_subtype(ann, expected, e->span);
        target = ann;
      }
      if (!target) fail("annotation-required", e->span, "injection needs a known sum type");
      StaticPtr x = whnf_type(target);
      if (x->kind != SKind::Sum) fail("type-mismatch", e->span, "expected " + pretty(x) + ", found an injection");
      TermPtr v = check(e->kid(0), x->kids[e->kind == TKind::Inl ? 0 : 1]);
      return {dy::with_statics(dy::with_kids(e, {v}), {x}), expected ? expected : target};
    }
    case TKind::Annot: {
      StaticPtr t = annotation(e->statics.at(0), e->span);
      TermPtr v = check(e->kid(0), t);
      return fallback({dy::with_statics(dy::with_kids(e, {v}), {t}), t});
    }
    case TKind::ApiCall:
      return fallback(synth_api(e, false));
  }
  fail("type-mismatch", e->span, "unsupported term");
}

}  // namespace detail

// ------------------------------------------------------------- entry points

namespace {

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const StaticError& e) {
    throw TypeError(Diagnostic{e.code, e.span, e.what(), "", ""});
  } catch (const ParseError& e) {
    throw TypeError(Diagnostic{e.code, e.span, e.what(), "", ""});
  }
}

}  // namespace

Typed typecheck_expr(const Program& program, const TermPtr& e, const Signature& sig, const CheckOptions& opts) {
  return guarded([&] {
    detail::Checker c(program, opts, &sig);
    c.add_resources(rho(*e), e->span);
    Typed r = c.synth(e);
    c.require_resources_consumed(e->span);
    return r;
  });
}

Typed check_program(const Program& program, const CheckOptions& opts) {
  return guarded([&] {
    check_protocols(program);
    return typecheck_expr(program, program_term(program), {}, opts);
  });
}

void typecheck_pool(const Program& program, const std::map<int, TermPtr>& threads, const Signature& sig,
                    const CheckOptions& opts) {
  guarded([&] {
    std::map<ChannelId, std::vector<std::vector<int>>> held;
    for (const auto& [tid, term] : threads) {
      detail::Checker c(program, opts, &sig);
      auto eps = rho(*term);
      c.add_resources(eps, term->span);
      if (tid == 0)
        c.synth(term);
      else
        c.check(term, st::unit());
      c.require_resources_consumed(term->span);
      for (const auto& ep : eps) held[ep.channel].push_back(ep.roles);
    }
    for (const auto& [ch, state] : sig) {
      std::vector<int> covered;
      for (const auto& rs : held[ch]) {
        if (!set_inter(covered, rs).empty())
          throw TypeError(Diagnostic{"linear-var-reused", {}, "endpoints of channel c" + std::to_string(ch) + " overlap",
                                     "", ""});
        covered = set_union(covered, rs);
      }
      if (covered != state.universe)
        throw TypeError(Diagnostic{"DanglingEndpoint", {},
                                   "roles " + pretty_roles(set_minus(state.universe, covered)) + " of channel c" +
                                       std::to_string(ch) + " are held by no thread",
                                   "", ""});
    }
    return 0;
  });
}

}  // namespace mps
