#include "mps/runtime.hpp"

#include <algorithm>
#include <stdexcept>

#include "mps/dfcheck.hpp"
#include "mps/pretty.hpp"
#include "mps/statics.hpp"
#include "mps/terms.hpp"

namespace mps {

namespace {

using Path = std::vector<std::size_t>;

// Path to the subterm reduced next under call-by-value, or nothing when `e`
// is a value.
std::optional<Path> focus(const Term& e) {
  auto into = [&](std::size_t i) -> std::optional<Path> {
    auto p = focus(*e.kids[i]);
    if (p) p->insert(p->begin(), i);
    return p;
  };
  switch (e.kind) {
    case TKind::Unit:
    case TKind::Int:
    case TKind::Bool:
    case TKind::Str:
    case TKind::Endpoint:
    case TKind::Lam:
    case TKind::Fix:
    case TKind::ForallIntro:
      return std::nullopt;
    case TKind::Var:
      return Path{};
    case TKind::Pair:
      if (auto p = into(0)) return p;
      return into(1);
    case TKind::GuardIntro:
    case TKind::AssertIntro:
    case TKind::ExistsIntro:
    case TKind::Inl:
    case TKind::Inr:
      return into(0);
    case TKind::App:
      if (auto p = into(0)) return p;
      if (auto p = into(1)) return p;
      return Path{};
    case TKind::ApiCall:
      for (std::size_t i = 0; i < e.kids.size(); ++i)
        if (auto p = into(i)) return p;
      return Path{};
    default:
      if (auto p = into(0)) return p;
      return Path{};
  }
}

const TermPtr& at_path(const TermPtr& e, const Path& p, std::size_t n) {
  const TermPtr* cur = &e;
  for (std::size_t i = 0; i < n; ++i) cur = &(*cur)->kids[p[i]];
  return *cur;
}

const TermPtr& at_path(const TermPtr& e, const Path& p) { return at_path(e, p, p.size()); }

TermPtr replace_at(const TermPtr& e, const Path& p, std::size_t i, std::size_t n, const TermPtr& r) {
  if (i == n) return r;
  std::vector<TermPtr> kids = e->kids;
  kids[p[i]] = replace_at(kids[p[i]], p, i + 1, n, r);
  return dy::with_kids(e, std::move(kids));
}

TermPtr replace_at(const TermPtr& e, const Path& p, const TermPtr& r) { return replace_at(e, p, 0, p.size(), r); }

std::optional<TermPtr> contract(const Term& e) {
  auto k = [&](std::size_t i) -> const Term& { return *e.kids[i]; };
  switch (e.kind) {
    case TKind::App: {
      const TermPtr& f = e.kids[0];
      if (f->kind == TKind::Lam) return subst_term(f->kids[0], f->name, e.kids[1]);
      if (f->kind == TKind::Fix) return subst_term(subst_term(f->kids[0], f->name, f), f->name2, e.kids[1]);
      return std::nullopt;
    }
    case TKind::Fst:
    case TKind::Snd:
      if (k(0).kind != TKind::Pair) return std::nullopt;
      return k(0).kids[e.kind == TKind::Fst ? 0 : 1];
    case TKind::LetPair:
      if (k(0).kind != TKind::Pair) return std::nullopt;
      return subst_term(subst_term(e.kids[1], e.name, k(0).kids[0]), e.name2, k(0).kids[1]);
    case TKind::If:
      if (k(0).kind != TKind::Bool) return std::nullopt;
      return e.kids[k(0).value ? 1 : 2];
    case TKind::GuardElim:
      if (k(0).kind != TKind::GuardIntro) return std::nullopt;
      return k(0).kids[0];
    case TKind::LetAssert:
      if (k(0).kind != TKind::AssertIntro) return std::nullopt;
      return subst_term(e.kids[1], e.name, k(0).kids[0]);
    case TKind::ForallElim:
      if (k(0).kind != TKind::ForallIntro || e.statics.empty() || !e.statics[0]) return std::nullopt;
      return subst_static_in_term(k(0).kids[0], k(0).name, e.statics[0]);
    case TKind::LetExists: {
      if (k(0).kind != TKind::ExistsIntro) return std::nullopt;
      TermPtr body = e.kids[1];
      if (!e.name.empty()) {
        const auto& w = k(0).statics.empty() ? nullptr : k(0).statics[0];
        if (!w) return std::nullopt;
        body = subst_static_in_term(body, e.name, w);
      }
      return subst_term(body, e.name2, k(0).kids[0]);
    }
    case TKind::Case:
      if (k(0).kind == TKind::Inl) return subst_term(e.kids[1], e.name, k(0).kids[0]);
      if (k(0).kind == TKind::Inr) return subst_term(e.kids[2], e.name2, k(0).kids[0]);
      return std::nullopt;
    case TKind::Annot:
      return e.kids[0];
    case TKind::ApiCall: {
      if (is_session_api(e.api)) return std::nullopt;
      if (e.api == Api::Not) {
        if (k(0).kind != TKind::Bool) return std::nullopt;
        return dy::boolean(k(0).value == 0);
      }
      if (k(0).kind != TKind::Int || k(1).kind != TKind::Int) return std::nullopt;
      std::int64_t a = k(0).value, b = k(1).value;
      switch (e.api) {
        case Api::Add: return dy::integer(a + b);
        case Api::Sub: return dy::integer(a - b);
        case Api::Mul: return dy::integer(a * b);
        case Api::Div:
          if (b == 0) return std::nullopt;
          return dy::integer(a / b);
        case Api::Eq: return dy::boolean(a == b);
        case Api::Lt: return dy::boolean(a < b);
        case Api::Le: return dy::boolean(a <= b);
        default: return std::nullopt;
      }
    }
    default:
      return std::nullopt;
  }
}

// Where a thread stands: the focused subterm and, for a session call, the
// call itself.
struct Focus {
  Path path;
  TermPtr node;
};

std::optional<Focus> thread_focus(const TermPtr& t) {
  auto p = focus(*t);
  if (!p) return std::nullopt;
  return Focus{*p, at_path(t, *p)};
}

bool single_thread_api(Api a) { return a == Api::Fork || a == Api::Cut || a == Api::Elim || a == Api::Split; }

bool erasable(Api a) { return a == Api::Skip || a == Api::Recurse; }

std::optional<Endpoint> endpoint_arg(const Term& call) {
  if (!call.kids.empty() && call.kids[0]->kind == TKind::Endpoint) return call.kids[0]->endpoint;
  return std::nullopt;
}

bool contains(const std::vector<int>& rs, const StaticPtr& r) {
  return r->kind == SKind::Int && std::binary_search(rs.begin(), rs.end(), static_cast<int>(r->value));
}

StaticPtr current_session(const Pool& pool, const Program& program, ChannelId c, bool unroll_fix) {
  const ChannelState& s = pool.sig.at(c);
  StaticPtr h = whnf(s.session, program, s.universe);
  while (unroll_fix && h->kind == SKind::Fix)
    h = whnf(st::app(h->kids[0], h), program, s.universe);
  return h;
}

std::map<ChannelId, std::string> sig_summary(const Pool& pool) {
  std::map<ChannelId, std::string> out;
  for (const auto& [c, s] : pool.sig) out[c] = pretty(s.session);
  return out;
}

[[noreturn]] void guard_violation(Api api, const std::string& what) {
  throw std::runtime_error(std::string("guard of ") + api_name(api) + " false at runtime: " + what);
}

// The guard instantiated by the checker must hold once its static
// arguments are ground.
void check_elaborated_guard(const Term& call) {
  if (call.statics.empty()) return;
  StaticPtr g = instantiate_guard(call.api, call.statics);
  if (g->kind == SKind::Bool && !g->value) guard_violation(call.api, pretty(g));
}

SortPtr binder_sort(const StaticPtr& f) {
  if (f->kind == SKind::Lam) return f->sort;
  SortPtr s = sort_of(SortCtx{}, *f);
  return s->kind == Sort::Kind::Arrow ? s->dom : s;
}

}  // namespace

// ------------------------------------------------------------- pools

Pool initial_pool(const TermPtr& main) {
  Pool p;
  p.threads[0] = main;
  return p;
}

std::vector<Endpoint> pool_rho(const Pool& pool) {
  std::vector<Endpoint> out;
  for (const auto& [t, e] : pool.threads) {
    auto r = rho(*e);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

bool consistent(const std::vector<Endpoint>& bag, const std::map<ChannelId, std::vector<int>>& universes) {
  std::map<ChannelId, std::vector<int>> covered;
  for (const auto& ep : bag) {
    if (!universes.count(ep.channel)) return false;
    auto& cov = covered[ep.channel];
    if (!set_inter(cov, ep.roles).empty()) return false;
    cov = set_union(cov, ep.roles);
  }
  for (const auto& [c, u] : universes)
    if (covered[c] != u) return false;
  return true;
}

bool consistent(const Pool& pool) {
  std::map<ChannelId, std::vector<int>> universes;
  for (const auto& [c, s] : pool.sig) universes[c] = s.universe;
  return consistent(pool_rho(pool), universes);
}

std::variant<TermPtr, Stuck> step_thread(const TermPtr& e) {
  auto f = thread_focus(e);
  if (!f) return Stuck{Stuck::Kind::Value, std::nullopt, std::nullopt, "value"};
  const Term& n = *f->node;
  if (n.kind == TKind::ApiCall && is_session_api(n.api))
    return Stuck{Stuck::Kind::Blocked, n.api, endpoint_arg(n), std::string("waiting at ") + api_name(n.api)};
  if (auto r = contract(n)) return replace_at(e, f->path, *r);
  std::string why = n.kind == TKind::Var ? "free variable '" + n.name + "'" : "no rule applies to " + pretty(n);
  if (n.kind == TKind::ApiCall && n.api == Api::Div) why = "division by zero";
  return Stuck{Stuck::Kind::Genuine, std::nullopt, std::nullopt, why};
}

// ------------------------------------------------------------- enabled steps

std::string EnabledStep::directive() const {
  switch (kind) {
    case Kind::Lift: return "lift:" + std::to_string(thread);
    case Kind::Fork: return "fork:" + std::to_string(thread);
    case Kind::Cut: return "cut:" + std::to_string(thread);
    case Kind::Elim: return "elim:" + std::to_string(thread);
    case Kind::Split: return "split:" + std::to_string(thread);
    case Kind::Gc: return "gc:" + std::to_string(thread);
    case Kind::Sync: return "sync:c" + std::to_string(channel.value_or(-1));
  }
  return "";
}

std::optional<EnabledStep> match_cohort(const Pool& pool, const Program& program, ChannelId c,
                                        const RuntimeOptions& opts) {
  auto sit = pool.sig.find(c);
  if (sit == pool.sig.end()) return std::nullopt;

  struct Member {
    int thread;
    Endpoint ep;
    TermPtr call;
    TermPtr parent;
  };
  std::vector<Member> members;
  std::vector<Endpoint> eps;
  for (const auto& [t, e] : pool.threads)
    for (const auto& ep : rho(*e))
      if (ep.channel == c) eps.push_back(ep);

  std::map<int, bool> used;
  for (const auto& [t, e] : pool.threads) {
    auto f = thread_focus(e);
    if (!f || f->node->kind != TKind::ApiCall || !is_session_api(f->node->api)) continue;
    auto ep = endpoint_arg(*f->node);
    if (!ep || ep->channel != c || single_thread_api(f->node->api)) continue;
    if (opts.erase_proofs && erasable(f->node->api)) continue;
    TermPtr parent = f->path.empty() ? nullptr : at_path(e, f->path, f->path.size() - 1);
    members.push_back(Member{t, *ep, f->node, parent});
  }

  StaticPtr head = current_session(pool, program, c, opts.erase_proofs);
  auto find_api = [&](Api a) {
    return std::count_if(members.begin(), members.end(), [&](const Member& m) { return m.call->api == a; });
  };
  auto all_are = [&](std::initializer_list<Api> apis) {
    return std::all_of(members.begin(), members.end(), [&](const Member& m) {
      return std::find(apis.begin(), apis.end(), m.call->api) != apis.end();
    });
  };
  // Every endpoint of c must be blocked on c, unless only a sender and a
  // receiver take part (skips erased).
  auto cohort_complete = [&] {
    if (members.size() != eps.size()) return false;
    for (const auto& ep : eps)
      if (std::none_of(members.begin(), members.end(), [&](const Member& m) { return m.ep == ep; })) return false;
    return true;
  };

  std::string rule;
  switch (head->kind) {
    case SKind::BMsg: {
      if (!cohort_complete() || !all_are({Api::BSend, Api::BRecv}) || find_api(Api::BSend) != 1) return std::nullopt;
      for (const auto& m : members)
        if (contains(m.ep.roles, head->kids[0]) != (m.call->api == Api::BSend)) return std::nullopt;
      rule = "bmsg";
      break;
    }
    case SKind::PMsg: {
      if (find_api(Api::Send) != 1 || find_api(Api::Recv) != 1) return std::nullopt;
      if (opts.erase_proofs) {
        std::vector<Member> pair;
        for (const auto& m : members)
          if (m.call->api == Api::Send || m.call->api == Api::Recv) pair.push_back(m);
        members = pair;
      } else if (!cohort_complete() || !all_are({Api::Send, Api::Recv, Api::Skip})) {
        return std::nullopt;
      }
      for (const auto& m : members) {
        bool r1 = contains(m.ep.roles, head->kids[0]), r2 = contains(m.ep.roles, head->kids[1]);
        bool ok = m.call->api == Api::Send ? (r1 && !r2) : m.call->api == Api::Recv ? (!r1 && r2) : (r1 == r2);
        if (!ok) return std::nullopt;
      }
      rule = "msg";
      break;
    }
    case SKind::End: {
      if (!cohort_complete() || !all_are({Api::Close, Api::Wait}) || find_api(Api::Close) != 1) return std::nullopt;
      for (const auto& m : members)
        if (contains(m.ep.roles, head->kids[0]) != (m.call->api == Api::Close)) return std::nullopt;
      rule = "end";
      break;
    }
    case SKind::Quan: {
      if (!cohort_complete() || !all_are({Api::Unify, Api::Exify}) || find_api(Api::Unify) != 1) return std::nullopt;
      for (const auto& m : members) {
        if (contains(m.ep.roles, head->kids[0]) != (m.call->api == Api::Unify)) return std::nullopt;
        if (m.call->api == Api::Unify &&
            (!m.parent || m.parent->kind != TKind::ForallElim || m.parent->statics.empty() || !m.parent->statics[0]))
          return std::nullopt;
      }
      rule = "quan";
      break;
    }
    case SKind::Branch: {
      if (!cohort_complete() || !all_are({Api::Offer, Api::Choose}) || find_api(Api::Offer) != 1) return std::nullopt;
      for (const auto& m : members) {
        if (contains(m.ep.roles, head->kids[0]) != (m.call->api == Api::Offer)) return std::nullopt;
        if (m.call->api == Api::Offer && m.call->kids[1]->kind != TKind::Bool) return std::nullopt;
      }
      rule = "branch";
      break;
    }
    case SKind::Fix: {
      if (!cohort_complete() || !all_are({Api::Recurse})) return std::nullopt;
      rule = "recurse";
      break;
    }
    default:
      return std::nullopt;
  }
  if (members.empty()) return std::nullopt;
  EnabledStep s;
  s.kind = EnabledStep::Kind::Sync;
  s.channel = c;
  s.rule = rule;
  for (const auto& m : members) s.threads.push_back(m.thread);
  std::sort(s.threads.begin(), s.threads.end());
  s.thread = s.threads.front();
  return s;
}

std::vector<EnabledStep> find_enabled(const Pool& pool, const Program& program, const RuntimeOptions& opts) {
  std::vector<EnabledStep> out;
  std::vector<EnabledStep> gc;
  for (const auto& [t, e] : pool.threads) {
    auto f = thread_focus(e);
    if (!f) {
      if (t > 0) gc.push_back(EnabledStep{EnabledStep::Kind::Gc, t, std::nullopt, {t}, ""});
      continue;
    }
    const Term& n = *f->node;
    if (n.kind == TKind::ApiCall && is_session_api(n.api)) {
      EnabledStep s{EnabledStep::Kind::Lift, t, std::nullopt, {t}, ""};
      switch (n.api) {
        case Api::Fork: s.kind = EnabledStep::Kind::Fork; break;
        case Api::Cut: s.kind = EnabledStep::Kind::Cut; break;
        case Api::Elim: s.kind = EnabledStep::Kind::Elim; break;
        case Api::Split: s.kind = EnabledStep::Kind::Split; break;
        default:
          if (!(opts.erase_proofs && erasable(n.api))) continue;
          s.rule = api_name(n.api);
          s.channel = endpoint_arg(n) ? std::optional<ChannelId>(endpoint_arg(n)->channel) : std::nullopt;
      }
      out.push_back(s);
      continue;
    }
    if (contract(n)) out.push_back(EnabledStep{EnabledStep::Kind::Lift, t, std::nullopt, {t}, ""});
  }
  out.insert(out.end(), gc.begin(), gc.end());
  for (const auto& [c, _] : pool.sig)
    if (auto s = match_cohort(pool, program, c, opts)) out.push_back(*s);
  return out;
}

// ------------------------------------------------------------- applying steps

TraceEvent apply_step(Pool& pool, const Program& program, const EnabledStep& step, std::uint64_t step_no,
                      const RuntimeOptions& opts) {
  TraceEvent ev;
  ev.step = step_no;
  ev.threads = step.threads;
  ev.sig_before = sig_summary(pool);

  auto focus_of = [&](int t) {
    auto f = thread_focus(pool.threads.at(t));
    if (!f) throw std::runtime_error("thread " + std::to_string(t) + " has nothing to reduce");
    return *f;
  };
  auto set_node = [&](int t, const Path& p, const TermPtr& r) { pool.threads[t] = replace_at(pool.threads[t], p, r); };
  auto static_set = [&](const Term& call, std::size_t i) -> std::vector<int> {
    if (call.statics.size() <= i) throw std::runtime_error(std::string(api_name(call.api)) + " lacks static arguments");
    StaticPtr s = normalize(call.statics[i]);
    if (s->kind != SKind::Set) throw std::runtime_error(std::string(api_name(call.api)) + ": role set not ground");
    return s->roles;
  };

  switch (step.kind) {
    case EnabledStep::Kind::Lift: {
      Focus f = focus_of(step.thread);
      if (f.node->kind == TKind::ApiCall && is_session_api(f.node->api)) {
        // An erased proof function: the endpoint passes through.
        ev.kind = step.rule;
        ev.channel = step.channel;
        set_node(step.thread, f.path, f.node->kids[0]);
        break;
      }
      auto r = step_thread(pool.threads[step.thread]);
      if (!std::holds_alternative<TermPtr>(r)) throw std::runtime_error("lift on a stuck thread");
      ev.kind = "lift";
      pool.threads[step.thread] = std::get<TermPtr>(r);
      break;
    }
    case EnabledStep::Kind::Gc:
      ev.kind = "gc";
      pool.threads.erase(step.thread);
      break;
    case EnabledStep::Kind::Fork: {
      Focus f = focus_of(step.thread);
      const Term& call = *f.node;
      auto rs1 = static_set(call, 0), rs2 = static_set(call, 1), u = static_set(call, 3);
      if (!set_inter(rs1, rs2).empty() || set_union(rs1, rs2) != u)
        guard_violation(call.api, pretty_roles(rs1) + " and " + pretty_roles(rs2) + " do not partition " + pretty_roles(u));
      ChannelId c = pool.next_channel++;
      pool.sig[c] = ChannelState{normalize(call.statics[2], u), u};
      int nt = pool.next_thread++;
      pool.threads[nt] = dy::app(call.kids[0], dy::endpoint(Endpoint{c, rs1}));
      set_node(step.thread, f.path, dy::endpoint(Endpoint{c, rs2}));
      ev.kind = "fork";
      ev.channel = c;
      ev.threads = {step.thread, nt};
      break;
    }
    case EnabledStep::Kind::Cut: {
      Focus f = focus_of(step.thread);
      const Term& call = *f.node;
      if (call.kids[0]->kind != TKind::Endpoint || call.kids[1]->kind != TKind::Endpoint)
        throw std::runtime_error("cut on non-endpoints");
      Endpoint e1 = call.kids[0]->endpoint, e2 = call.kids[1]->endpoint;
      const ChannelState s1 = pool.sig.at(e1.channel);
      if (set_union(e1.roles, e2.roles) != s1.universe)
        guard_violation(call.api, pretty_roles(e1.roles) + " and " + pretty_roles(e2.roles) + " do not cover the universe");
      ChannelId c = pool.next_channel++;
      set_node(step.thread, f.path, dy::endpoint(Endpoint{c, set_inter(e1.roles, e2.roles)}));
      std::map<ChannelId, ChannelId> ren{{e1.channel, c}, {e2.channel, c}};
      for (auto& [t, e] : pool.threads) e = rename_channels(e, ren);
      pool.sig.erase(e1.channel);
      pool.sig.erase(e2.channel);
      pool.sig[c] = s1;
      ev.kind = "cut";
      ev.channel = c;
      break;
    }
    case EnabledStep::Kind::Elim: {
      Focus f = focus_of(step.thread);
      auto ep = endpoint_arg(*f.node);
      if (!ep || !ep->roles.empty()) guard_violation(Api::Elim, "endpoint has roles");
      set_node(step.thread, f.path, dy::unit());
      ev.kind = "elim";
      ev.channel = ep->channel;
      break;
    }
    case EnabledStep::Kind::Split: {
      Focus f = focus_of(step.thread);
      const Term& call = *f.node;
      auto ep = endpoint_arg(call);
      if (!ep) throw std::runtime_error("split on a non-endpoint");
      auto rs1 = static_set(call, 0), rs2 = static_set(call, 1);
      if (!set_inter(rs1, rs2).empty() || set_union(rs1, rs2) != ep->roles)
        guard_violation(call.api, pretty_roles(rs1) + " and " + pretty_roles(rs2) + " do not split " + pretty_roles(ep->roles));
      int nt = pool.next_thread++;
      pool.threads[nt] = dy::app(call.kids[1], dy::endpoint(Endpoint{ep->channel, rs1}));
      set_node(step.thread, f.path, dy::endpoint(Endpoint{ep->channel, rs2}));
      ev.kind = "split";
      ev.channel = ep->channel;
      ev.threads = {step.thread, nt};
      break;
    }
    case EnabledStep::Kind::Sync: {
      ChannelId c = *step.channel;
      ChannelState& state = pool.sig.at(c);
      StaticPtr head = current_session(pool, program, c, opts.erase_proofs);
      const auto& u = state.universe;
      ev.kind = step.rule;
      ev.channel = c;
      std::vector<std::pair<int, Focus>> fs;
      for (int t : step.threads) fs.emplace_back(t, focus_of(t));
      for (const auto& [t, f] : fs) check_elaborated_guard(*f.node);
      auto ep_of = [&](const Focus& f) { return dy::endpoint(*endpoint_arg(*f.node)); };

      if (step.rule == "bmsg" || step.rule == "msg") {
        Api sender = step.rule == "bmsg" ? Api::BSend : Api::Send;
        TermPtr payload;
        for (const auto& [t, f] : fs)
          if (f.node->api == sender) payload = f.node->kids[1];
        for (const auto& [t, f] : fs) {
          Api a = f.node->api;
          bool receives = a == Api::BRecv || a == Api::Recv;
          set_node(t, f.path, receives ? dy::pair(ep_of(f), payload) : ep_of(f));
        }
        ev.payload_type = pretty(step.rule == "bmsg" ? head->kids[1] : head->kids[2]);
        state.session = head->kids.back();
      } else if (step.rule == "end") {
        for (const auto& [t, f] : fs) set_node(t, f.path, dy::unit());
        pool.sig.erase(c);
      } else if (step.rule == "quan") {
        StaticPtr f = head->kids[1];
        StaticPtr w;
        for (const auto& [t, fo] : fs)
          if (fo.node->api == Api::Unify) w = at_path(pool.threads[t], fo.path, fo.path.size() - 1)->statics[0];
        SortPtr sigma = binder_sort(f);
        for (const auto& [t, fo] : fs) {
          Endpoint ep = *endpoint_arg(*fo.node);
          if (fo.node->api == Api::Unify) {
            Path parent(fo.path.begin(), fo.path.end() - 1);
            set_node(t, parent, dy::endpoint(ep));
          } else {
            StaticPtr ty = normalize(
                st::exists("a", sigma, st::chan(st::set(ep.roles), st::app(f, st::var("a")), u)), u);
            set_node(t, fo.path, dy::exists_intro(dy::endpoint(ep), w, ty));
          }
        }
        ev.payload_type = pretty(w);
        state.session = normalize(st::app(f, w), u);
      } else if (step.rule == "branch") {
        bool left = false;
        for (const auto& [t, f] : fs)
          if (f.node->api == Api::Offer) left = f.node->kids[1]->value != 0;
        for (const auto& [t, f] : fs) {
          Endpoint ep = *endpoint_arg(*f.node);
          if (f.node->api == Api::Offer) {
            set_node(t, f.path, dy::endpoint(ep));
          } else {
            StaticPtr sum = st::sum(st::chan(st::set(ep.roles), head->kids[1], u),
                                    st::chan(st::set(ep.roles), head->kids[2], u));
            TermPtr e = dy::endpoint(ep);
            set_node(t, f.path, left ? dy::inl(e, sum) : dy::inr(e, sum));
          }
        }
        ev.payload_type = left ? "true" : "false";
        state.session = head->kids[left ? 1 : 2];
      } else if (step.rule == "recurse") {
        for (const auto& [t, f] : fs) set_node(t, f.path, ep_of(f));
        state.session = normalize(st::app(head->kids[0], head), u);
      } else {
        throw std::runtime_error("unknown synchronization " + step.rule);
      }
      break;
    }
  }
  ev.sig_after = sig_summary(pool);
  return ev;
}

// ------------------------------------------------------------- schedulers

std::size_t RoundRobinScheduler::pick(const std::vector<EnabledStep>& enabled) {
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = 0; i < enabled.size(); ++i) {
    if (enabled[i].thread >= next_ && (!found || enabled[i].thread < enabled[best].thread)) {
      best = i;
      found = true;
    }
  }
  if (!found)
    for (std::size_t i = 0; i < enabled.size(); ++i)
      if (enabled[i].thread < enabled[best].thread) best = i;
  next_ = enabled[best].thread + 1;
  return best;
}

std::size_t SeededRandomScheduler::pick(const std::vector<EnabledStep>& enabled) {
  return static_cast<std::size_t>(rng_() % enabled.size());
}

std::size_t ScriptedScheduler::pick(const std::vector<EnabledStep>& enabled) {
  if (pos_ >= script_.size()) throw std::runtime_error("script exhausted");
  const std::string& d = script_[pos_];
  for (std::size_t i = 0; i < enabled.size(); ++i)
    if (enabled[i].directive() == d) {
      ++pos_;
      return i;
    }
  throw std::runtime_error("script step '" + d + "' is not enabled");
}

// ------------------------------------------------------------- running

std::string to_string(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::AllDone: return "AllDone";
    case Outcome::Kind::Deadlock: return "Deadlock";
    case Outcome::Kind::StepLimit: return "StepLimit";
    case Outcome::Kind::InvariantViolation: return "InvariantViolation";
  }
  return "";
}

namespace {

bool all_done(const Pool& pool) {
  return pool.threads.size() == 1 && pool.threads.count(0) && !focus(*pool.threads.at(0));
}

std::string deadlock_report(const Pool& pool) {
  std::string out;
  for (const auto& [t, e] : pool.threads) {
    auto r = step_thread(e);
    std::string what = "reducible";
    if (auto* s = std::get_if<Stuck>(&r)) {
      what = s->reason;
      if (s->endpoint) what += " on " + pretty(*s->endpoint);
    }
    out += (out.empty() ? "" : "; ") + ("thread " + std::to_string(t) + ": " + what);
  }
  return out;
}

std::optional<std::string> check_invariants(const Pool& pool, const Program& program, const RunOptions& opts) {
  if (!consistent(pool)) return "consistency: endpoints do not partition their universes";
  // Erased proof functions leave thread types behind the signature.
  if (!opts.runtime.erase_proofs) try {
    typecheck_pool(program, pool.threads, pool.sig, opts.check);
  } catch (const TypeError& e) {
    return "typing: " + e.diag.code + ": " + e.diag.message;
  }
  if (!df_reducible(abstract_pool(pool))) return "df-reducibility: pool abstraction is not df-reducible";
  if (all_done(pool)) return std::nullopt;
  auto enabled = find_enabled(pool, program, opts.runtime);
  if (enabled.empty()) return "progress: no step enabled (" + deadlock_report(pool) + ")";
  bool all_blocked = std::all_of(enabled.begin(), enabled.end(),
                                 [](const EnabledStep& s) { return s.kind == EnabledStep::Kind::Sync; });
  if (all_blocked && !find_blocked_match(pool, program, opts.runtime)) return "blocked-match: no cohort matches";
  return std::nullopt;
}

}  // namespace

Outcome run(Pool pool, const Program& program, Scheduler& scheduler, const RunOptions& opts,
            const std::function<void(const Pool&, std::uint64_t)>& observe) {
  Outcome out;
  auto violation = [&](const std::string& what) {
    out.kind = Outcome::Kind::InvariantViolation;
    out.report = what + " (step " + std::to_string(out.steps) + ")";
    return out;
  };
  if (opts.checked)
    if (auto v = check_invariants(pool, program, opts)) return violation(*v);
  if (observe) observe(pool, 0);
  for (;;) {
    auto enabled = find_enabled(pool, program, opts.runtime);
    if (enabled.empty()) {
      if (all_done(pool)) {
        out.kind = Outcome::Kind::AllDone;
        out.value = pool.threads.at(0);
      } else {
        out.kind = Outcome::Kind::Deadlock;
        out.report = deadlock_report(pool);
      }
      return out;
    }
    if (out.steps >= opts.max_steps) {
      out.kind = Outcome::Kind::StepLimit;
      return out;
    }
    std::size_t i = scheduler.pick(enabled);
    ++out.steps;
    try {
      out.trace.push_back(apply_step(pool, program, enabled[i], out.steps, opts.runtime));
    } catch (const StaticError& e) {
      return violation(std::string("statics: ") + e.what());
    } catch (const std::runtime_error& e) {
      return violation(e.what());
    }
    if (opts.checked)
      if (auto v = check_invariants(pool, program, opts)) return violation(*v);
    if (observe) observe(pool, out.steps);
  }
}

}  // namespace mps
