#include <array>

#include "mps/statics.hpp"
#include "mps/typing.hpp"

namespace mps {

namespace {

using st::var;

StaticPtr in(const std::string& r, const std::string& rs) { return st::op(SOp::In, {var(r), var(rs)}); }
StaticPtr notin(const std::string& r, const std::string& rs) {
  return st::op(SOp::NotIn, {var(r), var(rs)});
}
StaticPtr conj(StaticPtr a, StaticPtr b) { return st::op(SOp::And, {std::move(a), std::move(b)}); }
StaticPtr chan(StaticPtr roles, StaticPtr session) { return st::chan(std::move(roles), std::move(session)); }
StaticPtr chan(const std::string& roles, StaticPtr session) { return chan(var(roles), std::move(session)); }
StaticPtr int_of(StaticPtr i) { return st::base("int", {std::move(i)}); }
StaticPtr bool_of(StaticPtr b) { return st::base("bool", {std::move(b)}); }

using Q = std::vector<std::pair<std::string, SortPtr>>;

DcType session(Q q, StaticPtr guard, std::vector<StaticPtr> params, StaticPtr result) {
  q.emplace_back("U", sort_set());
  return DcType{std::move(q), std::move(guard), std::move(params), std::move(result)};
}

DcType arith(SOp op, StaticPtr guard = nullptr) {
  return DcType{{{"m", sort_int()}, {"n", sort_int()}},
                std::move(guard),
                {int_of(var("m")), int_of(var("n"))},
                int_of(st::op(op, {var("m"), var("n")}))};
}

DcType compare(SOp op) {
  return DcType{{{"m", sort_int()}, {"n", sort_int()}},
                nullptr,
                {int_of(var("m")), int_of(var("n"))},
                bool_of(st::op(op, {var("m"), var("n")}))};
}

DcType build(Api api) {
  auto set = sort_set();
  auto role = sort_int();
  auto stype = sort_stype();
  switch (api) {
    case Api::Fork:
      return session({{"rs1", set}, {"rs2", set}, {"pi", stype}},
                     st::op(SOp::Eq, {st::op(SOp::DUnion, {var("rs1"), var("rs2")}), var("U")}),
                     {st::fun(chan("rs1", var("pi")), st::unit(), true)}, chan("rs2", var("pi")));
    case Api::Cut:
      return session({{"rs1", set}, {"rs2", set}, {"pi", stype}},
                     st::op(SOp::Eq, {st::op(SOp::Union, {var("rs1"), var("rs2")}), var("U")}),
                     {chan("rs1", var("pi")), chan("rs2", var("pi"))},
                     chan(st::op(SOp::Inter, {var("rs1"), var("rs2")}), var("pi")));
    case Api::Elim:
      return session({{"pi", stype}}, nullptr, {chan(st::set({}), var("pi"))}, st::unit());
    case Api::Split:
      return session({{"rs1", set}, {"rs2", set}, {"pi", stype}},
                     st::op(SOp::Eq, {st::op(SOp::Inter, {var("rs1"), var("rs2")}), st::set({})}),
                     {chan(st::op(SOp::DUnion, {var("rs1"), var("rs2")}), var("pi")),
                      st::fun(chan("rs1", var("pi")), st::unit(), true)},
                     chan("rs2", var("pi")));
    case Api::BSend:
      return session({{"rs", set}, {"r", role}, {"pi", stype}, {"tau", sort_type()}}, in("r", "rs"),
                     {chan("rs", st::bmsg(var("r"), var("tau"), var("pi"))), var("tau")},
                     chan("rs", var("pi")));
    case Api::BRecv:
      return session({{"rs", set}, {"r", role}, {"pi", stype}, {"tau", sort_type()}}, notin("r", "rs"),
                     {chan("rs", st::bmsg(var("r"), var("tau"), var("pi")))},
                     st::pair(chan("rs", var("pi")), var("tau")));
    case Api::Send:
      return session({{"rs", set}, {"r1", role}, {"r2", role}, {"pi", stype}, {"tau", sort_vtype()}},
                     conj(in("r1", "rs"), notin("r2", "rs")),
                     {chan("rs", st::pmsg(var("r1"), var("r2"), var("tau"), var("pi"))), var("tau")},
                     chan("rs", var("pi")));
    case Api::Recv:
      return session({{"rs", set}, {"r1", role}, {"r2", role}, {"pi", stype}, {"tau", sort_vtype()}},
                     conj(notin("r1", "rs"), in("r2", "rs")),
                     {chan("rs", st::pmsg(var("r1"), var("r2"), var("tau"), var("pi")))},
                     st::pair(chan("rs", var("pi")), var("tau")));
    case Api::Skip:
      return session({{"rs", set}, {"r1", role}, {"r2", role}, {"pi", stype}, {"tau", sort_vtype()}},
                     st::op(SOp::Or, {conj(in("r1", "rs"), in("r2", "rs")),
                                      conj(notin("r1", "rs"), notin("r2", "rs"))}),
                     {chan("rs", st::pmsg(var("r1"), var("r2"), var("tau"), var("pi")))},
                     chan("rs", var("pi")));
    case Api::Close:
      return session({{"rs", set}, {"r", role}}, in("r", "rs"), {chan("rs", st::end(var("r")))},
                     st::unit());
    case Api::Wait:
      return session({{"rs", set}, {"r", role}}, notin("r", "rs"), {chan("rs", st::end(var("r")))},
                     st::unit());
    // The binder sort of `f` is whatever the protocol quantifies over; a
    // null sort stands for it and is filled in at the call site.
    case Api::Unify:
      return session({{"rs", set}, {"r", role}, {"f", nullptr}}, in("r", "rs"),
                     {chan("rs", st::quan(var("r"), var("f")))},
                     st::forall("a", nullptr, chan("rs", st::app(var("f"), var("a")))));
    case Api::Exify:
      return session({{"rs", set}, {"r", role}, {"f", nullptr}}, notin("r", "rs"),
                     {chan("rs", st::quan(var("r"), var("f")))},
                     st::exists("a", nullptr, chan("rs", st::app(var("f"), var("a")))));
    case Api::Offer:
      return session({{"rs", set}, {"r", role}, {"pi1", stype}, {"pi2", stype}, {"b", sort_bool()}},
                     in("r", "rs"),
                     {chan("rs", st::branch(var("r"), var("pi1"), var("pi2"))), bool_of(var("b"))},
                     chan("rs", st::op(SOp::Ite, {var("b"), var("pi1"), var("pi2")})));
    case Api::Choose:
      return session({{"rs", set}, {"r", role}, {"pi1", stype}, {"pi2", stype}}, notin("r", "rs"),
                     {chan("rs", st::branch(var("r"), var("pi1"), var("pi2")))},
                     st::sum(chan("rs", var("pi1")), chan("rs", var("pi2"))));
    case Api::Recurse:
      return session({{"rs", set}, {"f", Sort::arrow(stype, stype)}}, nullptr, {chan("rs", st::fix(var("f")))},
                     chan("rs", st::app(var("f"), st::fix(var("f")))));
    case Api::Add: return arith(SOp::Add);
    case Api::Sub: return arith(SOp::Sub);
    case Api::Mul: return arith(SOp::Mul);
    case Api::Div: return arith(SOp::Div, st::op(SOp::Neq, {var("n"), st::integer(0)}));
    case Api::Eq: return compare(SOp::Eq);
    case Api::Lt: return compare(SOp::Lt);
    case Api::Le: return compare(SOp::Le);
    case Api::Not:
      return DcType{{{"b", sort_bool()}}, nullptr, {bool_of(var("b"))},
                    bool_of(st::op(SOp::Not, {var("b")}))};
  }
  return {};
}

}  // namespace

const DcType& api_signature(Api api) {
  static const std::array<DcType, 24> table = [] {
    std::array<DcType, 24> t;
    for (int i = 0; i < 24; ++i) t[i] = build(static_cast<Api>(i));
    return t;
  }();
  return table.at(static_cast<std::size_t>(api));
}

StaticPtr instantiate_guard(Api api, const std::vector<StaticPtr>& statics) {
  const DcType& d = api_signature(api);
  if (!d.guard) return st::boolean(true);
  std::map<std::string, StaticPtr> env;
  for (std::size_t i = 0; i < d.quantified.size() && i < statics.size(); ++i)
    env[d.quantified[i].first] = statics[i];
  std::optional<std::vector<int>> universe;
  if (is_session_api(api) && !statics.empty() && statics.back()->kind == SKind::Set)
    universe = statics.back()->roles;
  return normalize_static(env, d.guard, universe);
}

}  // namespace mps
