#include "mps/syntax.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

namespace mps {

SortPtr Sort::make(Kind k) {
  auto s = std::make_shared<Sort>();
  s->kind = k;
  return s;
}

SortPtr Sort::arrow(SortPtr dom, SortPtr cod) {
  auto s = std::make_shared<Sort>();
  s->kind = Kind::Arrow;
  s->dom = std::move(dom);
  s->cod = std::move(cod);
  return s;
}

SortPtr sort_int() {
  static const SortPtr s = Sort::make(Sort::Kind::Int);
  return s;
}
SortPtr sort_bool() {
  static const SortPtr s = Sort::make(Sort::Kind::Bool);
  return s;
}
SortPtr sort_set() {
  static const SortPtr s = Sort::make(Sort::Kind::Set);
  return s;
}
SortPtr sort_stype() {
  static const SortPtr s = Sort::make(Sort::Kind::SType);
  return s;
}
SortPtr sort_type() {
  static const SortPtr s = Sort::make(Sort::Kind::Type);
  return s;
}
SortPtr sort_vtype() {
  static const SortPtr s = Sort::make(Sort::Kind::VType);
  return s;
}

bool sort_equal(const Sort& a, const Sort& b) {
  if (a.kind != b.kind) return false;
  if (a.kind != Sort::Kind::Arrow) return true;
  return sort_equal(*a.dom, *b.dom) && sort_equal(*a.cod, *b.cod);
}

std::string to_string(const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::Int: return "int";
    case Sort::Kind::Bool: return "bool";
    case Sort::Kind::Set: return "set";
    case Sort::Kind::SType: return "stype";
    case Sort::Kind::Type: return "type";
    case Sort::Kind::VType: return "vtype";
    case Sort::Kind::Arrow: {
      std::string d = to_string(*s.dom);
      if (s.dom->kind == Sort::Kind::Arrow) d = "(" + d + ")";
      return d + " -> " + to_string(*s.cod);
    }
  }
  return "?";
}

const char* op_name(SOp op) {
  switch (op) {
    case SOp::Union: return "union";
    case SOp::DUnion: return "dunion";
    case SOp::Inter: return "inter";
    case SOp::Minus: return "minus";
    case SOp::Compl: return "compl";
    case SOp::In: return "in";
    case SOp::NotIn: return "notin";
    case SOp::Eq: return "==";
    case SOp::Neq: return "!=";
    case SOp::Subset: return "subset";
    case SOp::Lt: return "<";
    case SOp::Le: return "<=";
    case SOp::Gt: return ">";
    case SOp::Ge: return ">=";
    case SOp::Add: return "+";
    case SOp::Sub: return "-";
    case SOp::Mul: return "*";
    case SOp::Div: return "/";
    case SOp::Neg: return "neg";
    case SOp::And: return "&&";
    case SOp::Or: return "||";
    case SOp::Not: return "!";
    case SOp::Imp: return "==>";
    case SOp::Ite: return "ite";
  }
  return "?";
}

int op_arity(SOp op) {
  switch (op) {
    case SOp::Compl:
    case SOp::Neg:
    case SOp::Not: return 1;
    case SOp::Ite: return 3;
    default: return 2;
  }
}

namespace st {
namespace {
std::shared_ptr<Static> node(SKind k, std::vector<StaticPtr> kids = {}) {
  auto s = std::make_shared<Static>();
  s->kind = k;
  s->kids = std::move(kids);
  return s;
}
}  // namespace

StaticPtr var(std::string name) {
  auto s = node(SKind::Var);
  s->name = std::move(name);
  return s;
}
StaticPtr integer(std::int64_t v) {
  auto s = node(SKind::Int);
  s->value = v;
  return s;
}
StaticPtr boolean(bool b) {
  auto s = node(SKind::Bool);
  s->value = b ? 1 : 0;
  return s;
}
StaticPtr set(std::vector<int> roles) {
  std::sort(roles.begin(), roles.end());
  roles.erase(std::unique(roles.begin(), roles.end()), roles.end());
  auto s = node(SKind::Set);
  s->roles = std::move(roles);
  return s;
}
StaticPtr full() { return node(SKind::Full); }
StaticPtr op(SOp o, std::vector<StaticPtr> args) {
  auto s = node(SKind::Op, std::move(args));
  s->op = o;
  return s;
}
StaticPtr lam(std::string name, SortPtr sort, StaticPtr body) {
  auto s = node(SKind::Lam, {std::move(body)});
  s->name = std::move(name);
  s->sort = std::move(sort);
  return s;
}
StaticPtr app(StaticPtr fn, StaticPtr arg) {
  return node(SKind::App, {std::move(fn), std::move(arg)});
}
StaticPtr proto(std::string name) {
  auto s = node(SKind::Proto);
  s->name = std::move(name);
  return s;
}
StaticPtr end(StaticPtr role) { return node(SKind::End, {std::move(role)}); }
StaticPtr bmsg(StaticPtr sender, StaticPtr payload, StaticPtr cont) {
  return node(SKind::BMsg, {std::move(sender), std::move(payload), std::move(cont)});
}
StaticPtr pmsg(StaticPtr sender, StaticPtr receiver, StaticPtr payload, StaticPtr cont) {
  return node(SKind::PMsg,
              {std::move(sender), std::move(receiver), std::move(payload), std::move(cont)});
}
StaticPtr quan(StaticPtr role, StaticPtr binder) {
  return node(SKind::Quan, {std::move(role), std::move(binder)});
}
StaticPtr branch(StaticPtr role, StaticPtr left, StaticPtr right) {
  return node(SKind::Branch, {std::move(role), std::move(left), std::move(right)});
}
StaticPtr fix(StaticPtr binder) { return node(SKind::Fix, {std::move(binder)}); }
StaticPtr unit() { return node(SKind::Unit); }
StaticPtr base(std::string name, std::vector<StaticPtr> indices) {
  auto s = node(SKind::Base, std::move(indices));
  s->name = std::move(name);
  return s;
}
StaticPtr chan(StaticPtr roles, StaticPtr session, std::optional<std::vector<int>> universe) {
  auto s = node(SKind::Chan, {std::move(roles), std::move(session)});
  if (universe) {
    s->value = 1;
    s->roles = std::move(*universe);
  }
  return s;
}
StaticPtr pair(StaticPtr l, StaticPtr r) { return node(SKind::Pair, {std::move(l), std::move(r)}); }
StaticPtr fun(StaticPtr dom, StaticPtr cod, bool linear) {
  auto s = node(SKind::Fun, {std::move(dom), std::move(cod)});
  s->value = linear ? 1 : 0;
  return s;
}
StaticPtr sum(StaticPtr l, StaticPtr r) { return node(SKind::Sum, {std::move(l), std::move(r)}); }
StaticPtr guard(StaticPtr prop, StaticPtr body) {
  return node(SKind::Guard, {std::move(prop), std::move(body)});
}
StaticPtr assertion(StaticPtr prop, StaticPtr body) {
  return node(SKind::Assert, {std::move(prop), std::move(body)});
}
StaticPtr forall(std::string name, SortPtr sort, StaticPtr body) {
  auto s = node(SKind::Forall, {std::move(body)});
  s->name = std::move(name);
  s->sort = std::move(sort);
  return s;
}
StaticPtr exists(std::string name, SortPtr sort, StaticPtr body) {
  auto s = node(SKind::Exists, {std::move(body)});
  s->name = std::move(name);
  s->sort = std::move(sort);
  return s;
}

StaticPtr with_kids(const StaticPtr& s, std::vector<StaticPtr> kids) {
  if (kids == s->kids) return s;
  auto n = std::make_shared<Static>(*s);
  n->kids = std::move(kids);
  return n;
}
}  // namespace st

std::optional<std::vector<int>> chan_universe(const Static& chan) {
  if (chan.kind != SKind::Chan || chan.value == 0) return std::nullopt;
  return chan.roles;
}

// ------------------------------------------------------------- dynamics

namespace {
struct ApiEntry {
  Api api;
  const char* name;
  int arity;
  bool session;
};

constexpr std::array<ApiEntry, 24> kApis = {{
    {Api::Fork, "fork", 1, true},     {Api::Cut, "cut", 2, true},
    {Api::Elim, "elim", 1, true},     {Api::Split, "split", 2, true},
    {Api::BSend, "bsend", 2, true},   {Api::BRecv, "brecv", 1, true},
    {Api::Send, "send", 2, true},     {Api::Recv, "recv", 1, true},
    {Api::Skip, "skip", 1, true},     {Api::Close, "close", 1, true},
    {Api::Wait, "wait", 1, true},     {Api::Unify, "unify", 1, true},
    {Api::Exify, "exify", 1, true},   {Api::Offer, "offer", 2, true},
    {Api::Choose, "choose", 1, true}, {Api::Recurse, "recurse", 1, true},
    {Api::Add, "add", 2, false},      {Api::Sub, "sub", 2, false},
    {Api::Mul, "mul", 2, false},      {Api::Div, "div", 2, false},
    {Api::Eq, "eq", 2, false},        {Api::Lt, "lt", 2, false},
    {Api::Le, "le", 2, false},        {Api::Not, "not", 1, false},
}};

const ApiEntry& entry(Api api) {
  for (const auto& e : kApis)
    if (e.api == api) return e;
  throw std::logic_error("unknown api");
}
}  // namespace

const char* api_name(Api api) { return entry(api).name; }
bool is_session_api(Api api) { return entry(api).session; }
int api_arity(Api api) { return entry(api).arity; }

std::optional<Api> api_from_name(const std::string& name) {
  for (const auto& e : kApis)
    if (name == e.name) return e.api;
  return std::nullopt;
}

namespace dy {
namespace {
std::shared_ptr<Term> node(TKind k, std::vector<TermPtr> kids = {}) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->kids = std::move(kids);
  return t;
}
}  // namespace

TermPtr var(std::string name) {
  auto t = node(TKind::Var);
  t->name = std::move(name);
  return t;
}
TermPtr unit() { return node(TKind::Unit); }
TermPtr integer(std::int64_t v) {
  auto t = node(TKind::Int);
  t->value = v;
  return t;
}
TermPtr boolean(bool b) {
  auto t = node(TKind::Bool);
  t->value = b ? 1 : 0;
  return t;
}
TermPtr str(std::string s) {
  auto t = node(TKind::Str);
  t->text = std::move(s);
  return t;
}
TermPtr endpoint(Endpoint ep) {
  auto t = node(TKind::Endpoint);
  t->endpoint = std::move(ep);
  return t;
}
TermPtr lam(std::string x, StaticPtr param_type, TermPtr body) {
  auto t = node(TKind::Lam, {std::move(body)});
  t->name = std::move(x);
  if (param_type) t->statics = {std::move(param_type)};
  return t;
}
TermPtr fix(std::string g, std::string x, StaticPtr param_type, StaticPtr result_type,
            TermPtr body) {
  auto t = node(TKind::Fix, {std::move(body)});
  t->name = std::move(g);
  t->name2 = std::move(x);
  t->statics = {std::move(param_type), std::move(result_type)};
  return t;
}
TermPtr app(TermPtr f, TermPtr a) { return node(TKind::App, {std::move(f), std::move(a)}); }
TermPtr let(std::string x, TermPtr bound, TermPtr body) {
  return app(lam(std::move(x), nullptr, std::move(body)), std::move(bound));
}
TermPtr seq(TermPtr first, TermPtr second) { return snd(pair(std::move(first), std::move(second))); }
TermPtr pair(TermPtr a, TermPtr b) { return node(TKind::Pair, {std::move(a), std::move(b)}); }
TermPtr fst(TermPtr e) { return node(TKind::Fst, {std::move(e)}); }
TermPtr snd(TermPtr e) { return node(TKind::Snd, {std::move(e)}); }
TermPtr let_pair(std::string x1, std::string x2, TermPtr bound, TermPtr body) {
  auto t = node(TKind::LetPair, {std::move(bound), std::move(body)});
  t->name = std::move(x1);
  t->name2 = std::move(x2);
  return t;
}
TermPtr if_(TermPtr c, TermPtr th, TermPtr el) {
  return node(TKind::If, {std::move(c), std::move(th), std::move(el)});
}
TermPtr guard_intro(TermPtr v) { return node(TKind::GuardIntro, {std::move(v)}); }
TermPtr guard_elim(TermPtr e) { return node(TKind::GuardElim, {std::move(e)}); }
TermPtr assert_intro(TermPtr e) { return node(TKind::AssertIntro, {std::move(e)}); }
TermPtr let_assert(std::string x, TermPtr bound, TermPtr body) {
  auto t = node(TKind::LetAssert, {std::move(bound), std::move(body)});
  t->name = std::move(x);
  return t;
}
TermPtr forall_intro(std::string a, SortPtr sort, TermPtr v) {
  auto t = node(TKind::ForallIntro, {std::move(v)});
  t->name = std::move(a);
  t->sort = std::move(sort);
  return t;
}
TermPtr forall_elim(TermPtr e, StaticPtr arg) {
  auto t = node(TKind::ForallElim, {std::move(e)});
  t->statics = {std::move(arg)};
  return t;
}
TermPtr exists_intro(TermPtr e, StaticPtr witness, StaticPtr type) {
  auto t = node(TKind::ExistsIntro, {std::move(e)});
  t->statics = {std::move(witness), std::move(type)};
  return t;
}
TermPtr let_exists(std::string a, std::string x, TermPtr bound, TermPtr body) {
  auto t = node(TKind::LetExists, {std::move(bound), std::move(body)});
  t->name = std::move(a);
  t->name2 = std::move(x);
  return t;
}
TermPtr inl(TermPtr e, StaticPtr type) {
  auto t = node(TKind::Inl, {std::move(e)});
  t->statics = {std::move(type)};
  return t;
}
TermPtr inr(TermPtr e, StaticPtr type) {
  auto t = node(TKind::Inr, {std::move(e)});
  t->statics = {std::move(type)};
  return t;
}
TermPtr case_(TermPtr scrut, std::string x, TermPtr left, std::string y, TermPtr right) {
  auto t = node(TKind::Case, {std::move(scrut), std::move(left), std::move(right)});
  t->name = std::move(x);
  t->name2 = std::move(y);
  return t;
}
TermPtr annot(TermPtr e, StaticPtr type) {
  auto t = node(TKind::Annot, {std::move(e)});
  t->statics = {std::move(type)};
  return t;
}
TermPtr call(Api api, std::vector<TermPtr> args) {
  auto t = node(TKind::ApiCall, std::move(args));
  t->api = api;
  return t;
}

TermPtr with_kids(const TermPtr& t, std::vector<TermPtr> kids) {
  if (kids == t->kids) return t;
  auto n = std::make_shared<Term>(*t);
  n->kids = std::move(kids);
  return n;
}
TermPtr with_statics(const TermPtr& t, std::vector<StaticPtr> statics) {
  if (statics == t->statics) return t;
  auto n = std::make_shared<Term>(*t);
  n->statics = std::move(statics);
  return n;
}
}  // namespace dy

bool is_value(const Term& t) {
  switch (t.kind) {
    case TKind::Var:
    case TKind::Unit:
    case TKind::Int:
    case TKind::Bool:
    case TKind::Str:
    case TKind::Endpoint:
    case TKind::Lam:
    case TKind::Fix:
    case TKind::ForallIntro: return true;
    case TKind::Pair: return is_value(*t.kids[0]) && is_value(*t.kids[1]);
    case TKind::GuardIntro:
    case TKind::AssertIntro:
    case TKind::ExistsIntro:
    case TKind::Inl:
    case TKind::Inr: return is_value(*t.kids[0]);
    default: return false;
  }
}

const ProtocolDecl* Program::find_protocol(const std::string& name) const {
  for (const auto& p : protocols)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<int> Program::global_universe() const {
  std::set<int> all;
  for (const auto& p : protocols) all.insert(p.universe.begin(), p.universe.end());
  return {all.begin(), all.end()};
}

}  // namespace mps
