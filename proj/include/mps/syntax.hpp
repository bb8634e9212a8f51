#pragma once

// Abstract syntax for the statics (sorts, static terms, session types and
// types) and the dynamics (expressions) of the session calculus.
//
// Types and session types are static terms: a session type is a static term
// of sort stype, a type one of sort type/vtype. Both trees are immutable and
// shared through shared_ptr<const ...>.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mps {

struct Span {
  int line = 0;
  int col = 0;
};

// ---------------------------------------------------------------- sorts

struct Sort;
using SortPtr = std::shared_ptr<const Sort>;

struct Sort {
  enum class Kind { Int, Bool, Set, SType, Type, VType, Arrow };
  Kind kind = Kind::Int;
  SortPtr dom;
  SortPtr cod;

  static SortPtr make(Kind k);
  static SortPtr arrow(SortPtr dom, SortPtr cod);
};

SortPtr sort_int();
SortPtr sort_bool();
SortPtr sort_set();
SortPtr sort_stype();
SortPtr sort_type();
SortPtr sort_vtype();

bool sort_equal(const Sort& a, const Sort& b);
std::string to_string(const Sort& s);

// --------------------------------------------------------- static terms

enum class SKind {
  Var,
  Int,
  Bool,
  Set,   // ground role set literal, roles sorted and unique
  Full,  // the ambient universe of the enclosing protocol
  Op,
  Lam,
  App,
  Proto,  // reference to a declared protocol; roles = its universe
  // session types
  End,
  BMsg,
  PMsg,
  Quan,
  Branch,
  Fix,
  // types
  Unit,
  Base,
  Chan,
  Pair,
  Fun,
  Sum,
  Guard,
  Assert,
  Forall,
  Exists,
};

enum class SOp {
  Union,
  DUnion,
  Inter,
  Minus,
  Compl,
  In,
  NotIn,
  Eq,
  Neq,
  Subset,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  And,
  Or,
  Not,
  Imp,
  Ite,
};

const char* op_name(SOp op);
int op_arity(SOp op);

struct Static;
using StaticPtr = std::shared_ptr<const Static>;

// Child layout by kind:
//   Op      kids = operands
//   Lam     name = binder, sort = binder sort, kids = [body]
//   App     kids = [fn, arg]
//   End     kids = [role]
//   BMsg    kids = [sender, payload, cont]
//   PMsg    kids = [sender, receiver, payload, cont]
//   Quan    kids = [role, binder]
//   Branch  kids = [role, left, right]
//   Fix     kids = [binder]
//   Base    name = int|bool|string, kids = indices
//   Chan    kids = [roles, session]; value = 1 when `roles` holds the universe
//   Pair    kids = [l, r];   Sum kids = [l, r]
//   Fun     kids = [dom, cod]; value = 1 for a linear arrow
//   Guard   kids = [prop, body]; Assert likewise
//   Forall  name, sort, kids = [body]; Exists likewise
struct Static {
  SKind kind = SKind::Unit;
  std::string name;
  std::int64_t value = 0;
  std::vector<int> roles;
  SOp op = SOp::Eq;
  SortPtr sort;
  std::vector<StaticPtr> kids;
  Span span;

  const StaticPtr& kid(std::size_t i) const { return kids.at(i); }
};

namespace st {
StaticPtr var(std::string name);
StaticPtr integer(std::int64_t v);
StaticPtr boolean(bool b);
StaticPtr set(std::vector<int> roles);
StaticPtr full();
StaticPtr op(SOp op, std::vector<StaticPtr> args);
StaticPtr lam(std::string name, SortPtr sort, StaticPtr body);
StaticPtr app(StaticPtr fn, StaticPtr arg);
StaticPtr proto(std::string name);
StaticPtr end(StaticPtr role);
StaticPtr bmsg(StaticPtr sender, StaticPtr payload, StaticPtr cont);
StaticPtr pmsg(StaticPtr sender, StaticPtr receiver, StaticPtr payload, StaticPtr cont);
StaticPtr quan(StaticPtr role, StaticPtr binder);
StaticPtr branch(StaticPtr role, StaticPtr left, StaticPtr right);
StaticPtr fix(StaticPtr binder);
StaticPtr unit();
StaticPtr base(std::string name, std::vector<StaticPtr> indices = {});
StaticPtr chan(StaticPtr roles, StaticPtr session,
               std::optional<std::vector<int>> universe = std::nullopt);
StaticPtr pair(StaticPtr l, StaticPtr r);
StaticPtr fun(StaticPtr dom, StaticPtr cod, bool linear);
StaticPtr sum(StaticPtr l, StaticPtr r);
StaticPtr guard(StaticPtr prop, StaticPtr body);
StaticPtr assertion(StaticPtr prop, StaticPtr body);
StaticPtr forall(std::string name, SortPtr sort, StaticPtr body);
StaticPtr exists(std::string name, SortPtr sort, StaticPtr body);

// Rebuilds `s` with new children, keeping every other field.
StaticPtr with_kids(const StaticPtr& s, std::vector<StaticPtr> kids);
}  // namespace st

std::optional<std::vector<int>> chan_universe(const Static& chan);

// ------------------------------------------------------------- dynamics

using ChannelId = int;

struct Endpoint {
  ChannelId channel = 0;
  std::vector<int> roles;
  auto operator<=>(const Endpoint&) const = default;
};

enum class TKind {
  Var,
  Unit,
  Int,
  Bool,
  Str,
  Endpoint,
  Lam,
  Fix,
  App,
  Pair,
  Fst,
  Snd,
  LetPair,
  If,
  GuardIntro,
  GuardElim,
  AssertIntro,
  LetAssert,
  ForallIntro,
  ForallElim,
  ExistsIntro,
  LetExists,
  Inl,
  Inr,
  Case,
  Annot,
  ApiCall,
};

enum class Api {
  Fork,
  Cut,
  Elim,
  Split,
  BSend,
  BRecv,
  Send,
  Recv,
  Skip,
  Close,
  Wait,
  Unify,
  Exify,
  Offer,
  Choose,
  Recurse,
  // integer and boolean primitives
  Add,
  Sub,
  Mul,
  Div,
  Eq,
  Lt,
  Le,
  Not,
};

const char* api_name(Api api);
std::optional<Api> api_from_name(const std::string& name);
bool is_session_api(Api api);
int api_arity(Api api);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Child layout by kind:
//   Lam          name = x, statics = [param type] or [], kids = [body]
//   Fix          name = g, name2 = x, statics = [param, result], kids = [body]
//   App/Pair     kids = [a, b]
//   LetPair      name = x1, name2 = x2, kids = [bound, body]
//   If           kids = [cond, then, else]
//   LetAssert    name = x, kids = [bound, body]
//   ForallIntro  name = a, sort, kids = [v]
//   ForallElim   kids = [e], statics = [arg or null]
//   ExistsIntro  kids = [e], statics = [witness or null, type or null]
//   LetExists    name = a (static), name2 = x, kids = [bound, body]
//   Inl/Inr      kids = [e], statics = [sum type or null]
//   Case         name = x, name2 = y, kids = [scrut, left, right]
//   Annot        kids = [e], statics = [type]
//   ApiCall      api, kids = args
struct Term {
  TKind kind = TKind::Unit;
  std::string name;
  std::string name2;
  std::int64_t value = 0;
  std::string text;
  Endpoint endpoint;
  Api api = Api::Fork;
  SortPtr sort;
  std::vector<TermPtr> kids;
  std::vector<StaticPtr> statics;
  Span span;

  const TermPtr& kid(std::size_t i) const { return kids.at(i); }
};

namespace dy {
TermPtr var(std::string name);
TermPtr unit();
TermPtr integer(std::int64_t v);
TermPtr boolean(bool b);
TermPtr str(std::string s);
TermPtr endpoint(Endpoint ep);
TermPtr lam(std::string x, StaticPtr param_type, TermPtr body);
TermPtr fix(std::string g, std::string x, StaticPtr param_type, StaticPtr result_type,
            TermPtr body);
TermPtr app(TermPtr f, TermPtr a);
TermPtr let(std::string x, TermPtr bound, TermPtr body);
TermPtr seq(TermPtr first, TermPtr second);
TermPtr pair(TermPtr a, TermPtr b);
TermPtr fst(TermPtr e);
TermPtr snd(TermPtr e);
TermPtr let_pair(std::string x1, std::string x2, TermPtr bound, TermPtr body);
TermPtr if_(TermPtr c, TermPtr t, TermPtr e);
TermPtr guard_intro(TermPtr v);
TermPtr guard_elim(TermPtr e);
TermPtr assert_intro(TermPtr e);
TermPtr let_assert(std::string x, TermPtr bound, TermPtr body);
TermPtr forall_intro(std::string a, SortPtr sort, TermPtr v);
TermPtr forall_elim(TermPtr e, StaticPtr arg);
TermPtr exists_intro(TermPtr e, StaticPtr witness, StaticPtr type = nullptr);
TermPtr let_exists(std::string a, std::string x, TermPtr bound, TermPtr body);
TermPtr inl(TermPtr e, StaticPtr type = nullptr);
TermPtr inr(TermPtr e, StaticPtr type = nullptr);
TermPtr case_(TermPtr scrut, std::string x, TermPtr left, std::string y, TermPtr right);
TermPtr annot(TermPtr e, StaticPtr type);
TermPtr call(Api api, std::vector<TermPtr> args);

TermPtr with_kids(const TermPtr& t, std::vector<TermPtr> kids);
TermPtr with_statics(const TermPtr& t, std::vector<StaticPtr> statics);
}  // namespace dy

bool is_value(const Term& t);

// -------------------------------------------------------------- programs

struct ProtocolDecl {
  std::string name;
  std::vector<std::pair<std::string, SortPtr>> params;
  std::vector<std::pair<std::string, int>> roles;
  std::vector<int> universe;
  StaticPtr def;
  Span span;
};

struct TermDef {
  std::string name;
  TermPtr body;
  Span span;
};

struct Program {
  std::vector<ProtocolDecl> protocols;
  std::vector<TermDef> defs;
  TermPtr main;
  std::map<std::string, int> role_aliases;

  const ProtocolDecl* find_protocol(const std::string& name) const;
  // Universe covering every declared protocol; used for set variables whose
  // protocol is not known.
  std::vector<int> global_universe() const;
};

}  // namespace mps
