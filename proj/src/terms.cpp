#include "mps/terms.hpp"

#include <algorithm>

#include "mps/statics.hpp"

namespace mps {

namespace {

// Names bound by `e` in kid `i`.
std::vector<std::string> bound_in(const Term& e, std::size_t i) {
  switch (e.kind) {
    case TKind::Lam: return {e.name};
    case TKind::Fix: return {e.name, e.name2};
    case TKind::LetPair:
      if (i == 1) return {e.name, e.name2};
      break;
    case TKind::LetAssert:
    case TKind::LetExists:
      if (i == 1) return {e.kind == TKind::LetExists ? e.name2 : e.name};
      break;
    case TKind::Case:
      if (i == 1) return {e.name};
      if (i == 2) return {e.name2};
      break;
    default: break;
  }
  return {};
}

}  // namespace

TermPtr subst_term(const TermPtr& e, const std::string& x, const TermPtr& v) {
  if (e->kind == TKind::Var) return e->name == x ? v : e;
  if (e->kids.empty()) return e;
  std::vector<TermPtr> kids;
  kids.reserve(e->kids.size());
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    auto b = bound_in(*e, i);
    if (std::find(b.begin(), b.end(), x) != b.end())
      kids.push_back(e->kids[i]);
    else
      kids.push_back(subst_term(e->kids[i], x, v));
  }
  return dy::with_kids(e, std::move(kids));
}

TermPtr subst_static_in_term(const TermPtr& e, const std::string& a, const StaticPtr& s) {
  std::vector<StaticPtr> statics;
  statics.reserve(e->statics.size());
  for (const auto& x : e->statics) statics.push_back(x ? subst(x, a, s) : x);
  TermPtr r = dy::with_statics(e, std::move(statics));
  bool shadows = (e->kind == TKind::ForallIntro && e->name == a);
  if (shadows || e->kids.empty()) return r;
  std::vector<TermPtr> kids;
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    bool inner_shadow = e->kind == TKind::LetExists && i == 1 && e->name == a;
    kids.push_back(inner_shadow ? e->kids[i] : subst_static_in_term(e->kids[i], a, s));
  }
  return dy::with_kids(r, std::move(kids));
}

namespace {
void collect_rho(const Term& e, std::vector<Endpoint>& out) {
  if (e.kind == TKind::Endpoint) {
    out.push_back(e.endpoint);
    return;
  }
  std::size_t n = e.kids.size();
  if (e.kind == TKind::If || e.kind == TKind::Case) n = 2;
  for (std::size_t i = 0; i < n; ++i) collect_rho(*e.kids[i], out);
}

void collect_free(const Term& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (e.kind == TKind::Var) {
    if (std::find(bound.begin(), bound.end(), e.name) == bound.end()) out.insert(e.name);
    return;
  }
  for (std::size_t i = 0; i < e.kids.size(); ++i) {
    auto b = bound_in(e, i);
    bound.insert(bound.end(), b.begin(), b.end());
    collect_free(*e.kids[i], bound, out);
    bound.resize(bound.size() - b.size());
  }
}
}  // namespace

std::vector<Endpoint> rho(const Term& e) {
  std::vector<Endpoint> out;
  collect_rho(e, out);
  return out;
}

std::set<std::string> free_term_vars(const Term& e) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(e, bound, out);
  return out;
}

TermPtr rename_channels(const TermPtr& e, const std::map<ChannelId, ChannelId>& renaming) {
  if (e->kind == TKind::Endpoint) {
    auto it = renaming.find(e->endpoint.channel);
    if (it == renaming.end()) return e;
    return dy::endpoint(Endpoint{it->second, e->endpoint.roles});
  }
  if (e->kids.empty()) return e;
  std::vector<TermPtr> kids;
  for (const auto& k : e->kids) kids.push_back(rename_channels(k, renaming));
  return dy::with_kids(e, std::move(kids));
}

}  // namespace mps
