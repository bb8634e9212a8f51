#pragma once

// Operations on dynamic terms shared by the checker and the interpreter.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mps/syntax.hpp"

namespace mps {

/// Substitutes a closed value for a free variable.
TermPtr subst_term(const TermPtr& e, const std::string& x, const TermPtr& v);

/// Substitutes a static term for a free static variable everywhere in `e`:
/// annotations, type arguments and call-site static arguments.
TermPtr subst_static_in_term(const TermPtr& e, const std::string& a, const StaticPtr& s);

/// The multiset of endpoints occurring in `e`. Of the branches of a
/// conditional only the first is counted: well-typed branches hold the same
/// endpoints.
std::vector<Endpoint> rho(const Term& e);

std::set<std::string> free_term_vars(const Term& e);

/// Renames channels inside endpoint literals.
TermPtr rename_channels(const TermPtr& e, const std::map<ChannelId, ChannelId>& renaming);

}  // namespace mps
