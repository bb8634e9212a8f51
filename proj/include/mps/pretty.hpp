#pragma once

#include <map>
#include <string>

#include "mps/syntax.hpp"

namespace mps {

/// Optional symbolic names for roles, used in role positions only.
using RoleNames = std::map<int, std::string>;

std::string pretty(const Static& s, const RoleNames* names = nullptr);
std::string pretty(const Term& t);
std::string pretty(const Endpoint& ep);
std::string pretty_roles(const std::vector<int>& roles);
std::string pretty(const Program& p);

inline std::string pretty(const StaticPtr& s, const RoleNames* names = nullptr) {
  return s ? pretty(*s, names) : std::string("_");
}
inline std::string pretty(const TermPtr& t) { return t ? pretty(*t) : std::string("_"); }

}  // namespace mps
