#include "mps/dfcheck.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "mps/pretty.hpp"
#include "mps/statics.hpp"
#include "mps/terms.hpp"

namespace mps {

Collection abstract_pool(const Pool& pool) {
  Collection m;
  for (const auto& [c, s] : pool.sig) m.universes[c] = s.universe;
  for (const auto& [t, e] : pool.threads) {
    auto r = rho(*e);
    m.sets.emplace_back(r.begin(), r.end());
  }
  return m;
}

std::set<ChannelId> channels(const Collection& m) {
  std::set<ChannelId> out;
  for (const auto& s : m.sets)
    for (const auto& ep : s) out.insert(ep.channel);
  return out;
}

std::size_t endpoint_count(const Collection& m) {
  std::size_t n = 0;
  for (const auto& s : m.sets) n += s.size();
  return n;
}

bool well_formed(const Collection& m) {
  std::vector<Endpoint> bag;
  for (const auto& s : m.sets) bag.insert(bag.end(), s.begin(), s.end());
  std::map<ChannelId, std::vector<int>> present;
  for (ChannelId c : channels(m)) {
    auto it = m.universes.find(c);
    if (it == m.universes.end()) return false;
    present[c] = it->second;
  }
  return consistent(bag, present);
}

std::optional<Collection> df_step(const Collection& m, ChannelId c) {
  Collection out;
  out.universes = m.universes;
  EndpointSet merged;
  bool found = false;
  for (const auto& s : m.sets) {
    auto n = std::count_if(s.begin(), s.end(), [&](const Endpoint& ep) { return ep.channel == c; });
    if (n == 0) {
      out.sets.push_back(s);
      continue;
    }
    if (n > 1) return std::nullopt;
    found = true;
    for (const auto& ep : s)
      if (ep.channel != c) merged.insert(ep);
  }
  if (!found) return std::nullopt;
  out.sets.push_back(std::move(merged));
  return out;
}

bool df_normal(const Collection& m) {
  for (ChannelId c : channels(m))
    if (df_step(m, c)) return false;
  return true;
}

namespace {

bool all_empty(const Collection& m) {
  return std::all_of(m.sets.begin(), m.sets.end(), [](const EndpointSet& s) { return s.empty(); });
}

// Drops empty sets and renames channels by order of first occurrence after
// sorting, so isomorphic collections usually share a key.
std::string canonical_key(const Collection& m) {
  std::vector<std::vector<Endpoint>> sets;
  for (const auto& s : m.sets)
    if (!s.empty()) sets.emplace_back(s.begin(), s.end());
  auto shape = [](const std::vector<Endpoint>& s) {
    std::vector<std::vector<int>> out;
    for (const auto& ep : s) out.push_back(ep.roles);
    std::sort(out.begin(), out.end());
    return std::make_pair(s.size(), out);
  };
  std::sort(sets.begin(), sets.end(), [&](const auto& a, const auto& b) {
    auto sa = shape(a), sb = shape(b);
    return sa != sb ? sa < sb : a < b;
  });
  std::map<ChannelId, int> rename;
  for (const auto& s : sets)
    for (const auto& ep : s) rename.emplace(ep.channel, static_cast<int>(rename.size()));
  std::vector<std::vector<Endpoint>> relabeled;
  for (const auto& s : sets) {
    std::vector<Endpoint> r;
    for (const auto& ep : s) r.push_back(Endpoint{rename[ep.channel], ep.roles});
    std::sort(r.begin(), r.end());
    relabeled.push_back(std::move(r));
  }
  std::sort(relabeled.begin(), relabeled.end());
  std::string key;
  for (const auto& s : relabeled) {
    key += '[';
    for (const auto& ep : s) key += pretty(ep) + ' ';
    key += ']';
  }
  return key;
}

bool reducible(const Collection& m, std::unordered_map<std::string, bool>& memo) {
  if (all_empty(m)) return true;
  std::string key = canonical_key(m);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  bool any = false, ok = true;
  for (ChannelId c : channels(m)) {
    auto next = df_step(m, c);
    if (!next) continue;
    any = true;
    if (!reducible(*next, memo)) {
      ok = false;
      break;
    }
  }
  bool result = any && ok;
  memo[key] = result;
  return result;
}

}  // namespace

bool df_reducible(const Collection& m) {
  std::unordered_map<std::string, bool> memo;
  return reducible(m, memo);
}

bool df_reducible_fast(const Collection& m) {
  // Nodes: non-empty sets, then channels. An edge joins a set and each
  // channel it holds an endpoint of, once per endpoint.
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < m.sets.size(); ++i)
    if (!m.sets[i].empty()) live.push_back(i);
  auto chans = channels(m);
  std::map<ChannelId, std::size_t> chan_node;
  for (ChannelId c : chans) chan_node.emplace(c, live.size() + chan_node.size());
  std::vector<std::size_t> parent(live.size() + chans.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < live.size(); ++i)
    for (const auto& ep : m.sets[live[i]]) {
      std::size_t a = root(i), b = root(chan_node.at(ep.channel));
      if (a == b) return false;
      parent[a] = b;
    }
  return true;
}

long relaxed_slack(const Collection& m) {
  long sets = std::count_if(m.sets.begin(), m.sets.end(), [](const EndpointSet& s) { return !s.empty(); });
  return sets - (static_cast<long>(endpoint_count(m)) - static_cast<long>(channels(m).size()) + 1);
}

bool relaxed(const Collection& m) {
  bool none = std::all_of(m.sets.begin(), m.sets.end(), [](const EndpointSet& s) { return s.empty(); });
  return none || relaxed_slack(m) >= 0;
}

std::optional<MatchReport> find_blocked_match(const Pool& pool, const Program& program,
                                              const RuntimeOptions& opts) {
  for (const auto& [c, _] : pool.sig)
    if (auto s = match_cohort(pool, program, c, opts)) return MatchReport{c, s->threads, s->rule};
  return std::nullopt;
}

std::string pretty(const Collection& m) {
  std::string out = "{";
  for (std::size_t i = 0; i < m.sets.size(); ++i) {
    out += i ? ", {" : "{";
    bool first = true;
    for (const auto& ep : m.sets[i]) {
      out += (first ? "" : ", ") + pretty(ep);
      first = false;
    }
    out += "}";
  }
  return out + "}";
}

}  // namespace mps
