#pragma once

// Deadlock-freeness analysis over abstract collections of endpoint sets.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mps/runtime.hpp"
#include "mps/syntax.hpp"

namespace mps {

using EndpointSet = std::set<Endpoint>;

struct Collection {
  std::vector<EndpointSet> sets;
  std::map<ChannelId, std::vector<int>> universes;
};

/// One set per thread: the endpoints it holds.
Collection abstract_pool(const Pool& pool);

/// The channels with at least one endpoint in the collection.
std::set<ChannelId> channels(const Collection& m);
std::size_t endpoint_count(const Collection& m);

/// Pairwise disjoint sets, and every channel either fully present (its
/// endpoints partition its universe) or absent.
bool well_formed(const Collection& m);

/// Merges the sets holding c's endpoints and removes those endpoints.
/// Nothing when c is absent or two of its endpoints share a set.
std::optional<Collection> df_step(const Collection& m, ChannelId c);

bool df_normal(const Collection& m);

/// Exhaustive search over all reduction orders, memoized on a canonical
/// relabeling.
bool df_reducible(const Collection& m);

/// Same verdict via acyclicity of the set/channel incidence graph.
bool df_reducible_fast(const Collection& m);

/// |M| - (|endpoints| - |channels| + 1), counting non-empty sets only.
long relaxed_slack(const Collection& m);
bool relaxed(const Collection& m);

struct MatchReport {
  ChannelId channel = 0;
  std::vector<int> threads;
  std::string rule;
};

/// A channel whose whole cohort is blocked on matching calls.
std::optional<MatchReport> find_blocked_match(const Pool& pool, const Program& program,
                                              const RuntimeOptions& opts = {});

std::string pretty(const Collection& m);

}  // namespace mps
