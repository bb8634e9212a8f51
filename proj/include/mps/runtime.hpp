#pragma once

// Call-by-value evaluation of threads and synchronous reduction of thread
// pools connected by session-typed channels.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mps/syntax.hpp"
#include "mps/typing.hpp"

namespace mps {

struct Pool {
  std::map<int, TermPtr> threads;
  Signature sig;
  ChannelId next_channel = 0;
  int next_thread = 1;
};

/// The pool {0: main} with no channels.
Pool initial_pool(const TermPtr& main);

std::vector<Endpoint> pool_rho(const Pool& pool);

/// Each channel's endpoints occur once and their role sets partition the
/// channel's universe; endpoints of unknown channels are inconsistent.
bool consistent(const std::vector<Endpoint>& bag, const std::map<ChannelId, std::vector<int>>& universes);
bool consistent(const Pool& pool);

struct Stuck {
  enum class Kind { Value, Blocked, Genuine };
  Kind kind = Kind::Value;
  std::optional<Api> api;            // the session API call the thread waits at
  std::optional<Endpoint> endpoint;  // its channel argument, when it has one
  std::string reason;
};

/// One local reduction step, or why there is none. Session API calls are
/// not reduced here.
std::variant<TermPtr, Stuck> step_thread(const TermPtr& e);

struct EnabledStep {
  enum class Kind { Lift, Fork, Cut, Elim, Split, Gc, Sync };
  Kind kind = Kind::Lift;
  int thread = 0;                    // acting thread (first cohort member for Sync)
  std::optional<ChannelId> channel;  // Sync
  std::vector<int> threads;          // Sync: cohort threads, ordered
  std::string rule;                  // Sync: bmsg, msg, end, quan, branch, recurse; local proofs: skip...

  std::string directive() const;  // "lift:0", "fork:2", "sync:c1", ...
};

struct RuntimeOptions {
  /// Skip and recurse reduce locally in one thread instead of synchronizing.
  bool erase_proofs = false;
};

/// Enabled steps in a fixed order: per thread in id order its local or
/// single-thread pool step, then collection of finished threads, then
/// channel synchronizations in channel order.
std::vector<EnabledStep> find_enabled(const Pool& pool, const Program& program, const RuntimeOptions& opts = {});

/// The synchronization of channel `c` if its whole cohort is blocked on
/// matching calls.
std::optional<EnabledStep> match_cohort(const Pool& pool, const Program& program, ChannelId c,
                                        const RuntimeOptions& opts = {});

struct TraceEvent {
  std::uint64_t step = 0;
  std::string kind;  // lift fork cut elim split bmsg msg end quan branch recurse skip gc
  std::optional<ChannelId> channel;
  std::vector<int> threads;
  std::string payload_type;
  std::map<ChannelId, std::string> sig_before;
  std::map<ChannelId, std::string> sig_after;
};

/// Applies one enabled step. Throws std::runtime_error when a guard of an
/// executed call is false under its runtime instantiation.
TraceEvent apply_step(Pool& pool, const Program& program, const EnabledStep& step, std::uint64_t step_no,
                      const RuntimeOptions& opts = {});

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  /// Index into `enabled` (never empty).
  virtual std::size_t pick(const std::vector<EnabledStep>& enabled) = 0;
};

class RoundRobinScheduler : public Scheduler {
 public:
  std::size_t pick(const std::vector<EnabledStep>& enabled) override;

 private:
  int next_ = 0;
};

class SeededRandomScheduler : public Scheduler {
 public:
  explicit SeededRandomScheduler(std::uint64_t seed) : rng_(seed) {}
  std::size_t pick(const std::vector<EnabledStep>& enabled) override;

 private:
  std::mt19937_64 rng_;
};

/// Follows a list of directives; throws when one names no enabled step.
class ScriptedScheduler : public Scheduler {
 public:
  explicit ScriptedScheduler(std::vector<std::string> script) : script_(std::move(script)) {}
  std::size_t pick(const std::vector<EnabledStep>& enabled) override;

 private:
  std::vector<std::string> script_;
  std::size_t pos_ = 0;
};

struct RunOptions {
  std::uint64_t max_steps = 100000;
  /// After every step: consistency, pool typing, df-reducibility, progress
  /// and the blocked-cohort match.
  bool checked = false;
  RuntimeOptions runtime;
  CheckOptions check;
};

struct Outcome {
  enum class Kind { AllDone, Deadlock, StepLimit, InvariantViolation };
  Kind kind = Kind::AllDone;
  TermPtr value;          // AllDone
  std::string report;     // Deadlock / InvariantViolation
  std::uint64_t steps = 0;
  std::vector<TraceEvent> trace;
};

std::string to_string(Outcome::Kind k);

/// Runs a pool to completion. `observe` is called on the initial pool and
/// after every step.
Outcome run(Pool pool, const Program& program, Scheduler& scheduler, const RunOptions& opts = {},
            const std::function<void(const Pool&, std::uint64_t)>& observe = {});

}  // namespace mps
