#include <gtest/gtest.h>

#include <algorithm>

#include "mps/dfcheck.hpp"
#include "mps/driver.hpp"
#include "mps/parser.hpp"
#include "mps/pretty.hpp"
#include "mps/terms.hpp"
#include "mps/runtime.hpp"
#include "mps/typing.hpp"
#include "support.hpp"

using namespace mps;
using namespace mps::testing;

namespace mps {
void PrintTo(const Endpoint& e, std::ostream* os) { *os << "c" << e.channel << "^" << pretty_roles(e.roles); }
}  // namespace mps

namespace {

TermPtr E(Endpoint e) { return dy::endpoint(std::move(e)); }

const char* kSplit =
    "protocol p3 roles A = 0, B = 1, C = 2 universe {0, 1, 2} = end(A);\n"
    "def child = lam (c: chan({1, 2}, p3)) =>\n"
    "  let d = split(c, (lam (e: chan({2}, p3)) => wait(e) : chan({2}, p3) -o unit)) in wait(d);\n";

const char* kCut =
    "main =\n"
    "  let c1 = fork((lam (x: chan({0}, p3)) => close(x) : chan({0}, p3) -o unit)) in\n"
    "  let c2 = fork((lam (y: chan({1, 2}, p3)) => child(y) : chan({1, 2}, p3) -o unit)) in\n"
    "  let c = cut(c1, c2) in elim(c);\n";

struct Loaded {
  Program program;
  Pool pool;
};

Loaded load_text(const std::string& text) {
  Loaded l{parse_program(text), {}};
  l.pool = initial_pool(check_program(l.program).term);
  return l;
}

Loaded load(const std::string& file) { return load_text(read_text(corpus_path(file))); }

std::size_t count_kind(const Outcome& o, const std::string& kind) {
  return std::count_if(o.trace.begin(), o.trace.end(), [&](const TraceEvent& e) { return e.kind == kind; });
}

}  // namespace

TEST(Rho, Examples) {
  EXPECT_EQ(rho(*dy::pair(E({0, {0}}), E({0, {1}}))), (std::vector<Endpoint>{{0, {0}}, {0, {1}}}));
  EXPECT_TRUE(rho(*dy::unit()).empty());
  EXPECT_EQ(rho(*dy::lam("x", nullptr, E({0, {0, 1}}))), (std::vector<Endpoint>{{0, {0, 1}}}));
}

TEST(Consistent, Examples) {
  std::map<ChannelId, std::vector<int>> u{{0, {0, 1}}};
  EXPECT_TRUE(consistent({{0, {0}}, {0, {1}}}, u));
  EXPECT_FALSE(consistent({{0, {0}}, {0, {0, 1}}}, u));
  EXPECT_FALSE(consistent({{0, {0}}}, u));
  EXPECT_FALSE(consistent({{1, {0}}, {1, {1}}}, u));
  EXPECT_TRUE(consistent({}, {}));
}

TEST(StepThread, Beta) {
  auto r = step_thread(dy::app(dy::lam("x", nullptr, dy::var("x")), dy::unit()));
  ASSERT_TRUE(std::holds_alternative<TermPtr>(r));
  EXPECT_EQ(std::get<TermPtr>(r)->kind, TKind::Unit);
}

TEST(StepThread, GuardElimination) {
  auto r = step_thread(dy::guard_elim(dy::guard_intro(dy::integer(4))));
  ASSERT_TRUE(std::holds_alternative<TermPtr>(r));
  EXPECT_TRUE(term_equal(*std::get<TermPtr>(r), *dy::integer(4)));
}

TEST(StepThread, SessionCallsBlock) {
  auto r = step_thread(dy::call(Api::BSend, {E({0, {0}}), dy::str("x")}));
  ASSERT_TRUE(std::holds_alternative<Stuck>(r));
  const Stuck& s = std::get<Stuck>(r);
  EXPECT_EQ(s.kind, Stuck::Kind::Blocked);
  EXPECT_EQ(s.api, Api::BSend);
  EXPECT_EQ(s.endpoint, (Endpoint{0, {0}}));
}

TEST(StepThread, ValuesAndGenuineStuck) {
  auto v = step_thread(dy::pair(dy::unit(), dy::integer(1)));
  ASSERT_TRUE(std::holds_alternative<Stuck>(v));
  EXPECT_EQ(std::get<Stuck>(v).kind, Stuck::Kind::Value);
  auto g = step_thread(dy::app(dy::integer(1), dy::unit()));
  ASSERT_TRUE(std::holds_alternative<Stuck>(g));
  EXPECT_EQ(std::get<Stuck>(g).kind, Stuck::Kind::Genuine);
}

TEST(StepThread, Primitives) {
  auto r = step_thread(dy::call(Api::Add, {dy::integer(2), dy::integer(3)}));
  ASSERT_TRUE(std::holds_alternative<TermPtr>(r));
  EXPECT_TRUE(term_equal(*std::get<TermPtr>(r), *dy::integer(5)));
}

TEST(FindEnabled, SingleLift) {
  Pool pool = initial_pool(dy::app(dy::lam("x", nullptr, dy::var("x")), dy::unit()));
  auto enabled = find_enabled(pool, Program{});
  ASSERT_EQ(enabled.size(), 1u);
  EXPECT_EQ(enabled[0].kind, EnabledStep::Kind::Lift);
  EXPECT_EQ(enabled[0].directive(), "lift:0");
}

TEST(FindEnabled, MismatchedCohortIsNotEnabled) {
  PoolFile pf = parse_pool(
      "protocol ping roles A = 0, B = 1 universe {0, 1} = msg(A, int) :: end(A);\n"
      "channel c0 : ping;\nthread 0 = bsend(c0^{0}, 1);\nthread 1 = wait(c0^{1});\n");
  Pool pool = pool_from_file(pf);
  EXPECT_TRUE(find_enabled(pool, pf.program).empty());
  EXPECT_FALSE(match_cohort(pool, pf.program, 0));
}

TEST(Run, HelloRoundRobin) {
  Loaded l = load("hello.mps");
  RoundRobinScheduler rr;
  Outcome o = run(l.pool, l.program, rr);
  ASSERT_EQ(o.kind, Outcome::Kind::AllDone) << o.report;
  EXPECT_EQ(o.value->kind, TKind::Unit);
  EXPECT_EQ(count_kind(o, "bmsg"), 2u);
  EXPECT_EQ(count_kind(o, "end"), 1u);
  EXPECT_EQ(count_kind(o, "fork"), 1u);
  EXPECT_EQ(o.trace.size(), o.steps);
}

TEST(Run, ArrayOfThreeElements) {
  Loaded l = load("array.mps");
  RoundRobinScheduler rr;
  Outcome o = run(l.pool, l.program, rr);
  ASSERT_EQ(o.kind, Outcome::Kind::AllDone) << o.report;
  EXPECT_EQ(count_kind(o, "quan"), 1u);
  EXPECT_EQ(count_kind(o, "bmsg"), 4u);
  EXPECT_EQ(count_kind(o, "end"), 1u);
}

TEST(Run, SplitCutAndElim) {
  Loaded l = load_text(std::string(kSplit) + kCut);
  RoundRobinScheduler rr;
  RunOptions opts;
  opts.checked = true;
  Outcome o = run(l.pool, l.program, rr, opts);
  ASSERT_EQ(o.kind, Outcome::Kind::AllDone) << o.report;
  EXPECT_EQ(count_kind(o, "fork"), 2u);
  EXPECT_EQ(count_kind(o, "cut"), 1u);
  EXPECT_EQ(count_kind(o, "split"), 1u);
  EXPECT_EQ(count_kind(o, "elim"), 1u);
  auto cut = std::find_if(o.trace.begin(), o.trace.end(), [](const TraceEvent& e) { return e.kind == "cut"; });
  EXPECT_EQ(cut->sig_after.size(), 1u);
  EXPECT_TRUE(cut->sig_after.count(*cut->channel));
}

TEST(Run, CutKeepsTheIntersection) {
  Loaded l = load_text(std::string(kSplit) + kCut);
  RoundRobinScheduler rr;
  Pool pool = l.pool;
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto enabled = find_enabled(pool, l.program);
    ASSERT_FALSE(enabled.empty());
    const EnabledStep s = enabled[rr.pick(enabled)];
    apply_step(pool, l.program, s, i);
    if (s.kind == EnabledStep::Kind::Cut) break;
  }
  auto held = rho(*pool.threads.at(0));
  ASSERT_EQ(held.size(), 1u);
  EXPECT_TRUE(held[0].roles.empty());
  EXPECT_TRUE(consistent(pool));
}

TEST(Run, CrossedPoolDeadlocks) {
  PoolFile pf = parse_pool(read_text(corpus_path("crossed.mpool")));
  RoundRobinScheduler rr;
  Outcome o = run(pool_from_file(pf), pf.program, rr);
  EXPECT_EQ(o.kind, Outcome::Kind::Deadlock);
  EXPECT_EQ(o.steps, 0u);
  EXPECT_NE(o.report.find("c1^{0}"), std::string::npos) << o.report;
}

TEST(Run, StepLimit) {
  Loaded l = load("cloud.mps");
  RoundRobinScheduler rr;
  RunOptions opts;
  opts.max_steps = 5;
  Outcome o = run(l.pool, l.program, rr, opts);
  EXPECT_EQ(o.kind, Outcome::Kind::StepLimit);
  EXPECT_EQ(o.steps, 5u);
}

TEST(Run, CheckedCorpusRuns) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Loaded l = load(f);
    for (std::uint64_t seed : {7u, 8u}) {
      SeededRandomScheduler s(seed);
      RunOptions opts;
      opts.checked = true;
      Outcome o = run(l.pool, l.program, s, opts);
      EXPECT_EQ(o.kind, Outcome::Kind::AllDone) << f << ": " << o.report;
    }
  }
}

TEST(Run, ErasedProofsStillFinish) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Loaded l = load(f);
    RoundRobinScheduler rr;
    RunOptions opts;
    opts.checked = true;
    opts.runtime.erase_proofs = true;
    Outcome o = run(l.pool, l.program, rr, opts);
    EXPECT_EQ(o.kind, Outcome::Kind::AllDone) << f << ": " << o.report;
  }
}

TEST(Properties, ProgressAndSameAnswerUnderEverySchedule) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Loaded l = load(f);
    RoundRobinScheduler rr;
    Outcome base = run(l.pool, l.program, rr);
    ASSERT_EQ(base.kind, Outcome::Kind::AllDone) << f;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      SeededRandomScheduler s(seed);
      bool progress = true;
      Outcome o = run(l.pool, l.program, s, {}, [&](const Pool& p, std::uint64_t) {
        bool done = p.threads.size() == 1 && p.threads.count(0) && is_value(*p.threads.at(0));
        if (!done && find_enabled(p, l.program).empty()) progress = false;
      });
      EXPECT_TRUE(progress) << f << " seed " << seed;
      ASSERT_EQ(o.kind, Outcome::Kind::AllDone) << f << " seed " << seed << ": " << o.report;
      EXPECT_TRUE(term_equal(*o.value, *base.value)) << f << " seed " << seed;
    }
  }
}

TEST(Properties, EndpointsAreConservedByMessages) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Loaded l = load(f);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SeededRandomScheduler s(seed);
      Pool pool = l.pool;
      for (std::uint64_t i = 0; i < 10000; ++i) {
        auto enabled = find_enabled(pool, l.program);
        if (enabled.empty()) break;
        std::vector<Endpoint> was = pool_rho(pool);
        TraceEvent ev = apply_step(pool, l.program, enabled[s.pick(enabled)], i);
        std::vector<Endpoint> now = pool_rho(pool);
        std::sort(was.begin(), was.end());
        std::sort(now.begin(), now.end());
        if (ev.kind == "end") {
          std::erase_if(was, [&](const Endpoint& e) { return e.channel == *ev.channel; });
          EXPECT_EQ(now, was) << f << " step " << i;
        } else if (ev.kind == "split") {
          auto merged = [](const std::vector<Endpoint>& bag) {
            std::map<ChannelId, std::set<int>> m;
            for (const auto& e : bag) m[e.channel].insert(e.roles.begin(), e.roles.end());
            return m;
          };
          EXPECT_EQ(now.size(), was.size() + 1);
          EXPECT_EQ(merged(now), merged(was));
        } else if (ev.kind != "fork") {
          EXPECT_EQ(now, was) << f << " " << ev.kind << " step " << i;
        }
      }
    }
  }
}

TEST(Schedulers, SeededRunsAreReproducible) {
  Loaded l = load("cloud.mps");
  SeededRandomScheduler a(42), b(42);
  Outcome x = run(l.pool, l.program, a);
  Outcome y = run(l.pool, l.program, b);
  ASSERT_EQ(x.trace.size(), y.trace.size());
  for (std::size_t i = 0; i < x.trace.size(); ++i) {
    EXPECT_EQ(x.trace[i].kind, y.trace[i].kind);
    EXPECT_EQ(x.trace[i].threads, y.trace[i].threads);
    EXPECT_EQ(x.trace[i].channel, y.trace[i].channel);
  }
}

TEST(Schedulers, ScriptedFollowsDirectives) {
  Loaded l = load("hello.mps");
  RoundRobinScheduler rr;
  Outcome base = run(l.pool, l.program, rr);
  std::vector<std::string> script;
  Pool pool = l.pool;
  RoundRobinScheduler again;
  for (std::uint64_t i = 0; i < base.steps; ++i) {
    auto enabled = find_enabled(pool, l.program);
    const EnabledStep s = enabled[again.pick(enabled)];
    script.push_back(s.directive());
    apply_step(pool, l.program, s, i);
  }
  ScriptedScheduler scripted(script);
  Outcome o = run(l.pool, l.program, scripted);
  EXPECT_EQ(o.kind, Outcome::Kind::AllDone);
  EXPECT_EQ(o.steps, base.steps);

  ScriptedScheduler wrong({"sync:c9"});
  EXPECT_THROW(run(l.pool, l.program, wrong), std::exception);
}
