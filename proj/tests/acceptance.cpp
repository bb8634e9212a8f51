// Runs every acceptance criterion and prints one PASS/FAIL line for each.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mps/dfcheck.hpp"
#include "mps/driver.hpp"
#include "mps/parser.hpp"
#include "mps/runtime.hpp"
#include "mps/typing.hpp"
#include "support.hpp"

using namespace mps;
using namespace mps::testing;

namespace {

const char* const kCorpus[] = {"hello.mps", "array.mps", "cloud.mps"};
constexpr int kSeeds = 50;

struct Criterion {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

struct Program3 {
  std::string name;
  Program program;
  Pool pool;
};

std::vector<Program3> load_corpus(Criterion& c) {
  std::vector<Program3> out;
  for (const char* f : kCorpus) {
    try {
      Program p = parse_program(read_text(corpus_path(f)));
      Pool pool = initial_pool(check_program(p).term);
      out.push_back({f, p, pool});
    } catch (const std::exception& e) {
      c.fail(std::string(f) + " rejected: " + e.what());
    }
  }
  return out;
}

std::unique_ptr<Scheduler> scheduler(int run) {
  if (run == 0) return std::make_unique<RoundRobinScheduler>();
  return std::make_unique<SeededRandomScheduler>(static_cast<std::uint64_t>(run));
}

std::string rejection(const std::string& text) {
  try {
    check_program(parse_program(text));
  } catch (const ParseError& e) {
    return e.code;
  } catch (const StaticError& e) {
    return e.code;
  } catch (const TypeError& e) {
    return e.diag.code;
  }
  return "ok";
}

bool all_blocked_on_sessions(const Pool& pool) {
  bool blocked = false;
  for (const auto& [t, e] : pool.threads) {
    auto r = step_thread(e);
    if (!std::holds_alternative<Stuck>(r)) return false;
    const Stuck& s = std::get<Stuck>(r);
    if (s.kind == Stuck::Kind::Genuine) return false;
    if (s.kind == Stuck::Kind::Value) {
      if (t != 0) return false;  // collectable
      continue;
    }
    if (!s.api || *s.api == Api::Fork || *s.api == Api::Cut || *s.api == Api::Elim || *s.api == Api::Split)
      return false;
    blocked = true;
  }
  return blocked;
}

void report(int n, const std::string& title, const Criterion& c, int& failures) {
  std::printf("%s %2d %s%s%s\n", c.ok ? "PASS" : "FAIL", n, title.c_str(), c.detail.empty() ? "" : ": ",
              c.detail.c_str());
  if (!c.ok) ++failures;
}

}  // namespace

int main() {
  int failures = 0;

  // 1. Corpus acceptance under round-robin and seeded schedules.
  Criterion c1;
  std::vector<Program3> corpus = load_corpus(c1);
  {
    auto start = std::chrono::steady_clock::now();
    int runs = 0;
    for (const auto& p : corpus) {
      for (int run = 0; run <= kSeeds; ++run) {
        auto sched = scheduler(run);
        Outcome o = mps::run(p.pool, p.program, *sched);
        ++runs;
        if (o.kind != Outcome::Kind::AllDone)
          c1.fail(p.name + " run " + std::to_string(run) + ": " + to_string(o.kind) + " " + o.report);
      }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (corpus.size() != std::size(kCorpus)) c1.fail("corpus incomplete");
    if (secs >= 10.0) c1.fail("took " + std::to_string(secs) + " s");
    if (c1.ok) {
      std::ostringstream d;
      d << runs << " runs AllDone in " << secs << " s";
      c1.detail = d.str();
    }
  }
  report(1, "corpus typechecks and runs to AllDone (round-robin + 50 seeds)", c1, failures);

  // 2. Mutants are rejected with their expected diagnostic.
  Criterion c2;
  {
    auto files = mutant_files();
    int matched = 0;
    for (const auto& f : files) {
      std::string want = expected_code(f), got = rejection(read_text(f));
      if (got == want)
        ++matched;
      else
        c2.fail(f + ": expected " + want + ", got " + got);
    }
    if (matched < 12) c2.fail("only " + std::to_string(matched) + " mutants");
    if (c2.ok) c2.detail = std::to_string(matched) + "/" + std::to_string(files.size()) + " rejected as expected";
  }
  report(2, "mutated programs rejected with the expected code", c2, failures);

  // 3-5. Checked runs of the corpus with independent per-step checks.
  Criterion c3, c4, c5;
  {
    std::uint64_t snapshots = 0, blocked_states = 0;
    for (const auto& p : corpus) {
      for (int run = 0; run <= kSeeds; ++run) {
        auto sched = scheduler(run);
        RunOptions opts;
        opts.checked = true;
        std::string where = p.name + " run " + std::to_string(run);
        Outcome o = mps::run(p.pool, p.program, *sched, opts, [&](const Pool& pool, std::uint64_t step) {
          ++snapshots;
          std::string at = where + " step " + std::to_string(step);
          if (!consistent(pool)) c3.fail(at + ": inconsistent resources");
          try {
            typecheck_pool(p.program, pool.threads, pool.sig);
          } catch (const TypeError& e) {
            c3.fail(at + ": " + e.diag.code + " " + e.diag.message);
          }
          bool done = pool.threads.size() == 1 && pool.threads.count(0) && is_value(*pool.threads.at(0));
          if (!done && find_enabled(pool, p.program).empty()) c4.fail(at + ": no enabled step");
          if (all_blocked_on_sessions(pool)) {
            ++blocked_states;
            if (!find_blocked_match(pool, p.program)) c4.fail(at + ": blocked without a matching cohort");
          }
          if (!df_reducible(abstract_pool(pool))) c5.fail(at + ": not df-reducible");
        });
        if (o.kind == Outcome::Kind::InvariantViolation) c3.fail(where + ": " + o.report);
        else if (o.kind != Outcome::Kind::AllDone) c3.fail(where + ": " + to_string(o.kind));
      }
    }
    if (corpus.empty()) c3.fail("no corpus");
    if (c3.ok) c3.detail = std::to_string(snapshots) + " snapshots, no invariant violations";
    if (c4.ok) c4.detail = std::to_string(blocked_states) + " all-blocked states matched";
    if (c5.ok) c5.detail = std::to_string(snapshots) + " snapshots df-reducible";
  }
  report(3, "checked mode: consistency and pool typing after every step", c3, failures);
  report(4, "progress, and a matching cohort whenever all threads block", c4, failures);
  report(5, "abstract pool is df-reducible at every step", c5, failures);

  // 6-8. Random collections.
  Criterion c6, c7, c8;
  {
    Rng rng(2024);
    int relaxed_nonempty = 0, not_relaxed = 0, agree = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      Collection m = gen_collection(rng, 5, 6);
      bool slow = df_reducible(m);
      bool rel = relaxed(m);
      if (rel && endpoint_count(m) > 0) {
        ++relaxed_nonempty;
        if (df_normal(m)) c6.fail("relaxed but df-normal: " + pretty(m));
      }
      if (!rel) {
        ++not_relaxed;
        if (slow) c7.fail("not relaxed but df-reducible: " + pretty(m));
      }
      if (df_reducible_fast(m) == slow)
        ++agree;
      else
        c8.fail("verdicts differ on " + pretty(m));
    }
    if (c6.ok) c6.detail = std::to_string(relaxed_nonempty) + " relaxed non-empty instances all step";
    if (c7.ok) c7.detail = std::to_string(not_relaxed) + " non-relaxed instances all irreducible";
    if (c8.ok) c8.detail = std::to_string(agree) + "/" + std::to_string(n) + " agree";
  }
  report(6, "relaxed non-empty collections admit a df-step (10000 instances)", c6, failures);
  report(7, "non-relaxed collections are not df-reducible (10000 instances)", c7, failures);
  report(8, "hypergraph df-reducibility matches exhaustive search (10000 instances)", c8, failures);

  // 9. Solver against brute force.
  Criterion c9;
  {
    Rng rng(99);
    int valid = 0, invalid = 0;
    for (int i = 0; i < 5000; ++i) {
      Entailment e = gen_entailment(rng);
      OracleVerdict want = brute_force(e);
      Verdict got = entails(e.assumptions, e.goal);
      if (got.kind == Verdict::Kind::Unknown) {
        c9.fail("unknown: " + got.reason);
        continue;
      }
      if (got.valid() != want.valid) c9.fail("disagrees with enumeration on instance " + std::to_string(i));
      if (got.valid()) {
        ++valid;
        continue;
      }
      ++invalid;
      const auto& u = *e.assumptions.universe;
      bool holds = true;
      for (const auto& p : e.assumptions.props) holds = holds && oracle_holds(p, got.counterexample, u);
      if (!holds || oracle_holds(e.goal, got.counterexample, u))
        c9.fail("counterexample does not re-verify on instance " + std::to_string(i));
    }
    if (c9.ok) c9.detail = std::to_string(valid) + " valid, " + std::to_string(invalid) + " invalid, all re-verified";
  }
  report(9, "solver matches brute-force enumeration (5000 entailments)", c9, failures);

  // 10. The crossed two-channel fixture.
  Criterion c10;
  {
    try {
      PoolFile pf = parse_pool(read_text(corpus_path("crossed.mpool")));
      RoundRobinScheduler rr;
      Pool last;
      Outcome o = mps::run(pool_from_file(pf), pf.program, rr, {}, [&](const Pool& p, std::uint64_t) { last = p; });
      if (o.kind != Outcome::Kind::Deadlock) c10.fail("pool outcome " + to_string(o.kind));
      Collection m = abstract_pool(last);
      if (relaxed(m)) c10.fail("final snapshot is relaxed");
      std::string code = rejection(read_text(corpus_path("crossed-source.mps")));
      if (code == "ok") c10.fail("source version accepted");
      if (c10.ok)
        c10.detail = "Deadlock, slack " + std::to_string(relaxed_slack(m)) + ", source rejected with " + code;
    } catch (const std::exception& e) {
      c10.fail(e.what());
    }
  }
  report(10, "crossed pool deadlocks, is not relaxed, and its source is rejected", c10, failures);

  // 11. Byte-identical records for the same seed.
  Criterion c11;
  {
    DriverOptions opts;
    opts.format = Format::Records;
    opts.seed = 1234;
    std::size_t bytes = 0;
    for (const char* f : kCorpus) {
      for (auto cmd : {cmd_trace, cmd_run, cmd_analyze}) {
        std::ostringstream a, b, ea, eb;
        cmd(corpus_path(f), opts, a, ea);
        cmd(corpus_path(f), opts, b, eb);
        if (a.str().empty() || a.str() != b.str()) c11.fail(std::string(f) + ": outputs differ");
        bytes += a.str().size();
      }
    }
    if (c11.ok) c11.detail = std::to_string(bytes) + " bytes reproduced";
  }
  report(11, "identical seeds give byte-identical records", c11, failures);

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
