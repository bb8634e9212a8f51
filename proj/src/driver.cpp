#include "mps/driver.hpp"

#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mps/dfcheck.hpp"
#include "mps/parser.hpp"
#include "mps/pretty.hpp"
#include "mps/statics.hpp"
#include "mps/typing.hpp"

namespace mps {

namespace {

using nlohmann::json;

struct IoError {
  std::string message;
};

struct Loaded {
  Program program;
  Pool pool;
  StaticPtr type;  // source programs only
  bool backdoor = false;
};

std::string read_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError{"cannot read " + file};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_pool_file(const std::string& file) {
  return file.size() >= 6 && file.compare(file.size() - 6, 6, ".mpool") == 0;
}

CheckOptions check_options(const DriverOptions& opts) {
  CheckOptions c;
  c.assert_runtime = opts.assert_runtime;
  if (opts.solver_budget) c.solver.budget = *opts.solver_budget;
  return c;
}

// Parses and checks `file`. A hand-written pool is typed thread by thread
// against its declared channels.
Loaded load(const std::string& file, const DriverOptions& opts) {
  std::string text = read_file(file);
  Loaded l;
  if (is_pool_file(file)) {
    PoolFile pf = parse_pool(text);
    check_protocols(pf.program);
    l.program = pf.program;
    l.pool = pool_from_file(pf);
    l.backdoor = true;
    return l;
  }
  l.program = parse_program(text);
  Typed t = check_program(l.program, check_options(opts));
  l.pool = initial_pool(t.term);
  l.type = t.type;
  return l;
}

void report_diagnostic(const std::string& file, const Diagnostic& d, const DriverOptions& opts, std::ostream& err) {
  if (opts.format == Format::Records) {
    json j{{"file", file}, {"line", d.span.line}, {"col", d.span.col}, {"code", d.code}, {"message", d.message}};
    if (!d.guard.empty()) j["guard"] = d.guard;
    if (!d.solver_verdict.empty()) j["solver"] = d.solver_verdict;
    err << j.dump() << "\n";
    return;
  }
  err << file << ":" << d.span.line << ":" << d.span.col << ": error[" << d.code << "]: " << d.message << "\n";
  if (!d.guard.empty()) err << "  guard: " << d.guard << "\n";
  if (!d.solver_verdict.empty()) err << "  solver: " << d.solver_verdict << "\n";
}

// Runs `body` with a loaded file, mapping load failures to exit codes.
template <typename F>
int with_loaded(const std::string& file, const DriverOptions& opts, std::ostream& err, bool need_run, F body) {
  std::unique_ptr<Loaded> l;
  try {
    l = std::make_unique<Loaded>(load(file, opts));
  } catch (const IoError& e) {
    err << "error: " << e.message << "\n";
    return exit_code::io;
  } catch (const ParseError& e) {
    report_diagnostic(file, Diagnostic{e.code, e.span, e.what(), "", ""}, opts, err);
    return exit_code::rejected;
  } catch (const StaticError& e) {
    report_diagnostic(file, Diagnostic{e.code, e.span, e.what(), "", ""}, opts, err);
    return exit_code::rejected;
  } catch (const TypeError& e) {
    report_diagnostic(file, e.diag, opts, err);
    return exit_code::rejected;
  }
  if (need_run && l->backdoor) {
#ifdef MPS_UNSAFE_BACKDOOR
    bool allowed = opts.unsafe_backdoor;
#else
    bool allowed = false;
#endif
    if (!allowed) {
      err << "error: " << file << " is a hand-written pool; running it requires --unsafe-backdoor\n";
      return exit_code::rejected;
    }
  }
  return body(*l);
}

std::unique_ptr<Scheduler> make_scheduler(const DriverOptions& opts) {
  if (opts.seed) return std::make_unique<SeededRandomScheduler>(*opts.seed);
  return std::make_unique<RoundRobinScheduler>();
}

RunOptions run_options(const DriverOptions& opts, const Loaded& l) {
  RunOptions r;
  r.max_steps = opts.max_steps;
  // A hand-written pool has not been checked, so the invariants that rest
  // on typing are off for it.
  r.checked = opts.checked && !l.backdoor;
  r.runtime.erase_proofs = opts.erase_proofs;
  r.check = check_options(opts);
  return r;
}

void print_outcome(const Outcome& o, const DriverOptions& opts, std::ostream& out) {
  if (opts.format == Format::Records) {
    json j{{"outcome", to_string(o.kind)}, {"steps", o.steps}};
    if (o.value) j["value"] = pretty(o.value);
    if (!o.report.empty()) j["report"] = o.report;
    out << j.dump() << "\n";
    return;
  }
  out << "outcome: " << to_string(o.kind) << "\n";
  out << "steps: " << o.steps << "\n";
  if (o.value) out << "value: " << pretty(o.value) << "\n";
  if (!o.report.empty()) out << "report: " << o.report << "\n";
}

json sig_json(const std::map<ChannelId, std::string>& sig) {
  json j = json::object();
  for (const auto& [c, s] : sig) j["c" + std::to_string(c)] = s;
  return j;
}

void print_event(const TraceEvent& ev, const DriverOptions& opts, std::ostream& out) {
  if (opts.format == Format::Records) {
    json j{{"step", ev.step}, {"kind", ev.kind}, {"threads", ev.threads}};
    if (ev.channel) j["channel"] = "c" + std::to_string(*ev.channel);
    if (!ev.payload_type.empty()) j["payload"] = ev.payload_type;
    j["sig_before"] = sig_json(ev.sig_before);
    j["sig_after"] = sig_json(ev.sig_after);
    out << j.dump() << "\n";
    return;
  }
  out << "#" << ev.step << " " << ev.kind;
  if (ev.channel) out << " c" << *ev.channel;
  out << " threads=";
  for (std::size_t i = 0; i < ev.threads.size(); ++i) out << (i ? "," : "") << ev.threads[i];
  if (!ev.payload_type.empty()) out << " payload=" << ev.payload_type;
  if (ev.sig_before != ev.sig_after) {
    for (const auto& [c, s] : ev.sig_after) {
      auto it = ev.sig_before.find(c);
      if (it == ev.sig_before.end() || it->second != s) out << " | c" << c << " : " << s;
    }
    for (const auto& [c, s] : ev.sig_before)
      if (!ev.sig_after.count(c)) out << " | c" << c << " closed";
  }
  out << "\n";
}

}  // namespace

Pool pool_from_file(const PoolFile& pf) {
  Pool pool;
  for (const auto& [c, s] : pf.channels) {
    auto u = session_universe(s, pf.program);
    if (!u) throw StaticError("unknown-universe", s->span, "channel c" + std::to_string(c) + " needs a protocol type");
    pool.sig[c] = ChannelState{normalize(s, *u), *u};
    pool.next_channel = std::max(pool.next_channel, c + 1);
  }
  for (const auto& [t, e] : pf.threads) {
    pool.threads[t] = e;
    pool.next_thread = std::max(pool.next_thread, t + 1);
  }
  return pool;
}

int exit_code_for(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::AllDone: return exit_code::ok;
    case Outcome::Kind::Deadlock: return exit_code::deadlock;
    case Outcome::Kind::StepLimit: return exit_code::step_limit;
    case Outcome::Kind::InvariantViolation: return exit_code::invariant;
  }
  return exit_code::invariant;
}

int cmd_check(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err) {
  return with_loaded(file, opts, err, false, [&](Loaded& l) {
    if (l.backdoor) {
      try {
        typecheck_pool(l.program, l.pool.threads, l.pool.sig, check_options(opts));
      } catch (const TypeError& e) {
        report_diagnostic(file, e.diag, opts, err);
        return exit_code::rejected;
      }
    }
    if (opts.format == Format::Records) {
      json j{{"file", file}, {"ok", true}};
      if (l.type) j["type"] = pretty(l.type);
      out << j.dump() << "\n";
    } else {
      out << file << ": ok";
      if (l.type) out << " : " << pretty(l.type);
      out << "\n";
    }
    return exit_code::ok;
  });
}

int cmd_run(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err) {
  return with_loaded(file, opts, err, true, [&](Loaded& l) {
    auto sched = make_scheduler(opts);
    Outcome o = run(l.pool, l.program, *sched, run_options(opts, l));
    print_outcome(o, opts, out);
    return exit_code_for(o.kind);
  });
}

int cmd_trace(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err) {
  return with_loaded(file, opts, err, true, [&](Loaded& l) {
    auto sched = make_scheduler(opts);
    Outcome o = run(l.pool, l.program, *sched, run_options(opts, l));
    for (const auto& ev : o.trace) print_event(ev, opts, out);
    print_outcome(o, opts, out);
    return exit_code_for(o.kind);
  });
}

int cmd_analyze(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err) {
  return with_loaded(file, opts, err, true, [&](Loaded& l) {
    auto sched = make_scheduler(opts);
    long min_slack = std::numeric_limits<long>::max();
    bool all_reducible = true;
    std::uint64_t snapshots = 0;
    auto observe = [&](const Pool& pool, std::uint64_t step) {
      Collection m = abstract_pool(pool);
      bool red = df_reducible(m), rel = relaxed(m);
      long slack = relaxed_slack(m);
      bool any = endpoint_count(m) > 0;
      if (any) min_slack = std::min(min_slack, slack);
      all_reducible = all_reducible && red;
      ++snapshots;
      auto chans = channels(m);
      if (opts.format == Format::Records) {
        json sets = json::array();
        for (const auto& s : m.sets) {
          json js = json::array();
          for (const auto& ep : s) js.push_back(pretty(ep));
          sets.push_back(js);
        }
        json cs = json::array();
        for (ChannelId c : chans) cs.push_back("c" + std::to_string(c));
        out << json{{"step", step}, {"relaxed", rel}, {"df_reducible", red}, {"slack", slack},
                    {"sets", sets}, {"channels", cs}}
                   .dump()
            << "\n";
      } else {
        out << "step " << step << ": relaxed=" << (rel ? "true" : "false")
            << " df_reducible=" << (red ? "true" : "false") << " slack=" << slack << " " << pretty(m) << "\n";
      }
    };
    Outcome o = run(l.pool, l.program, *sched, run_options(opts, l), observe);
    std::string slack = min_slack == std::numeric_limits<long>::max() ? "none" : std::to_string(min_slack);
    if (opts.format == Format::Records)
      out << json{{"summary", true}, {"snapshots", snapshots}, {"min_slack", slack},
                  {"all_df_reducible", all_reducible}}
                 .dump()
          << "\n";
    else
      out << "summary: snapshots=" << snapshots << " min-slack=" << slack
          << " all-df-reducible=" << (all_reducible ? "true" : "false") << "\n";
    print_outcome(o, opts, out);
    return exit_code_for(o.kind);
  });
}

}  // namespace mps
