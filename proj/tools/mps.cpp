#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "mps/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Type checker, interpreter and deadlock analyzer for multiparty session programs"};
  app.require_subcommand(1);

  mps::DriverOptions opts;
  std::string file;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::map<std::string, mps::Format> formats{{"text", mps::Format::Text}, {"records", mps::Format::Records}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", file, "program (.mps) or hand-written pool (.mpool)")->required();
    sub->add_flag("--assert-runtime", opts.assert_runtime, "accept guards the solver cannot decide");
    sub->add_option("--solver-budget", budget, "enumeration budget of the constraint solver");
    sub->add_option("--format", opts.format, "output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };
  auto running = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--seed", seed, "seeded random scheduling (round-robin without it)");
    sub->add_option("--max-steps", opts.max_steps, "step limit");
    sub->add_flag("--checked", opts.checked, "check pool invariants after every step");
    sub->add_flag("--erase-proofs", opts.erase_proofs, "reduce skip and recurse locally");
    sub->add_flag("--unsafe-backdoor", opts.unsafe_backdoor, "allow running hand-written pools");
  };

  auto* check = app.add_subcommand("check", "type-check a program");
  common(check);
  auto* run = app.add_subcommand("run", "run a program");
  running(run);
  auto* trace = app.add_subcommand("trace", "run a program and print every pool step");
  running(trace);
  auto* analyze = app.add_subcommand("analyze", "run a program and analyze every snapshot");
  running(analyze);

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {run, trace, analyze})
    if (sub->parsed() && sub->count("--seed")) opts.seed = seed;
  for (auto* sub : {check, run, trace, analyze})
    if (sub->parsed() && sub->count("--solver-budget")) opts.solver_budget = budget;

  if (check->parsed()) return mps::cmd_check(file, opts, std::cout, std::cerr);
  if (run->parsed()) return mps::cmd_run(file, opts, std::cout, std::cerr);
  if (trace->parsed()) return mps::cmd_trace(file, opts, std::cout, std::cerr);
  return mps::cmd_analyze(file, opts, std::cout, std::cerr);
}
