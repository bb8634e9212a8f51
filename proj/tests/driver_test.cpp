#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "mps/driver.hpp"
#include "support.hpp"

using namespace mps;
using namespace mps::testing;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

using Command = int (*)(const std::string&, const DriverOptions&, std::ostream&, std::ostream&);

Result call(Command cmd, const std::string& file, const DriverOptions& opts = {}) {
  std::ostringstream out, err;
  int code = cmd(file, opts, out, err);
  return {code, out.str(), err.str()};
}

DriverOptions records(std::optional<std::uint64_t> seed = std::nullopt) {
  DriverOptions o;
  o.format = Format::Records;
  o.seed = seed;
  return o;
}

std::vector<nlohmann::json> lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST(Check, AcceptsCorpus) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Result r = call(cmd_check, corpus_path(f));
    EXPECT_EQ(r.code, exit_code::ok) << r.err;
    EXPECT_NE(r.out.find("ok"), std::string::npos);
  }
}

TEST(Check, RejectionCarriesTheCode) {
  Result r = call(cmd_check, corpus_path("mutants/hello-reuse.mps"), records());
  EXPECT_EQ(r.code, exit_code::rejected);
  auto recs = lines(r.err);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0]["code"], "linear-var-reused");
  EXPECT_EQ(recs[0]["line"], 13);

  Result text = call(cmd_check, corpus_path("mutants/hello-wrong-role.mps"));
  EXPECT_EQ(text.code, exit_code::rejected);
  EXPECT_NE(text.err.find("error[guard-unprovable]"), std::string::npos) << text.err;
  EXPECT_NE(text.err.find("solver: invalid"), std::string::npos) << text.err;
}

TEST(Check, MissingFileIsAnIoError) {
  EXPECT_EQ(call(cmd_check, corpus_path("no-such-file.mps")).code, exit_code::io);
  EXPECT_EQ(call(cmd_run, corpus_path("no-such-file.mps")).code, exit_code::io);
}

TEST(Run, OutcomesMapToExitCodes) {
  Result ok = call(cmd_run, corpus_path("hello.mps"));
  EXPECT_EQ(ok.code, exit_code::ok);
  EXPECT_NE(ok.out.find("AllDone"), std::string::npos);

  DriverOptions limited;
  limited.max_steps = 5;
  EXPECT_EQ(call(cmd_run, corpus_path("cloud.mps"), limited).code, exit_code::step_limit);

  EXPECT_EQ(exit_code_for(Outcome::Kind::AllDone), 0);
  EXPECT_EQ(exit_code_for(Outcome::Kind::Deadlock), 1);
  EXPECT_EQ(exit_code_for(Outcome::Kind::StepLimit), 3);
  EXPECT_EQ(exit_code_for(Outcome::Kind::InvariantViolation), 4);
}

TEST(Run, CheckedModeFinishes) {
  DriverOptions o;
  o.checked = true;
  o.seed = 5;
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"})
    EXPECT_EQ(call(cmd_run, corpus_path(f), o).code, exit_code::ok) << f;
}

TEST(Run, HandWrittenPoolsNeedTheBackdoor) {
  Result refused = call(cmd_run, corpus_path("crossed.mpool"));
  EXPECT_EQ(refused.code, exit_code::rejected);
  EXPECT_NE(refused.err.find("--unsafe-backdoor"), std::string::npos);

  DriverOptions o;
  o.unsafe_backdoor = true;
  Result r = call(cmd_run, corpus_path("crossed.mpool"), o);
  EXPECT_EQ(r.code, exit_code::deadlock);
  EXPECT_NE(r.out.find("Deadlock"), std::string::npos);
}

TEST(Analyze, CrossedPoolIsNotRelaxed) {
  DriverOptions o = records();
  o.unsafe_backdoor = true;
  Result r = call(cmd_analyze, corpus_path("crossed.mpool"), o);
  auto recs = lines(r.out);
  ASSERT_GE(recs.size(), 2u);
  EXPECT_EQ(recs[0]["relaxed"], false);
  EXPECT_EQ(recs[0]["df_reducible"], false);
  EXPECT_EQ(recs[0]["slack"], -1);
}

TEST(Analyze, CorpusStaysReducible) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Result r = call(cmd_analyze, corpus_path(f), records(9));
    EXPECT_EQ(r.code, exit_code::ok) << f;
    for (const auto& rec : lines(r.out)) {
      if (rec.contains("df_reducible")) {
        EXPECT_EQ(rec["df_reducible"], true) << f << " " << rec.dump();
      }
    }
  }
}

TEST(Trace, SameSeedSameBytes) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Result a = call(cmd_trace, corpus_path(f), records(17));
    Result b = call(cmd_trace, corpus_path(f), records(17));
    EXPECT_EQ(a.code, exit_code::ok);
    EXPECT_FALSE(a.out.empty());
    EXPECT_EQ(a.out, b.out) << f;
  }
}

TEST(Trace, RecordsHaveStableFields) {
  Result r = call(cmd_trace, corpus_path("hello.mps"), records(1));
  auto recs = lines(r.out);
  ASSERT_GT(recs.size(), 10u);
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    EXPECT_TRUE(recs[i].contains("step"));
    EXPECT_TRUE(recs[i].contains("kind"));
    EXPECT_TRUE(recs[i].contains("threads"));
    EXPECT_TRUE(recs[i].contains("sig_after"));
  }
}
