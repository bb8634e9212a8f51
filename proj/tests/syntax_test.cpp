#include <gtest/gtest.h>

#include "mps/parser.hpp"
#include "mps/pretty.hpp"
#include "mps/statics.hpp"
#include "mps/terms.hpp"
#include "support.hpp"

using namespace mps;
using namespace mps::testing;

namespace {

bool has_endpoint(const Term& t) {
  if (t.kind == TKind::Endpoint) return true;
  for (const auto& k : t.kids)
    if (has_endpoint(*k)) return true;
  return false;
}

}  // namespace

TEST(Parse, HelloProgramShape) {
  Program p = parse_program(read_text(corpus_path("hello.mps")));
  EXPECT_EQ(p.protocols.size(), 1u);
  EXPECT_EQ(p.defs.size(), 3u);
  EXPECT_EQ(pretty(p.protocols[0].def), "msg(0, string) :: msg(1, string) :: end(0)");
  EXPECT_EQ(p.protocols[0].universe, (std::vector<int>{0, 1}));
}

TEST(Parse, EmptyInput) {
  Program p = parse_program("");
  EXPECT_TRUE(p.protocols.empty());
  EXPECT_TRUE(p.defs.empty());
  ASSERT_TRUE(p.main);
  EXPECT_EQ(p.main->kind, TKind::Unit);
}

TEST(Parse, MalformedLetPointsAtIn) {
  try {
    parse_program("main = let x = in x;");
    FAIL() << "accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code, "parse-error");
    EXPECT_EQ(e.span.line, 1);
    EXPECT_EQ(e.span.col, 16);
  }
}

TEST(Parse, UnboundNames) {
  try {
    parse_program("main = f(());");
    FAIL() << "accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code, "unbound-name");
  }
  try {
    parse_program("protocol p roles A = 0 universe {0} = end(B);");
    FAIL() << "accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code, "unbound-name");
  }
}

TEST(Parse, PointToPointAndBroadcastMessages) {
  Program ctx;
  EXPECT_EQ(parse_static("msg(0 -> 1, int) :: end(0)", ctx)->kind, SKind::PMsg);
  EXPECT_EQ(parse_static("msg(0, int) :: end(0)", ctx)->kind, SKind::BMsg);
}

TEST(Parse, EndpointLiteralsOnlyInPools) {
  EXPECT_THROW(parse_program("main = c0^{0};"), ParseError);
  PoolFile pf = parse_pool("protocol p roles A = 0, B = 1 universe {0, 1} = end(A);\n"
                           "channel c3 : p;\nthread 0 = close(c3^{0});\nthread 1 = wait(c3^{1});\n");
  EXPECT_EQ(pf.channels.size(), 1u);
  EXPECT_EQ(pf.threads.size(), 2u);
  auto r = rho(*pf.threads.at(0));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], (Endpoint{3, {0}}));
}

TEST(Parse, CorpusHasNoEndpointLiterals) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Program p = parse_program(read_text(corpus_path(f)));
    EXPECT_FALSE(has_endpoint(*program_term(p))) << f;
  }
}

TEST(Pretty, Constructors) {
  EXPECT_EQ(pretty(st::end(st::integer(0))), "end(0)");
  EXPECT_EQ(pretty(st::chan(st::set({0}), st::end(st::integer(0)))), "chan({0}, end(0))");
  RoleNames names{{0, "C"}, {1, "S"}};
  StaticPtr hello = st::bmsg(st::integer(0), st::base("string"),
                             st::bmsg(st::integer(1), st::base("string"), st::end(st::integer(0))));
  EXPECT_EQ(pretty(hello, &names), "msg(C, string) :: msg(S, string) :: end(C)");
}

TEST(Pretty, CorpusProgramsRoundTrip) {
  for (const char* f : {"hello.mps", "array.mps", "cloud.mps"}) {
    Program p = parse_program(read_text(corpus_path(f)));
    std::string once = pretty(p);
    Program q = parse_program(once);
    EXPECT_EQ(pretty(q), once) << f;
    EXPECT_TRUE(term_equal(*program_term(p), *program_term(q))) << f;
  }
}

TEST(Pretty, RandomStaticsRoundTrip) {
  Rng rng(11);
  const Program& ctx = generator_context();
  static const SortPtr sorts[] = {sort_int(), sort_bool(), sort_set(), sort_stype(), sort_type(),
                                  Sort::arrow(sort_int(), sort_stype())};
  for (int i = 0; i < 1000; ++i) {
    StaticPtr s = gen_static(rng, sorts[i % 6], 4);
    std::string text = pretty(s);
    StaticPtr back;
    try {
      back = parse_static(text, ctx);
    } catch (const ParseError& e) {
      FAIL() << text << "\n" << e.what();
    }
    EXPECT_TRUE(alpha_equal(s, back)) << text << "\nreparsed: " << pretty(back);
    EXPECT_EQ(pretty(back), text);
  }
}

TEST(Pretty, RandomTermsRoundTrip) {
  Rng rng(12);
  const Program& ctx = generator_context();
  for (int i = 0; i < 1000; ++i) {
    TermPtr t = gen_term(rng, 5);
    std::string text = pretty(t);
    TermPtr back;
    try {
      back = parse_term(text, ctx);
    } catch (const ParseError& e) {
      FAIL() << text << "\n" << e.what();
    }
    EXPECT_TRUE(term_equal(*t, *back)) << text << "\nreparsed: " << pretty(back);
  }
}

TEST(Syntax, ValuesFollowTheValueGrammar) {
  EXPECT_TRUE(is_value(*dy::lam("x", nullptr, dy::app(dy::var("x"), dy::unit()))));
  EXPECT_TRUE(is_value(*dy::pair(dy::integer(1), dy::str("a"))));
  EXPECT_FALSE(is_value(*dy::pair(dy::integer(1), dy::fst(dy::var("p")))));
  EXPECT_FALSE(is_value(*dy::call(Api::Add, {dy::integer(1), dy::integer(2)})));
  EXPECT_TRUE(is_value(*dy::inl(dy::unit())));
}
