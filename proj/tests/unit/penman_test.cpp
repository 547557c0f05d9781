#include <gtest/gtest.h>

#include "dualgraph/amr_graph.hpp"
#include "dualgraph/corpus.hpp"
#include "dualgraph/errors.hpp"
#include "test_paths.hpp"

namespace dg = dualgraph;

TEST(Penman, SemesterThat) {
  const auto g = dg::parse_penman("(s / semester :mod (t / that))");
  ASSERT_EQ(g.node_count(), 2u);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.nodes()[0].label, "semester");
  EXPECT_EQ(g.nodes()[1].label, "that");
  EXPECT_EQ(g.edges()[0].source, 0);
  EXPECT_EQ(g.edges()[0].relation, ":mod");
  EXPECT_EQ(g.edges()[0].target, 1);
  EXPECT_EQ(g.root(), g.find_variable("s"));
}

TEST(Penman, SingleNode) {
  const auto g = dg::parse_penman("(w / want-01)");
  EXPECT_EQ(g.node_count(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.root(), 0);
  EXPECT_EQ(g.nodes()[0].label, "want-01");
}

// Counted by hand from the printed string: 19 variables plus the four
// unquoted name constants; 22 tree edges plus the reentrant `:mod r`.
TEST(Penman, AgreementExampleCounts) {
  const auto g = dg::parse_penman(
      "(a / agree :ARG0 (a2 / and :op1 (c / country :wiki China :name (n / name :op1 China)) :op2 (c2 / country "
      ":wiki Kyrgyzstan :name (n2 / name :op1 Kyrgyzstan))) :ARG1 (t / threaten-01 :ARG0 (a3 / and :op1 (t2 / "
      "terrorism) :op2 (s / separatism) :op3 (e / extremism)) :ARG2 (a4 / and :op1 (s3 / security :mod (r / "
      "region)) :op2 (s4 / stability :mod r)) :time (s2 / still) :ARG1-of (m / major-02)) :medium (c3 / "
      "communique :mod (j / joint)))");
  EXPECT_EQ(g.node_count(), 23u);
  EXPECT_EQ(g.edge_count(), 23u);
}

TEST(Penman, ReentrancyReusesNode) {
  const auto g = dg::parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-01 :ARG0 b))");
  EXPECT_EQ(g.node_count(), 3u);
  ASSERT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(g.edges()[2].source, g.find_variable("g"));
  EXPECT_EQ(g.edges()[2].target, g.find_variable("b"));
}

TEST(Penman, ForwardReference) {
  const auto g = dg::parse_penman("(a / and :op1 (x / see-01 :ARG0 y) :op2 (y / dog))");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edges()[1].target, g.find_variable("y"));
}

TEST(Penman, ConstantsBecomeLeaves) {
  const auto g = dg::parse_penman("(s / sleep-01 :polarity - :time (d / date-entity :year 2009) :ARG0 \"Obama\")");
  ASSERT_EQ(g.node_count(), 5u);
  EXPECT_EQ(g.nodes()[1].label, "-");
  EXPECT_EQ(g.nodes()[3].label, "2009");
  EXPECT_EQ(g.nodes()[4].label, "Obama");  // quotes stripped
  EXPECT_TRUE(g.nodes()[1].variable.empty());
}

TEST(Penman, InverseRelationKeptAsWritten) {
  const auto g = dg::parse_penman("(p / person :ARG0-of (h / have-01))");
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edges()[0].relation, ":ARG0-of");
  EXPECT_EQ(g.edges()[0].source, 0);
}

TEST(Penman, Errors) {
  EXPECT_THROW(dg::parse_penman(""), dg::ParseError);
  EXPECT_THROW(dg::parse_penman("   "), dg::ParseError);
  EXPECT_THROW(dg::parse_penman("(s / semester :mod (t / that)"), dg::ParseError);
  EXPECT_THROW(dg::parse_penman("(s / semester))"), dg::ParseError);
  EXPECT_THROW(dg::parse_penman("(s / semester :mod x)"), dg::ParseError);
  EXPECT_THROW(dg::parse_penman("(s / a :mod (s / b))"), dg::ParseError);
  try {
    dg::parse_penman("(s / semester :mod q2)");
    FAIL();
  } catch (const dg::ParseError& e) {
    EXPECT_EQ(e.offset(), 19u);
    EXPECT_NE(std::string(e.what()).find("q2"), std::string::npos);
  }
}

TEST(Corpus, ReadsMiniCorpus) {
  const auto corpus = dg::read_amr_corpus(testing_support::data_dir() / "mini.amr");
  ASSERT_EQ(corpus.size(), 5u);
  EXPECT_EQ(corpus[0].id, "mini.1");
  EXPECT_EQ(corpus[0].sentence, "that semester");
  EXPECT_EQ(corpus[1].id, "mini.2");
  EXPECT_EQ(corpus[1].graph.node_count(), 3u);
  EXPECT_EQ(corpus[4].graph.node_count(), 8u);
  EXPECT_EQ(corpus[1].tokens(), (std::vector<std::string>{"The", "boy", "wants", "to", "go", "."}));
}

// Generation input may carry graphs alone.
TEST(Corpus, MissingSentenceIsEmpty) {
  const auto c = dg::parse_amr_corpus("# ::id x\n(a / b)\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].id, "x");
  EXPECT_TRUE(c[0].sentence.empty());
}

TEST(Corpus, UnreadableOrBrokenIsDataError) {
  EXPECT_THROW(dg::parse_amr_corpus("# ::snt x\n(a / b :r (c / d)\n"), dg::DataError);
  EXPECT_THROW(dg::read_amr_corpus("/nonexistent/file.amr"), dg::DataError);
}

TEST(Corpus, BlocksSeparatedByBlankLines) {
  const auto corpus = dg::parse_amr_corpus("# ::snt a\n(a / b)\n\n\n# ::snt c d\n(c / d\n  :x (e / f))\n");
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[1].graph.edge_count(), 1u);
  EXPECT_EQ(dg::tokenize("  a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
}
