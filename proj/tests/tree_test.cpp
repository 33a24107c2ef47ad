#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <string>

#include "oracles.hpp"
#include "syntaxprobe/error.hpp"
#include "syntaxprobe/synth.hpp"
#include "syntaxprobe/tree.hpp"

namespace sp = syntaxprobe;

namespace {

const char* kExample = "(ROOT (S (NP (DT the) (NN dog)) (VP (VBZ barks))))";

// Counts labelled nodes and terminals straight off the bracket string.
std::pair<std::size_t, std::size_t> count_brackets(const std::string& s) {
  std::size_t nodes = 0, terminals = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') {
      ++nodes;
      // Skip the label; a token before ')' is a terminal.
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != ' ' && s[j] != ')') ++j;
      if (j < s.size() && s[j] == ' ' && j + 1 < s.size() && s[j + 1] != '(')
        ++terminals;
    }
  }
  return {nodes, terminals};
}

sp::Errc parse_error(const std::string& text) {
  try {
    sp::parse_ptb(text);
  } catch (const sp::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return sp::Errc::Io;
}

}  // namespace

TEST(ParsePtb, MinimalTree) {
  const sp::Tree t = sp::parse_ptb("(X a)");
  EXPECT_EQ(t.label, "X");
  EXPECT_TRUE(t.is_leaf());
  ASSERT_TRUE(t.terminal.has_value());
  EXPECT_EQ(*t.terminal, "a");
  EXPECT_EQ(sp::tree_depth(t), 1u);
  EXPECT_TRUE(sp::productions(t).empty());
}

TEST(ParsePtb, ExampleCountsMatchBracketCounter) {
  const sp::Tree t = sp::parse_ptb(kExample);
  const auto [nodes, terminals] = count_brackets(kExample);
  EXPECT_EQ(sp::node_count(t), nodes);
  EXPECT_EQ(sp::terminal_count(t), terminals);
  EXPECT_EQ(terminals, 3u);
  EXPECT_EQ(sp::internal_node_count(t), 4u);
  EXPECT_EQ(sp::yield(t), (std::vector<std::string>{"the", "dog", "barks"}));
}

TEST(ParsePtb, Errors) {
  EXPECT_EQ(parse_error("(S (NP"), sp::Errc::UnbalancedBrackets);
  EXPECT_EQ(parse_error(""), sp::Errc::EmptyInput);
  EXPECT_EQ(parse_error("   \t"), sp::Errc::EmptyInput);
  EXPECT_EQ(parse_error(")"), sp::Errc::UnbalancedBrackets);
  EXPECT_EQ(parse_error("(X a))"), sp::Errc::UnbalancedBrackets);
  EXPECT_EQ(parse_error("( a)"), sp::Errc::EmptyLabel);
  EXPECT_EQ(parse_error("(X a) (Y b)"), sp::Errc::TrailingContent);
  EXPECT_EQ(parse_error("(X a b)"), sp::Errc::UnexpectedToken);
  EXPECT_EQ(parse_error("(X a (Y b))"), sp::Errc::UnexpectedToken);
  EXPECT_EQ(parse_error("(X (Y b) a)"), sp::Errc::UnexpectedToken);
  EXPECT_EQ(parse_error("X"), sp::Errc::UnexpectedToken);
}

TEST(ParsePtb, DeepUnaryChainDoesNotRecurse) {
  std::string s;
  const int k = 20000;
  for (int i = 0; i < k; ++i) s += "(A ";
  s += "x";
  for (int i = 0; i < k; ++i) s += ")";
  const sp::Tree t = sp::parse_ptb(s);
  EXPECT_EQ(t.label, "A");
}

TEST(TreeDepth, Examples) {
  EXPECT_EQ(sp::tree_depth(sp::parse_ptb(kExample)), 4u);
  for (int k = 1; k <= 12; ++k) {
    std::string s;
    for (int i = 0; i < k; ++i) s += "(U ";
    s += "w";
    for (int i = 0; i < k; ++i) s += ")";
    EXPECT_EQ(sp::tree_depth(sp::parse_ptb(s)), static_cast<std::size_t>(k));
  }
}

TEST(TreeDepth, MatchesPathEnumeration) {
  sp::SynthSpec spec;
  spec.nonterminals = {"S", "NP", "VP"};
  spec.pos_tags = {"DT", "NN"};
  spec.max_depth = 7;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const sp::Tree t = sp::random_tree(spec, rng);
    EXPECT_EQ(sp::tree_depth(t), oracle::depth(t));
    EXPECT_EQ(sp::tree_depth(sp::delexicalize(t)), oracle::depth(t));
  }
}

TEST(Delexicalize, Examples) {
  const sp::Tree d = sp::delexicalize(sp::parse_ptb("(NP (DT the) (NN dog))"));
  EXPECT_EQ(sp::serialize(d), "(NP (DT) (NN))");
  EXPECT_EQ(sp::node_count(d), 3u);
  const sp::Tree full = sp::parse_ptb(kExample);
  const sp::Tree e = sp::delexicalize(full);
  EXPECT_EQ(sp::node_count(e), sp::node_count(full));
  EXPECT_EQ(sp::terminal_count(e), 0u);
  EXPECT_FALSE(sp::is_lexicalized(e));
  EXPECT_TRUE(sp::is_lexicalized(full));
  EXPECT_EQ(sp::delexicalize(e), e);
}

TEST(Delexicalize, PreservesShapeAndProductions) {
  sp::SynthSpec spec;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const sp::Tree t = sp::random_tree(spec, rng);
    const sp::Tree d = sp::delexicalize(t);
    EXPECT_EQ(sp::node_count(d), sp::node_count(t));
    EXPECT_EQ(sp::tree_depth(d), sp::tree_depth(t));
    EXPECT_EQ(sp::productions(d), sp::productions(t));
    EXPECT_EQ(sp::delexicalize(d), d);
  }
}

TEST(Productions, Examples) {
  EXPECT_TRUE(sp::productions(sp::parse_ptb("(X a)")).empty());
  const auto one = sp::productions(sp::parse_ptb("(NP (DT) (NN))"));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (sp::Production{"NP", {"DT", "NN"}}));
  auto ps = sp::productions(sp::parse_ptb(kExample));
  std::sort(ps.begin(), ps.end());
  std::vector<sp::Production> want{{"ROOT", {"S"}},
                                   {"S", {"NP", "VP"}},
                                   {"NP", {"DT", "NN"}},
                                   {"VP", {"VBZ"}}};
  std::sort(want.begin(), want.end());
  EXPECT_EQ(ps, want);
}

TEST(Serialize, RoundTripProperty) {
  sp::SynthSpec spec;
  spec.nonterminals = {"S", "NP", "VP", "PP"};
  spec.pos_tags = {"DT", "NN", "IN"};
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const sp::Tree t = sp::random_tree(spec, rng);
    EXPECT_EQ(sp::parse_ptb(sp::serialize(t)), t);
    const sp::Tree d = sp::delexicalize(t);
    EXPECT_EQ(sp::parse_ptb(sp::serialize(d)), d);
  }
  // Whitespace is not significant.
  EXPECT_EQ(sp::parse_ptb("(NP\n\t(DT  the )(NN dog) )"),
            sp::parse_ptb("(NP (DT the) (NN dog))"));
}

TEST(TreeFile, RoundTripAndLineNumbers) {
  const auto dir = oracle::scratch("tree_file");
  std::vector<sp::Tree> trees{sp::parse_ptb(kExample), sp::parse_ptb("(X a)")};
  const std::string path = (dir / "trees.txt").string();
  sp::write_tree_file(path, trees);
  EXPECT_EQ(sp::read_tree_file(path), trees);

  {
    std::ofstream out(dir / "bad.txt");
    out << "(X a)\n(S (NP\n";
  }
  try {
    sp::read_tree_file((dir / "bad.txt").string());
    FAIL();
  } catch (const sp::Error& e) {
    EXPECT_EQ(e.code(), sp::Errc::UnbalancedBrackets);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  {
    std::ofstream out(dir / "blank.txt");
    out << "(X a)\n\n(X b)\n";
  }
  try {
    sp::read_tree_file((dir / "blank.txt").string());
    FAIL();
  } catch (const sp::Error& e) {
    EXPECT_EQ(e.code(), sp::Errc::BadFormat);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  EXPECT_THROW(sp::read_tree_file((dir / "missing.txt").string()), sp::Error);
}
