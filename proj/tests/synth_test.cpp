#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "syntaxprobe/corpus.hpp"
#include "syntaxprobe/error.hpp"
#include "syntaxprobe/probe.hpp"
#include "syntaxprobe/ridge.hpp"
#include "syntaxprobe/synth.hpp"

namespace sp = syntaxprobe;

namespace {

// Structural checks that hold for every generated tree.
void check_invariants(const sp::Tree& t, bool is_root) {
  if (t.children.empty()) {
    EXPECT_FALSE(is_root);
    ASSERT_TRUE(t.terminal.has_value());
    EXPECT_FALSE(t.terminal->empty());
    return;
  }
  EXPECT_FALSE(t.terminal.has_value());
  EXPECT_GE(t.children.size(), 1u);
  EXPECT_LE(t.children.size(), 3u);
  for (const auto& c : t.children) check_invariants(c, false);
}

std::vector<double> depth_r2_over_noise(std::uint64_t seed) {
  std::vector<double> out;
  for (double sigma : {0.0, 1.0, 4.0, 16.0}) {
    sp::SynthSpec spec;
    spec.seed = seed;
    spec.signal = sp::SynthSignal::DepthLinear;
    spec.noise_sigma = sigma;
    spec.dim = 16;
    const auto trees = sp::synth_trees(spec);
    const auto corpus = sp::synth_corpus(trees);
    const auto ids = corpus.ids();
    std::vector<double> depths;
    for (const auto& t : trees) depths.push_back(static_cast<double>(sp::tree_depth(t)));
    const auto table = sp::synth_embeddings(trees, ids, spec);
    sp::ProbeConfig config;
    config.seed = seed;
    out.push_back(
        sp::probe_treedepth(table, ids, depths, sp::ReferenceFeatures{}, config).test_r2);
  }
  return out;
}

// BoW recovery: ridge from embeddings to the BoW counts.
double bow_recovery(sp::SynthSignal signal, std::uint64_t seed) {
  sp::SynthSpec spec;
  spec.seed = seed;
  spec.signal = signal;
  spec.noise_sigma = 0.5;
  spec.vocab_size = 20;
  const auto trees = sp::synth_trees(spec);
  const auto corpus = sp::synth_corpus(trees);
  const auto ids = corpus.ids();
  const std::vector<const sp::CorpusManifest*> corpora{&corpus};
  const Eigen::MatrixXd bow = sp::bow_features(corpus, sp::build_vocabulary(corpora));
  const auto table = sp::synth_embeddings(trees, ids, spec);
  sp::ProbeConfig config;
  config.seed = seed;
  return sp::evaluate_probe(table.to_matrix(), bow, ids, {}, config).test_r2;
}

}  // namespace

TEST(RandomTree, DepthTwoIsForced) {
  sp::SynthSpec spec;
  spec.max_depth = 2;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const sp::Tree t = sp::random_tree(spec, rng);
    EXPECT_EQ(sp::tree_depth(t), 2u);
    for (const auto& c : t.children) EXPECT_TRUE(c.is_leaf());
  }
}

TEST(RandomTree, InvariantSweep) {
  sp::SynthSpec spec;
  spec.nonterminals = {"S", "NP", "VP", "PP"};
  spec.pos_tags = {"DT", "NN", "IN"};
  spec.max_depth = 5;
  spec.expand_probability = 0.7;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const sp::Tree t = sp::random_tree(spec, rng);
    check_invariants(t, true);
    EXPECT_LE(sp::tree_depth(t), spec.max_depth);
    EXPECT_GE(sp::internal_node_count(t), 1u);
  }
}

TEST(SynthTrees, ReproducibleAndPrefixStable) {
  sp::SynthSpec spec;
  spec.seed = 3;
  spec.n_utterances = 50;
  const auto a = sp::synth_trees(spec);
  EXPECT_EQ(a, sp::synth_trees(spec));
  spec.n_utterances = 20;
  const auto b = sp::synth_trees(spec);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(a[i], b[i]);
  spec.seed = 4;
  EXPECT_NE(sp::synth_trees(spec), b);
}

TEST(SynthCorpus, IdsAndTranscripts) {
  sp::SynthSpec spec;
  spec.n_utterances = 3;
  const auto trees = sp::synth_trees(spec);
  const auto corpus = sp::synth_corpus(trees);
  EXPECT_EQ(corpus.ids(), (std::vector<std::string>{"utt000000", "utt000001", "utt000002"}));
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(corpus.entries()[i].word_count, sp::terminal_count(trees[i]));
}

TEST(SynthSpec, Validation) {
  sp::SynthSpec spec;
  spec.max_depth = 1;
  EXPECT_THROW(spec.validate(), sp::Error);
  spec = {};
  spec.dim = 0;
  EXPECT_THROW(spec.validate(), sp::Error);
  spec = {};
  spec.noise_sigma = -1;
  EXPECT_THROW(spec.validate(), sp::Error);
  spec = {};
  spec.nonterminals.clear();
  EXPECT_THROW(spec.validate(), sp::Error);
  EXPECT_THROW(sp::parse_synth_signal("LOUD"), sp::Error);
  for (auto s : {sp::SynthSignal::None, sp::SynthSignal::DepthLinear,
                 sp::SynthSignal::KernelLinear, sp::SynthSignal::BowLinear})
    EXPECT_EQ(sp::parse_synth_signal(sp::to_string(s)), s);
}

TEST(SynthEmbeddings, Signals) {
  sp::SynthSpec spec;
  spec.n_utterances = 40;
  spec.dim = 5;
  const auto trees = sp::synth_trees(spec);
  const auto ids = sp::synth_corpus(trees).ids();

  spec.signal = sp::SynthSignal::DepthLinear;
  const Eigen::MatrixXd d = sp::synth_embeddings(trees, ids, spec).to_matrix();
  for (std::size_t i = 0; i < trees.size(); ++i) {
    EXPECT_EQ(d(i, 0), static_cast<double>(sp::tree_depth(trees[i])));
    EXPECT_EQ(d.row(i).tail(4).cwiseAbs().sum(), 0.0);
  }

  spec.signal = sp::SynthSignal::None;
  const auto l0 = sp::synth_embeddings(trees, ids, spec, 0);
  const auto l1 = sp::synth_embeddings(trees, ids, spec, 1);
  EXPECT_EQ(l1.layer_id(), 1u);
  EXPECT_NE(l0.data(), l1.data());
  EXPECT_EQ(l0.data(), sp::synth_embeddings(trees, ids, spec, 0).data());

  spec.signal = sp::SynthSignal::KernelLinear;
  const auto k = sp::synth_embeddings(trees, ids, spec);
  EXPECT_EQ(k.dim(), 5u);
  const Eigen::MatrixXd km = k.to_matrix();
  for (Eigen::Index i = 0; i < km.rows(); ++i) EXPECT_GT(km.row(i).norm(), 0.0);
}

TEST(SynthEmbeddings, KernelAnchorsAreNotCorpusTrees) {
  sp::SynthSpec spec;
  spec.seed = 5;
  spec.nonterminals = {"S", "NP", "VP"};
  spec.pos_tags = {"DT", "NN", "VB"};
  const auto anchors = sp::synth_kernel_anchors(spec);
  EXPECT_EQ(anchors.size(), spec.kernel_anchors);
  std::vector<sp::Tree> delex;
  for (const auto& t : sp::synth_trees(spec)) delex.push_back(sp::delexicalize(t));
  // Distinct streams: the anchor sequence is not the corpus sequence.
  std::size_t same_position = 0;
  for (std::size_t i = 0; i < anchors.size(); ++i)
    if (anchors[i] == delex[i]) ++same_position;
  EXPECT_LT(same_position, anchors.size() / 2);
}

TEST(SynthEmbeddings, DepthSignalMonotoneInNoise) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r2 = depth_r2_over_noise(seed);
    EXPECT_GT(r2[0], 0.999);
    for (std::size_t i = 1; i < r2.size(); ++i)
      EXPECT_LE(r2[i], r2[i - 1] + 0.02) << "seed " << seed << " step " << i;
  }
}

TEST(SynthEmbeddings, BowSignalIsSelective) {
  for (std::uint64_t seed : {1, 2}) {
    EXPECT_GT(bow_recovery(sp::SynthSignal::BowLinear, seed),
              bow_recovery(sp::SynthSignal::KernelLinear, seed));
  }
}
