#ifndef SYNTAXPROBE_SYNTH_HPP
#define SYNTAXPROBE_SYNTH_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "syntaxprobe/corpus.hpp"
#include "syntaxprobe/embedding.hpp"
#include "syntaxprobe/tree.hpp"

namespace syntaxprobe {

// What the synthetic embeddings encode.
//   None          i.i.d. standard normal entries
//   DepthLinear   coordinate 0 is the tree depth, the rest is noise
//   KernelLinear  tree-kernel vector to a set of synthetic anchors, times a
//                 fixed map (inverse square root of the anchor Gram matrix
//                 composed with a random Gaussian matrix), plus noise
//   BowLinear     fixed random projection of the bag-of-words counts, plus
//                 noise
enum class SynthSignal { None, DepthLinear, KernelLinear, BowLinear };

std::string to_string(SynthSignal s);
SynthSignal parse_synth_signal(const std::string& name);

struct SynthSpec {
  std::size_t n_utterances = 500;
  std::size_t max_depth = 6;
  // One label each by default: trees then differ only in shape, which a
  // modest anchor set can cover.
  std::vector<std::string> nonterminals{"S"};
  std::vector<std::string> pos_tags{"X"};
  std::size_t vocab_size = 40;
  // Probability that a non-final child is a phrase rather than a
  // preterminal.
  double expand_probability = 0.5;
  SynthSignal signal = SynthSignal::None;
  double noise_sigma = 0.0;
  std::size_t dim = 64;
  // Anchors behind KernelLinear; drawn from their own seed stream so they
  // never coincide with a probe's anchor sample.
  std::size_t kernel_anchors = 100;
  std::uint64_t seed = 0;

  // Throws InvalidConfig.
  void validate() const;
};

/// Samples one lexicalized tree. Every phrase draws 1-3 children uniformly;
/// children at the depth limit are preterminals carrying a word. The root
/// is always a phrase, so the tree has at least one production.
Tree random_tree(const SynthSpec& spec, std::mt19937_64& rng);

// Tree i comes from its own RNG stream, so the sequence is reproducible
// and independent of generation order.
std::vector<Tree> synth_trees(const SynthSpec& spec);

// IDs `utt000000`, ... with transcripts equal to each tree's yield.
CorpusManifest synth_corpus(const std::vector<Tree>& trees);

// The fixed synthetic anchors used by KernelLinear (delexicalized).
std::vector<Tree> synth_kernel_anchors(const SynthSpec& spec);

/// Embeddings for `layer_id`. The signal map is shared by all layers; the
/// noise stream differs per layer.
EmbeddingTable synth_embeddings(const std::vector<Tree>& trees,
                                const std::vector<std::string>& ids,
                                const SynthSpec& spec,
                                std::uint32_t layer_id = 0);

}  // namespace syntaxprobe

#endif
