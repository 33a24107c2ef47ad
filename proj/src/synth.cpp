#include "syntaxprobe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "syntaxprobe/error.hpp"
#include "syntaxprobe/ridge.hpp"
#include "syntaxprobe/tree_kernel.hpp"

namespace syntaxprobe {

namespace {

template <typename T>
const T& pick(const std::vector<T>& items, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

Tree preterminal(const SynthSpec& spec, std::mt19937_64& rng) {
  Tree t;
  t.label = pick(spec.pos_tags, rng);
  std::uniform_int_distribution<std::size_t> word(0, spec.vocab_size - 1);
  t.terminal = "w" + std::to_string(word(rng));
  return t;
}

Tree phrase(const SynthSpec& spec, std::mt19937_64& rng, std::size_t depth) {
  Tree t;
  t.label = pick(spec.nonterminals, rng);
  std::uniform_int_distribution<int> arity(1, 3);
  std::bernoulli_distribution expand(spec.expand_probability);
  const int n = arity(rng);
  for (int c = 0; c < n; ++c) {
    if (depth + 1 < spec.max_depth && expand(rng))
      t.children.push_back(phrase(spec, rng, depth + 1));
    else
      t.children.push_back(preterminal(spec, rng));
  }
  return t;
}

std::mt19937_64 stream(std::uint64_t base, std::uint64_t index) {
  return std::mt19937_64(splitmix64(base + index));
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols,
                         std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  return m;
}

// Whitened random map G^{-1/2} R from anchor-kernel space to `dim`
// coordinates, where G is the anchor Gram matrix. Eigenvalues below a
// relative cutoff are dropped.
Eigen::MatrixXd kernel_map(const std::vector<Tree>& anchors, Eigen::Index dim,
                           std::mt19937_64& rng) {
  const auto s = static_cast<Eigen::Index>(anchors.size());
  const Eigen::MatrixXd r = gaussian(s, dim, rng);
  const Eigen::MatrixXd g = gram_matrix(anchors, KernelParams(0.5));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const Eigen::VectorXd& w = eig.eigenvalues();
  const double cutoff = 1e-8 * std::max(w.maxCoeff(), 1.0);
  Eigen::VectorXd inv_sqrt(s);
  for (Eigen::Index i = 0; i < s; ++i)
    inv_sqrt(i) = w(i) > cutoff ? 1.0 / std::sqrt(w(i)) : 0.0;
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return v * inv_sqrt.asDiagonal() * (v.transpose() * r);
}

}  // namespace

std::string to_string(SynthSignal s) {
  switch (s) {
    case SynthSignal::None: return "NONE";
    case SynthSignal::DepthLinear: return "DEPTH_LINEAR";
    case SynthSignal::KernelLinear: return "KERNEL_LINEAR";
    case SynthSignal::BowLinear: return "BOW_LINEAR";
  }
  return "?";
}

SynthSignal parse_synth_signal(const std::string& name) {
  for (SynthSignal s : {SynthSignal::None, SynthSignal::DepthLinear,
                        SynthSignal::KernelLinear, SynthSignal::BowLinear})
    if (to_string(s) == name) return s;
  throw Error(Errc::InvalidConfig, "unknown synthetic signal '" + name + "'");
}

void SynthSpec::validate() const {
  if (max_depth < 2) throw Error(Errc::InvalidConfig, "max_depth must be >= 2");
  if (dim < 1) throw Error(Errc::InvalidConfig, "dim must be >= 1");
  if (!(noise_sigma >= 0.0))
    throw Error(Errc::InvalidConfig, "noise_sigma must be >= 0");
  if (nonterminals.empty() || pos_tags.empty())
    throw Error(Errc::InvalidConfig, "label alphabet is empty");
  if (vocab_size < 1) throw Error(Errc::InvalidConfig, "vocab_size must be >= 1");
  if (!(expand_probability >= 0.0 && expand_probability <= 1.0))
    throw Error(Errc::InvalidConfig, "expand_probability must lie in [0, 1]");
  if (signal == SynthSignal::KernelLinear && kernel_anchors < 1)
    throw Error(Errc::InvalidConfig, "kernel_anchors must be >= 1");
}

Tree random_tree(const SynthSpec& spec, std::mt19937_64& rng) {
  return phrase(spec, rng, 1);
}

std::vector<Tree> synth_trees(const SynthSpec& spec) {
  spec.validate();
  const std::uint64_t base = derive_seed(spec.seed, SeedStage::SynthTrees);
  std::vector<Tree> trees;
  trees.reserve(spec.n_utterances);
  for (std::size_t i = 0; i < spec.n_utterances; ++i) {
    auto rng = stream(base, i);
    trees.push_back(random_tree(spec, rng));
  }
  return trees;
}

CorpusManifest synth_corpus(const std::vector<Tree>& trees) {
  CorpusManifest corpus;
  char id[32];
  for (std::size_t i = 0; i < trees.size(); ++i) {
    std::snprintf(id, sizeof id, "utt%06zu", i);
    std::string text;
    for (const std::string& w : yield(trees[i])) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    corpus.add(id, std::move(text));
  }
  return corpus;
}

std::vector<Tree> synth_kernel_anchors(const SynthSpec& spec) {
  const std::uint64_t base = derive_seed(spec.seed, SeedStage::SynthAnchors);
  std::vector<Tree> anchors;
  anchors.reserve(spec.kernel_anchors);
  for (std::size_t i = 0; i < spec.kernel_anchors; ++i) {
    auto rng = stream(base, i);
    anchors.push_back(delexicalize(random_tree(spec, rng)));
  }
  return anchors;
}

EmbeddingTable synth_embeddings(const std::vector<Tree>& trees,
                                const std::vector<std::string>& ids,
                                const SynthSpec& spec, std::uint32_t layer_id) {
  spec.validate();
  if (trees.size() != ids.size())
    throw Error(Errc::RowMismatch, "trees and ids differ in length");
  const auto n = static_cast<Eigen::Index>(trees.size());
  const auto dim = static_cast<Eigen::Index>(spec.dim);
  const std::uint64_t base = derive_seed(spec.seed, SeedStage::SynthEmbeddings);

  // Noise: one stream per layer.
  auto noise_rng = stream(base, 1 + static_cast<std::uint64_t>(layer_id));
  Eigen::MatrixXd noise = gaussian(n, dim, noise_rng);
  // Signal maps: one stream shared by every layer.
  auto map_rng = stream(base, 0);

  Eigen::MatrixXd e(n, dim);
  switch (spec.signal) {
    case SynthSignal::None:
      e = noise;
      break;
    case SynthSignal::DepthLinear:
      e = spec.noise_sigma * noise;
      for (Eigen::Index i = 0; i < n; ++i)
        e(i, 0) = static_cast<double>(tree_depth(trees[i]));
      break;
    case SynthSignal::KernelLinear: {
      const std::vector<Tree> anchors = synth_kernel_anchors(spec);
      std::vector<Tree> delex;
      delex.reserve(trees.size());
      for (const Tree& t : trees) delex.push_back(delexicalize(t));
      const Eigen::MatrixXd k =
          anchor_kernel_matrix(delex, anchors, KernelParams(0.5));
      e = k * kernel_map(anchors, dim, map_rng) + spec.noise_sigma * noise;
      break;
    }
    case SynthSignal::BowLinear: {
      const auto v = static_cast<Eigen::Index>(spec.vocab_size);
      Eigen::MatrixXd bow = Eigen::MatrixXd::Zero(n, v);
      for (Eigen::Index i = 0; i < n; ++i)
        for (const std::string& w : yield(trees[i]))
          if (w.size() > 1 && w[0] == 'w') {
            const long j = std::stol(w.substr(1));
            if (j >= 0 && j < v) bow(i, j) += 1.0;
          }
      const Eigen::MatrixXd m = gaussian(v, dim, map_rng);
      e = bow * m + spec.noise_sigma * noise;
      break;
    }
  }
  return EmbeddingTable(layer_id, e, ids);
}

}  // namespace syntaxprobe
