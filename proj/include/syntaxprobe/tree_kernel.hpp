#ifndef SYNTAXPROBE_TREE_KERNEL_HPP
#define SYNTAXPROBE_TREE_KERNEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "syntaxprobe/tree.hpp"

namespace syntaxprobe {

// Decay factor for larger shared fragments; must lie in (0, 1].
class KernelParams {
 public:
  explicit KernelParams(double lambda = 0.5);
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

// Flattened, delexicalized tree ready for kernel evaluation. Nodes are in
// postorder so every child index is smaller than its parent's. Internal
// nodes are additionally listed sorted by production key, which is what
// the pair matcher merges on.
class KernelTree {
 public:
  // Throws LexicalizedInput if any node carries a terminal.
  explicit KernelTree(const Tree& tree);

  struct Node {
    std::string production;        // "NP DT NN"; empty for leaves
    std::vector<std::uint32_t> children;
  };

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<std::uint32_t>& sorted_internal() const noexcept {
    return sorted_internal_;
  }
  std::size_t internal_count() const noexcept {
    return sorted_internal_.size();
  }
  const std::string& canonical() const noexcept { return canonical_; }

 private:
  std::uint32_t add(const Tree& t);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> sorted_internal_;
  std::string canonical_;
};

// Internal-node pairs (index in first tree, index in second) that share a
// production, in ascending (first, second) order, with their Δ values.
struct NodePairTable {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> matched_pairs;
  std::vector<double> delta;
};

/// Builds the matched-pair table by merging both trees' production-sorted
/// node lists and evaluating the Δ recursion bottom-up:
///   Δ(n1,n2) = λ · Π_children (1 + Δ(c1,c2)), Δ = 0 on differing productions.
NodePairTable match_nodes(const KernelTree& a, const KernelTree& b,
                          const KernelParams& params);

// Collins-Duffy subset-tree kernel: sum of Δ over matched internal pairs.
// Symmetric bit for bit: the pair is put in canonical order before summing.
double raw_kernel(const KernelTree& a, const KernelTree& b,
                  const KernelParams& params);
double raw_kernel(const Tree& a, const Tree& b, const KernelParams& params);

// Reference evaluation over every internal-node pair with no production
// sorting. Used to cross-check the fast matcher.
double raw_kernel_all_pairs(const KernelTree& a, const KernelTree& b,
                            const KernelParams& params);

/// K(a,b) / sqrt(K(a,a) K(b,b)). Throws DegenerateTree when either tree has
/// no production.
double normalized_kernel(const Tree& a, const Tree& b,
                         const KernelParams& params);

// Kernel evaluator that caches self-kernels for a fixed set of trees.
class KernelBatch {
 public:
  KernelBatch(std::span<const Tree> trees, const KernelParams& params);

  std::size_t size() const noexcept { return trees_.size(); }
  const KernelTree& tree(std::size_t i) const { return trees_[i]; }
  double self_kernel(std::size_t i) const { return self_[i]; }
  const KernelParams& params() const noexcept { return params_; }

  // Normalized kernel between member i and an external prepared tree whose
  // self-kernel is `other_self`.
  double normalized(std::size_t i, const KernelTree& other,
                    double other_self) const;
  double normalized(std::size_t i, std::size_t j) const;

 private:
  KernelParams params_;
  std::vector<KernelTree> trees_;
  std::vector<double> self_;
};

/// Normalized Gram matrix. Only the upper triangle is evaluated; cells are
/// independent, so `jobs` > 1 fills rows in parallel with identical output.
/// DegenerateTree errors name the offending index.
Eigen::MatrixXd gram_matrix(std::span<const Tree> trees,
                            const KernelParams& params, unsigned jobs = 1);

// Normalized similarity of `tree` to each anchor, in anchor order.
Eigen::VectorXd anchor_kernel_vector(const Tree& tree,
                                     std::span<const Tree> anchors,
                                     const KernelParams& params);

// Row i is anchor_kernel_vector(trees[i], anchors); anchors are prepared
// once.
Eigen::MatrixXd anchor_kernel_matrix(std::span<const Tree> trees,
                                     std::span<const Tree> anchors,
                                     const KernelParams& params,
                                     unsigned jobs = 1);

}  // namespace syntaxprobe

#endif
