#include "syntaxprobe/tree_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "syntaxprobe/error.hpp"

namespace syntaxprobe {

namespace {

using Pair = std::pair<std::uint32_t, std::uint32_t>;

// Runs body(i) for i in [0, n), striding rows across `jobs` threads. Each
// index is handled by exactly one worker.
void parallel_rows(std::size_t n, unsigned jobs,
                   const std::function<void(std::size_t)>& body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += jobs) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

double checked_self(const KernelTree& t, const KernelParams& params,
                    std::size_t index) {
  if (t.internal_count() == 0)
    throw Error(Errc::DegenerateTree,
                "tree " + std::to_string(index) + " " + t.canonical() +
                    " has no production");
  return raw_kernel(t, t, params);
}

}  // namespace

KernelParams::KernelParams(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw Error(Errc::InvalidLambda,
                "lambda must lie in (0, 1], got " + std::to_string(lambda));
}

KernelTree::KernelTree(const Tree& tree) {
  if (is_lexicalized(tree))
    throw Error(Errc::LexicalizedInput,
                "tree kernel needs delexicalized trees: " + serialize(tree));
  nodes_.reserve(node_count(tree));
  add(tree);
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    if (!nodes_[i].children.empty()) sorted_internal_.push_back(i);
  std::stable_sort(sorted_internal_.begin(), sorted_internal_.end(),
                   [this](std::uint32_t x, std::uint32_t y) {
                     return nodes_[x].production < nodes_[y].production;
                   });
  canonical_ = serialize(tree);
}

std::uint32_t KernelTree::add(const Tree& t) {
  Node node;
  if (!t.children.empty()) {
    node.production = t.label;
    for (const Tree& c : t.children) {
      node.production += ' ';
      node.production += c.label;
      node.children.push_back(add(c));
    }
  }
  nodes_.push_back(std::move(node));
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

NodePairTable match_nodes(const KernelTree& a, const KernelTree& b,
                          const KernelParams& params) {
  NodePairTable table;
  const auto& na = a.nodes();
  const auto& nb = b.nodes();
  const auto& sa = a.sorted_internal();
  const auto& sb = b.sorted_internal();

  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const int cmp = na[sa[i]].production.compare(nb[sb[j]].production);
    if (cmp < 0) {
      ++i;
    } else if (cmp > 0) {
      ++j;
    } else {
      std::size_t i_end = i, j_end = j;
      while (i_end < sa.size() &&
             na[sa[i_end]].production == na[sa[i]].production)
        ++i_end;
      while (j_end < sb.size() &&
             nb[sb[j_end]].production == nb[sb[j]].production)
        ++j_end;
      for (std::size_t x = i; x < i_end; ++x)
        for (std::size_t y = j; y < j_end; ++y)
          table.matched_pairs.emplace_back(sa[x], sb[y]);
      i = i_end;
      j = j_end;
    }
  }

  // Postorder indexing puts children before parents, so ascending pair
  // order evaluates every child pair first.
  std::sort(table.matched_pairs.begin(), table.matched_pairs.end());
  table.delta.resize(table.matched_pairs.size());
  const double lambda = params.lambda();
  for (std::size_t k = 0; k < table.matched_pairs.size(); ++k) {
    const auto [p, q] = table.matched_pairs[k];
    double prod = lambda;
    const auto& cp = na[p].children;
    const auto& cq = nb[q].children;
    for (std::size_t c = 0; c < cp.size(); ++c) {
      const Pair key{cp[c], cq[c]};
      const auto it = std::lower_bound(table.matched_pairs.begin(),
                                       table.matched_pairs.begin() + k, key);
      const double child =
          (it != table.matched_pairs.begin() + k && *it == key)
              ? table.delta[it - table.matched_pairs.begin()]
              : 0.0;
      prod *= 1.0 + child;
    }
    table.delta[k] = prod;
  }
  return table;
}

double raw_kernel(const KernelTree& a, const KernelTree& b,
                  const KernelParams& params) {
  const bool swap = b.canonical() < a.canonical();
  const NodePairTable table =
      swap ? match_nodes(b, a, params) : match_nodes(a, b, params);
  double sum = 0.0;
  for (double d : table.delta) sum += d;
  return sum;
}

double raw_kernel(const Tree& a, const Tree& b, const KernelParams& params) {
  return raw_kernel(KernelTree(a), KernelTree(b), params);
}

double raw_kernel_all_pairs(const KernelTree& a, const KernelTree& b,
                            const KernelParams& params) {
  const auto& na = a.nodes();
  const auto& nb = b.nodes();
  const std::size_t cols = nb.size();
  std::vector<double> memo(na.size() * cols, -1.0);

  std::function<double(std::uint32_t, std::uint32_t)> delta =
      [&](std::uint32_t p, std::uint32_t q) -> double {
    double& slot = memo[p * cols + q];
    if (slot >= 0.0) return slot;
    if (na[p].children.empty() || na[p].production != nb[q].production) {
      slot = 0.0;
      return slot;
    }
    double prod = params.lambda();
    for (std::size_t c = 0; c < na[p].children.size(); ++c)
      prod *= 1.0 + delta(na[p].children[c], nb[q].children[c]);
    slot = prod;
    return slot;
  };

  double sum = 0.0;
  for (std::uint32_t p = 0; p < na.size(); ++p)
    for (std::uint32_t q = 0; q < nb.size(); ++q) sum += delta(p, q);
  return sum;
}

double normalized_kernel(const Tree& a, const Tree& b,
                         const KernelParams& params) {
  const KernelTree ka(a), kb(b);
  const double saa = checked_self(ka, params, 0);
  const double sbb = checked_self(kb, params, 1);
  return raw_kernel(ka, kb, params) / std::sqrt(saa * sbb);
}

KernelBatch::KernelBatch(std::span<const Tree> trees,
                         const KernelParams& params)
    : params_(params) {
  trees_.reserve(trees.size());
  self_.reserve(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    trees_.emplace_back(trees[i]);
    self_.push_back(checked_self(trees_.back(), params_, i));
  }
}

double KernelBatch::normalized(std::size_t i, const KernelTree& other,
                               double other_self) const {
  return raw_kernel(trees_[i], other, params_) /
         std::sqrt(self_[i] * other_self);
}

double KernelBatch::normalized(std::size_t i, std::size_t j) const {
  return normalized(i, trees_[j], self_[j]);
}

Eigen::MatrixXd gram_matrix(std::span<const Tree> trees,
                            const KernelParams& params, unsigned jobs) {
  const KernelBatch batch(trees, params);
  const std::size_t n = batch.size();
  Eigen::MatrixXd g(n, n);
  parallel_rows(n, jobs, [&](std::size_t i) {
    g(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) g(i, j) = batch.normalized(i, j);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Eigen::VectorXd anchor_kernel_vector(const Tree& tree,
                                     std::span<const Tree> anchors,
                                     const KernelParams& params) {
  return anchor_kernel_matrix(std::span<const Tree>(&tree, 1), anchors, params)
      .row(0)
      .transpose();
}

Eigen::MatrixXd anchor_kernel_matrix(std::span<const Tree> trees,
                                     std::span<const Tree> anchors,
                                     const KernelParams& params,
                                     unsigned jobs) {
  const KernelBatch anchor_batch(anchors, params);
  Eigen::MatrixXd out(trees.size(), anchors.size());
  parallel_rows(trees.size(), jobs, [&](std::size_t r) {
    const KernelTree t(trees[r]);
    const double self = checked_self(t, params, r);
    for (std::size_t a = 0; a < anchor_batch.size(); ++a)
      out(r, a) = anchor_batch.normalized(a, t, self);
  });
  return out;
}

}  // namespace syntaxprobe
