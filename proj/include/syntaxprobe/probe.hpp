#ifndef SYNTAXPROBE_PROBE_HPP
#define SYNTAXPROBE_PROBE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syntaxprobe/embedding.hpp"
#include "syntaxprobe/features.hpp"
#include "syntaxprobe/tree.hpp"
#include "syntaxprobe/tree_kernel.hpp"

namespace syntaxprobe {

enum class FeatureSet { Emb, EmbWc, EmbBow, Wc, Bow };
enum class ProbeKind { TreeDepth, TreeKernel };

// "EMB", "EMB+WC", "EMB+BOW", "WC", "BOW".
std::string to_string(FeatureSet fs);
FeatureSet parse_feature_set(const std::string& name);
std::string to_string(ProbeKind kind);  // "depth" / "kernel"
ProbeKind parse_probe_kind(const std::string& name);

bool uses_embeddings(FeatureSet fs) noexcept;

struct ProbeConfig {
  std::vector<double> alpha_grid{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  std::size_t folds = 10;
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  FeatureSet feature_set = FeatureSet::Emb;
  // Scale X columns to unit variance (train statistics) before fitting.
  // Off by default: features and targets are only centered.
  bool standardize = false;
  std::size_t n_anchors = 200;
  double lambda = 0.5;
  unsigned jobs = 1;

  // Throws InvalidConfig.
  void validate() const;
};

struct AlphaSelection {
  double alpha = 0.0;
  double cv_score = 0.0;
  std::vector<double> grid_scores;  // mean validation R², grid order
};

/// k-fold search over config.alpha_grid. Rows are shuffled with the Folds
/// stage seed and cut into contiguous folds. Ties go to the larger alpha.
AlphaSelection select_alpha(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            const ProbeConfig& config);

struct ProbeResult {
  ProbeKind kind = ProbeKind::TreeDepth;
  std::uint32_t layer_id = 0;
  FeatureSet feature_set = FeatureSet::Emb;
  double chosen_alpha = 0.0;
  double cv_score = 0.0;
  double test_r2 = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_anchors = 0;
  std::uint64_t seed = 0;
  bool standardized = false;
  std::size_t zero_variance_columns = 0;
  std::string config_fingerprint;
};

/// Shared protocol of both probes: seeded train/test split, alpha selection
/// by cross-validation on the training part only, refit on the full
/// training part, one evaluation on the test part. `ids` name the rows of
/// x and y; `excluded` (anchors) must be disjoint from them, otherwise
/// SplitOverlap.
ProbeResult evaluate_probe(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           std::span<const std::string> ids,
                           std::span<const std::string> excluded,
                           const ProbeConfig& config);

// Word-count and bag-of-words controls, rows aligned with the probe
// population.
struct ReferenceFeatures {
  Eigen::MatrixXd word_count;  // n x 1
  Eigen::MatrixXd bow;         // n x |vocab|
};

// Columns of the configured feature set for the given rows.
Eigen::MatrixXd assemble_features(FeatureSet fs, const EmbeddingTable* table,
                                  std::span<const std::string> ids,
                                  const ReferenceFeatures& refs);

/// Predicts raw tree depth from the configured feature set. `ids`, `depths`
/// and `refs` rows are aligned; embeddings are looked up by ID.
ProbeResult probe_treedepth(const EmbeddingTable& table,
                            std::span<const std::string> ids,
                            std::span<const double> depths,
                            const ReferenceFeatures& refs,
                            const ProbeConfig& config);

// Anchor sample plus the output similarity space, shared by every layer.
struct TreeKernelTask {
  AnchorSet anchors;
  std::vector<std::size_t> anchor_rows;      // positions in the corpus
  std::vector<std::string> population;       // non-anchor IDs
  std::vector<std::size_t> population_rows;  // positions in the corpus
  Eigen::MatrixXd targets;                   // population x anchors
};

// Uniform sampling without replacement of config.n_anchors utterances.
// Throws DegenerateTree (with index) or TooFewRows.
AnchorSet sample_anchors(std::span<const std::string> ids,
                         std::span<const Tree> trees, std::size_t n_anchors,
                         std::uint64_t seed);

/// Samples anchors with the Anchors stage of `anchor_seed` and computes the
/// normalized tree kernel of every remaining utterance to every anchor.
TreeKernelTask prepare_treekernel(std::span<const std::string> ids,
                                  std::span<const Tree> trees,
                                  const ProbeConfig& config,
                                  std::uint64_t anchor_seed);

/// RSA_regress for one layer: cosine-to-anchor vectors of the inputs are
/// mapped onto tree-kernel-to-anchor vectors. Supported feature sets are
/// EMB and BOW (`refs.bow` rows aligned with the corpus `ids`).
ProbeResult probe_treekernel(const EmbeddingTable& table,
                             std::span<const std::string> ids,
                             const TreeKernelTask& task,
                             const ReferenceFeatures& refs,
                             const ProbeConfig& config);

ProbeResult probe_treekernel(const EmbeddingTable& table,
                             std::span<const std::string> ids,
                             std::span<const Tree> trees,
                             const ProbeConfig& config,
                             std::uint64_t anchor_seed);

// Pearson correlation of the strict upper triangles of two square
// similarity matrices. Throws ZeroVariance.
double rsa_correlation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Classic (non-trainable) RSA between cosine similarities of embeddings and
/// normalized tree kernels over the utterances outside the anchor set.
double rsa_baseline(const EmbeddingTable& table,
                    std::span<const std::string> ids,
                    std::span<const Tree> trees, const AnchorSet& anchors,
                    const KernelParams& params);

}  // namespace syntaxprobe

#endif
