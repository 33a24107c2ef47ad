#include "syntaxprobe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "syntaxprobe/error.hpp"
#include "syntaxprobe/ridge.hpp"

namespace syntaxprobe {

namespace {

void require_rows(const Eigen::MatrixXd& m, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != n)
    throw Error(Errc::RowMismatch,
                std::string(what) + " has " + std::to_string(m.rows()) +
                    " rows, expected " + std::to_string(n));
}

std::vector<std::size_t> concat_folds(
    const std::vector<std::vector<std::size_t>>& folds, std::size_t skip) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f)
    if (f != skip) out.insert(out.end(), folds[f].begin(), folds[f].end());
  return out;
}

}  // namespace

std::string to_string(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::Emb: return "EMB";
    case FeatureSet::EmbWc: return "EMB+WC";
    case FeatureSet::EmbBow: return "EMB+BOW";
    case FeatureSet::Wc: return "WC";
    case FeatureSet::Bow: return "BOW";
  }
  return "?";
}

FeatureSet parse_feature_set(const std::string& name) {
  for (FeatureSet fs : {FeatureSet::Emb, FeatureSet::EmbWc, FeatureSet::EmbBow,
                        FeatureSet::Wc, FeatureSet::Bow})
    if (to_string(fs) == name) return fs;
  throw Error(Errc::UnsupportedFeatureSet, "unknown feature set '" + name + "'");
}

std::string to_string(ProbeKind kind) {
  return kind == ProbeKind::TreeDepth ? "depth" : "kernel";
}

ProbeKind parse_probe_kind(const std::string& name) {
  if (name == "depth") return ProbeKind::TreeDepth;
  if (name == "kernel") return ProbeKind::TreeKernel;
  throw Error(Errc::InvalidConfig, "unknown probe kind '" + name + "'");
}

bool uses_embeddings(FeatureSet fs) noexcept {
  return fs == FeatureSet::Emb || fs == FeatureSet::EmbWc ||
         fs == FeatureSet::EmbBow;
}

void ProbeConfig::validate() const {
  if (alpha_grid.empty())
    throw Error(Errc::InvalidConfig, "alpha grid is empty");
  for (double a : alpha_grid)
    if (!(a > 0.0) || !std::isfinite(a))
      throw Error(Errc::InvalidConfig,
                  "alpha grid values must be > 0, got " + std::to_string(a));
  if (folds < 2) throw Error(Errc::InvalidConfig, "folds must be >= 2");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(Errc::InvalidConfig, "train_fraction must lie in (0, 1)");
  (void)KernelParams(lambda);
}

AlphaSelection select_alpha(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            const ProbeConfig& config) {
  config.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < config.folds)
    throw Error(Errc::TooFewRows, std::to_string(n) + " rows for " +
                                      std::to_string(config.folds) + " folds");
  require_rows(y, n, "Y");
  const auto folds =
      kfold_partition(n, config.folds, derive_seed(config.seed, SeedStage::Folds));

  std::vector<double> totals(config.alpha_grid.size(), 0.0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::vector<std::size_t> train = concat_folds(folds, f);
    const RidgeProblem problem(take_rows(x, train), take_rows(y, train));
    const Eigen::MatrixXd x_val = take_rows(x, folds[f]);
    const Eigen::MatrixXd y_val = take_rows(y, folds[f]);
    for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) {
      const RidgeModel model = problem.solve(config.alpha_grid[a]);
      totals[a] += r2_score(y_val, model.predict(x_val)).value;
    }
  }

  AlphaSelection sel;
  sel.grid_scores.resize(totals.size());
  bool have = false;
  for (std::size_t a = 0; a < totals.size(); ++a) {
    const double score = totals[a] / static_cast<double>(folds.size());
    sel.grid_scores[a] = score;
    const double alpha = config.alpha_grid[a];
    if (!have || score > sel.cv_score ||
        (score == sel.cv_score && alpha > sel.alpha)) {
      sel.alpha = alpha;
      sel.cv_score = score;
      have = true;
    }
  }
  return sel;
}

ProbeResult evaluate_probe(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           std::span<const std::string> ids,
                           std::span<const std::string> excluded,
                           const ProbeConfig& config) {
  config.validate();
  const std::size_t n = ids.size();
  require_rows(x, n, "feature matrix");
  require_rows(y, n, "target matrix");

  std::unordered_set<std::string> held_out(excluded.begin(), excluded.end());
  std::unordered_set<std::string> seen;
  for (const std::string& id : ids) {
    if (held_out.count(id))
      throw Error(Errc::SplitOverlap, "anchor '" + id + "' is in the probe rows");
    if (!seen.insert(id).second)
      throw Error(Errc::SplitOverlap, "utterance '" + id + "' appears twice");
  }

  const TrainTestSplit split =
      train_test_split(n, config.train_fraction,
                       derive_seed(config.seed, SeedStage::Split));
  {
    std::unordered_set<std::size_t> train_rows(split.train.begin(),
                                               split.train.end());
    for (std::size_t r : split.test)
      if (train_rows.count(r))
        throw Error(Errc::SplitOverlap, "row in both train and test: " + ids[r]);
  }
  if (split.train.size() < config.folds)
    throw Error(Errc::TooFewRows,
                std::to_string(split.train.size()) + " training rows for " +
                    std::to_string(config.folds) + " folds");

  Eigen::MatrixXd x_train = take_rows(x, split.train);
  Eigen::MatrixXd x_test = take_rows(x, split.test);
  const Eigen::MatrixXd y_train = take_rows(y, split.train);
  const Eigen::MatrixXd y_test = take_rows(y, split.test);

  if (config.standardize) {
    const Eigen::RowVectorXd mean = x_train.colwise().mean();
    Eigen::RowVectorXd scale =
        ((x_train.rowwise() - mean).array().square().colwise().sum() /
         static_cast<double>(x_train.rows()))
            .sqrt();
    for (Eigen::Index c = 0; c < scale.size(); ++c)
      if (scale[c] == 0.0) scale[c] = 1.0;
    x_train = x_train.array().rowwise() / scale.array();
    x_test = x_test.array().rowwise() / scale.array();
  }

  const AlphaSelection sel = select_alpha(x_train, y_train, config);
  const RidgeModel model = ridge_fit(x_train, y_train, sel.alpha);
  const R2Score score = r2_score(y_test, model.predict(x_test));

  ProbeResult result;
  result.feature_set = config.feature_set;
  result.chosen_alpha = sel.alpha;
  result.cv_score = sel.cv_score;
  result.test_r2 = score.value;
  result.zero_variance_columns = score.zero_variance_columns;
  result.n_train = split.train.size();
  result.n_test = split.test.size();
  result.seed = config.seed;
  result.standardized = config.standardize;
  return result;
}

Eigen::MatrixXd assemble_features(FeatureSet fs, const EmbeddingTable* table,
                                  std::span<const std::string> ids,
                                  const ReferenceFeatures& refs) {
  const std::size_t n = ids.size();
  auto emb = [&] {
    if (!table)
      throw Error(Errc::UnsupportedFeatureSet,
                  to_string(fs) + " needs an embedding table");
    return table->gather(ids);
  };
  auto wc = [&] {
    require_rows(refs.word_count, n, "word-count feature");
    return refs.word_count;
  };
  auto bow = [&] {
    require_rows(refs.bow, n, "bag-of-words feature");
    return refs.bow;
  };
  switch (fs) {
    case FeatureSet::Emb: return emb();
    case FeatureSet::EmbWc: return concat_features(emb(), wc());
    case FeatureSet::EmbBow: return concat_features(emb(), bow());
    case FeatureSet::Wc: return wc();
    case FeatureSet::Bow: return bow();
  }
  throw Error(Errc::UnsupportedFeatureSet, "unknown feature set");
}

ProbeResult probe_treedepth(const EmbeddingTable& table,
                            std::span<const std::string> ids,
                            std::span<const double> depths,
                            const ReferenceFeatures& refs,
                            const ProbeConfig& config) {
  if (depths.size() != ids.size())
    throw Error(Errc::RowMismatch, std::to_string(depths.size()) +
                                       " depth targets for " +
                                       std::to_string(ids.size()) + " utterances");
  const Eigen::MatrixXd x = assemble_features(config.feature_set, &table, ids, refs);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(depths.size()), 1);
  for (std::size_t i = 0; i < depths.size(); ++i)
    y(static_cast<Eigen::Index>(i), 0) = depths[i];

  ProbeResult result = evaluate_probe(x, y, ids, {}, config);
  result.kind = ProbeKind::TreeDepth;
  result.layer_id = table.layer_id();
  return result;
}

AnchorSet sample_anchors(std::span<const std::string> ids,
                         std::span<const Tree> trees, std::size_t n_anchors,
                         std::uint64_t seed) {
  if (trees.size() != ids.size())
    throw Error(Errc::RowMismatch, "trees and ids differ in length");
  if (n_anchors > ids.size())
    throw Error(Errc::TooFewRows, std::to_string(ids.size()) +
                                      " utterances for " +
                                      std::to_string(n_anchors) + " anchors");
  const std::vector<std::size_t> order = permutation(ids.size(), seed);
  AnchorSet anchors;
  anchors.seed = seed;
  for (std::size_t k = 0; k < n_anchors; ++k) {
    const std::size_t r = order[k];
    if (internal_node_count(trees[r]) == 0)
      throw Error(Errc::DegenerateTree,
                  "anchor candidate " + std::to_string(r) + " (" + ids[r] +
                      ") has no production");
    anchors.ids.push_back(ids[r]);
  }
  return anchors;
}

TreeKernelTask prepare_treekernel(std::span<const std::string> ids,
                                  std::span<const Tree> trees,
                                  const ProbeConfig& config,
                                  std::uint64_t anchor_seed) {
  config.validate();
  if (ids.size() <= config.n_anchors + config.folds)
    throw Error(Errc::TooFewRows,
                std::to_string(ids.size()) + " utterances, need more than " +
                    std::to_string(config.n_anchors) + " anchors + " +
                    std::to_string(config.folds) + " folds");
  TreeKernelTask task;
  task.anchors = sample_anchors(ids, trees, config.n_anchors,
                                derive_seed(anchor_seed, SeedStage::Anchors));

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < ids.size(); ++i) position.emplace(ids[i], i);
  std::unordered_set<std::size_t> anchor_rows;
  for (const std::string& id : task.anchors.ids) {
    task.anchor_rows.push_back(position.at(id));
    anchor_rows.insert(position.at(id));
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (anchor_rows.count(i)) continue;
    task.population.push_back(ids[i]);
    task.population_rows.push_back(i);
  }

  std::vector<Tree> pop_trees, anchor_trees;
  pop_trees.reserve(task.population_rows.size());
  for (std::size_t r : task.population_rows) pop_trees.push_back(trees[r]);
  for (std::size_t r : task.anchor_rows) anchor_trees.push_back(trees[r]);
  try {
    task.targets = anchor_kernel_matrix(pop_trees, anchor_trees,
                                        KernelParams(config.lambda), config.jobs);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateTree) throw;
    throw Error(Errc::DegenerateTree,
                std::string("probe population: ") + e.what());
  }
  return task;
}

ProbeResult probe_treekernel(const EmbeddingTable& table,
                             std::span<const std::string> ids,
                             const TreeKernelTask& task,
                             const ReferenceFeatures& refs,
                             const ProbeConfig& config) {
  Eigen::MatrixXd inputs, anchor_inputs;
  switch (config.feature_set) {
    case FeatureSet::Emb:
      inputs = table.gather(task.population);
      anchor_inputs = table.gather(task.anchors.ids);
      break;
    case FeatureSet::Bow:
      require_rows(refs.bow, ids.size(), "bag-of-words feature");
      inputs = take_rows(refs.bow, task.population_rows);
      anchor_inputs = take_rows(refs.bow, task.anchor_rows);
      break;
    default:
      throw Error(Errc::UnsupportedFeatureSet,
                  "tree-kernel probe supports EMB and BOW, not " +
                      to_string(config.feature_set));
  }
  const Eigen::MatrixXd x = anchor_cosine_matrix(inputs, anchor_inputs);
  ProbeResult result =
      evaluate_probe(x, task.targets, task.population, task.anchors.ids, config);
  result.kind = ProbeKind::TreeKernel;
  result.layer_id = table.layer_id();
  result.n_anchors = task.anchors.ids.size();
  return result;
}

ProbeResult probe_treekernel(const EmbeddingTable& table,
                             std::span<const std::string> ids,
                             std::span<const Tree> trees,
                             const ProbeConfig& config,
                             std::uint64_t anchor_seed) {
  const TreeKernelTask task = prepare_treekernel(ids, trees, config, anchor_seed);
  return probe_treekernel(table, ids, task, ReferenceFeatures{}, config);
}

double rsa_correlation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw Error(Errc::LengthMismatch, "RSA needs two square matrices of one size");
  const Eigen::Index n = a.rows();
  std::vector<double> u, v;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      u.push_back(a(i, j));
      v.push_back(b(i, j));
    }
  if (u.size() < 2)
    throw Error(Errc::TooFewRows, "RSA needs at least 3 items");
  const Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::Map<const Eigen::VectorXd> y(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double sx = xc.norm();
  const double sy = yc.norm();
  if (sx == 0.0 || sy == 0.0)
    throw Error(Errc::ZeroVariance, "similarity vector has zero variance");
  return std::clamp(xc.dot(yc) / (sx * sy), -1.0, 1.0);
}

double rsa_baseline(const EmbeddingTable& table,
                    std::span<const std::string> ids,
                    std::span<const Tree> trees, const AnchorSet& anchors,
                    const KernelParams& params) {
  if (trees.size() != ids.size())
    throw Error(Errc::RowMismatch, "trees and ids differ in length");
  const std::unordered_set<std::string> held_out(anchors.ids.begin(),
                                                 anchors.ids.end());
  std::vector<std::string> pop;
  std::vector<Tree> pop_trees;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (held_out.count(ids[i])) continue;
    pop.push_back(ids[i]);
    pop_trees.push_back(trees[i]);
  }
  if (pop.size() < 3)
    throw Error(Errc::TooFewRows, "RSA needs at least 3 non-anchor utterances");
  const Eigen::MatrixXd emb = table.gather(pop);
  return rsa_correlation(anchor_cosine_matrix(emb, emb),
                         gram_matrix(pop_trees, params));
}

}  // namespace syntaxprobe
