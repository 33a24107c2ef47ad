#include "syntaxprobe/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "syntaxprobe/error.hpp"

namespace syntaxprobe {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, SeedStage stage) noexcept {
  return splitmix64(seed +
                    static_cast<std::uint64_t>(stage) * 0x9E3779B97F4A7C15ULL);
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

Eigen::MatrixXd RidgeModel::predict(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = x * weights;
  out.rowwise() += intercept;
  return out;
}

RidgeProblem::RidgeProblem(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows())
    throw Error(Errc::RowMismatch, "X has " + std::to_string(x.rows()) +
                                       " rows, Y has " + std::to_string(y.rows()));
  if (x.rows() < 2)
    throw Error(Errc::TooFewRows, "ridge needs at least 2 rows");
  if (!x.allFinite() || !y.allFinite())
    throw Error(Errc::NaNInput, "non-finite value in ridge input");

  x_mean_ = x.colwise().mean();
  y_mean_ = y.colwise().mean();
  Eigen::MatrixXd xc = x.rowwise() - x_mean_;
  Eigen::MatrixXd yc = y.rowwise() - y_mean_;
  dual_ = x.cols() > x.rows();
  if (dual_) {
    gram_ = xc * xc.transpose();
    rhs_ = std::move(yc);
    xc_ = std::move(xc);
  } else {
    gram_ = xc.transpose() * xc;
    rhs_ = xc.transpose() * yc;
  }
}

RidgeModel RidgeProblem::solve(double alpha) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw Error(Errc::InvalidConfig,
                "ridge alpha must be >= 0, got " + std::to_string(alpha));
  Eigen::MatrixXd system = gram_;
  system.diagonal().array() += alpha;
  const Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success)
    throw Error(Errc::SingularSystem,
                "ridge system not positive definite at alpha=" +
                    std::to_string(alpha));
  RidgeModel model;
  if (dual_)
    model.weights = xc_.transpose() * llt.solve(rhs_);
  else
    model.weights = llt.solve(rhs_);
  if (!model.weights.allFinite())
    throw Error(Errc::SingularSystem, "ridge solution is not finite");
  model.intercept = y_mean_ - x_mean_ * model.weights;
  return model;
}

RidgeModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     double alpha) {
  return RidgeProblem(x, y).solve(alpha);
}

R2Score r2_score(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols())
    throw Error(Errc::LengthMismatch, "r2_score shape mismatch");
  R2Score score;
  if (y_true.cols() == 0) return score;
  double total = 0.0;
  for (Eigen::Index c = 0; c < y_true.cols(); ++c) {
    const double mean = y_true.col(c).mean();
    // Same scalar loop for both sums, so predicting the mean gives exactly 0.
    double ss_tot = 0.0, ss_res = 0.0;
    for (Eigen::Index r = 0; r < y_true.rows(); ++r) {
      const double dt = y_true(r, c) - mean;
      const double dr = y_true(r, c) - y_pred(r, c);
      ss_tot += dt * dt;
      ss_res += dr * dr;
    }
    if (ss_tot == 0.0) {
      ++score.zero_variance_columns;
      continue;
    }
    total += 1.0 - ss_res / ss_tot;
  }
  score.value = total / static_cast<double>(y_true.cols());
  return score;
}

TrainTestSplit train_test_split(std::size_t n, double train_fraction,
                                std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(Errc::InvalidConfig, "train_fraction must lie in (0, 1)");
  const auto n_test = static_cast<std::size_t>(
      std::ceil((1.0 - train_fraction) * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n)
    throw Error(Errc::TooFewRows,
                std::to_string(n) + " rows cannot be split at " +
                    std::to_string(train_fraction));
  const std::vector<std::size_t> order = permutation(n, seed);
  TrainTestSplit split;
  split.train.assign(order.begin(), order.end() - static_cast<long>(n_test));
  split.test.assign(order.end() - static_cast<long>(n_test), order.end());
  return split;
}

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n,
                                                      std::size_t folds,
                                                      std::uint64_t seed) {
  if (folds < 2) throw Error(Errc::InvalidConfig, "folds must be >= 2");
  if (n < folds)
    throw Error(Errc::TooFewRows, std::to_string(n) + " rows for " +
                                      std::to_string(folds) + " folds");
  const std::vector<std::size_t> order = permutation(n, seed);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = n / folds + (f < n % folds ? 1 : 0);
    out[f].assign(order.begin() + static_cast<long>(pos),
                  order.begin() + static_cast<long>(pos + size));
    pos += size;
  }
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m,
                          const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace syntaxprobe
