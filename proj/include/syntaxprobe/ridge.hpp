#ifndef SYNTAXPROBE_RIDGE_HPP
#define SYNTAXPROBE_RIDGE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace syntaxprobe {

// Per-stage seeds all derive from one user seed:
//   derive_seed(seed, stage) = splitmix64(seed + stage * 0x9E3779B97F4A7C15)
enum class SeedStage : std::uint64_t {
  Split = 1,
  Folds = 2,
  Anchors = 3,
  SynthTrees = 4,
  SynthEmbeddings = 5,
  SynthAnchors = 6,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, SeedStage stage) noexcept;

// Seeded permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

struct RidgeModel {
  Eigen::MatrixXd weights;       // p x q
  Eigen::RowVectorXd intercept;  // q

  Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const;
};

/// Centered ridge system for one (X, Y) pair. The cross products are formed
/// once so several alphas can be solved cheaply. When p <= n the primal
/// system (XcᵀXc + αI) W = XcᵀYc is solved by Cholesky; otherwise the
/// equivalent dual system W = Xcᵀ (XcXcᵀ + αI)⁻¹ Yc keeps the solve at n x n.
class RidgeProblem {
 public:
  // Throws TooFewRows (n < 2), RowMismatch, NaNInput.
  RidgeProblem(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

  // Throws InvalidConfig for alpha < 0, SingularSystem if the factorization
  // fails.
  RidgeModel solve(double alpha) const;

 private:
  bool dual_;
  Eigen::RowVectorXd x_mean_;
  Eigen::RowVectorXd y_mean_;
  Eigen::MatrixXd xc_;     // kept only for the dual route
  Eigen::MatrixXd gram_;   // p x p (primal) or n x n (dual)
  Eigen::MatrixXd rhs_;    // XcᵀYc (primal) or Yc (dual)
};

RidgeModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     double alpha);

struct R2Score {
  double value = 0.0;
  // Columns of y_true with zero variance; each contributes R² = 0.
  std::size_t zero_variance_columns = 0;
};

/// Uniform average over columns of 1 - SS_res / SS_tot, SS_tot taken about
/// the column mean of y_true.
R2Score r2_score(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle; the test part gets ceil((1 - train_fraction) * n) rows.
// Throws TooFewRows if either side would be empty.
TrainTestSplit train_test_split(std::size_t n, double train_fraction,
                                std::uint64_t seed);

// Seeded shuffle cut into contiguous folds; the first n % folds folds get
// one extra row.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n,
                                                      std::size_t folds,
                                                      std::uint64_t seed);

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m,
                          const std::vector<std::size_t>& rows);

}  // namespace syntaxprobe

#endif
