#ifndef SYNTAXPROBE_FEATURES_HPP
#define SYNTAXPROBE_FEATURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syntaxprobe/embedding.hpp"

namespace syntaxprobe {

// Held-out utterances whose similarities define the coordinates of both
// similarity spaces, in a fixed order.
struct AnchorSet {
  std::vector<std::string> ids;
  std::uint64_t seed = 0;
};

// Column means of a T x D frame matrix. Throws EmptySequence for T = 0.
Eigen::VectorXd mean_pool(const Eigen::MatrixXd& frames);

// Throws LengthMismatch or ZeroVector. Result is clamped to [-1, 1].
double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

Eigen::VectorXd anchor_cosine_vector(const std::string& row,
                                     const EmbeddingTable& table,
                                     const AnchorSet& anchors);

/// Row i holds the cosine of rows(i) with every anchor row. Rows are
/// L2-normalized once, so this is a single matrix product.
Eigen::MatrixXd anchor_cosine_matrix(const Eigen::MatrixXd& rows,
                                     const Eigen::MatrixXd& anchors);

// [A | B]. Throws RowMismatch.
Eigen::MatrixXd concat_features(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b);

}  // namespace syntaxprobe

#endif
