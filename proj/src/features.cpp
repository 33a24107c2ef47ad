#include "syntaxprobe/features.hpp"

#include <algorithm>
#include <cmath>

#include "syntaxprobe/error.hpp"

namespace syntaxprobe {

namespace {

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& m, const char* what) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (norm == 0.0)
      throw Error(Errc::ZeroVector,
                  std::string(what) + " row " + std::to_string(r) +
                      " has zero norm");
    out.row(r) /= norm;
  }
  return out;
}

}  // namespace

Eigen::VectorXd mean_pool(const Eigen::MatrixXd& frames) {
  if (frames.rows() == 0)
    throw Error(Errc::EmptySequence, "cannot pool zero frames");
  return frames.colwise().mean().transpose();
}

double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw Error(Errc::LengthMismatch, std::to_string(u.size()) + " vs " +
                                          std::to_string(v.size()));
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0)
    throw Error(Errc::ZeroVector, "cosine of a zero vector is undefined");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

Eigen::VectorXd anchor_cosine_vector(const std::string& row,
                                     const EmbeddingTable& table,
                                     const AnchorSet& anchors) {
  const Eigen::MatrixXd self = table.gather(std::vector<std::string>{row});
  const Eigen::VectorXd u = self.row(0).transpose();
  Eigen::VectorXd out(static_cast<Eigen::Index>(anchors.ids.size()));
  for (std::size_t a = 0; a < anchors.ids.size(); ++a) {
    const auto src = table.row(table.row_of(anchors.ids[a]));
    Eigen::VectorXd v(src.size());
    for (std::size_t c = 0; c < src.size(); ++c) v[c] = src[c];
    out[static_cast<Eigen::Index>(a)] = cosine_similarity(u, v);
  }
  return out;
}

Eigen::MatrixXd anchor_cosine_matrix(const Eigen::MatrixXd& rows,
                                     const Eigen::MatrixXd& anchors) {
  if (rows.cols() != anchors.cols())
    throw Error(Errc::LengthMismatch, "feature widths differ");
  Eigen::MatrixXd sims =
      normalize_rows(rows, "input") * normalize_rows(anchors, "anchor").transpose();
  return sims.cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::MatrixXd concat_features(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows())
    throw Error(Errc::RowMismatch, std::to_string(a.rows()) + " vs " +
                                       std::to_string(b.rows()) + " rows");
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace syntaxprobe
