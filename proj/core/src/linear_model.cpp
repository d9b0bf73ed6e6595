#include "wavecurve/linear_model.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "wavecurve/error.hpp"

namespace wavecurve {

DesignMatrix standardize(const Eigen::MatrixXd& raw, std::vector<std::string> names) {
  if (raw.rows() < 2) throw InputError("standardize: need at least two rows");
  if (names.empty()) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Eigen::Index>(names.size()) != raw.cols()) {
    throw ShapeError("standardize: one name per column required");
  }
  DesignMatrix d;
  d.names = std::move(names);
  d.mean = raw.colwise().mean().transpose();
  d.X = raw.rowwise() - d.mean.transpose();
  d.sd = (d.X.colwise().squaredNorm() / static_cast<double>(raw.rows() - 1)).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    if (!(d.sd[j] > 1e-12 * std::max(1.0, std::abs(d.mean[j])))) {
      throw InputError("standardize: column '" + d.names[static_cast<std::size_t>(j)] +
                       "' has zero variance");
    }
    d.X.col(j) /= d.sd[j];
  }
  return d;
}

Eigen::VectorXd standardize_vector(const Eigen::VectorXd& v) {
  Eigen::MatrixXd m = v;
  return standardize(m, {"y"}).X.col(0);
}

std::vector<bool> independent_columns(const Eigen::MatrixXd& Z, double tolerance) {
  std::vector<bool> kept(static_cast<std::size_t>(Z.cols()), false);
  Eigen::MatrixXd Q(Z.rows(), 0);
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    Eigen::VectorXd v = Z.col(j);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    // Two passes of Gram-Schmidt against the kept columns.
    for (int pass = 0; pass < 2; ++pass) {
      if (Q.cols() > 0) v -= Q * (Q.transpose() * v);
    }
    const double norm = v.norm();
    if (norm > tolerance * norm0) {
      Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
      Q.col(Q.cols() - 1) = v / norm;
      kept[static_cast<std::size_t>(j)] = true;
    }
  }
  return kept;
}

OlsFit ols(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
  if (Z.rows() != y.size()) throw ShapeError("ols: design and response lengths differ");
  OlsFit fit;
  fit.kept = independent_columns(Z);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    if (fit.kept[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  fit.rank = static_cast<int>(cols.size());
  fit.coef = Eigen::VectorXd::Zero(Z.cols());
  fit.se = Eigen::VectorXd::Constant(Z.cols(), std::numeric_limits<double>::quiet_NaN());

  const double ybar = y.mean();
  fit.sst = (y.array() - ybar).square().sum();
  if (cols.empty()) {
    fit.fitted = Eigen::VectorXd::Zero(y.size());
    fit.sse = y.squaredNorm();
  } else {
    Eigen::MatrixXd Zk(Z.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) Zk.col(static_cast<Eigen::Index>(k)) = Z.col(cols[k]);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Zk);
    const Eigen::VectorXd b = qr.solve(y);
    fit.fitted = Zk * b;
    fit.sse = (y - fit.fitted).squaredNorm();

    const auto dof = Z.rows() - static_cast<Eigen::Index>(cols.size());
    fit.sigma2 = dof > 0 ? fit.sse / static_cast<double>(dof) : std::numeric_limits<double>::quiet_NaN();
    const auto r = static_cast<Eigen::Index>(cols.size());
    const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(r, r));
    for (std::size_t k = 0; k < cols.size(); ++k) {
      fit.coef[cols[k]] = b[static_cast<Eigen::Index>(k)];
      fit.se[cols[k]] = std::sqrt(fit.sigma2 * Rinv.row(static_cast<Eigen::Index>(k)).squaredNorm());
    }
  }
  fit.r2 = fit.sst > 0.0 ? 1.0 - fit.sse / fit.sst : (fit.sse == 0.0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace wavecurve
