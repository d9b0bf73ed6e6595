#include "wavecurve/scalar_models.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "wavecurve/error.hpp"

namespace wavecurve {

MarginalFit marginal_ols(const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  if (x.size() != y.size()) throw ShapeError("marginal_ols: x and y differ in length");
  const Eigen::Index n = x.size();
  if (n < 3) throw InputError("marginal_ols: need at least three observations");
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double sxx = xc.squaredNorm();
  if (!(sxx > 1e-24 * std::max(1.0, x.squaredNorm()))) throw InputError("marginal_ols: x has zero variance");
  MarginalFit fit;
  fit.beta = xc.dot(yc) / sxx;
  fit.intercept = y.mean() - fit.beta * x.mean();
  const double sst = yc.squaredNorm();
  const double sse = (yc - fit.beta * xc).squaredNorm();
  fit.r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;
  fit.se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  return fit;
}

PcaFirst pca_first(const Eigen::MatrixXd& raw) {
  const DesignMatrix d = standardize(raw);
  const Eigen::MatrixXd corr = d.X.transpose() * d.X / static_cast<double>(d.n() - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success) throw RankError("pca_first: eigendecomposition failed");
  PcaFirst pc;
  const Eigen::Index p = corr.cols();
  pc.eigenvalues = eig.eigenvalues().reverse();
  pc.loadings = eig.eigenvectors().col(p - 1);
  Eigen::Index big = 0;
  pc.loadings.cwiseAbs().maxCoeff(&big);
  if (pc.loadings[big] < 0.0) pc.loadings = -pc.loadings;
  pc.scores = d.X * pc.loadings;
  pc.variance = pc.eigenvalues[0];
  pc.variance_explained = pc.variance / pc.eigenvalues.sum();
  return pc;
}

std::vector<VifEntry> vif(const Eigen::MatrixXd& raw) {
  const Eigen::Index n = raw.rows();
  const Eigen::Index p = raw.cols();
  if (p < 2) throw InputError("vif: need at least two columns");
  std::vector<VifEntry> out(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::MatrixXd Z(n, p);
    Z.col(0).setOnes();
    Eigen::Index c = 1;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (k != j) Z.col(c++) = raw.col(k);
    }
    const OlsFit fit = ols(Z, raw.col(j));
    auto& e = out[static_cast<std::size_t>(j)];
    const double unexplained = fit.sst > 0.0 ? fit.sse / fit.sst : 0.0;
    if (!(unexplained > 1e-10)) {
      e.infinite = true;
      e.value = std::numeric_limits<double>::infinity();
    } else {
      e.value = 1.0 / unexplained;
    }
  }
  return out;
}

double partial_r2(double r2_full, double r2_reduced) {
  if (!(r2_reduced < 1.0)) throw InputError("partial_r2: reduced model already explains everything");
  return (r2_full - r2_reduced) / (1.0 - r2_reduced);
}

double partial_r2(const OlsFit& full, const OlsFit& reduced) { return partial_r2(full.r2, reduced.r2); }

}  // namespace wavecurve
