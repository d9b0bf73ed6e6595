#include "wavecurve/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include "wavecurve/error.hpp"

namespace wavecurve {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw InputError("Gauss-Legendre rule needs at least one node");
  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  // Legendre recurrence, weights are 2 * (first eigenvector component)^2.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    rule.nodes[static_cast<std::size_t>(k)] = eig.eigenvalues()[k];
    const double v = eig.eigenvectors()(0, k);
    rule.weights[static_cast<std::size_t>(k)] = 2.0 * v * v;
  }
  return rule;
}

double trapezoid(std::span<const double> f, const Grid& grid) {
  if (f.size() != grid.size()) throw ShapeError("trapezoid: series length does not match grid");
  const auto& w = grid.trapezoid_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[static_cast<Eigen::Index>(i)] * f[i];
  return s;
}

double l2_inner(std::span<const double> f, std::span<const double> g, const Grid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw ShapeError("l2_inner: series length does not match grid");
  }
  const auto& w = grid.trapezoid_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[static_cast<Eigen::Index>(i)] * f[i] * g[i];
  return s;
}

}  // namespace wavecurve
