#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/grid.hpp"

namespace wavecurve {

/// Clamped B-spline basis on [breakpoints.front(), breakpoints.back()] with
/// its evaluation matrix over a grid and the roughness penalty
/// pen2(i, j) = integral of B_i'' B_j''.
///
/// With b breakpoints (both endpoints included) and degree d the basis has
/// K = b + d - 1 functions; 21 breakpoints and cubic splines give K = 23.
class BasisSystem {
 public:
  BasisSystem(Grid grid, std::vector<double> breakpoints, int degree = 3);

  /// n_breaks equally spaced breakpoints over the grid's domain.
  static BasisSystem uniform(Grid grid, int n_breaks = 21, int degree = 3);

  int degree() const noexcept { return degree_; }
  int size() const noexcept { return n_basis_; }
  double lower() const noexcept { return breakpoints_.front(); }
  double upper() const noexcept { return breakpoints_.back(); }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> knots() const noexcept { return knots_; }
  const Grid& grid() const noexcept { return grid_; }

  /// T x K matrix of basis values at the grid points.
  const Eigen::MatrixXd& eval() const noexcept { return eval_; }
  /// K x K second-derivative Gram matrix. Throws UnsupportedError for degree < 2.
  const Eigen::MatrixXd& penalty() const;
  /// K x K Gram matrix of the basis under the grid's trapezoid inner product.
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }

  /// Values of all K basis functions (or their derivative) at x.
  Eigen::VectorXd values_at(double x, int derivative = 0) const;

  /// len(x) x K matrix of basis values (or derivatives).
  Eigen::MatrixXd evaluate(std::span<const double> x, int derivative = 0) const;

 private:
  int find_span(double x) const;
  // Nonzero basis derivatives at x for orders 0..n, as (n+1) x (degree+1);
  // column j belongs to basis function span - degree + j.
  Eigen::MatrixXd span_derivatives(int span, double x, int n) const;

  Grid grid_;
  std::vector<double> breakpoints_;
  std::vector<double> knots_;
  int degree_;
  int n_basis_;
  Eigen::MatrixXd eval_;
  Eigen::MatrixXd penalty_;
  Eigen::MatrixXd gram_;
};

/// T x K basis matrix over an arbitrary grid inside the basis domain.
Eigen::MatrixXd eval_bspline_basis(const BasisSystem& basis, const Grid& grid);

/// Integral of B_i'' B_j'' by per-span Gauss-Legendre quadrature (exact for
/// piecewise polynomials). Throws UnsupportedError when degree < 2.
Eigen::MatrixXd second_derivative_penalty(const BasisSystem& basis);

/// A smooth function stored as coefficients on a shared basis. Immutable.
class Curve {
 public:
  Curve(std::shared_ptr<const BasisSystem> basis, Eigen::VectorXd coefs);

  const BasisSystem& basis() const noexcept { return *basis_; }
  const std::shared_ptr<const BasisSystem>& basis_ptr() const noexcept { return basis_; }
  const Grid& grid() const noexcept { return basis_->grid(); }
  const Eigen::VectorXd& coefs() const noexcept { return coefs_; }

  /// Values at the basis grid points: eval() * coefs.
  Eigen::VectorXd values() const { return basis_->eval() * coefs_; }
  double operator()(double t, int derivative = 0) const {
    return basis_->values_at(t, derivative).dot(coefs_);
  }

 private:
  std::shared_ptr<const BasisSystem> basis_;
  Eigen::VectorXd coefs_;
};

}  // namespace wavecurve
