#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/grid.hpp"

namespace wavecurve {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n - 1.
GaussRule gauss_legendre(int n);

/// Trapezoid approximation of the integral of sampled values over the grid.
double trapezoid(std::span<const double> f, const Grid& grid);

/// Trapezoid approximation of the integral of f*g over [0, c].
/// Throws ShapeError when either series does not match the grid.
double l2_inner(std::span<const double> f, std::span<const double> g, const Grid& grid);

inline double l2_inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g, const Grid& grid) {
  return l2_inner(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())),
                  std::span<const double>(g.data(), static_cast<std::size_t>(g.size())), grid);
}

inline double l2_norm(const Eigen::VectorXd& f, const Grid& grid) {
  return std::sqrt(std::max(0.0, l2_inner(f, f, grid)));
}

}  // namespace wavecurve
