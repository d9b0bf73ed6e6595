#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace wavecurve {

/// Strictly increasing evaluation points on the domain [0, c], shared by
/// every curve of a collection. Carries its trapezoid quadrature weights.
class Grid {
 public:
  explicit Grid(std::vector<double> points);

  /// n_points equally spaced points covering [0, length].
  static Grid uniform(double length, std::size_t n_points);
  /// One point per day: 0, 1, ..., n_days - 1 (so c = n_days - 1).
  static Grid daily(std::size_t n_days);

  std::size_t size() const noexcept { return points_.size(); }
  double length() const noexcept { return points_.back(); }
  double operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> points() const noexcept { return points_; }
  const Eigen::VectorXd& trapezoid_weights() const noexcept { return weights_; }

  /// Points from index `first` on, translated so the first one sits at 0.
  Grid truncated(std::size_t first) const;

  /// Index of the grid point nearest to t.
  std::size_t nearest_index(double t) const;

  bool operator==(const Grid& other) const { return points_ == other.points_; }

 private:
  std::vector<double> points_;
  Eigen::VectorXd weights_;
};

/// Throws ShapeError unless the two grids are identical.
void require_same_grid(const Grid& a, const Grid& b, const char* context);

}  // namespace wavecurve
