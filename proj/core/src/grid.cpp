#include "wavecurve/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavecurve/error.hpp"

namespace wavecurve {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 4) throw InputError("grid needs at least 4 points");
  if (points_.front() != 0.0) throw InputError("grid must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]) || !(points_[i] > points_[i - 1])) {
      throw InputError("grid points must be finite and strictly increasing (index " +
                       std::to_string(i) + ")");
    }
  }
  const auto n = static_cast<Eigen::Index>(points_.size());
  weights_ = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = points_[i + 1] - points_[i];
    weights_[i] += 0.5 * h;
    weights_[i + 1] += 0.5 * h;
  }
}

Grid Grid::uniform(double length, std::size_t n_points) {
  if (!(length > 0.0)) throw InputError("grid length must be positive");
  if (n_points < 4) throw InputError("grid needs at least 4 points");
  std::vector<double> p(n_points);
  const double h = length / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) p[i] = h * static_cast<double>(i);
  p.back() = length;
  return Grid(std::move(p));
}

Grid Grid::daily(std::size_t n_days) {
  std::vector<double> p(n_days);
  for (std::size_t i = 0; i < n_days; ++i) p[i] = static_cast<double>(i);
  return Grid(std::move(p));
}

Grid Grid::truncated(std::size_t first) const {
  if (first + 4 > points_.size()) throw InputError("truncated grid would have fewer than 4 points");
  std::vector<double> p(points_.begin() + static_cast<std::ptrdiff_t>(first), points_.end());
  const double origin = p.front();
  for (double& v : p) v -= origin;
  p.front() = 0.0;
  return Grid(std::move(p));
}

std::size_t Grid::nearest_index(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t);
  if (it == points_.begin()) return 0;
  if (it == points_.end()) return points_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - points_.begin());
  return (t - points_[hi - 1] <= points_[hi] - t) ? hi - 1 : hi;
}

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
  if (!(a == b)) throw ShapeError(std::string(context) + ": grids differ");
}

}  // namespace wavecurve
