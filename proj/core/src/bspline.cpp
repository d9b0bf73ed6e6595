#include "wavecurve/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavecurve/error.hpp"
#include "wavecurve/quadrature.hpp"

namespace wavecurve {

namespace {

constexpr double kDomainSlack = 1e-10;

std::vector<double> clamped_knots(const std::vector<double>& breaks, int degree) {
  std::vector<double> knots;
  knots.reserve(breaks.size() + 2 * static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) knots.push_back(breaks.front());
  knots.insert(knots.end(), breaks.begin(), breaks.end());
  for (int i = 0; i < degree; ++i) knots.push_back(breaks.back());
  return knots;
}

}  // namespace

BasisSystem::BasisSystem(Grid grid, std::vector<double> breakpoints, int degree)
    : grid_(std::move(grid)), breakpoints_(std::move(breakpoints)), degree_(degree) {
  if (degree_ < 0) throw InputError("B-spline degree must be nonnegative");
  if (breakpoints_.size() < 2) throw InputError("B-spline basis needs at least two breakpoints");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw InputError("breakpoints must be strictly increasing");
    }
  }
  knots_ = clamped_knots(breakpoints_, degree_);
  n_basis_ = static_cast<int>(knots_.size()) - degree_ - 1;

  eval_ = evaluate(grid_.points(), 0);

  const Eigen::VectorXd& w = grid_.trapezoid_weights();
  gram_ = eval_.transpose() * w.asDiagonal() * eval_;

  if (degree_ >= 2) {
    const GaussRule rule = gauss_legendre(std::max(2, degree_));
    penalty_ = Eigen::MatrixXd::Zero(n_basis_, n_basis_);
    for (std::size_t s = 0; s + 1 < breakpoints_.size(); ++s) {
      const double a = breakpoints_[s];
      const double b = breakpoints_[s + 1];
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      const int span = degree_ + static_cast<int>(s);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Eigen::MatrixXd d = span_derivatives(span, mid + half * rule.nodes[q], 2);
        const double wq = half * rule.weights[q];
        const int first = span - degree_;
        for (int r = 0; r <= degree_; ++r) {
          for (int c = 0; c <= degree_; ++c) {
            penalty_(first + r, first + c) += wq * d(2, r) * d(2, c);
          }
        }
      }
    }
    // Round-off symmetrization; each entry is accumulated in the same order
    // from both sides, so this only guards against compiler contraction.
    penalty_ = 0.5 * (penalty_ + penalty_.transpose()).eval();
  }
}

BasisSystem BasisSystem::uniform(Grid grid, int n_breaks, int degree) {
  if (n_breaks < 2) throw InputError("need at least two breakpoints");
  const double c = grid.length();
  std::vector<double> breaks(static_cast<std::size_t>(n_breaks));
  for (int i = 0; i < n_breaks; ++i) breaks[static_cast<std::size_t>(i)] = c * i / (n_breaks - 1);
  breaks.back() = c;
  return BasisSystem(std::move(grid), std::move(breaks), degree);
}

const Eigen::MatrixXd& BasisSystem::penalty() const {
  if (degree_ < 2) throw UnsupportedError("second-derivative penalty requires degree >= 2");
  return penalty_;
}

int BasisSystem::find_span(double x) const {
  const double lo = breakpoints_.front();
  const double hi = breakpoints_.back();
  const double slack = kDomainSlack * std::max(1.0, hi - lo);
  if (!(x >= lo - slack && x <= hi + slack)) {
    throw DomainError("point " + std::to_string(x) + " outside basis domain [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const int last = n_basis_ - 1;
  if (x >= knots_[static_cast<std::size_t>(last + 1)]) return last;
  if (x <= knots_[static_cast<std::size_t>(degree_)]) return degree_;
  // knots_[span] <= x < knots_[span + 1]
  auto begin = knots_.begin() + degree_;
  auto end = knots_.begin() + last + 2;
  auto it = std::upper_bound(begin, end, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

Eigen::MatrixXd BasisSystem::span_derivatives(int span, double x, int n) const {
  const int p = degree_;
  const auto& U = knots_;
  auto knot = [&](int i) { return U[static_cast<std::size_t>(i)]; };

  Eigen::MatrixXd ndu(p + 1, p + 1);
  Eigen::VectorXd left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knot(span + 1 - j);
    right[j] = knot(span + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }

  Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(n + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    a.setZero();
    a(0, 0) = 1.0;
    for (int k = 1; k <= n && k <= p; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
    factor *= (p - k);
  }
  return ders;
}

Eigen::VectorXd BasisSystem::values_at(double x, int derivative) const {
  if (derivative < 0) throw InputError("derivative order must be nonnegative");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_basis_);
  if (derivative > degree_) return out;
  const int span = find_span(x);
  const Eigen::MatrixXd d = span_derivatives(span, x, derivative);
  for (int j = 0; j <= degree_; ++j) out[span - degree_ + j] = d(derivative, j);
  return out;
}

Eigen::MatrixXd BasisSystem::evaluate(std::span<const double> x, int derivative) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(x.size()), n_basis_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = values_at(x[i], derivative).transpose();
  }
  return out;
}

Eigen::MatrixXd eval_bspline_basis(const BasisSystem& basis, const Grid& grid) {
  if (grid == basis.grid()) return basis.eval();
  return basis.evaluate(grid.points(), 0);
}

Eigen::MatrixXd second_derivative_penalty(const BasisSystem& basis) { return basis.penalty(); }

Curve::Curve(std::shared_ptr<const BasisSystem> basis, Eigen::VectorXd coefs)
    : basis_(std::move(basis)), coefs_(std::move(coefs)) {
  if (!basis_) throw InputError("curve needs a basis");
  if (coefs_.size() != basis_->size()) throw ShapeError("curve coefficient count != basis size");
  if (!coefs_.allFinite()) throw InputError("curve coefficients must be finite");
}

}  // namespace wavecurve
