#include "wavecurve/smoothing.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wavecurve/error.hpp"
#include "wavecurve/log.hpp"

namespace wavecurve {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

}  // namespace

PenalizedSmoother::PenalizedSmoother(std::shared_ptr<const BasisSystem> basis, double lambda)
    : basis_(std::move(basis)), lambda_(lambda) {
  if (!basis_) throw InputError("smoother needs a basis");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw InputError("smoothing parameter must be finite and >= 0");
  }
  const Eigen::MatrixXd& B = basis_->eval();
  const auto T = B.rows();
  const auto K = B.cols();
  if (T < 4) throw InputError("smoothing needs at least 4 observations");
  if (lambda_ == 0.0 && K > T) {
    throw RankError("unpenalized fit with " + std::to_string(K) + " basis functions and only " +
                    std::to_string(T) + " observations");
  }
  const Eigen::MatrixXd btb = B.transpose() * B;
  Eigen::MatrixXd system = btb;
  if (lambda_ > 0.0) system += lambda_ * basis_->penalty();
  llt_.compute(system);
  if (llt_.info() != Eigen::Success) throw RankError("penalized normal equations are singular");
  hat_trace_ = llt_.solve(btb).trace();
}

SmoothFit PenalizedSmoother::fit(std::span<const double> series) const {
  const Eigen::MatrixXd& B = basis_->eval();
  const auto T = B.rows();
  if (static_cast<Eigen::Index>(series.size()) != T) {
    throw ShapeError("series length " + std::to_string(series.size()) + " != grid size " +
                     std::to_string(T));
  }
  const auto y = as_vector(series);
  if (!y.allFinite()) throw InputError("series contains NaN or infinite values");

  Eigen::VectorXd coefs = llt_.solve(B.transpose() * y);
  const double sse = (y - B * coefs).squaredNorm();
  const double dof = static_cast<double>(T) - hat_trace_;
  const double gcv = dof > 0.0 ? static_cast<double>(T) * sse / (dof * dof)
                               : std::numeric_limits<double>::infinity();
  return SmoothFit{Curve(basis_, std::move(coefs)), lambda_, hat_trace_, sse, gcv};
}

SmoothFit fit_penalized(std::span<const double> series, std::shared_ptr<const BasisSystem> basis,
                        double lambda) {
  return PenalizedSmoother(std::move(basis), lambda).fit(series);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw InputError("invalid log-spaced range");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_lambda_grid() { return log_spaced(1e-6, 1e6, 41); }

LambdaSelection select_lambda(const Eigen::MatrixXd& series_set,
                              std::shared_ptr<const BasisSystem> basis,
                              std::span<const double> lambda_grid) {
  if (series_set.rows() == 0) throw InputError("select_lambda: empty series set");
  if (lambda_grid.empty()) throw InputError("select_lambda: empty lambda grid");
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw InputError("select_lambda: lambda grid values must be positive");
  }

  LambdaSelection sel;
  sel.grid.assign(lambda_grid.begin(), lambda_grid.end());
  sel.mean_gcv.resize(sel.grid.size());
  const Eigen::MatrixXd rows = series_set;  // contiguous row access below
  std::vector<double> row(static_cast<std::size_t>(rows.cols()));

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < sel.grid.size(); ++g) {
    const PenalizedSmoother smoother(basis, sel.grid[g]);
    double total = 0.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      Eigen::Map<Eigen::RowVectorXd>(row.data(), rows.cols()) = rows.row(i);
      total += smoother.fit(row).gcv;
    }
    const double mean = total / static_cast<double>(rows.rows());
    sel.mean_gcv[g] = mean;
    const bool tie = std::isfinite(best) && std::abs(mean - best) <= 1e-12 * std::abs(best);
    if (mean < best && !tie) {
      best = mean;
      sel.index = g;
    } else if (tie && sel.grid[g] > sel.grid[sel.index]) {
      sel.index = g;
    }
  }
  if (!std::isfinite(best)) throw InputError("select_lambda: no finite GCV score on the grid");
  sel.lambda = sel.grid[sel.index];
  return sel;
}

Eigen::MatrixXd SmoothedCollection::values() const {
  if (fits.empty()) return {};
  const auto T = fits.front().curve.grid().size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(fits.size()), static_cast<Eigen::Index>(T));
  for (std::size_t i = 0; i < fits.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = fits[i].curve.values().transpose();
  }
  return out;
}

SmoothedCollection smooth_collection(const Eigen::MatrixXd& series_set,
                                     std::shared_ptr<const BasisSystem> basis,
                                     std::span<const double> lambda_grid) {
  SmoothedCollection out;
  out.selection = select_lambda(series_set, basis, lambda_grid);
  const PenalizedSmoother smoother(basis, out.selection.lambda);
  std::vector<double> row(static_cast<std::size_t>(series_set.cols()));
  out.fits.reserve(static_cast<std::size_t>(series_set.rows()));
  for (Eigen::Index i = 0; i < series_set.rows(); ++i) {
    Eigen::Map<Eigen::RowVectorXd>(row.data(), series_set.cols()) = series_set.row(i);
    out.fits.push_back(smoother.fit(row));
  }
  return out;
}

std::size_t interpolate_missing(std::span<double> series, std::string_view context) {
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!std::isnan(series[i])) observed.push_back(i);
  }
  if (observed.empty()) throw InputError(std::string(context) + ": series has no observed values");
  const std::size_t missing = series.size() - observed.size();
  if (missing == 0) return 0;

  for (std::size_t i = 0; i < observed.front(); ++i) series[i] = series[observed.front()];
  for (std::size_t i = observed.back() + 1; i < series.size(); ++i) series[i] = series[observed.back()];
  for (std::size_t k = 0; k + 1 < observed.size(); ++k) {
    const std::size_t a = observed[k];
    const std::size_t b = observed[k + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
      series[i] = (1.0 - w) * series[a] + w * series[b];
    }
  }
  log::warn(std::string(context) + ": linearly interpolated " + std::to_string(missing) +
            " missing daily value(s)");
  return missing;
}

}  // namespace wavecurve
