#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "wavecurve/bspline.hpp"

namespace wavecurve {

/// Penalized least-squares fit of one series observed at the basis grid points.
struct SmoothFit {
  Curve curve;
  double lambda = 0.0;
  double hat_trace = 0.0;  // effective degrees of freedom
  double sse = 0.0;
  double gcv = 0.0;        // T * sse / (T - hat_trace)^2
};

/// Factorization of (B'B + lambda * pen2) for one basis and lambda, reused
/// across every series of a collection.
class PenalizedSmoother {
 public:
  PenalizedSmoother(std::shared_ptr<const BasisSystem> basis, double lambda);

  double lambda() const noexcept { return lambda_; }
  double hat_trace() const noexcept { return hat_trace_; }
  SmoothFit fit(std::span<const double> series) const;

 private:
  std::shared_ptr<const BasisSystem> basis_;
  double lambda_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double hat_trace_ = 0.0;
};

/// Minimizes ||y - B c||^2 + lambda * c' pen2 c. Throws RankError when the
/// system is singular (lambda = 0 with K > T) and InputError on NaN input.
SmoothFit fit_penalized(std::span<const double> series, std::shared_ptr<const BasisSystem> basis,
                        double lambda);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

/// 41 log-spaced values in [1e-6, 1e6].
std::vector<double> default_lambda_grid();

struct LambdaSelection {
  double lambda = 0.0;
  std::size_t index = 0;
  std::vector<double> grid;
  std::vector<double> mean_gcv;  // one entry per grid value
};

/// Grid value minimizing the GCV score averaged (raw, unweighted) over the
/// rows of `series_set`. Ties go to the larger lambda.
LambdaSelection select_lambda(const Eigen::MatrixXd& series_set,
                              std::shared_ptr<const BasisSystem> basis,
                              std::span<const double> lambda_grid);

struct SmoothedCollection {
  LambdaSelection selection;
  std::vector<SmoothFit> fits;

  /// N x T matrix of fitted values at the grid points.
  Eigen::MatrixXd values() const;
};

/// Selects one shared lambda for the collection and fits every row with it.
SmoothedCollection smooth_collection(const Eigen::MatrixXd& series_set,
                                     std::shared_ptr<const BasisSystem> basis,
                                     std::span<const double> lambda_grid);

/// Fills NaN entries by linear interpolation between the nearest observed
/// neighbours (constant extension at the ends). Returns the number filled and
/// logs a warning naming `context` when it is nonzero. Throws InputError when
/// the series has no observed value.
std::size_t interpolate_missing(std::span<double> series, std::string_view context);

}  // namespace wavecurve
