#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/bspline.hpp"
#include "wavecurve/grid.hpp"

namespace wavecurve {

/// Pointwise estimate of a coefficient function, its smoothed version and
/// pointwise standard errors. The band is the smoothed curve +- 1.96 se.
struct CoefficientCurve {
  std::string name;
  Curve beta;            // smoothed estimate
  Eigen::VectorXd raw;   // pointwise OLS estimate (0 where the term was dropped)
  Eigen::VectorXd se;    // pointwise OLS standard error (NaN where dropped)

  Eigen::VectorXd values() const { return beta.values(); }
  Eigen::VectorXd lower() const { return values() - 1.96 * se; }
  Eigen::VectorXd upper() const { return values() + 1.96 * se; }
  /// Grid points where the band excludes zero.
  std::vector<bool> significant_mask() const;
};

struct FunctionalOptions {
  int n_breaks = 21;               // basis used to smooth coefficient curves
  std::vector<double> lambda_grid;  // empty: default_lambda_grid()
};

struct FosFit {
  CoefficientCurve intercept;
  CoefficientCurve slope;
  double r2 = 0.0;  // 1 - integral SSE / integral SST
};

/// Pointwise simple regression of Y(t) (n x T on `grid`) on a scalar
/// covariate. Throws InputError when x has zero variance.
FosFit fos_marginal(const Eigen::MatrixXd& Y, const Eigen::VectorXd& x, const Grid& grid,
                    const FunctionalOptions& options = {});

struct FunctionalPredictor {
  std::string name;
  Eigen::MatrixXd values;  // n x T on the response grid
};

struct ScalarPredictor {
  std::string name;
  Eigen::VectorXd values;  // n
};

/// Predictors of a lagged concurrent model. Every predictor enters with its
/// main effect and its interaction with the binary group dummy.
struct ConcurrentSpec {
  std::vector<FunctionalPredictor> functional;
  std::vector<ScalarPredictor> scalar;
  Eigen::VectorXd group;  // n entries in {0, 1}
};

struct ConcurrentFit {
  int lag = 0;
  Grid grid;  // truncated domain [lag, c], re-based at 0
  /// Terms in design order: intercept, d, then for each functional predictor
  /// m: m and d:m, then for each scalar j: j and d:j.
  std::vector<CoefficientCurve> terms;
  Eigen::MatrixXd fitted;     // n x T', pointwise OLS before smoothing
  Eigen::MatrixXd residuals;  // n x T'
  Eigen::VectorXd sse;        // per grid point
  Eigen::VectorXd sst;        // per grid point, around the pointwise mean
  double total_r2 = 0.0;
  /// Per predictor (main effect and interaction dropped jointly), then
  /// "group" for all dummy terms together.
  std::vector<std::pair<std::string, double>> partial_r2;

  const CoefficientCurve& term(const std::string& name) const;
  double partial(const std::string& name) const;
};

/// Pointwise OLS of Y(t) on {1, d, X_m(t - lag), d X_m(t - lag), x_j, d x_j}
/// for t in [lag, c]. The lag is in grid steps. Collinear columns are dropped
/// per grid point with a logged note.
ConcurrentFit concurrent_fit(const Eigen::MatrixXd& Y, const ConcurrentSpec& spec, int lag, const Grid& grid,
                             const FunctionalOptions& options = {});

struct LagSweep {
  std::vector<ConcurrentFit> fits;
  double mean_total_r2 = 0.0;
  std::vector<std::pair<std::string, double>> mean_partial_r2;
};

LagSweep lag_sweep(const Eigen::MatrixXd& Y, const ConcurrentSpec& spec, const std::vector<int>& lags,
                   const Grid& grid, const FunctionalOptions& options = {});

/// Integrated R^2 of each functional variable (rows) regressed pointwise on
/// each functional and then each scalar variable (columns), without lag.
Eigen::MatrixXd collinearity_grid(const std::vector<FunctionalPredictor>& functional,
                                  const std::vector<ScalarPredictor>& scalar, const Grid& grid);

}  // namespace wavecurve
