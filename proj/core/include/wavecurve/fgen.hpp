#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/bspline.hpp"
#include "wavecurve/elastic_net.hpp"

namespace wavecurve {

/// Functional elastic net
///   0.5 * sum_i ||Y_i - sum_j x_ij b_j||^2 + l1 * sum_j ||b_j|| + 0.5 * l2 * sum_j ||b_j||^2
/// with L2 norms over the grid's trapezoid measure. Responses are sampled on
/// the basis grid, centered across units, and projected onto the basis; the
/// part of Y outside the span only adds a constant to the objective.
struct FgenOptions {
  double tolerance = 1e-8;  // relative objective change between sweeps
  long max_sweeps = 10000;
};

struct FGenFit {
  std::shared_ptr<const BasisSystem> basis;
  Eigen::MatrixXd coefs;  // p x K, row j holds the basis coefficients of b_j
  std::vector<bool> active;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  long sweeps = 0;
  std::vector<double> objective_trace;  // initial value, then one per sweep

  double objective() const { return objective_trace.back(); }
  Curve curve(Eigen::Index j) const { return Curve(basis, coefs.row(j).transpose()); }
  /// p x T values of the coefficient curves at the grid points.
  Eigen::MatrixXd values() const { return coefs * basis->eval().transpose(); }
};

/// max_j ||sum_i x_ij Y_i||: the smallest l1 with an all-zero solution.
double fgen_lambda_max(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const BasisSystem& basis);

/// Block coordinate descent with exact group shrinkage per feature. Throws
/// ConvergenceError (carrying the last relative change) when the sweep
/// budget runs out.
FGenFit fgen_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, std::shared_ptr<const BasisSystem> basis,
                 double lambda1, double lambda2, const FgenOptions& options = {});

struct FgenPath {
  double lambda_max = 0.0;
  std::vector<double> lambda1;
  std::vector<Eigen::MatrixXd> coefs;  // p x K per computed grid point
  Eigen::VectorXd entry;
  Eigen::VectorXd lambda_ratio;
};

/// Path over the geometric grid from fgen_lambda_max with lambda2 = l2_ratio
/// * lambda1, recording first-entry ratios as in the scalar path.
FgenPath fgen_path_ratios(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const BasisSystem& basis,
                          const PathOptions& options = {}, const FgenOptions& solver = {});

/// Resampling summary: each run re-standardizes the raw covariate subsample.
StabilitySummary fgen_stability(const Eigen::MatrixXd& raw_X, const Eigen::MatrixXd& Y, const BasisSystem& basis,
                                const StabilityOptions& options = {}, const FgenOptions& solver = {});

using FgenCvResult = CvResult;

/// K-fold cross-validation of l1 (with lambda2 = l2_ratio * l1) on the
/// held-out integrated squared error. Training curves are centered by their
/// own mean.
FgenCvResult fgen_cv_select(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const BasisSystem& basis,
                            const CvOptions& options = {}, const FgenOptions& solver = {});

}  // namespace wavecurve
