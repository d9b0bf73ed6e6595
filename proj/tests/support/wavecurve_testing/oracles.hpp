#pragma once

#include <Eigen/Core>

#include "wavecurve/bspline.hpp"

namespace wavecurve::testing {

/// GCV score from an explicit hat matrix built through a full-pivot LU.
double gcv_oracle(const Eigen::VectorXd& y, const BasisSystem& basis, double lambda);

/// Exact elastic-net minimum found by enumerating every sign pattern: on a
/// fixed orthant the objective is a quadratic with a closed-form minimizer.
double brute_force_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l1, double l2);

/// Largest violation of the elastic-net stationarity conditions.
double max_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                         double l1, double l2);

}  // namespace wavecurve::testing
