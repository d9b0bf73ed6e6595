#pragma once

#include <vector>

#include <Eigen/Core>

#include "wavecurve/functional_regression.hpp"
#include "wavecurve/grid.hpp"
#include "wavecurve/rng.hpp"

namespace wavecurve::testing {

/// sin over one period of the domain plus N(0, sigma^2) noise.
struct NoisySine {
  Eigen::VectorXd truth;
  Eigen::VectorXd observed;
};
NoisySine noisy_sine(Rng& rng, const Grid& grid, double sigma = 0.1);

/// amplitude * exp(-(t - center)^2 / (2 width^2)) on the grid.
Eigen::VectorXd gaussian_bump(const Grid& grid, double center, double width, double amplitude);

/// Three well-separated curve families (distinct amplitude and shape) with
/// small per-curve noise. Rows are curves; labels give the family.
struct CurveFamilies {
  Eigen::MatrixXd samples;
  std::vector<int> labels;
};
CurveFamilies curve_families(Rng& rng, const Grid& grid, int per_family);

/// Random regression instance y = X b + noise with standard normal X.
struct RegressionInstance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd beta;
};
RegressionInstance random_regression(Rng& rng, int n, int p, double noise = 0.5);

/// Matrix with independent standard normal entries.
Eigen::MatrixXd normal_matrix(Rng& rng, int rows, int cols);

/// Data from the lagged concurrent model with one functional predictor
/// ("mob"), one scalar predictor ("x") and a group dummy. `truth` holds the
/// true coefficient curves on the lag-truncated grid in the design order of
/// ConcurrentFit::terms.
struct ConcurrentSimulation {
  Eigen::MatrixXd Y;
  ConcurrentSpec spec;
  int lag = 0;
  std::vector<Eigen::VectorXd> truth;
};
ConcurrentSimulation simulate_concurrent(Rng& rng, const Grid& grid, int n = 107, int lag = 19,
                                         double sigma = 0.05);

/// Smooth random curve: a few random sinusoids plus an offset.
Eigen::VectorXd random_smooth_curve(Rng& rng, const Grid& grid, double scale = 1.0);

/// Adjusted Rand index of two labelings.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace wavecurve::testing
