#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/linear_model.hpp"

namespace wavecurve {

struct MarginalFit {
  double intercept = 0.0;
  double beta = 0.0;
  double se = 0.0;
  double r2 = 0.0;
};

/// Simple regression y = a + b x. Throws InputError when x has zero variance.
MarginalFit marginal_ols(const Eigen::VectorXd& y, const Eigen::VectorXd& x);

struct PcaFirst {
  Eigen::VectorXd loadings;  // unit norm, largest-magnitude entry positive
  Eigen::VectorXd scores;    // standardized data times loadings
  double variance = 0.0;     // leading eigenvalue of the correlation matrix
  double variance_explained = 0.0;  // fraction of the total
  Eigen::VectorXd eigenvalues;      // descending
};

/// First principal component of the standardized columns of raw.
PcaFirst pca_first(const Eigen::MatrixXd& raw);

struct VifEntry {
  double value = 0.0;  // +inf when flagged
  bool infinite = false;
};

/// 1 / (1 - R^2_j) from regressing each column on the others with an
/// intercept. Perfect collinearity is flagged rather than reported as a
/// huge finite number.
std::vector<VifEntry> vif(const Eigen::MatrixXd& raw);

/// (R^2 - R^2_red) / (1 - R^2_red). Throws InputError when r2_reduced == 1.
double partial_r2(double r2_full, double r2_reduced);
double partial_r2(const OlsFit& full, const OlsFit& reduced);

}  // namespace wavecurve
