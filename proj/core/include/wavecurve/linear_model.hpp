#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace wavecurve {

/// Columns centered to mean 0 and scaled to unit sample standard deviation.
struct DesignMatrix {
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  Eigen::VectorXd mean;  // of the raw columns
  Eigen::VectorXd sd;    // sample sd (n - 1) of the raw columns

  Eigen::Index n() const noexcept { return X.rows(); }
  Eigen::Index p() const noexcept { return X.cols(); }
};

/// Throws InputError naming the column when a column has zero variance, and
/// when there are fewer than two rows.
DesignMatrix standardize(const Eigen::MatrixXd& raw, std::vector<std::string> names = {});

/// (v - mean) / sd with sample sd.
Eigen::VectorXd standardize_vector(const Eigen::VectorXd& v);

/// Ordinary least squares on the columns of Z as given (include a column of
/// ones for an intercept). Columns that are numerically in the span of the
/// preceding kept columns are dropped; their coefficient is 0 and their
/// standard error NaN.
struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  std::vector<bool> kept;
  int rank = 0;
  double sse = 0.0;
  double sst = 0.0;  // around the mean of y
  double r2 = 0.0;
  double sigma2 = 0.0;  // sse / (n - rank); NaN when n == rank
  Eigen::VectorXd fitted;
};

OlsFit ols(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y);

/// Indices of columns kept by the sequential collinearity screen used in ols().
std::vector<bool> independent_columns(const Eigen::MatrixXd& Z, double tolerance = 1e-9);

}  // namespace wavecurve
