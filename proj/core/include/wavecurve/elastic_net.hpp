#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace wavecurve {

/// Objective 0.5 * ||y - X b||^2 + l1 * ||b||_1 + 0.5 * l2 * ||b||^2, with the
/// loss left unnormalized (no 1/n factor).
double enet_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                      double lambda1, double lambda2);

/// Duality gap of beta, computed from the lasso on the augmented design
/// [X; sqrt(l2) I]. Nonnegative and zero exactly at the optimum.
double enet_duality_gap(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                        double lambda1, double lambda2);

/// ||X' y||_inf: the smallest lambda1 at which the zero vector is optimal.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct EnetOptions {
  double tolerance = 1e-8;  // on the largest coefficient change in a sweep
  long max_sweeps = 100000;
  bool record_objective = false;
};

struct EnetFit {
  Eigen::VectorXd beta;
  long sweeps = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;  // after each sweep, when requested
};

/// Cyclic coordinate descent with soft-thresholding. Throws ConvergenceError
/// carrying the duality gap when the sweep budget runs out.
EnetFit elastic_net_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                        const EnetOptions& options = {}, const Eigen::VectorXd* warm_start = nullptr);

struct PathOptions {
  int grid_size = 100;
  double min_ratio = 1e-3;  // last grid point is min_ratio * lambda_max
  double l2_ratio = 0.6;    // lambda2 = l2_ratio * lambda1
  /// Bisection steps locating each entry point inside its grid interval.
  int refine_iterations = 20;
  /// Stop once every feature has entered (coefficients past that point are
  /// then not computed). Used where only the ratios matter.
  bool stop_when_all_entered = false;
  EnetOptions solver;
};

/// Elastic-net path on a geometric lambda1 grid descending from lambda_max.
struct PathFit {
  double lambda_max = 0.0;
  double l2_ratio = 0.6;
  std::vector<double> lambda1;
  Eigen::MatrixXd coefs;       // p x (points computed)
  Eigen::VectorXd entry;       // lambda1 at first entry, 0 if never active
  Eigen::VectorXd lambda_ratio;  // entry / lambda_max, in [0, 1]
};

/// y is centered internally; X should be standardized.
PathFit path_with_ratios(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PathOptions& options = {});

/// Geometric grid from lambda_max down to min_ratio * lambda_max.
std::vector<double> geometric_grid(double lambda_max, int size, double min_ratio);

struct StabilityOptions {
  int replications = 500;
  /// Inclusive subsample size range. Zero means the default
  /// [ceil(90 n / 107), n].
  int n_min = 0;
  int n_max = 0;
  std::uint64_t seed = 0;
  PathOptions path{.stop_when_all_entered = true, .solver = {}};
};

struct StabilitySummary {
  Eigen::VectorXd mean_ratio;
  int replications = 0;  // requested
  int used = 0;
  int skipped = 0;
  std::vector<int> subsample_sizes;  // of the runs used
  Eigen::MatrixXd ratios;            // used x p
};

/// Default subsample range for n rows.
std::pair<int, int> default_subsample_range(int n);

/// Generic resampling driver: draws a subsample size uniformly in the range
/// and rows without replacement, then calls `ratios` on the sorted row set.
/// A run is skipped (with a warning) when the subsample has fewer than p + 1
/// rows or the callback returns nullopt.
StabilitySummary stability_resample(
    int n, int p, const StabilityOptions& options, const char* stage,
    const std::function<std::optional<Eigen::VectorXd>(const std::vector<std::size_t>&)>& ratios);

/// Scalar elastic-net stability: each run re-standardizes the raw subsample
/// columns and recomputes the lambda_max ratios.
StabilitySummary stability(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& y,
                           const StabilityOptions& options = {});

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  PathOptions path;
};

struct CvResult {
  std::vector<double> lambda1;
  std::vector<double> cv_mean;  // mean over folds of held-out MSE
  std::vector<double> cv_se;    // sd over folds / sqrt(folds)
  std::size_t index_min = 0;
  std::size_t index_1se = 0;
  double lambda_min = 0.0;
  double lambda_1se = 0.0;
};

/// Fold id in [0, folds) per row from a seeded shuffle; fold sizes differ by
/// at most one.
std::vector<int> random_folds(std::size_t n, int folds, std::uint64_t seed, const char* stage);

/// Mean and standard error over folds (rows of fold_mse, one column per
/// lambda in the descending grid), the minimizer (largest lambda among ties)
/// and the largest lambda within one standard error of the minimum.
CvResult summarize_cv(std::vector<double> lambda1, const Eigen::MatrixXd& fold_mse);

/// K-fold cross-validation over the full-data lambda grid with a seeded
/// random fold assignment. Training responses are centered by their mean.
CvResult cv_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& options = {});

/// Same, with explicit fold ids in [0, folds).
CvResult cv_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& fold_of,
                   const PathOptions& path = {});

}  // namespace wavecurve
