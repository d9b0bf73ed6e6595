#include "wavecurve/elastic_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "wavecurve/error.hpp"
#include "wavecurve/linear_model.hpp"
#include "wavecurve/log.hpp"
#include "wavecurve/rng.hpp"

namespace wavecurve {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2) {
  if (X.rows() != y.size()) throw ShapeError("elastic net: X and y have different row counts");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2)) {
    throw InputError("elastic net: penalties must be finite and nonnegative");
  }
  if (!X.allFinite() || !y.allFinite()) throw InputError("elastic net: non-finite input");
}

Eigen::VectorXd centered(const Eigen::VectorXd& y) { return y.array() - y.mean(); }

// Coefficients at each lambda1 of a descending grid, warm started.
Eigen::MatrixXd fit_on_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<double>& grid,
                            const PathOptions& options) {
  Eigen::MatrixXd coefs = Eigen::MatrixXd::Zero(X.cols(), static_cast<Eigen::Index>(grid.size()));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    beta = elastic_net_fit(X, y, grid[g], options.l2_ratio * grid[g], options.solver, &beta).beta;
    coefs.col(static_cast<Eigen::Index>(g)) = beta;
  }
  return coefs;
}

}  // namespace

double enet_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                      double lambda1, double lambda2) {
  return 0.5 * (y - X * beta).squaredNorm() + lambda1 * beta.lpNorm<1>() + 0.5 * lambda2 * beta.squaredNorm();
}

double enet_duality_gap(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                        double lambda1, double lambda2) {
  if (lambda1 == 0.0) {
    // Plain or ridge least squares: the gap is the exact suboptimality.
    const Eigen::MatrixXd A = X.transpose() * X + lambda2 * Eigen::MatrixXd::Identity(X.cols(), X.cols());
    const Eigen::VectorXd best = A.completeOrthogonalDecomposition().solve(X.transpose() * y);
    return std::max(0.0, enet_objective(X, y, beta, 0.0, lambda2) - enet_objective(X, y, best, 0.0, lambda2));
  }
  // Augmented lasso: y~ = [y; 0], X~ = [X; sqrt(l2) I], residual r~ = [r; -sqrt(l2) b].
  const Eigen::VectorXd r = y - X * beta;
  const Eigen::VectorXd grad = X.transpose() * r - lambda2 * beta;
  const double norm = grad.lpNorm<Eigen::Infinity>();
  double scale = 1.0;
  if (norm > lambda1) scale = lambda1 / norm;
  // Dual value 0.5 ||y~||^2 - 0.5 ||y~ - theta||^2 with theta = scale * r~.
  const double dual = 0.5 * y.squaredNorm() -
                      0.5 * ((y - scale * r).squaredNorm() + scale * scale * lambda2 * beta.squaredNorm());
  return enet_objective(X, y, beta, lambda1, lambda2) - dual;
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw ShapeError("lambda_max: X and y have different row counts");
  if (X.cols() == 0) return 0.0;
  return (X.transpose() * y).lpNorm<Eigen::Infinity>();
}

EnetFit elastic_net_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                        const EnetOptions& options, const Eigen::VectorXd* warm_start) {
  check_inputs(X, y, lambda1, lambda2);
  const Eigen::Index p = X.cols();
  EnetFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  if (warm_start != nullptr) {
    if (warm_start->size() != p) throw ShapeError("elastic_net_fit: warm start has the wrong length");
    fit.beta = *warm_start;
  }
  if (p > 0 && lambda1 >= lambda_max(X, y)) {
    // Zero satisfies the optimality conditions exactly.
    fit.beta.setZero();
    fit.sweeps = 0;
    fit.objective = enet_objective(X, y, fit.beta, lambda1, lambda2);
    if (options.record_objective) fit.objective_trace.push_back(fit.objective);
    return fit;
  }
  const Eigen::VectorXd a = X.colwise().squaredNorm().transpose();
  Eigen::VectorXd r = y - X * fit.beta;

  for (fit.sweeps = 1; fit.sweeps <= options.max_sweeps; ++fit.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = fit.beta[j];
      const double denom = a[j] + lambda2;
      double updated = 0.0;
      if (denom > 0.0) updated = soft_threshold(X.col(j).dot(r) + a[j] * old, lambda1) / denom;
      const double delta = updated - old;
      if (delta != 0.0) {
        r.noalias() -= delta * X.col(j);
        fit.beta[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (options.record_objective) fit.objective_trace.push_back(enet_objective(X, y, fit.beta, lambda1, lambda2));
    if (max_change < options.tolerance) {
      fit.objective = enet_objective(X, y, fit.beta, lambda1, lambda2);
      return fit;
    }
  }
  const double gap = enet_duality_gap(X, y, fit.beta, lambda1, lambda2);
  throw ConvergenceError("elastic_net_fit: no convergence after " + std::to_string(options.max_sweeps) +
                             " sweeps (duality gap " + std::to_string(gap) + ")",
                         gap);
}

std::vector<double> geometric_grid(double lambda_max, int size, double min_ratio) {
  if (size < 2) throw InputError("geometric_grid: need at least two points");
  if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw InputError("geometric_grid: min_ratio must be in (0, 1)");
  std::vector<double> grid(static_cast<std::size_t>(size));
  for (int g = 0; g < size; ++g) {
    grid[static_cast<std::size_t>(g)] =
        lambda_max * std::pow(min_ratio, static_cast<double>(g) / static_cast<double>(size - 1));
  }
  grid.front() = lambda_max;
  return grid;
}

PathFit path_with_ratios(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PathOptions& options) {
  check_inputs(X, y, 0.0, 0.0);
  const Eigen::Index p = X.cols();
  const Eigen::VectorXd yc = centered(y);

  PathFit path;
  path.l2_ratio = options.l2_ratio;
  path.lambda_max = lambda_max(X, yc);
  path.entry = Eigen::VectorXd::Zero(p);
  path.lambda_ratio = Eigen::VectorXd::Zero(p);
  if (!(path.lambda_max > 0.0)) {
    // Response orthogonal to every column: nothing ever enters.
    path.lambda1 = {0.0};
    path.coefs = Eigen::MatrixXd::Zero(p, 1);
    return path;
  }
  path.lambda1 = geometric_grid(path.lambda_max, options.grid_size, options.min_ratio);
  path.coefs = Eigen::MatrixXd::Zero(p, static_cast<Eigen::Index>(path.lambda1.size()));

  // Features whose score attains lambda_max enter at lambda_max itself.
  std::vector<bool> entered(static_cast<std::size_t>(p), false);
  const Eigen::VectorXd score = (X.transpose() * yc).cwiseAbs();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (score[j] >= path.lambda_max * (1.0 - 1e-12)) {
      entered[static_cast<std::size_t>(j)] = true;
      path.entry[j] = path.lambda_max;
    }
  }

  Eigen::VectorXd previous = Eigen::VectorXd::Zero(p);
  Eigen::Index computed = 1;
  for (std::size_t g = 1; g < path.lambda1.size(); ++g) {
    const double lam = path.lambda1[g];
    Eigen::VectorXd beta = elastic_net_fit(X, yc, lam, options.l2_ratio * lam, options.solver, &previous).beta;
    path.coefs.col(static_cast<Eigen::Index>(g)) = beta;
    computed = static_cast<Eigen::Index>(g) + 1;

    for (Eigen::Index j = 0; j < p; ++j) {
      if (entered[static_cast<std::size_t>(j)] || beta[j] == 0.0) continue;
      // Active at lo, inactive at hi: bisect (geometrically) for the entry point.
      double lo = lam;
      double hi = path.lambda1[g - 1];
      for (int it = 0; it < options.refine_iterations; ++it) {
        const double mid = std::sqrt(lo * hi);
        const Eigen::VectorXd trial =
            elastic_net_fit(X, yc, mid, options.l2_ratio * mid, options.solver, &previous).beta;
        (trial[j] != 0.0 ? lo : hi) = mid;
      }
      entered[static_cast<std::size_t>(j)] = true;
      path.entry[j] = lo;
    }
    previous = beta;
    if (options.stop_when_all_entered && std::all_of(entered.begin(), entered.end(), [](bool e) { return e; })) {
      break;
    }
  }
  if (computed < path.coefs.cols()) {
    path.coefs.conservativeResize(Eigen::NoChange, computed);
    path.lambda1.resize(static_cast<std::size_t>(computed));
  }
  path.lambda_ratio = (path.entry / path.lambda_max).cwiseMin(1.0);
  return path;
}

std::pair<int, int> default_subsample_range(int n) {
  const int lo = static_cast<int>(std::ceil(90.0 * static_cast<double>(n) / 107.0 - 1e-9));
  return {std::clamp(lo, 1, n), n};
}

StabilitySummary stability_resample(
    int n, int p, const StabilityOptions& options, const char* stage,
    const std::function<std::optional<Eigen::VectorXd>(const std::vector<std::size_t>&)>& ratios) {
  if (options.replications < 1) throw InputError("stability: replications must be positive");
  auto [n_min, n_max] = default_subsample_range(n);
  if (options.n_min > 0) n_min = options.n_min;
  if (options.n_max > 0) n_max = options.n_max;
  if (n_min > n_max || n_max > n || n_min < 1) {
    throw InputError(std::string(stage) + ": subsample range [" + std::to_string(n_min) + ", " +
                     std::to_string(n_max) + "] invalid for n = " + std::to_string(n));
  }

  StabilitySummary summary;
  summary.replications = options.replications;
  summary.mean_ratio = Eigen::VectorXd::Zero(p);
  std::vector<Eigen::VectorXd> rows;
  int too_small = 0;
  for (int r = 0; r < options.replications; ++r) {
    Rng rng(derive_seed(options.seed, stage, static_cast<std::uint64_t>(r)));
    const int size = rng.between(n_min, n_max);
    const auto sample = sample_without_replacement(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(size));
    if (size < p + 1) {
      ++too_small;
      ++summary.skipped;
      continue;
    }
    auto result = ratios(sample);
    if (!result) {
      ++summary.skipped;
      continue;
    }
    if (result->size() != p) throw ShapeError(std::string(stage) + ": ratio vector has the wrong length");
    rows.push_back(std::move(*result));
    summary.subsample_sizes.push_back(size);
  }
  summary.used = static_cast<int>(rows.size());
  if (summary.skipped > 0) {
    log::warn(std::string(stage) + ": skipped " + std::to_string(summary.skipped) + " of " +
              std::to_string(options.replications) + " runs (" + std::to_string(too_small) +
              " with fewer than p + 1 rows)");
  }
  summary.ratios.resize(summary.used, p);
  for (int i = 0; i < summary.used; ++i) summary.ratios.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  if (summary.used > 0) summary.mean_ratio = summary.ratios.colwise().mean().transpose();
  return summary;
}

StabilitySummary stability(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& y, const StabilityOptions& options) {
  check_inputs(raw_X, y, 0.0, 0.0);
  return stability_resample(
      static_cast<int>(raw_X.rows()), static_cast<int>(raw_X.cols()), options, "enet-stability",
      [&](const std::vector<std::size_t>& sample) -> std::optional<Eigen::VectorXd> {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(sample.size()), raw_X.cols());
        Eigen::VectorXd ysub(sub.rows());
        for (std::size_t i = 0; i < sample.size(); ++i) {
          sub.row(static_cast<Eigen::Index>(i)) = raw_X.row(static_cast<Eigen::Index>(sample[i]));
          ysub[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(sample[i])];
        }
        try {
          const DesignMatrix d = standardize(sub);
          return path_with_ratios(d.X, ysub, options.path).lambda_ratio;
        } catch (const InputError&) {
          return std::nullopt;  // zero-variance column in this subsample
        }
      });
}

std::vector<int> random_folds(std::size_t n, int folds, std::uint64_t seed, const char* stage) {
  if (folds < 2 || n < static_cast<std::size_t>(folds)) throw InputError(std::string(stage) + ": need 2 <= folds <= n");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, stage));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<int> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  return fold_of;
}

CvResult summarize_cv(std::vector<double> lambda1, const Eigen::MatrixXd& fold_mse) {
  const auto G = static_cast<Eigen::Index>(lambda1.size());
  const Eigen::Index folds = fold_mse.rows();
  if (fold_mse.cols() != G || G == 0 || folds < 2) throw ShapeError("summarize_cv: bad fold error matrix");
  CvResult cv;
  cv.lambda1 = std::move(lambda1);
  cv.cv_mean.resize(static_cast<std::size_t>(G));
  cv.cv_se.resize(static_cast<std::size_t>(G));
  for (Eigen::Index g = 0; g < G; ++g) {
    const Eigen::VectorXd col = fold_mse.col(g);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(folds - 1);
    cv.cv_mean[static_cast<std::size_t>(g)] = mean;
    cv.cv_se[static_cast<std::size_t>(g)] = std::sqrt(var / static_cast<double>(folds));
  }
  // Grid is descending, so the first minimum is the largest lambda among ties.
  for (std::size_t g = 1; g < cv.cv_mean.size(); ++g) {
    if (cv.cv_mean[g] < cv.cv_mean[cv.index_min]) cv.index_min = g;
  }
  const double bound = cv.cv_mean[cv.index_min] + cv.cv_se[cv.index_min];
  cv.index_1se = cv.index_min;
  for (std::size_t g = 0; g < cv.index_min; ++g) {
    if (cv.cv_mean[g] <= bound) {
      cv.index_1se = g;
      break;
    }
  }
  cv.lambda_min = cv.lambda1[cv.index_min];
  cv.lambda_1se = cv.lambda1[cv.index_1se];
  return cv;
}

CvResult cv_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const CvOptions& options) {
  return cv_select(X, y, random_folds(static_cast<std::size_t>(X.rows()), options.folds, options.seed, "cv-folds"),
                   options.path);
}

CvResult cv_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& fold_of,
                   const PathOptions& path) {
  check_inputs(X, y, 0.0, 0.0);
  if (static_cast<Eigen::Index>(fold_of.size()) != X.rows()) throw ShapeError("cv_select: one fold id per row");
  const int folds = fold_of.empty() ? 0 : *std::max_element(fold_of.begin(), fold_of.end()) + 1;
  if (folds < 2) throw InputError("cv_select: need at least two folds");

  const double lmax = lambda_max(X, centered(y));
  if (!(lmax > 0.0)) throw InputError("cv_select: response is orthogonal to every column");
  std::vector<double> lambda1 = geometric_grid(lmax, path.grid_size, path.min_ratio);
  const auto G = static_cast<Eigen::Index>(lambda1.size());
  Eigen::MatrixXd fold_mse(folds, G);

  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
      if (fold_of[i] < 0) throw InputError("cv_select: negative fold id");
      (fold_of[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    }
    if (test.empty() || train.empty()) throw InputError("cv_select: empty fold " + std::to_string(f));
    const Eigen::MatrixXd Xtr = X(train, Eigen::all);
    const Eigen::VectorXd ytr_raw = y(train);
    const double ymean = ytr_raw.mean();
    const Eigen::VectorXd ytr = ytr_raw.array() - ymean;
    const Eigen::MatrixXd coefs = fit_on_grid(Xtr, ytr, lambda1, path);
    const Eigen::MatrixXd Xte = X(test, Eigen::all);
    const Eigen::VectorXd yte = y(test);
    const Eigen::MatrixXd pred = (Xte * coefs).array() + ymean;
    fold_mse.row(f) = (pred.colwise() - yte).colwise().squaredNorm() / static_cast<double>(test.size());
  }

  return summarize_cv(std::move(lambda1), fold_mse);
}

}  // namespace wavecurve
