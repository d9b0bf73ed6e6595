#include "wavecurve/fgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "wavecurve/error.hpp"
#include "wavecurve/linear_model.hpp"

namespace wavecurve {

namespace {

// The problem in whitened coordinates: with G = L L', the response
// coefficients become Z = C L and the block norm ||b||_G becomes ||L' b||.
struct Whitened {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;        // n x K, centered
  double constant = 0.0;    // objective contribution from outside the span
};

class Projector {
 public:
  explicit Projector(const BasisSystem& basis) : basis_(basis), llt_(basis.gram()) {
    if (llt_.info() != Eigen::Success) throw RankError("fgen: basis Gram matrix is not positive definite");
    L_ = llt_.matrixL();
  }

  Whitened whiten(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, bool center = true) const {
    if (X.rows() != Y.rows()) throw ShapeError("fgen: X and Y have different row counts");
    if (Y.cols() != static_cast<Eigen::Index>(basis_.grid().size())) {
      throw ShapeError("fgen: response curves are not sampled on the basis grid");
    }
    if (!X.allFinite() || !Y.allFinite()) throw InputError("fgen: non-finite input");
    const Eigen::MatrixXd Yc = center ? Eigen::MatrixXd(Y.rowwise() - Y.colwise().mean()) : Y;
    const Eigen::VectorXd& w = basis_.grid().trapezoid_weights();
    // C = Yc W B G^-1, so Z = C L = Yc W B L^-T.
    const Eigen::MatrixXd YWB = Yc * w.asDiagonal() * basis_.eval();
    Whitened out;
    out.X = X;
    out.Z = L_.triangularView<Eigen::Lower>().solve(YWB.transpose()).transpose();
    const double total = (Yc.array().square().rowwise() * w.transpose().array()).sum();
    out.constant = 0.5 * std::max(0.0, total - out.Z.squaredNorm());
    return out;
  }

  // Basis coefficients from whitened block coefficients: b = L^-T bhat.
  Eigen::MatrixXd unwhiten(const Eigen::MatrixXd& Bhat) const {
    return L_.transpose().triangularView<Eigen::Upper>().solve(Bhat.transpose()).transpose();
  }

 private:
  const BasisSystem& basis_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd L_;
};

// R is the current residual Z - X Bhat.
double objective(const Whitened& w, const Eigen::MatrixXd& R, const Eigen::MatrixXd& Bhat, double l1, double l2) {
  double pen = 0.0;
  for (Eigen::Index j = 0; j < Bhat.rows(); ++j) pen += Bhat.row(j).norm();
  return w.constant + 0.5 * R.squaredNorm() + l1 * pen + 0.5 * l2 * Bhat.squaredNorm();
}

double whitened_lambda_max(const Whitened& w) {
  if (w.X.cols() == 0) return 0.0;
  return (w.X.transpose() * w.Z).rowwise().norm().maxCoeff();
}

struct BcdResult {
  Eigen::MatrixXd Bhat;
  long sweeps = 0;
  std::vector<double> trace;
};

BcdResult solve(const Whitened& w, double l1, double l2, const FgenOptions& options,
                const Eigen::MatrixXd* warm = nullptr) {
  if (!(l1 >= 0.0) || !(l2 >= 0.0) || !std::isfinite(l1) || !std::isfinite(l2)) {
    throw InputError("fgen: penalties must be finite and nonnegative");
  }
  const Eigen::Index p = w.X.cols();
  BcdResult res;
  if (p > 0 && l1 >= whitened_lambda_max(w)) {
    // Zero satisfies the optimality conditions exactly.
    res.Bhat = Eigen::MatrixXd::Zero(p, w.Z.cols());
    res.trace.push_back(objective(w, w.Z, res.Bhat, l1, l2));
    res.sweeps = 0;
    return res;
  }
  res.Bhat = warm != nullptr ? *warm : Eigen::MatrixXd::Zero(p, w.Z.cols());
  const Eigen::VectorXd a = w.X.colwise().squaredNorm().transpose();
  Eigen::MatrixXd R = w.Z - w.X * res.Bhat;
  double prev = objective(w, R, res.Bhat, l1, l2);
  res.trace.push_back(prev);
  double rel = 0.0;
  for (res.sweeps = 1; res.sweeps <= options.max_sweeps; ++res.sweeps) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const Eigen::RowVectorXd old = res.Bhat.row(j);
      const Eigen::RowVectorXd s = w.X.col(j).transpose() * R + a[j] * old;
      const double norm = s.norm();
      Eigen::RowVectorXd updated = Eigen::RowVectorXd::Zero(s.size());
      if (norm > l1 && a[j] + l2 > 0.0) updated = (1.0 - l1 / norm) / (a[j] + l2) * s;
      const Eigen::RowVectorXd delta = updated - old;
      if (!delta.isZero(0.0)) {
        R.noalias() -= w.X.col(j) * delta;
        res.Bhat.row(j) = updated;
      }
    }
    const double obj = objective(w, R, res.Bhat, l1, l2);
    res.trace.push_back(obj);
    rel = std::abs(prev - obj) / std::max(std::abs(obj), 1e-300);
    if (rel < options.tolerance || obj == prev) return res;
    prev = obj;
  }
  throw ConvergenceError("fgen_fit: no convergence after " + std::to_string(options.max_sweeps) +
                             " sweeps (relative change " + std::to_string(rel) + ")",
                         rel);
}

}  // namespace

double fgen_lambda_max(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const BasisSystem& basis) {
  const Projector proj(basis);
  return whitened_lambda_max(proj.whiten(X, Y));
}

FGenFit fgen_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, std::shared_ptr<const BasisSystem> basis,
                 double lambda1, double lambda2, const FgenOptions& options) {
  if (!basis) throw InputError("fgen_fit: null basis");
  const Projector proj(*basis);
  const Whitened w = proj.whiten(X, Y);
  BcdResult res = solve(w, lambda1, lambda2, options);
  FGenFit fit;
  fit.basis = std::move(basis);
  fit.coefs = proj.unwhiten(res.Bhat);
  fit.lambda1 = lambda1;
  fit.lambda2 = lambda2;
  fit.sweeps = res.sweeps;
  fit.objective_trace = std::move(res.trace);
  for (Eigen::Index j = 0; j < res.Bhat.rows(); ++j) {
    const bool on = !res.Bhat.row(j).isZero(0.0);
    fit.active.push_back(on);
    if (!on) fit.coefs.row(j).setZero();
  }
  return fit;
}

namespace {

FgenPath whitened_path(const Whitened& w, const Projector& proj, const PathOptions& options,
                       const FgenOptions& solver, bool keep_coefs) {
  const Eigen::Index p = w.X.cols();
  FgenPath path;
  path.lambda_max = whitened_lambda_max(w);
  path.entry = Eigen::VectorXd::Zero(p);
  path.lambda_ratio = Eigen::VectorXd::Zero(p);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(p, w.Z.cols());
  if (!(path.lambda_max > 0.0)) {
    path.lambda1 = {0.0};
    if (keep_coefs) path.coefs.push_back(zero);
    return path;
  }
  const std::vector<double> grid = geometric_grid(path.lambda_max, options.grid_size, options.min_ratio);
  path.lambda1.push_back(grid.front());
  if (keep_coefs) path.coefs.push_back(zero);

  std::vector<bool> entered(static_cast<std::size_t>(p), false);
  const Eigen::VectorXd score = (w.X.transpose() * w.Z).rowwise().norm();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (score[j] >= path.lambda_max * (1.0 - 1e-12)) {
      entered[static_cast<std::size_t>(j)] = true;
      path.entry[j] = path.lambda_max;
    }
  }
  Eigen::MatrixXd previous = zero;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double lam = grid[g];
    Eigen::MatrixXd B = solve(w, lam, options.l2_ratio * lam, solver, &previous).Bhat;
    path.lambda1.push_back(lam);
    if (keep_coefs) path.coefs.push_back(proj.unwhiten(B));
    for (Eigen::Index j = 0; j < p; ++j) {
      if (entered[static_cast<std::size_t>(j)] || B.row(j).isZero(0.0)) continue;
      double lo = lam;
      double hi = grid[g - 1];
      for (int it = 0; it < options.refine_iterations; ++it) {
        const double mid = std::sqrt(lo * hi);
        const Eigen::MatrixXd trial = solve(w, mid, options.l2_ratio * mid, solver, &previous).Bhat;
        (trial.row(j).isZero(0.0) ? hi : lo) = mid;
      }
      entered[static_cast<std::size_t>(j)] = true;
      path.entry[j] = lo;
    }
    previous = std::move(B);
    if (options.stop_when_all_entered && std::all_of(entered.begin(), entered.end(), [](bool e) { return e; })) {
      break;
    }
  }
  path.lambda_ratio = (path.entry / path.lambda_max).cwiseMin(1.0);
  return path;
}

}  // namespace

FgenPath fgen_path_ratios(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const BasisSystem& basis,
                          const PathOptions& options, const FgenOptions& solver) {
  const Projector proj(basis);
  return whitened_path(proj.whiten(X, Y), proj, options, solver, true);
}

StabilitySummary fgen_stability(const Eigen::MatrixXd& raw_X, const Eigen::MatrixXd& Y, const BasisSystem& basis,
                                const StabilityOptions& options, const FgenOptions& solver) {
  if (raw_X.rows() != Y.rows()) throw ShapeError("fgen_stability: X and Y have different row counts");
  const Projector proj(basis);
  return stability_resample(
      static_cast<int>(raw_X.rows()), static_cast<int>(raw_X.cols()), options, "fgen-stability",
      [&](const std::vector<std::size_t>& sample) -> std::optional<Eigen::VectorXd> {
        std::vector<Eigen::Index> rows(sample.begin(), sample.end());
        const Eigen::MatrixXd sub = raw_X(rows, Eigen::all);
        const Eigen::MatrixXd Ysub = Y(rows, Eigen::all);
        DesignMatrix d;
        try {
          d = standardize(sub);
        } catch (const InputError&) {
          return std::nullopt;
        }
        return whitened_path(proj.whiten(d.X, Ysub), proj, options.path, solver, false).lambda_ratio;
      });
}

FgenCvResult fgen_cv_select(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const BasisSystem& basis,
                            const CvOptions& options, const FgenOptions& solver) {
  const Eigen::Index n = X.rows();
  if (options.folds < 2 || n < options.folds) throw InputError("fgen_cv_select: need 2 <= folds <= n");
  const Projector proj(basis);
  const Whitened full = proj.whiten(X, Y);
  const Whitened raw = proj.whiten(X, Y, false);

  const std::vector<int> fold_of = random_folds(static_cast<std::size_t>(n), options.folds, options.seed, "fgen-cv-folds");
  const double lmax = whitened_lambda_max(full);
  if (!(lmax > 0.0)) throw InputError("fgen_cv_select: response is orthogonal to every column");
  std::vector<double> lambda1 = geometric_grid(lmax, options.path.grid_size, options.path.min_ratio);
  const auto G = static_cast<Eigen::Index>(lambda1.size());
  Eigen::MatrixXd fold_mse(options.folds, G);
  for (int f = 0; f < options.folds; ++f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    Whitened tr;
    tr.X = X(train, Eigen::all);
    const Eigen::MatrixXd Ztr = raw.Z(train, Eigen::all);
    const Eigen::RowVectorXd mean = Ztr.colwise().mean();
    tr.Z = Ztr.rowwise() - mean;
    const Eigen::MatrixXd Xte = X(test, Eigen::all);
    const Eigen::MatrixXd Zte = raw.Z(test, Eigen::all);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(X.cols(), raw.Z.cols());
    for (Eigen::Index g = 0; g < G; ++g) {
      const double lam = lambda1[static_cast<std::size_t>(g)];
      B = solve(tr, lam, options.path.l2_ratio * lam, solver, &B).Bhat;
      const Eigen::MatrixXd resid = (Zte - Xte * B).rowwise() - mean;
      fold_mse(f, g) = resid.squaredNorm() / static_cast<double>(test.size());
    }
  }
  return summarize_cv(std::move(lambda1), fold_mse);
}

}  // namespace wavecurve
