#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "wavecurve/bspline.hpp"
#include "wavecurve/error.hpp"
#include "wavecurve/smoothing.hpp"
#include "wavecurve_testing/oracles.hpp"
#include "wavecurve_testing/synthetic.hpp"

namespace wavecurve {
namespace {

std::shared_ptr<const BasisSystem> daily_basis() {
  return std::make_shared<const BasisSystem>(BasisSystem::uniform(Grid::daily(150)));
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

using testing::gcv_oracle;

TEST(FitPenalized, ReproducesStraightLine) {
  const auto basis = daily_basis();
  Eigen::VectorXd y(150);
  for (int t = 0; t < 150; ++t) y[t] = 3.0 - 0.02 * t;
  for (double lambda : {0.0, 1.0, 1e4}) {
    const auto fit = fit_penalized(to_vector(y), basis, lambda);
    EXPECT_LT((fit.curve.values() - y).cwiseAbs().maxCoeff(), 1e-8) << "lambda=" << lambda;
  }
}

TEST(FitPenalized, LargeLambdaGivesLeastSquaresLine) {
  const auto basis = daily_basis();
  Rng rng(3);
  Eigen::VectorXd y(150);
  for (int t = 0; t < 150; ++t) y[t] = std::sin(t / 10.0) + rng.normal();
  const auto fit = fit_penalized(to_vector(y), basis, 1e12);
  Eigen::MatrixXd Z(150, 2);
  for (int t = 0; t < 150; ++t) Z.row(t) << 1.0, t;
  const Eigen::VectorXd line = Z * Z.colPivHouseholderQr().solve(y);
  EXPECT_LT((fit.curve.values() - line).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FitPenalized, GcvSelectedFitBeatsNoiseLevel) {
  const auto basis = daily_basis();
  Rng rng(17);
  const auto sine = testing::noisy_sine(rng, basis->grid(), 0.1);
  const auto sel = select_lambda(sine.observed.transpose(), basis, default_lambda_grid());
  const auto fit = fit_penalized(to_vector(sine.observed), basis, sel.lambda);
  const double rmse = std::sqrt((fit.curve.values() - sine.truth).squaredNorm() / 150.0);
  EXPECT_LT(rmse, 0.1);
}

TEST(FitPenalized, GcvIdentityAndHatTraceBounds) {
  const auto basis = daily_basis();
  Rng rng(2);
  const auto sine = testing::noisy_sine(rng, basis->grid(), 0.2);
  for (double lambda : log_spaced(1e-4, 1e4, 9)) {
    const auto fit = fit_penalized(to_vector(sine.observed), basis, lambda);
    const double T = 150.0;
    EXPECT_NEAR(fit.gcv, T * fit.sse / ((T - fit.hat_trace) * (T - fit.hat_trace)), 1e-10 * fit.gcv);
    EXPECT_GT(fit.hat_trace, 0.0);
    EXPECT_LE(fit.hat_trace, 23.0 + 1e-9);
    EXPECT_NEAR(fit.gcv, gcv_oracle(sine.observed, *basis, lambda), 1e-8 * fit.gcv);
  }
}

TEST(FitPenalized, HatTraceNonincreasingInLambda) {
  const auto basis = daily_basis();
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : default_lambda_grid()) {
    const double tr = PenalizedSmoother(basis, lambda).hat_trace();
    EXPECT_LE(tr, previous + 1e-9);
    previous = tr;
  }
}

TEST(FitPenalized, UnpenalizedFitIsAProjection) {
  const auto basis = daily_basis();
  Rng rng(8);
  const auto sine = testing::noisy_sine(rng, basis->grid(), 0.1);
  const auto first = fit_penalized(to_vector(sine.observed), basis, 0.0);
  const auto second = fit_penalized(to_vector(first.curve.values()), basis, 0.0);
  EXPECT_LT((second.curve.coefs() - first.curve.coefs()).norm(), 1e-10 * first.curve.coefs().norm());
}

TEST(FitPenalized, ResmoothingNeverAddsRoughness) {
  const auto basis = daily_basis();
  Rng rng(8);
  const auto sine = testing::noisy_sine(rng, basis->grid(), 0.1);
  for (double lambda : {1e-4, 1.0, 1e3}) {
    const auto first = fit_penalized(to_vector(sine.observed), basis, lambda);
    const auto second = fit_penalized(to_vector(first.curve.values()), basis, lambda);
    const double r1 = first.curve.coefs().dot(basis->penalty() * first.curve.coefs());
    const double r2 = second.curve.coefs().dot(basis->penalty() * second.curve.coefs());
    EXPECT_LE(r2, r1 * (1.0 + 1e-10)) << "lambda=" << lambda;
  }
}

TEST(FitPenalized, Errors) {
  const auto basis = daily_basis();
  std::vector<double> y(150, 1.0);
  y[10] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(fit_penalized(y, basis, 1.0), InputError);
  // 23 basis functions observed at only 10 points: singular without penalty.
  const auto full = BasisSystem::uniform(Grid::daily(150));
  const std::vector<double> breaks(full.breakpoints().begin(), full.breakpoints().end());
  const auto small = std::make_shared<const BasisSystem>(Grid::uniform(149.0, 10), breaks, 3);
  EXPECT_THROW(fit_penalized(std::vector<double>(10, 1.0), small, 0.0), RankError);
  EXPECT_THROW(fit_penalized(std::vector<double>(150, 1.0), basis, -1.0), InputError);
}

TEST(SelectLambda, SingleSeriesMatchesPerCurveMinimum) {
  const auto basis = daily_basis();
  Rng rng(4);
  const auto sine = testing::noisy_sine(rng, basis->grid(), 0.1);
  const auto grid = default_lambda_grid();
  const auto sel = select_lambda(sine.observed.transpose(), basis, grid);
  std::size_t best = 0;
  double best_gcv = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = fit_penalized(to_vector(sine.observed), basis, grid[i]).gcv;
    if (g <= best_gcv) {  // ties to the larger lambda
      best_gcv = g;
      best = i;
    }
  }
  EXPECT_EQ(sel.index, best);
  EXPECT_DOUBLE_EQ(sel.lambda, grid[best]);
}

TEST(SelectLambda, DuplicatedSeriesSameAsOne) {
  const auto basis = daily_basis();
  Rng rng(6);
  const auto sine = testing::noisy_sine(rng, basis->grid(), 0.3);
  Eigen::MatrixXd two(2, 150);
  two.row(0) = sine.observed.transpose();
  two.row(1) = sine.observed.transpose();
  const auto grid = default_lambda_grid();
  EXPECT_EQ(select_lambda(two, basis, grid).index, select_lambda(sine.observed.transpose(), basis, grid).index);
}

TEST(SelectLambda, MatchesIndependentAveragedGcv) {
  const auto basis = daily_basis();
  Rng rng(12);
  Eigen::MatrixXd set(20, 150);
  for (int i = 0; i < 20; ++i) set.row(i) = testing::noisy_sine(rng, basis->grid(), 0.05 + 0.01 * i).observed;
  const auto grid = log_spaced(1e-4, 1e4, 20);
  const auto sel = select_lambda(set, basis, grid);
  std::size_t best = 0;
  double best_mean = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean = 0.0;
    for (int i = 0; i < 20; ++i) mean += gcv_oracle(set.row(i).transpose(), *basis, grid[g]) / 20.0;
    EXPECT_NEAR(sel.mean_gcv[g], mean, 1e-8 * mean);
    if (mean <= best_mean) {
      best_mean = mean;
      best = g;
    }
  }
  EXPECT_EQ(sel.index, best);
}

TEST(SelectLambda, EmptySetThrows) {
  EXPECT_THROW(select_lambda(Eigen::MatrixXd(0, 150), daily_basis(), default_lambda_grid()), InputError);
  EXPECT_THROW(select_lambda(Eigen::MatrixXd::Ones(1, 150), daily_basis(), std::vector<double>{}), InputError);
}

TEST(SmoothCollection, FitsEveryRowWithSharedLambda) {
  const auto basis = daily_basis();
  Rng rng(1);
  Eigen::MatrixXd set(3, 150);
  for (int i = 0; i < 3; ++i) set.row(i) = testing::noisy_sine(rng, basis->grid(), 0.1).observed;
  const auto sc = smooth_collection(set, basis, default_lambda_grid());
  ASSERT_EQ(sc.fits.size(), 3u);
  for (const auto& f : sc.fits) EXPECT_DOUBLE_EQ(f.lambda, sc.selection.lambda);
  EXPECT_EQ(sc.values().rows(), 3);
  EXPECT_EQ(sc.values().cols(), 150);
}

TEST(InterpolateMissing, LinearFillWithConstantEnds) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v{nan, 1.0, nan, nan, 4.0, nan};
  EXPECT_EQ(interpolate_missing(v, "test"), 4u);
  EXPECT_EQ(v, (std::vector<double>{1.0, 1.0, 2.0, 3.0, 4.0, 4.0}));
  std::vector<double> none(4, nan);
  EXPECT_THROW(interpolate_missing(none, "test"), InputError);
}

}  // namespace
}  // namespace wavecurve
