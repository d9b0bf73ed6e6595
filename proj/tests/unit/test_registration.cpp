#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "wavecurve/error.hpp"
#include "wavecurve/log.hpp"
#include "wavecurve/registration.hpp"
#include "wavecurve_testing/synthetic.hpp"

namespace wavecurve {
namespace {

using testing::gaussian_bump;

std::shared_ptr<const BasisSystem> daily_basis() {
  return std::make_shared<const BasisSystem>(BasisSystem::uniform(Grid::daily(150)));
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

TEST(FindPeak, UnimodalBump) {
  const Grid g = Grid::daily(150);
  const auto peak = find_peak(to_vector(gaussian_bump(g, 40.0, 8.0, 3.0)), g);
  EXPECT_EQ(peak.day, 40.0);
  EXPECT_NEAR(peak.value, 3.0, 1e-12);
  EXPECT_FALSE(peak.flat);
}

TEST(FindPeak, IgnoresMaximumOutsideWindow) {
  const Grid g = Grid::daily(150);
  const Eigen::VectorXd v = gaussian_bump(g, 8.0, 1.5, 3.0) + gaussian_bump(g, 50.0, 6.0, 2.0);
  const auto peak = find_peak(to_vector(v), g, {10.0, 100.0});
  EXPECT_EQ(peak.day, 50.0);
  // Dense check of the analytic value at day 50.
  EXPECT_NEAR(peak.value, 2.0 + 3.0 * std::exp(-0.5 * std::pow(42.0 / 1.5, 2)), 1e-12);
}

TEST(FindPeak, TiesGoToEarlierDay) {
  const Grid g = Grid::daily(20);
  std::vector<double> v(20, 0.0);
  v[12] = 1.0;
  v[15] = 1.0;
  EXPECT_EQ(find_peak(v, g, {10.0, 19.0}).index, 12u);
}

TEST(FindPeak, FlatAndMonotoneAreFlagged) {
  const Grid g = Grid::daily(150);
  EXPECT_TRUE(find_peak(std::vector<double>(150, 2.0), g).flat);
  std::vector<double> ramp(150);
  for (int t = 0; t < 150; ++t) ramp[t] = t;
  EXPECT_TRUE(find_peak(ramp, g, {10.0, 100.0}).flat);
}

TEST(FindPeak, EmptyWindowThrows) {
  const Grid g = Grid::daily(150);
  EXPECT_THROW(find_peak(std::vector<double>(150, 0.0), g, {50.0, 40.0}), InputError);
  EXPECT_THROW(find_peak(std::vector<double>(150, 0.0), g, {200.0, 300.0}), InputError);
}

TEST(ShiftSeries, LeftShiftWithConstantAndZeroFill) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  EXPECT_EQ(shift_series(v, 2, FillMode::constant), (Eigen::VectorXd(5) << 3, 4, 5, 5, 5).finished());
  EXPECT_EQ(shift_series(v, 2, FillMode::zero), (Eigen::VectorXd(5) << 3, 4, 5, 0, 0).finished());
  EXPECT_EQ(shift_series(v, -1, FillMode::constant), (Eigen::VectorXd(5) << 1, 1, 2, 3, 4).finished());
}

TEST(AlignAndIntegrate, AlreadyAlignedCurvesAreUnchanged) {
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  Eigen::MatrixXd samples(3, 150);
  for (int i = 0; i < 3; ++i) samples.row(i) = gaussian_bump(g, 45.0, 10.0, 1.0 + i).transpose();
  const auto reg = align_and_integrate(samples, basis);
  for (int s : reg.shifts) EXPECT_EQ(s, 0);
  EXPECT_EQ(reg.target_peak_day, 45.0);
  EXPECT_LT((reg.shifted_samples - samples).cwiseAbs().maxCoeff(), 1e-15);
  // Re-smoothing a smooth bump changes it by little.
  EXPECT_LT((reg.shifted_curves.values() - samples).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(AlignAndIntegrate, RecoversRelativeShiftOfTranslatedPair) {
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  Eigen::MatrixXd samples(2, 150);
  samples.row(0) = gaussian_bump(g, 30.0, 9.0, 2.0).transpose();
  samples.row(1) = gaussian_bump(g, 37.0, 9.0, 2.0).transpose();
  const auto reg = align_and_integrate(samples, basis);
  EXPECT_EQ(reg.shifts[1] - reg.shifts[0], 7);
  EXPECT_EQ(reg.target_peak_day, 30.0);
}

TEST(AlignAndIntegrate, TargetsEarliestPeak) {
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  const double peaks[] = {35, 20, 48, 27, 20, 61};
  Eigen::MatrixXd samples(6, 150);
  for (int i = 0; i < 6; ++i) samples.row(i) = gaussian_bump(g, peaks[i], 8.0, 1.0 + 0.1 * i).transpose();
  const auto reg = align_and_integrate(samples, basis);
  EXPECT_EQ(reg.target_peak_day, 20.0);
  EXPECT_EQ(reg.shifts, (std::vector<int>{15, 0, 28, 7, 0, 41}));
  // Peak alignment after re-smoothing: within one grid step of the target.
  const auto aligned = reg.shifted_curves.values();
  for (int i = 0; i < 6; ++i) {
    const auto p = find_peak(to_vector(aligned.row(i).transpose()), g);
    EXPECT_LE(std::abs(p.day - reg.target_peak_day), 1.0) << "curve " << i;
  }
}

TEST(AlignAndIntegrate, SecondWaveLikeTarget) {
  // A collection whose earliest landmark is day 33.
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  Eigen::MatrixXd samples(4, 150);
  const double peaks[] = {52, 33, 40, 70};
  for (int i = 0; i < 4; ++i) samples.row(i) = gaussian_bump(g, peaks[i], 12.0, 1.0).transpose();
  EXPECT_EQ(align_and_integrate(samples, basis).target_peak_day, 33.0);
}

TEST(AlignAndIntegrate, MedianShiftOfConstructedCollection) {
  // Peaks at target + offsets whose median is 12.
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  const int offsets[] = {0, 3, 8, 12, 12, 15, 30};
  Eigen::MatrixXd samples(7, 150);
  for (int i = 0; i < 7; ++i) samples.row(i) = gaussian_bump(g, 20.0 + offsets[i], 8.0, 1.0).transpose();
  auto shifts = align_and_integrate(samples, basis).shifts;
  std::nth_element(shifts.begin(), shifts.begin() + 3, shifts.end());
  EXPECT_EQ(shifts[3], 12);
}

TEST(AlignAndIntegrate, ExactShiftRecoveryOnRandomPairs) {
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const int base = rng.between(15, 50);
    const int delta = rng.between(0, 40);
    const double width = 5.0 + 10.0 * rng.uniform();
    Eigen::MatrixXd samples(2, 150);
    samples.row(0) = gaussian_bump(g, base, width, 1.0).transpose();
    samples.row(1) = gaussian_bump(g, base + delta, width, 1.0).transpose();
    const auto reg = align_and_integrate(samples, basis);
    EXPECT_EQ(reg.shifts[1] - reg.shifts[0], delta) << "trial " << trial;
  }
}

TEST(AlignAndIntegrate, FlatCurveIsFlaggedWithWarning) {
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  Eigen::MatrixXd samples(3, 150);
  samples.row(0) = gaussian_bump(g, 30.0, 9.0, 2.0).transpose();
  samples.row(1).setConstant(0.7);
  samples.row(2) = gaussian_bump(g, 50.0, 9.0, 2.0).transpose();
  log::Capture capture;
  const auto reg = align_and_integrate(samples, basis);
  EXPECT_TRUE(reg.flagged[1]);
  EXPECT_FALSE(reg.flagged[0]);
  EXPECT_EQ(reg.shifts[1], 0);
  EXPECT_EQ(reg.shifts[2], 20);
  EXPECT_EQ(capture.warnings().size(), 1u);
}

TEST(AlignAndIntegrate, FixedTargetDay) {
  const auto basis = daily_basis();
  const Grid& g = basis->grid();
  Eigen::MatrixXd samples(2, 150);
  samples.row(0) = gaussian_bump(g, 30.0, 9.0, 2.0).transpose();
  samples.row(1) = gaussian_bump(g, 40.0, 9.0, 2.0).transpose();
  RegistrationOptions options;
  options.target_peak_day = 25.0;
  const auto reg = align_and_integrate(samples, basis, options);
  EXPECT_EQ(reg.shifts, (std::vector<int>{5, 15}));
  options.target_peak_day = 500.0;
  EXPECT_THROW(align_and_integrate(samples, basis, options), InputError);
}

TEST(ApplyShifts, ZeroShiftsAreIdentity) {
  KeyedSeries s{{"a", "b"}, Eigen::MatrixXd::Random(2, 150)};
  const auto out = apply_shifts(s, {{"a", 0}, {"b", 0}});
  EXPECT_EQ(out.units, s.units);
  EXPECT_EQ(out.values, s.values);
}

TEST(ApplyShifts, RampShiftedByFive) {
  Eigen::MatrixXd ramp(1, 150);
  for (int t = 0; t < 150; ++t) ramp(0, t) = 2.0 * t + 1.0;
  const auto out = apply_shifts({{"u"}, ramp}, {{"u", 5}});
  for (int t = 0; t <= 144; ++t) EXPECT_EQ(out.values(0, t), ramp(0, t + 5));
  EXPECT_EQ(out.values(0, 149), ramp(0, 149));
}

TEST(ApplyShifts, MissingKeyListsUnits) {
  KeyedSeries s{{"a", "b", "c"}, Eigen::MatrixXd::Zero(3, 10)};
  try {
    apply_shifts(s, {{"a", 1}});
    FAIL() << "expected KeyedJoinError";
  } catch (const KeyedJoinError& e) {
    EXPECT_EQ(e.missing(), (std::vector<std::string>{"b", "c"}));
  }
}

}  // namespace
}  // namespace wavecurve
