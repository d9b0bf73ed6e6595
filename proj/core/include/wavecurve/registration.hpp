#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/bspline.hpp"
#include "wavecurve/keyed.hpp"
#include "wavecurve/smoothing.hpp"

namespace wavecurve {

/// Closed window of grid times searched for the landmark peak.
struct PeakWindow {
  double lo = 10.0;
  double hi = 100.0;
};

struct Peak {
  std::size_t index = 0;  // grid index
  double day = 0.0;       // grid time
  double value = 0.0;
  /// No strict maximum inside the window: the curve is flat there, or the
  /// window maximum has a neighbour at least as high (monotone/plateau).
  bool flat = false;
};

/// Global maximum of the sampled curve restricted to the window, ties to the
/// earlier point. Throws InputError when no grid point falls in the window.
Peak find_peak(std::span<const double> values, const Grid& grid, PeakWindow window = {});
Peak find_peak(const Curve& curve, PeakWindow window = {});

/// Value used for days added at a boundary by a shift.
enum class FillMode { constant, zero };

/// Shifts a sampled series left by `shift` grid steps (right when negative)
/// and pads the vacated end so the length is unchanged.
Eigen::VectorXd shift_series(std::span<const double> values, int shift, FillMode fill);

struct RegistrationOptions {
  PeakWindow window;
  FillMode fill = FillMode::constant;
  std::vector<double> lambda_grid = default_lambda_grid();
  /// Fixed landmark time instead of the earliest peak.
  std::optional<double> target_peak_day;
};

struct RegistrationResult {
  std::vector<int> shifts;          // grid steps each curve moved left
  std::size_t target_index = 0;     // common peak grid index
  double target_peak_day = 0.0;
  std::vector<Peak> peak_table;     // before shifting
  std::vector<bool> flagged;        // no usable peak; shift forced to 0
  Eigen::MatrixXd shifted_samples;  // domain-integrated, before re-smoothing
  SmoothedCollection shifted_curves;
};

/// Landmark registration: every curve's peak is moved onto the earliest peak
/// (ties to the earliest row), the domain is restored to its original length
/// by padding, and the shifted samples are re-smoothed with a fresh shared
/// GCV lambda. Rows of `samples` are curves sampled on basis->grid().
RegistrationResult align_and_integrate(const Eigen::MatrixXd& samples,
                                       std::shared_ptr<const BasisSystem> basis,
                                       const RegistrationOptions& options = {});
RegistrationResult align_and_integrate(const std::vector<Curve>& curves,
                                       const RegistrationOptions& options = {});

/// Shifts companion curves (e.g. mobility) by their unit's registration
/// shift. Throws KeyedJoinError listing units without a shift.
KeyedSeries apply_shifts(const KeyedSeries& other, const std::map<std::string, int>& shifts,
                         FillMode fill = FillMode::constant);

}  // namespace wavecurve
