#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/bspline.hpp"
#include "wavecurve/dates.hpp"
#include "wavecurve/keyed.hpp"
#include "wavecurve/registration.hpp"

namespace wavecurve {

inline constexpr int kWaveDays = 150;

/// Calendar anchoring of one epidemic wave.
struct WaveConfig {
  std::string id;
  Date start{};
  Date end{};
  Date restriction{};
  PeakWindow window{};

  /// Throws InputError unless the span is exactly kWaveDays days and the
  /// restriction date lies strictly inside it.
  void validate() const;
  /// Grid time (days since start) of the restriction date.
  int restriction_day() const { return days_between(start, restriction); }
};

/// (deaths - baseline) / population, scaled per `per` inhabitants
/// (100,000 by default). Throws InputError on negative counts or population.
Eigen::VectorXd differential_mortality(std::span<const double> deaths,
                                       std::span<const double> baseline, double population,
                                       double per = 1e5);

struct AreaFeatures {
  double a_bef = 0.0;
  double a_aft = 0.0;
  std::optional<double> log_a_bef;
  std::optional<double> log_a_aft;
  bool positive = false;  // both areas > 0, logs present
};

/// Signed trapezoid areas of the sampled curve over [0, r] and [r, c]. A
/// restriction time between grid points is handled by linear interpolation,
/// so a_bef + a_aft equals the whole-domain trapezoid area.
AreaFeatures area_split(std::span<const double> values, const Grid& grid, double restriction_time);
AreaFeatures area_split(const Curve& curve, const WaveConfig& config);

/// Ascending ranks starting at 1; ties get their average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct RankRecord {
  std::string unit;
  double peak_first = 0.0;
  double peak_second = 0.0;
  double rank_first = 0.0;
  double rank_second = 0.0;
  double difference = 0.0;  // rank_second - rank_first
};

/// Peak ranks in each wave (smallest peak = rank 1) and their difference,
/// in the unit order of `first`. Throws KeyedJoinError on unit mismatch.
std::vector<RankRecord> peak_rank_diff(const KeyedValues& first, const KeyedValues& second);

struct LagRecord {
  std::string unit;
  int peak_day = 0;  // days since wave start, unshifted curve
  int lag = 0;       // peak_day - restriction day
  double peak_value = 0.0;
};

std::vector<LagRecord> compute_lags(const std::vector<std::string>& units,
                                    const std::vector<Peak>& peaks, const WaveConfig& config);

/// d = 0 for the mild cluster (severity rank 0), 1 otherwise. Throws
/// InputError for ranks outside [0, k).
std::vector<int> group_dummy(std::span<const int> severity_ranks, int k);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

struct RatioEntry {
  std::string key;
  std::string wave;
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<double> ratio;  // absent when the denominator is zero
};

/// numerator[key] / denominator[key] for every key. Zero denominators give a
/// flagged entry (no ratio). Throws KeyedJoinError when the key sets differ.
std::vector<RatioEntry> source_ratio_report(const std::map<std::string, double>& numerator,
                                            const std::map<std::string, double>& denominator,
                                            const std::string& wave);

/// Sums unit totals into their groups (e.g. provinces into regions). Throws
/// KeyedJoinError when a unit has no group.
std::map<std::string, double> aggregate_by_group(const std::map<std::string, double>& totals,
                                                 const std::map<std::string, std::string>& group_of);

}  // namespace wavecurve
