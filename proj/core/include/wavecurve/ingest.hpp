#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/config.hpp"
#include "wavecurve/dates.hpp"

namespace wavecurve {

inline const std::vector<std::string> kMobilityCategories{"grocery_pharmacy", "workplace"};
inline const std::vector<std::string> kCovariateNames{"over65_pct",     "adults_per_family_doctor",
                                                      "beds_per_hospital", "students_per_classroom",
                                                      "employees_per_firm", "pm10"};

/// Daily series of one wave, rows in bundle unit order.
struct WaveData {
  std::string wave_id;
  Eigen::MatrixXd deaths;    // n x kWaveDays
  Eigen::MatrixXd baseline;  // n x kWaveDays, same-day 2015-2019 mean
  std::map<std::string, Eigen::MatrixXd> mobility;  // category -> n x kWaveDays
};

/// Optional region-level comparison series (daily values by key and date).
struct ComparisonData {
  std::map<std::string, std::string> region_of;  // unit -> region
  std::map<std::string, std::map<Date, double>> dpc_deaths;      // region
  std::map<std::string, std::map<Date, double>> cases_province;  // unit
  std::map<std::string, std::map<Date, double>> cases_region;    // region
  bool has_deaths() const { return !region_of.empty() && !dpc_deaths.empty(); }
  bool has_cases() const { return !region_of.empty() && !cases_province.empty() && !cases_region.empty(); }
};

struct InputBundle {
  std::vector<std::string> units;  // sorted; population.csv is the unit registry
  Eigen::VectorXd population;
  Eigen::MatrixXd covariates;      // n x 6 after imputation, kCovariateNames order
  std::map<std::string, std::map<Date, double>> daily_deaths;  // unit -> full deaths series
  std::map<std::string, WaveData> waves;
  std::optional<ComparisonData> comparison;

  std::size_t index_of(const std::string& unit) const;
};

/// Reads and validates every input file. Unknown units, duplicate keys,
/// malformed cells and waves not covered by the data raise ValidationError
/// with file, line and column. Missing covariate cells are replaced by the
/// column mean and missing daily values are interpolated, each with a
/// warning.
InputBundle ingest(const RunConfig& config);

}  // namespace wavecurve
