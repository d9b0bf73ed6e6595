#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wavecurve/epi_features.hpp"
#include "wavecurve/registration.hpp"

namespace wavecurve {

/// Input files. Relative paths are resolved against the config file's
/// directory. The comparison files are optional.
struct InputPaths {
  std::filesystem::path deaths;
  std::filesystem::path baseline;
  std::filesystem::path population;
  std::filesystem::path mobility;
  std::filesystem::path covariates;
  std::optional<std::filesystem::path> regions;         // unit,region
  std::optional<std::filesystem::path> dpc_deaths;      // region,date,deaths
  std::optional<std::filesystem::path> cases_province;  // unit,date,cases
  std::optional<std::filesystem::path> cases_region;    // region,date,cases
};

struct WaveSettings {
  WaveConfig wave;
  std::optional<double> target_peak_day;
};

struct SmoothingSettings {
  int n_breaks = 21;
  int degree = 3;
  double lambda_min = 1e-6;
  double lambda_max = 1e6;
  int lambda_count = 41;
  std::vector<double> lambda_grid() const;
};

struct ClusteringSettings {
  int k_max = 10;
  double threshold = 10.0;
};

struct FeatureSettings {
  /// Areas from the registered curves instead of the calendar-anchored ones.
  bool areas_from_registered = false;
  double per_population = 1e5;
};

struct EnetSettings {
  int grid_size = 100;
  double min_ratio = 1e-3;
  double l2_ratio = 0.6;
  int refine_iterations = 20;
  int cv_folds = 5;
};

struct StabilitySettings {
  int replications = 500;
  int n_min = 0;  // 0: default range for the unit count
  int n_max = 0;
  bool functional = true;  // also run the fgen stability summary
};

struct ConcurrentSettings {
  int lag_min = 15;
  int lag_max = 24;
  std::vector<int> lags() const;
};

struct RunConfig {
  std::filesystem::path base_dir;  // relative input paths resolve against this
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  InputPaths inputs;
  std::vector<WaveSettings> waves;
  SmoothingSettings smoothing;
  FillMode fill = FillMode::constant;
  ClusteringSettings clustering;
  FeatureSettings features;
  EnetSettings enet;
  StabilitySettings stability;
  ConcurrentSettings concurrent;

  /// Parses and validates JSON text. Relative paths are taken relative to
  /// base_dir. Throws ValidationError naming the offending key.
  static RunConfig parse(const std::string& json_text, const std::filesystem::path& base_dir,
                         const std::string& label = "config");
  static RunConfig load(const std::filesystem::path& path);

  /// Compact JSON of the effective settings with sorted keys, used for the
  /// manifest hash. Input paths are written relative to base_dir and the
  /// output directory is left out, so the hash identifies the analysis rather
  /// than where it was written.
  std::string canonical_json() const;
};

}  // namespace wavecurve
