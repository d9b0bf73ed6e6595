#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/artifacts.hpp"
#include "wavecurve/clustering.hpp"
#include "wavecurve/config.hpp"
#include "wavecurve/csv.hpp"
#include "wavecurve/elastic_net.hpp"
#include "wavecurve/epi_features.hpp"
#include "wavecurve/error.hpp"
#include "wavecurve/fgen.hpp"
#include "wavecurve/functional_regression.hpp"
#include "wavecurve/ingest.hpp"
#include "wavecurve/registration.hpp"
#include "wavecurve/scalar_models.hpp"
#include "wavecurve/smoothing.hpp"

namespace wavecurve {

/// A pipeline stage failed. The message names the scope (wave) and stage.
class StageError : public Error {
 public:
  StageError(const std::string& scope, const std::string& stage, const std::string& cause)
      : Error(scope + " / " + stage + ": " + cause), scope_(scope), stage_(stage) {}
  const std::string& scope() const noexcept { return scope_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string scope_;
  std::string stage_;
};

/// CSV tables shared by all waves (each row carries its wave id) plus the
/// artifact set they end up in.
class Report {
 public:
  /// The table named `name`, created with `header` on first use.
  CsvWriter& table(const std::string& name, const std::vector<std::string>& header);
  ArtifactSet& artifacts() noexcept { return artifacts_; }
  /// Moves the tables into the artifact set.
  ArtifactSet finish();

 private:
  std::map<std::string, CsvWriter> tables_;
  ArtifactSet artifacts_;
};

struct ScalarModelResults {
  std::vector<std::string> units;          // modeling set (positive areas)
  std::vector<std::string> feature_names;  // a_bef, then the covariates
  Eigen::MatrixXd raw_features;            // units x features (log a_bef, covariates)
  Eigen::VectorXd response;                // log a_aft
  PathFit path;
  CvResult cv;
  Eigen::VectorXd coef_min;
  Eigen::VectorXd coef_1se;
  StabilitySummary stability;
  PcaFirst pca;
  std::vector<VifEntry> vif;
  std::vector<MarginalFit> marginals;
};

struct FunctionalModelResults {
  FgenPath path;
  CvResult cv;
  Eigen::VectorXd norm_min;  // L2 norm of each coefficient curve at lambda_min
  std::optional<StabilitySummary> stability;
  std::vector<double> marginal_r2;
  std::optional<LagSweep> model_a;
  std::optional<LagSweep> model_b;
  Eigen::MatrixXd collinearity;  // rows: mobility categories; cols: categories, a_bef, pc1
};

struct WaveResult {
  std::string wave_id;
  std::vector<std::string> units;
  Eigen::MatrixXd mortality;  // differential mortality per 100,000 (configurable)
  SmoothedCollection smoothed;
  RegistrationResult registration;
  std::map<std::string, Eigen::MatrixXd> shifted_mobility;  // smoothed, then shifted
  Dendrogram dendrogram;
  HartiganSelection hartigan;
  std::vector<int> labels;
  SeverityOrder severity;
  std::vector<int> group;  // d per unit
  std::vector<AreaFeatures> areas;
  std::vector<LagRecord> lags;
  std::optional<ScalarModelResults> scalar;
  std::optional<FunctionalModelResults> functional;
};

/// Runs every per-wave stage in order and appends its rows to `report`.
/// Throws StageError naming the failed stage.
WaveResult run_wave(const InputBundle& bundle, const RunConfig& config, const std::string& wave_id, Report& report);

/// Region-level source ratio tables (deaths and cases). Absent comparison
/// inputs skip the stage with a notice in the manifest.
void compare_sources(const InputBundle& bundle, const RunConfig& config, Report& report);

struct RunResult {
  std::vector<WaveResult> waves;
  ArtifactSet artifacts;
  std::string config_hash;
  std::string manifest;
};

/// Ingest, all waves, cross-wave ranks and source comparison. Writes the
/// artifacts and manifest to config.output_dir when `write` is set.
RunResult run_pipeline(const RunConfig& config, bool write = true);

/// Ingest plus the source comparison only.
RunResult run_compare_sources(const RunConfig& config, bool write = true);

}  // namespace wavecurve
