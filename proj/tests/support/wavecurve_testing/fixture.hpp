#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace wavecurve::testing {

struct FixtureOptions {
  int units_per_family = 10;
  std::uint64_t seed = 1;
  int replications = 20;  // stability runs written into the config
  bool functional_stability = true;
  bool comparison = true;  // write the region-level comparison files
};

/// What the generator put into the data.
struct FixtureTruth {
  std::vector<std::string> units;
  std::map<std::string, std::vector<int>> family;  // wave id -> family per unit (0 mildest)
  std::filesystem::path config;
};

/// Writes a complete two-wave input set (deaths, baseline, population,
/// mobility, covariates and optional comparison files) plus config.json into
/// `dir`. Each wave has three mortality families of increasing severity.
FixtureTruth write_fixture(const std::filesystem::path& dir, const FixtureOptions& options = {});

}  // namespace wavecurve::testing
