#include "wavecurve_testing/fixture.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <span>

#include <Eigen/Core>

#include "wavecurve/csv.hpp"
#include "wavecurve/dates.hpp"
#include "wavecurve/error.hpp"
#include "wavecurve/rng.hpp"

namespace wavecurve::testing {
namespace {

struct WaveSpec {
  const char* id;
  const char* start;
  const char* restriction;
  int peak_lo;  // day range of the mortality peaks
  int peak_hi;
  double mobility_depth;
};

constexpr WaveSpec kWaves[2] = {
    {"W1", "2020-02-25", "2020-03-09", 24, 44, 55.0},
    {"W2", "2020-10-01", "2020-11-04", 44, 62, 35.0},
};
constexpr double kFamilyAmplitude[3] = {2.0, 6.0, 14.0};  // per 100,000 per day
constexpr double kFamilyWidth[3] = {11.0, 10.0, 9.0};
constexpr double kBackground = 0.5;
constexpr double kBaselineRate = 3e-5;  // daily deaths per inhabitant

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw InputError("cannot write " + path.string());
}

std::string integer(double v) { return std::to_string(static_cast<long long>(std::llround(v))); }

}  // namespace

FixtureTruth write_fixture(const std::filesystem::path& dir, const FixtureOptions& options) {
  std::filesystem::create_directories(dir);
  Rng rng(derive_seed(options.seed, "fixture"));
  const int n = 3 * options.units_per_family;

  FixtureTruth truth;
  for (int i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "P%03d", i + 1);
    truth.units.emplace_back(name);
  }

  std::vector<double> population(n);
  for (auto& p : population) p = std::round(3e5 + 9e5 * rng.uniform());

  // Families per wave: a shuffled balanced assignment, so units change
  // severity between waves.
  for (const auto& w : kWaves) {
    std::vector<int> fam(n);
    for (int i = 0; i < n; ++i) fam[i] = i % 3;
    rng.shuffle(std::span<int>(fam));
    truth.family[w.id] = fam;
  }

  // Excess deaths per 100,000 by unit and calendar date.
  const Date first = parse_date("2020-02-01");
  const Date last = parse_date("2021-03-31");
  const int n_days = days_between(first, last) + 1;
  Eigen::MatrixXd excess = Eigen::MatrixXd::Constant(n, n_days, kBackground);
  Eigen::MatrixXd grocery = Eigen::MatrixXd::Constant(n, n_days, 0.0);
  Eigen::MatrixXd workplace = Eigen::MatrixXd::Constant(n, n_days, 0.0);
  for (const auto& w : kWaves) {
    const int offset = days_between(first, parse_date(w.start));
    const int restriction = days_between(parse_date(w.start), parse_date(w.restriction));
    const auto& fam = truth.family[w.id];
    for (int i = 0; i < n; ++i) {
      const double peak = rng.between(w.peak_lo, w.peak_hi);
      const double depth = w.mobility_depth * (0.7 + 0.6 * rng.uniform());
      for (int t = -20; t < 170; ++t) {
        const int day = offset + t;
        if (day < 0 || day >= n_days) continue;
        const double z = (t - peak) / kFamilyWidth[fam[i]];
        excess(i, day) += kFamilyAmplitude[fam[i]] * std::exp(-0.5 * z * z);
        const double ramp = 1.0 / (1.0 + std::exp(-(t - restriction) / 2.0));
        const double recovery = std::exp(-std::max(0.0, t - restriction - 40.0) / 60.0);
        grocery(i, day) += -depth * ramp * recovery * 0.6;
        workplace(i, day) += -depth * ramp * recovery;
      }
    }
  }

  CsvWriter deaths({"unit", "date", "deaths"});
  CsvWriter mobility({"unit", "date", "category", "pct_change"});
  CsvWriter cases_province({"unit", "date", "cases"});
  std::map<std::pair<std::string, int>, double> region_deaths;
  std::map<std::pair<std::string, int>, double> region_cases;
  const auto region_of = [&](int i) { return "R" + std::to_string(i * 3 / n + 1); };
  for (int i = 0; i < n; ++i) {
    const double base = kBaselineRate * population[i];
    for (int day = 0; day < n_days; ++day) {
      const std::string date = format_date(first + std::chrono::days(day));
      const double extra = excess(i, day) * population[i] / 1e5;
      const double mean = base + extra;
      const double count = std::max(0.0, std::round(mean + std::sqrt(mean) * rng.normal()));
      deaths.row({truth.units[i], date, integer(count)});
      mobility.row({truth.units[i], date, "grocery_pharmacy", format_number(grocery(i, day) + 3.0 * rng.normal())});
      mobility.row({truth.units[i], date, "workplace", format_number(workplace(i, day) + 3.0 * rng.normal())});
      const double cases = std::round(10.0 * extra);
      cases_province.row({truth.units[i], date, integer(cases)});
      region_deaths[{region_of(i), day}] += 0.6 * extra;
      region_cases[{region_of(i), day}] += cases / 2.0;
    }
  }

  CsvWriter baseline({"unit", "day_of_year", "mean_deaths_2015_2019"});
  CsvWriter pop({"unit", "population"});
  CsvWriter covariates({"unit", "over65_pct", "adults_per_family_doctor", "beds_per_hospital",
                        "students_per_classroom", "employees_per_firm", "pm10"});
  CsvWriter regions({"unit", "region"});
  for (int i = 0; i < n; ++i) {
    const double base = kBaselineRate * population[i];
    for (int doy = 1; doy <= 366; ++doy) baseline.row({truth.units[i], std::to_string(doy), format_number(base)});
    pop.row({truth.units[i], integer(population[i])});
    // A shared latent factor makes the covariates correlated.
    const double z = rng.normal();
    covariates.row({truth.units[i], format_number(23.0 + 1.5 * z + rng.normal()),
                    format_number(1300.0 + 80.0 * z + 100.0 * rng.normal()),
                    format_number(400.0 - 60.0 * z + 60.0 * rng.normal()),
                    format_number(20.0 + 1.0 * z + 1.0 * rng.normal()),
                    format_number(4.0 + 0.5 * z + 0.5 * rng.normal()),
                    format_number(28.0 + 3.0 * z + 3.0 * rng.normal())});
    regions.row({truth.units[i], region_of(i)});
  }

  CsvWriter dpc({"region", "date", "deaths"});
  for (const auto& [key, v] : region_deaths) {
    dpc.row({key.first, format_date(first + std::chrono::days(key.second)), integer(v)});
  }
  CsvWriter cases_region({"region", "date", "cases"});
  for (const auto& [key, v] : region_cases) {
    cases_region.row({key.first, format_date(first + std::chrono::days(key.second)), integer(v)});
  }

  write_file(dir / "deaths.csv", deaths.str());
  write_file(dir / "baseline.csv", baseline.str());
  write_file(dir / "population.csv", pop.str());
  write_file(dir / "mobility.csv", mobility.str());
  write_file(dir / "covariates.csv", covariates.str());
  if (options.comparison) {
    write_file(dir / "regions.csv", regions.str());
    write_file(dir / "dpc_deaths.csv", dpc.str());
    write_file(dir / "cases_province.csv", cases_province.str());
    write_file(dir / "cases_region.csv", cases_region.str());
  }

  std::string config = "{\n  \"seed\": " + std::to_string(options.seed) + ",\n  \"output_dir\": \"output\",\n";
  config += "  \"inputs\": {\"deaths\": \"deaths.csv\", \"baseline\": \"baseline.csv\", "
            "\"population\": \"population.csv\", \"mobility\": \"mobility.csv\", \"covariates\": \"covariates.csv\"";
  if (options.comparison) {
    config += ", \"regions\": \"regions.csv\", \"dpc_deaths\": \"dpc_deaths.csv\", "
              "\"cases_province\": \"cases_province.csv\", \"cases_region\": \"cases_region.csv\"";
  }
  config += "},\n  \"waves\": [\n";
  for (int w = 0; w < 2; ++w) {
    const Date start = parse_date(kWaves[w].start);
    config += std::string("    {\"id\": \"") + kWaves[w].id + "\", \"start\": \"" + kWaves[w].start +
              "\", \"end\": \"" + format_date(start + std::chrono::days(149)) + "\", \"restriction\": \"" +
              kWaves[w].restriction + "\", \"window\": [10, 100]}" + (w == 0 ? ",\n" : "\n");
  }
  config += "  ],\n  \"stability\": {\"replications\": " + std::to_string(options.replications) +
            ", \"functional\": " + (options.functional_stability ? "true" : "false") + "}\n}\n";
  truth.config = dir / "config.json";
  write_file(truth.config, config);
  return truth;
}

}  // namespace wavecurve::testing
