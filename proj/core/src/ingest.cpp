#include "wavecurve/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "wavecurve/csv.hpp"
#include "wavecurve/epi_features.hpp"
#include "wavecurve/error.hpp"
#include "wavecurve/log.hpp"
#include "wavecurve/smoothing.hpp"

namespace wavecurve {

std::size_t InputBundle::index_of(const std::string& unit) const {
  const auto it = std::lower_bound(units.begin(), units.end(), unit);
  if (it == units.end() || *it != unit) throw KeyedJoinError("input bundle", {unit});
  return static_cast<std::size_t>(it - units.begin());
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Date date_cell(const CsvTable& t, std::size_t row, std::size_t col) {
  try {
    return parse_date(t.cell(row, col));
  } catch (const InputError&) {
    throw ValidationError(t.file(), t.line(row), t.header()[col], "not a YYYY-MM-DD date: '" + t.cell(row, col) + "'");
  }
}

void require_known(const CsvTable& t, std::size_t row, std::size_t col, const std::set<std::string>& known) {
  if (!known.contains(t.cell(row, col))) {
    throw ValidationError(t.file(), t.line(row), t.header()[col], "unknown unit '" + t.cell(row, col) + "'");
  }
}

void require_nonnegative(const CsvTable& t, std::size_t row, std::size_t col, double v) {
  if (v < 0.0) throw ValidationError(t.file(), t.line(row), t.header()[col], "negative value");
}

// key -> date -> value from a (key, date, value) file.
std::map<std::string, std::map<Date, double>> read_dated(const std::filesystem::path& path,
                                                         const std::vector<std::string>& header,
                                                         const std::set<std::string>* known, bool nonnegative) {
  const CsvTable t = read_csv(path);
  t.require_header(header);
  std::map<std::string, std::map<Date, double>> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (known != nullptr) require_known(t, r, 0, *known);
    const Date d = date_cell(t, r, 1);
    const auto v = t.number(r, 2);
    if (v && nonnegative) require_nonnegative(t, r, 2, *v);
    if (!out[t.cell(r, 0)].emplace(d, v.value_or(kNaN)).second) {
      throw ValidationError(t.file(), t.line(r), "", "duplicate (" + header[0] + ", date) row");
    }
  }
  return out;
}

// Values on the wave's days; NaN where absent.
Eigen::VectorXd window_of(const std::map<Date, double>& series, Date start) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(kWaveDays, kNaN);
  for (int t = 0; t < kWaveDays; ++t) {
    const auto it = series.find(start + std::chrono::days(t));
    if (it != series.end()) v[t] = it->second;
  }
  return v;
}

void fill_gaps(Eigen::Ref<Eigen::VectorXd> row, const std::string& file, const std::string& what) {
  if (std::none_of(row.begin(), row.end(), [](double x) { return std::isfinite(x); })) {
    throw ValidationError(file, 0, "", what + ": no data inside the wave");
  }
  std::vector<double> tmp(row.begin(), row.end());
  interpolate_missing(tmp, what);
  row = Eigen::Map<Eigen::VectorXd>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
}

}  // namespace

InputBundle ingest(const RunConfig& config) {
  InputBundle b;

  // Population defines the unit registry.
  {
    const CsvTable t = read_csv(config.inputs.population);
    t.require_header({"unit", "population"});
    std::map<std::string, double> pop;
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (t.cell(r, 0).empty()) throw ValidationError(t.file(), t.line(r), "unit", "empty unit key");
      const double v = t.required_number(r, 1);
      if (!(v > 0.0)) throw ValidationError(t.file(), t.line(r), "population", "population must be positive");
      if (!pop.emplace(t.cell(r, 0), v).second) {
        throw ValidationError(t.file(), t.line(r), "unit", "duplicate unit '" + t.cell(r, 0) + "'");
      }
    }
    if (pop.size() < 3) throw ValidationError(t.file(), 0, "", "need at least three units");
    b.population.resize(static_cast<Eigen::Index>(pop.size()));
    for (const auto& [unit, value] : pop) {
      b.population[static_cast<Eigen::Index>(b.units.size())] = value;
      b.units.push_back(unit);
    }
  }
  const std::set<std::string> known(b.units.begin(), b.units.end());
  const auto n = static_cast<Eigen::Index>(b.units.size());

  // Covariates: exactly one row per unit, missing cells mean-imputed.
  {
    const CsvTable t = read_csv(config.inputs.covariates);
    std::vector<std::string> header{"unit"};
    header.insert(header.end(), kCovariateNames.begin(), kCovariateNames.end());
    t.require_header(header);
    b.covariates = Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(kCovariateNames.size()), kNaN);
    std::vector<bool> seen(b.units.size(), false);
    for (std::size_t r = 0; r < t.size(); ++r) {
      require_known(t, r, 0, known);
      const std::size_t i = b.index_of(t.cell(r, 0));
      if (seen[i]) throw ValidationError(t.file(), t.line(r), "unit", "duplicate unit '" + t.cell(r, 0) + "'");
      seen[i] = true;
      for (std::size_t c = 1; c < header.size(); ++c) {
        if (const auto v = t.number(r, c)) b.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c - 1)) = *v;
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) throw ValidationError(t.file(), 0, "unit", "no covariate row for unit '" + b.units[i] + "'");
    }
    for (Eigen::Index c = 0; c < b.covariates.cols(); ++c) {
      double sum = 0.0;
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isfinite(b.covariates(i, c))) {
          sum += b.covariates(i, c);
          ++count;
        }
      }
      const std::string& name = kCovariateNames[static_cast<std::size_t>(c)];
      if (count == 0) throw ValidationError(t.file(), 0, name, "column has no values");
      const double mean = sum / count;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(b.covariates(i, c))) {
          b.covariates(i, c) = mean;
          log::warn("covariates: missing " + name + " for unit '" + b.units[static_cast<std::size_t>(i)] +
                    "' imputed with the column mean " + format_number(mean));
        }
      }
    }
  }

  b.daily_deaths = read_dated(config.inputs.deaths, {"unit", "date", "deaths"}, &known, true);

  // Baseline by day of year.
  std::map<std::string, std::map<int, double>> baseline;
  {
    const CsvTable t = read_csv(config.inputs.baseline);
    t.require_header({"unit", "day_of_year", "mean_deaths_2015_2019"});
    for (std::size_t r = 0; r < t.size(); ++r) {
      require_known(t, r, 0, known);
      const double doy = t.required_number(r, 1);
      if (doy != std::floor(doy) || doy < 1 || doy > 366) {
        throw ValidationError(t.file(), t.line(r), "day_of_year", "expected an integer in 1..366");
      }
      const auto v = t.number(r, 2);
      if (v) require_nonnegative(t, r, 2, *v);
      if (!baseline[t.cell(r, 0)].emplace(static_cast<int>(doy), v.value_or(kNaN)).second) {
        throw ValidationError(t.file(), t.line(r), "", "duplicate (unit, day_of_year) row");
      }
    }
  }

  // Mobility by category.
  std::map<std::string, std::map<std::string, std::map<Date, double>>> mobility;
  {
    const CsvTable t = read_csv(config.inputs.mobility);
    t.require_header({"unit", "date", "category", "pct_change"});
    for (std::size_t r = 0; r < t.size(); ++r) {
      require_known(t, r, 0, known);
      const Date d = date_cell(t, r, 1);
      const std::string& cat = t.cell(r, 2);
      if (std::find(kMobilityCategories.begin(), kMobilityCategories.end(), cat) == kMobilityCategories.end()) {
        throw ValidationError(t.file(), t.line(r), "category", "unknown category '" + cat + "'");
      }
      const auto v = t.number(r, 3);
      if (!mobility[cat][t.cell(r, 0)].emplace(d, v.value_or(kNaN)).second) {
        throw ValidationError(t.file(), t.line(r), "", "duplicate (unit, date, category) row");
      }
    }
  }

  for (const auto& ws : config.waves) {
    const WaveConfig& w = ws.wave;
    WaveData data;
    data.wave_id = w.id;
    data.deaths.resize(n, kWaveDays);
    data.baseline.resize(n, kWaveDays);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string& unit = b.units[static_cast<std::size_t>(i)];
      const std::string ctx = w.id + " unit '" + unit + "'";
      const auto it = b.daily_deaths.find(unit);
      data.deaths.row(i) = it == b.daily_deaths.end() ? Eigen::VectorXd::Constant(kWaveDays, kNaN)
                                                      : window_of(it->second, w.start);
      Eigen::VectorXd drow = data.deaths.row(i).transpose();
      fill_gaps(drow, config.inputs.deaths.filename().string(), "deaths " + ctx);
      data.deaths.row(i) = drow.transpose();

      Eigen::VectorXd brow = Eigen::VectorXd::Constant(kWaveDays, kNaN);
      if (const auto bt = baseline.find(unit); bt != baseline.end()) {
        for (int t = 0; t < kWaveDays; ++t) {
          const auto v = bt->second.find(day_of_year(w.start + std::chrono::days(t)));
          if (v != bt->second.end()) brow[t] = v->second;
        }
      }
      fill_gaps(brow, config.inputs.baseline.filename().string(), "baseline " + ctx);
      data.baseline.row(i) = brow.transpose();
    }
    for (const auto& cat : kMobilityCategories) {
      Eigen::MatrixXd m(n, kWaveDays);
      for (Eigen::Index i = 0; i < n; ++i) {
        const std::string& unit = b.units[static_cast<std::size_t>(i)];
        Eigen::VectorXd row = Eigen::VectorXd::Constant(kWaveDays, kNaN);
        if (const auto ct = mobility.find(cat); ct != mobility.end()) {
          if (const auto ut = ct->second.find(unit); ut != ct->second.end()) row = window_of(ut->second, w.start);
        }
        fill_gaps(row, config.inputs.mobility.filename().string(), "mobility " + cat + " " + w.id + " unit '" + unit + "'");
        m.row(i) = row.transpose();
      }
      data.mobility.emplace(cat, std::move(m));
    }
    b.waves.emplace(w.id, std::move(data));
  }

  // Optional comparison inputs: all four files or the subset each ratio needs.
  const auto& in = config.inputs;
  if (in.regions || in.dpc_deaths || in.cases_province || in.cases_region) {
    ComparisonData cmp;
    if (in.regions) {
      const CsvTable t = read_csv(*in.regions);
      t.require_header({"unit", "region"});
      for (std::size_t r = 0; r < t.size(); ++r) {
        require_known(t, r, 0, known);
        if (t.cell(r, 1).empty()) throw ValidationError(t.file(), t.line(r), "region", "empty region");
        if (!cmp.region_of.emplace(t.cell(r, 0), t.cell(r, 1)).second) {
          throw ValidationError(t.file(), t.line(r), "unit", "duplicate unit '" + t.cell(r, 0) + "'");
        }
      }
    }
    if (in.dpc_deaths) cmp.dpc_deaths = read_dated(*in.dpc_deaths, {"region", "date", "deaths"}, nullptr, true);
    if (in.cases_province) {
      cmp.cases_province = read_dated(*in.cases_province, {"unit", "date", "cases"}, &known, true);
    }
    if (in.cases_region) cmp.cases_region = read_dated(*in.cases_region, {"region", "date", "cases"}, nullptr, true);
    b.comparison = std::move(cmp);
  }
  return b;
}

}  // namespace wavecurve
