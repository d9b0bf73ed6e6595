#include "wavecurve/epi_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wavecurve/error.hpp"
#include "wavecurve/quadrature.hpp"

namespace wavecurve {

void WaveConfig::validate() const {
  if (days_between(start, end) != kWaveDays - 1) {
    throw InputError("wave '" + id + "' must span exactly " + std::to_string(kWaveDays) + " days (" +
                     format_date(start) + " .. " + format_date(end) + ")");
  }
  if (!(restriction > start && restriction < end)) {
    throw InputError("wave '" + id + "': restriction date " + format_date(restriction) +
                     " is not strictly inside the wave");
  }
  if (!(window.lo <= window.hi)) throw InputError("wave '" + id + "': empty peak window");
}

Eigen::VectorXd differential_mortality(std::span<const double> deaths,
                                       std::span<const double> baseline, double population,
                                       double per) {
  if (deaths.size() != baseline.size()) throw ShapeError("deaths and baseline lengths differ");
  if (!(population > 0.0)) throw InputError("population must be positive");
  Eigen::VectorXd out(static_cast<Eigen::Index>(deaths.size()));
  for (std::size_t t = 0; t < deaths.size(); ++t) {
    if (deaths[t] < 0.0 || baseline[t] < 0.0) throw InputError("negative death count");
    out[static_cast<Eigen::Index>(t)] = (deaths[t] - baseline[t]) / population * per;
  }
  return out;
}

AreaFeatures area_split(std::span<const double> values, const Grid& grid, double restriction_time) {
  if (values.size() != grid.size()) throw ShapeError("area_split: series length != grid size");
  const auto pts = grid.points();
  const double r = std::clamp(restriction_time, 0.0, grid.length());

  AreaFeatures out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    const double fa = values[i];
    const double fb = values[i + 1];
    if (b <= r) {
      out.a_bef += 0.5 * (b - a) * (fa + fb);
    } else if (a >= r) {
      out.a_aft += 0.5 * (b - a) * (fa + fb);
    } else {
      const double fr = fa + (fb - fa) * (r - a) / (b - a);
      out.a_bef += 0.5 * (r - a) * (fa + fr);
      out.a_aft += 0.5 * (b - r) * (fr + fb);
    }
  }
  out.positive = out.a_bef > 0.0 && out.a_aft > 0.0;
  if (out.positive) {
    out.log_a_bef = std::log(out.a_bef);
    out.log_a_aft = std::log(out.a_aft);
  }
  return out;
}

AreaFeatures area_split(const Curve& curve, const WaveConfig& config) {
  const Eigen::VectorXd v = curve.values();
  return area_split(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())),
                    curve.grid(), config.restriction_day());
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::vector<RankRecord> peak_rank_diff(const KeyedValues& first, const KeyedValues& second) {
  std::map<std::string, double> second_by_unit(second.begin(), second.end());
  std::map<std::string, double> first_by_unit(first.begin(), first.end());
  std::vector<std::string> missing;
  for (const auto& [u, v] : first) {
    if (!second_by_unit.contains(u)) missing.push_back(u);
  }
  for (const auto& [u, v] : second) {
    if (!first_by_unit.contains(u)) missing.push_back(u);
  }
  if (!missing.empty()) throw KeyedJoinError("peak_rank_diff", std::move(missing));

  std::vector<double> p1;
  std::vector<double> p2;
  for (const auto& [u, v] : first) {
    p1.push_back(v);
    p2.push_back(second_by_unit.at(u));
  }
  const auto r1 = average_ranks(p1);
  const auto r2 = average_ranks(p2);
  std::vector<RankRecord> out;
  out.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    out.push_back({first[i].first, p1[i], p2[i], r1[i], r2[i], r2[i] - r1[i]});
  }
  return out;
}

std::vector<LagRecord> compute_lags(const std::vector<std::string>& units,
                                    const std::vector<Peak>& peaks, const WaveConfig& config) {
  if (units.size() != peaks.size()) throw ShapeError("compute_lags: units and peaks differ in length");
  std::vector<LagRecord> out;
  out.reserve(units.size());
  const int r = config.restriction_day();
  for (std::size_t i = 0; i < units.size(); ++i) {
    const int day = static_cast<int>(std::lround(peaks[i].day));
    out.push_back({units[i], day, day - r, peaks[i].value});
  }
  return out;
}

std::vector<int> group_dummy(std::span<const int> severity_ranks, int k) {
  std::vector<int> d(severity_ranks.size());
  for (std::size_t i = 0; i < severity_ranks.size(); ++i) {
    const int s = severity_ranks[i];
    if (s < 0 || s >= k) {
      throw InputError("group_dummy: unknown cluster severity rank " + std::to_string(s));
    }
    d[i] = s > 0 ? 1 : 0;
  }
  return d;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("ols_slope needs >= 2 paired values");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InputError("ols_slope: x has zero variance");
  return sxy / sxx;
}

std::vector<RatioEntry> source_ratio_report(const std::map<std::string, double>& numerator,
                                            const std::map<std::string, double>& denominator,
                                            const std::string& wave) {
  std::vector<std::string> missing;
  for (const auto& [k, v] : numerator) {
    if (!denominator.contains(k)) missing.push_back(k);
  }
  for (const auto& [k, v] : denominator) {
    if (!numerator.contains(k)) missing.push_back(k);
  }
  if (!missing.empty()) throw KeyedJoinError("source_ratio_report", std::move(missing));

  std::vector<RatioEntry> out;
  for (const auto& [k, a] : numerator) {
    const double b = denominator.at(k);
    RatioEntry e{k, wave, a, b, std::nullopt};
    if (b != 0.0) e.ratio = a / b;
    out.push_back(std::move(e));
  }
  return out;
}

std::map<std::string, double> aggregate_by_group(const std::map<std::string, double>& totals,
                                                 const std::map<std::string, std::string>& group_of) {
  std::vector<std::string> missing;
  std::map<std::string, double> out;
  for (const auto& [unit, v] : totals) {
    auto it = group_of.find(unit);
    if (it == group_of.end()) {
      missing.push_back(unit);
      continue;
    }
    out[it->second] += v;
  }
  if (!missing.empty()) throw KeyedJoinError("aggregate_by_group", std::move(missing));
  return out;
}

}  // namespace wavecurve
