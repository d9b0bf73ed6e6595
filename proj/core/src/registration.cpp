#include "wavecurve/registration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavecurve/error.hpp"
#include "wavecurve/log.hpp"

namespace wavecurve {

Peak find_peak(std::span<const double> values, const Grid& grid, PeakWindow window) {
  if (values.size() != grid.size()) throw ShapeError("find_peak: series length != grid size");
  if (!(window.lo <= window.hi)) throw InputError("find_peak: empty window");

  const auto pts = grid.points();
  std::size_t first = grid.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i] >= window.lo && pts[i] <= window.hi) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == grid.size()) throw InputError("find_peak: no grid point inside the window");

  Peak peak;
  peak.index = first;
  double lowest = values[first];
  for (std::size_t i = first; i <= last; ++i) {
    if (values[i] > values[peak.index]) peak.index = i;
    lowest = std::min(lowest, values[i]);
  }
  peak.day = pts[peak.index];
  peak.value = values[peak.index];

  const double scale = std::max(1.0, std::abs(peak.value));
  const bool constant = peak.value - lowest <= 1e-12 * scale;
  const bool left_ok = peak.index == 0 || values[peak.index - 1] < peak.value;
  const bool right_ok = peak.index + 1 == values.size() || values[peak.index + 1] < peak.value;
  peak.flat = constant || !left_ok || !right_ok;
  return peak;
}

Peak find_peak(const Curve& curve, PeakWindow window) {
  const Eigen::VectorXd v = curve.values();
  return find_peak(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())),
                   curve.grid(), window);
}

Eigen::VectorXd shift_series(std::span<const double> values, int shift, FillMode fill) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const std::ptrdiff_t src = t + shift;
    if (src >= 0 && src < n) {
      out[t] = values[static_cast<std::size_t>(src)];
    } else if (fill == FillMode::zero) {
      out[t] = 0.0;
    } else {
      out[t] = values[src < 0 ? 0 : static_cast<std::size_t>(n - 1)];
    }
  }
  return out;
}

RegistrationResult align_and_integrate(const Eigen::MatrixXd& samples,
                                       std::shared_ptr<const BasisSystem> basis,
                                       const RegistrationOptions& options) {
  if (!basis) throw InputError("align_and_integrate: missing basis");
  const Grid& grid = basis->grid();
  if (samples.rows() == 0) throw InputError("align_and_integrate: empty curve collection");
  if (samples.cols() != static_cast<Eigen::Index>(grid.size())) {
    throw ShapeError("align_and_integrate: curves do not match the basis grid");
  }

  const auto n = static_cast<std::size_t>(samples.rows());
  RegistrationResult out;
  out.peak_table.resize(n);
  out.flagged.assign(n, false);
  out.shifts.assign(n, 0);

  std::vector<double> row(grid.size());
  bool have_target = false;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Map<Eigen::RowVectorXd>(row.data(), samples.cols()) = samples.row(static_cast<Eigen::Index>(i));
    out.peak_table[i] = find_peak(row, grid, options.window);
    if (out.peak_table[i].flat) {
      out.flagged[i] = true;
      log::warn("registration: curve " + std::to_string(i) +
                " has no strict peak inside the window; shift set to 0");
      continue;
    }
    if (!have_target || out.peak_table[i].index < out.target_index) {
      out.target_index = out.peak_table[i].index;
      have_target = true;
    }
  }
  if (options.target_peak_day) {
    const double day = *options.target_peak_day;
    if (!(day >= 0.0 && day <= grid.length())) throw InputError("align_and_integrate: target peak day outside the domain");
    out.target_index = grid.nearest_index(day);
  }
  out.target_peak_day = grid[out.target_index];

  out.shifted_samples.resize(samples.rows(), samples.cols());
  for (std::size_t i = 0; i < n; ++i) {
    if (have_target && !out.flagged[i]) {
      out.shifts[i] = static_cast<int>(out.peak_table[i].index) - static_cast<int>(out.target_index);
    }
    Eigen::Map<Eigen::RowVectorXd>(row.data(), samples.cols()) = samples.row(static_cast<Eigen::Index>(i));
    out.shifted_samples.row(static_cast<Eigen::Index>(i)) =
        shift_series(row, out.shifts[i], options.fill).transpose();
  }
  out.shifted_curves = smooth_collection(out.shifted_samples, basis, options.lambda_grid);
  return out;
}

RegistrationResult align_and_integrate(const std::vector<Curve>& curves,
                                       const RegistrationOptions& options) {
  if (curves.empty()) throw InputError("align_and_integrate: empty curve collection");
  const auto basis = curves.front().basis_ptr();
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(curves.size()),
                          static_cast<Eigen::Index>(basis->grid().size()));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    require_same_grid(curves[i].grid(), basis->grid(), "align_and_integrate");
    samples.row(static_cast<Eigen::Index>(i)) = curves[i].values().transpose();
  }
  return align_and_integrate(samples, basis, options);
}

KeyedSeries apply_shifts(const KeyedSeries& other, const std::map<std::string, int>& shifts,
                         FillMode fill) {
  if (static_cast<Eigen::Index>(other.units.size()) != other.values.rows()) {
    throw ShapeError("apply_shifts: unit list does not match series rows");
  }
  std::vector<std::string> missing;
  for (const auto& u : other.units) {
    if (!shifts.contains(u)) missing.push_back(u);
  }
  if (!missing.empty()) throw KeyedJoinError("apply_shifts", std::move(missing));

  KeyedSeries out{other.units, Eigen::MatrixXd(other.values.rows(), other.values.cols())};
  std::vector<double> row(static_cast<std::size_t>(other.values.cols()));
  for (Eigen::Index i = 0; i < other.values.rows(); ++i) {
    Eigen::Map<Eigen::RowVectorXd>(row.data(), other.values.cols()) = other.values.row(i);
    out.values.row(i) =
        shift_series(row, shifts.at(other.units[static_cast<std::size_t>(i)]), fill).transpose();
  }
  return out;
}

}  // namespace wavecurve
