#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace wavecurve {

/// Sampled curves keyed by unit: row i of `values` belongs to units[i].
struct KeyedSeries {
  std::vector<std::string> units;
  Eigen::MatrixXd values;
};

/// One scalar per unit, in a meaningful (input) order.
using KeyedValues = std::vector<std::pair<std::string, double>>;

}  // namespace wavecurve
