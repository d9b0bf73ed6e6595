#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavecurve/grid.hpp"

namespace wavecurve {

/// Symmetric, zero-diagonal, finite, nonnegative n x n matrix.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Eigen::MatrixXd values, std::string metric = "mean squared L2");

  Eigen::Index size() const noexcept { return values_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::string& metric() const noexcept { return metric_; }

 private:
  Eigen::MatrixXd values_;
  std::string metric_;
};

/// d(x, v) = (1/c) * integral over [0, c] of (x - v)^2, trapezoid rule.
/// This is the squared, mean-scaled distance (not a metric). Rows of
/// `samples` are curves on `grid`.
DistanceMatrix l2_distance_matrix(const Eigen::MatrixXd& samples, const Grid& grid);

/// Node ids: leaves are 0..n-1, the k-th merge creates node n + k.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  int n_leaves = 0;
  std::vector<Merge> merges;  // n - 1 merges, nondecreasing height
  std::vector<int> leaf_order;
};

/// Agglomerative clustering with complete linkage (cluster distance = largest
/// member distance). Ties merge the pair with the smallest leaf indices.
/// Throws InputError for fewer than two observations.
Dendrogram hclust_complete(const DistanceMatrix& dist);

/// Flat labels for k clusters (undoing the last k - 1 merges). Labels are
/// 0..k-1 in order of each cluster's smallest leaf index.
std::vector<int> cut_tree(const Dendrogram& dendrogram, int k);

/// Sum over clusters of squared L2 distances (integral, trapezoid) between
/// member curves and their pointwise cluster mean.
double within_cluster_ss(const Eigen::MatrixXd& samples, const Grid& grid, std::span<const int> labels);

struct HartiganSelection {
  int k = 1;
  std::vector<double> within_ss;  // W(k) for k = 1..K
  std::vector<double> index;      // H(k) for k = 1..K-1, +inf when W(k+1) = 0
};

/// H(k) = (W(k)/W(k+1) - 1)(n - k - 1); returns the smallest k with
/// H(k) <= threshold, capped at k_max. W(k) = 0 stops the search at k.
/// labels_by_k[i] holds the labels for k = i + 1.
HartiganSelection select_k_hartigan(const Eigen::MatrixXd& samples, const Grid& grid,
                                    std::span<const std::vector<int>> labels_by_k, int k_max = 10,
                                    double threshold = 10.0);
HartiganSelection select_k_hartigan(const Eigen::MatrixXd& samples, const Grid& grid,
                                    const Dendrogram& dendrogram, int k_max = 10,
                                    double threshold = 10.0);

struct SeverityOrder {
  std::vector<int> rank;               // per unit: 0 = mildest cluster
  std::vector<int> sizes;              // by severity rank
  std::vector<double> mean_peak;       // by severity rank
  std::vector<int> label_of_rank;      // original label for each severity rank
};

/// Re-indexes clusters by ascending mean peak height (mean over members of
/// each curve's maximum).
SeverityOrder severity_order(std::span<const int> labels, const Eigen::MatrixXd& samples);

}  // namespace wavecurve
