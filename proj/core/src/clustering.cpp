#include "wavecurve/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wavecurve/error.hpp"

namespace wavecurve {

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd values, std::string metric)
    : values_(std::move(values)), metric_(std::move(metric)) {
  if (values_.rows() != values_.cols()) throw ShapeError("distance matrix must be square");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (values_(i, i) != 0.0) throw InputError("distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = values_(i, j);
      if (!std::isfinite(v) || v < 0.0) throw InputError("distances must be finite and nonnegative");
      if (v != values_(j, i)) throw InputError("distance matrix must be symmetric");
    }
  }
}

DistanceMatrix l2_distance_matrix(const Eigen::MatrixXd& samples, const Grid& grid) {
  if (samples.cols() != static_cast<Eigen::Index>(grid.size())) {
    throw ShapeError("l2_distance_matrix: curves do not match the grid");
  }
  const auto n = samples.rows();
  const Eigen::VectorXd& w = grid.trapezoid_weights();
  const double c = grid.length();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const Eigen::RowVectorXd diff = samples.row(i) - samples.row(j);
      const double v = diff.cwiseAbs2().dot(w.transpose()) / c;
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(d));
}

Dendrogram hclust_complete(const DistanceMatrix& dist) {
  const int n = static_cast<int>(dist.size());
  if (n < 2) throw InputError("hclust_complete needs at least two observations");

  Eigen::MatrixXd d = dist.values();
  std::vector<int> node(static_cast<std::size_t>(n));   // current node id per slot
  std::vector<int> min_leaf(static_cast<std::size_t>(n));
  std::vector<int> size(static_cast<std::size_t>(n), 1);
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::iota(node.begin(), node.end(), 0);
  std::iota(min_leaf.begin(), min_leaf.end(), 0);

  Dendrogram out;
  out.n_leaves = n;
  out.merges.reserve(static_cast<std::size_t>(n - 1));
  std::vector<int> left_child(static_cast<std::size_t>(n - 1));
  std::vector<int> right_child(static_cast<std::size_t>(n - 1));

  for (int step = 0; step < n - 1; ++step) {
    int best_a = -1;
    int best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      if (!active[static_cast<std::size_t>(a)]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!active[static_cast<std::size_t>(b)]) continue;
        const double v = d(a, b);
        bool take = v < best;
        if (!take && v == best) {
          auto key = [&](int x, int y) {
            const int lx = min_leaf[static_cast<std::size_t>(x)];
            const int ly = min_leaf[static_cast<std::size_t>(y)];
            return std::pair(std::min(lx, ly), std::max(lx, ly));
          };
          take = key(a, b) < key(best_a, best_b);
        }
        if (take) {
          best = v;
          best_a = a;
          best_b = b;
        }
      }
    }
    auto ua = static_cast<std::size_t>(best_a);
    auto ub = static_cast<std::size_t>(best_b);
    if (min_leaf[ub] < min_leaf[ua]) std::swap(ua, ub);

    Merge m{node[ua], node[ub], best, size[ua] + size[ub]};
    out.merges.push_back(m);
    left_child[static_cast<std::size_t>(step)] = m.left;
    right_child[static_cast<std::size_t>(step)] = m.right;

    // Complete linkage update, stored in slot ua.
    for (int c = 0; c < n; ++c) {
      if (!active[static_cast<std::size_t>(c)] || c == static_cast<int>(ua) || c == static_cast<int>(ub)) continue;
      const double v = std::max(d(static_cast<Eigen::Index>(ua), c), d(static_cast<Eigen::Index>(ub), c));
      d(static_cast<Eigen::Index>(ua), c) = v;
      d(c, static_cast<Eigen::Index>(ua)) = v;
    }
    node[ua] = n + step;
    size[ua] = m.size;
    min_leaf[ua] = std::min(min_leaf[ua], min_leaf[ub]);
    active[ub] = false;
  }

  // Leaf order: depth-first from the root, left before right.
  std::vector<int> stack{2 * n - 2};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (id < n) {
      out.leaf_order.push_back(id);
    } else {
      stack.push_back(right_child[static_cast<std::size_t>(id - n)]);
      stack.push_back(left_child[static_cast<std::size_t>(id - n)]);
    }
  }
  return out;
}

std::vector<int> cut_tree(const Dendrogram& dendrogram, int k) {
  const int n = dendrogram.n_leaves;
  if (k < 1 || k > n) throw InputError("cut_tree: k must be in [1, n]");
  std::vector<int> parent(static_cast<std::size_t>(2 * n - 1));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int step = 0; step < n - k; ++step) {
    const Merge& m = dendrogram.merges[static_cast<std::size_t>(step)];
    parent[static_cast<std::size_t>(find(m.left))] = n + step;
    parent[static_cast<std::size_t>(find(m.right))] = n + step;
  }
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(2 * n - 1), -1);
  int next = 0;
  for (int leaf = 0; leaf < n; ++leaf) {
    const auto root = static_cast<std::size_t>(find(leaf));
    if (root_label[root] < 0) root_label[root] = next++;
    labels[static_cast<std::size_t>(leaf)] = root_label[root];
  }
  return labels;
}

double within_cluster_ss(const Eigen::MatrixXd& samples, const Grid& grid, std::span<const int> labels) {
  if (samples.cols() != static_cast<Eigen::Index>(grid.size())) {
    throw ShapeError("within_cluster_ss: curves do not match the grid");
  }
  if (static_cast<Eigen::Index>(labels.size()) != samples.rows()) {
    throw ShapeError("within_cluster_ss: one label per curve required");
  }
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(k, samples.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    means.row(labels[i]) += samples.row(static_cast<Eigen::Index>(i));
    counts[labels[i]] += 1.0;
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) means.row(c) /= counts[c];
  }
  const Eigen::VectorXd& w = grid.trapezoid_weights();
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Eigen::RowVectorXd diff = samples.row(static_cast<Eigen::Index>(i)) - means.row(labels[i]);
    total += diff.cwiseAbs2().dot(w.transpose());
  }
  return total;
}

HartiganSelection select_k_hartigan(const Eigen::MatrixXd& samples, const Grid& grid,
                                    std::span<const std::vector<int>> labels_by_k, int k_max,
                                    double threshold) {
  if (labels_by_k.empty()) throw InputError("select_k_hartigan: no labelings supplied");
  if (k_max < 1) throw InputError("select_k_hartigan: k_max must be >= 1");
  const double n = static_cast<double>(samples.rows());

  HartiganSelection out;
  // Sums at round-off level of the data's own scale count as exact zeros.
  const double scale = samples.cwiseAbs2().rowwise().sum().sum() * grid.length() / static_cast<double>(grid.size());
  for (const auto& labels : labels_by_k) {
    const double w = within_cluster_ss(samples, grid, labels);
    out.within_ss.push_back(w <= 1e-12 * scale ? 0.0 : w);
  }

  const int available = static_cast<int>(labels_by_k.size());
  const int cap = std::min(k_max, available);
  out.k = cap;
  for (int k = 1; k < available; ++k) {
    const double wk = out.within_ss[static_cast<std::size_t>(k - 1)];
    const double wk1 = out.within_ss[static_cast<std::size_t>(k)];
    const double h = wk1 > 0.0 ? (wk / wk1 - 1.0) * (n - k - 1.0) : std::numeric_limits<double>::infinity();
    out.index.push_back(h);
  }
  for (int k = 1; k <= cap; ++k) {
    if (out.within_ss[static_cast<std::size_t>(k - 1)] <= 0.0) {
      out.k = k;
      break;
    }
    if (k < available && out.index[static_cast<std::size_t>(k - 1)] <= threshold) {
      out.k = k;
      break;
    }
  }
  return out;
}

HartiganSelection select_k_hartigan(const Eigen::MatrixXd& samples, const Grid& grid,
                                    const Dendrogram& dendrogram, int k_max, double threshold) {
  const int upto = std::min(k_max + 1, dendrogram.n_leaves);
  std::vector<std::vector<int>> labels;
  for (int k = 1; k <= upto; ++k) labels.push_back(cut_tree(dendrogram, k));
  return select_k_hartigan(samples, grid, labels, k_max, threshold);
}

SeverityOrder severity_order(std::span<const int> labels, const Eigen::MatrixXd& samples) {
  if (static_cast<Eigen::Index>(labels.size()) != samples.rows()) {
    throw ShapeError("severity_order: one label per curve required");
  }
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<double> peak_sum(static_cast<std::size_t>(k), 0.0);
  std::vector<int> count(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw InputError("severity_order: negative cluster label");
    peak_sum[static_cast<std::size_t>(labels[i])] += samples.row(static_cast<Eigen::Index>(i)).maxCoeff();
    count[static_cast<std::size_t>(labels[i])] += 1;
  }
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  auto mean = [&](int c) {
    const auto u = static_cast<std::size_t>(c);
    return count[u] > 0 ? peak_sum[u] / count[u] : 0.0;
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mean(a) < mean(b); });

  SeverityOrder out;
  out.label_of_rank = order;
  std::vector<int> rank_of_label(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    const int label = order[static_cast<std::size_t>(r)];
    rank_of_label[static_cast<std::size_t>(label)] = r;
    out.sizes.push_back(count[static_cast<std::size_t>(label)]);
    out.mean_peak.push_back(mean(label));
  }
  out.rank.reserve(labels.size());
  for (int l : labels) out.rank.push_back(rank_of_label[static_cast<std::size_t>(l)]);
  return out;
}

}  // namespace wavecurve
