#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <benchmark/benchmark.h>

#include "wavecurve/bspline.hpp"
#include "wavecurve/clustering.hpp"
#include "wavecurve/elastic_net.hpp"
#include "wavecurve/fgen.hpp"
#include "wavecurve/rng.hpp"
#include "wavecurve/smoothing.hpp"

namespace {

using namespace wavecurve;

Eigen::MatrixXd noise(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Eigen::MatrixXd bumps(Rng& rng, Eigen::Index n, const Grid& g) {
  Eigen::MatrixXd s(n, static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double center = 20.0 + 60.0 * rng.uniform();
    for (std::size_t t = 0; t < g.size(); ++t) {
      s(i, static_cast<Eigen::Index>(t)) = std::exp(-0.5 * std::pow((g[t] - center) / 10.0, 2)) + 0.1 * rng.normal();
    }
  }
  return s;
}

std::shared_ptr<const BasisSystem> daily_basis() {
  return std::make_shared<const BasisSystem>(BasisSystem::uniform(Grid::daily(150)));
}

void BM_SmoothCollection(benchmark::State& state) {
  const auto basis = daily_basis();
  Rng rng(1);
  const Eigen::MatrixXd samples = bumps(rng, state.range(0), basis->grid());
  const auto grid = default_lambda_grid();
  for (auto _ : state) benchmark::DoNotOptimize(smooth_collection(samples, basis, grid));
}
BENCHMARK(BM_SmoothCollection)->Arg(10)->Arg(107)->Unit(benchmark::kMillisecond);

void BM_HclustComplete(benchmark::State& state) {
  const Grid g = Grid::daily(150);
  Rng rng(2);
  const auto dist = l2_distance_matrix(bumps(rng, state.range(0), g), g);
  for (auto _ : state) benchmark::DoNotOptimize(hclust_complete(dist));
}
BENCHMARK(BM_HclustComplete)->Arg(107)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_EnetPath(benchmark::State& state) {
  Rng rng(3);
  const Eigen::MatrixXd X = noise(rng, 107, state.range(0));
  const Eigen::VectorXd y = X.col(0) + noise(rng, 107, 1);
  for (auto _ : state) benchmark::DoNotOptimize(path_with_ratios(X, y));
}
BENCHMARK(BM_EnetPath)->Arg(7)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_FgenFit(benchmark::State& state) {
  const auto basis = daily_basis();
  Rng rng(4);
  const Eigen::MatrixXd X = noise(rng, 107, state.range(0));
  Eigen::RowVectorXd shape(150);
  for (int t = 0; t < 150; ++t) shape[t] = std::sin(t / 20.0);
  const Eigen::MatrixXd Y = X.col(0) * shape + noise(rng, 107, 150);
  const double l1 = 0.2 * fgen_lambda_max(X, Y, *basis);
  for (auto _ : state) benchmark::DoNotOptimize(fgen_fit(X, Y, basis, l1, 0.6 * l1));
}
BENCHMARK(BM_FgenFit)->Arg(7)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
