#include "wavecurve/functional_regression.hpp"

#include <cmath>
#include <map>
#include <set>

#include "wavecurve/error.hpp"
#include "wavecurve/linear_model.hpp"
#include "wavecurve/log.hpp"
#include "wavecurve/smoothing.hpp"

namespace wavecurve {

std::vector<bool> CoefficientCurve::significant_mask() const {
  const Eigen::VectorXd lo = lower();
  const Eigen::VectorXd hi = upper();
  std::vector<bool> mask(static_cast<std::size_t>(lo.size()));
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    mask[static_cast<std::size_t>(i)] = std::isfinite(se[i]) && (lo[i] > 0.0 || hi[i] < 0.0);
  }
  return mask;
}

const CoefficientCurve& ConcurrentFit::term(const std::string& name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t;
  }
  throw InputError("concurrent fit has no term '" + name + "'");
}

double ConcurrentFit::partial(const std::string& name) const {
  for (const auto& [key, value] : partial_r2) {
    if (key == name) return value;
  }
  throw InputError("concurrent fit has no partial R^2 for '" + name + "'");
}

namespace {

// One design column as a function of the grid index: scalar terms are a
// single column broadcast over the grid.
struct Term {
  std::string name;
  Eigen::MatrixXd values;  // n x T' or n x 1
  std::string predictor;   // partial R^2 group; empty for the intercept
  bool dummy = false;      // involves the group dummy

  auto column(Eigen::Index t) const { return values.col(values.cols() == 1 ? 0 : t); }
};

struct Pointwise {
  Eigen::MatrixXd coef;  // q x T'
  Eigen::MatrixXd se;    // q x T'
  Eigen::MatrixXd fitted;
  Eigen::VectorXd sse;
  Eigen::VectorXd sst;
  std::vector<int> dropped;  // grid points at which each term was dropped
};

Pointwise pointwise_ols(const Eigen::MatrixXd& Y, const std::vector<Term>& terms, const std::vector<bool>& include) {
  const Eigen::Index n = Y.rows();
  const Eigen::Index T = Y.cols();
  const auto q = static_cast<Eigen::Index>(terms.size());
  Pointwise out;
  out.coef = Eigen::MatrixXd::Zero(q, T);
  out.se = Eigen::MatrixXd::Constant(q, T, std::numeric_limits<double>::quiet_NaN());
  out.fitted.resize(n, T);
  out.sse.resize(T);
  out.sst.resize(T);
  out.dropped.assign(terms.size(), 0);

  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < q; ++k) {
    if (include[static_cast<std::size_t>(k)]) cols.push_back(k);
  }
  Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index t = 0; t < T; ++t) {
    for (std::size_t c = 0; c < cols.size(); ++c) Z.col(static_cast<Eigen::Index>(c)) = terms[static_cast<std::size_t>(cols[c])].column(t);
    const OlsFit fit = ols(Z, Y.col(t));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto k = cols[c];
      if (fit.kept[c]) {
        out.coef(k, t) = fit.coef[static_cast<Eigen::Index>(c)];
        out.se(k, t) = fit.se[static_cast<Eigen::Index>(c)];
      } else {
        ++out.dropped[static_cast<std::size_t>(k)];
      }
    }
    out.fitted.col(t) = fit.fitted;
    out.sse[t] = fit.sse;
    out.sst[t] = fit.sst;
  }
  return out;
}

double integrated_r2(const Eigen::VectorXd& sse, const Eigen::VectorXd& sst, const Eigen::VectorXd& w) {
  const double tot = w.dot(sst);
  if (!(tot > 0.0)) return w.dot(sse) == 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - w.dot(sse) / tot, 0.0, 1.0);
}

Curve smooth_curve(const Eigen::VectorXd& raw, const std::shared_ptr<const BasisSystem>& basis,
                   const std::vector<double>& lambda_grid) {
  Eigen::MatrixXd row = raw.transpose();
  return smooth_collection(row, basis, lambda_grid).fits.front().curve;
}

struct EngineResult {
  std::vector<CoefficientCurve> curves;
  Pointwise full;
  double total_r2 = 0.0;
  std::vector<std::pair<std::string, double>> partial_r2;
};

EngineResult run_engine(const Eigen::MatrixXd& Y, const std::vector<Term>& terms, const Grid& grid,
                        const FunctionalOptions& options, bool partials, const char* context) {
  if (static_cast<std::size_t>(Y.cols()) != grid.size()) throw ShapeError(std::string(context) + ": grid mismatch");
  if (!Y.allFinite()) throw InputError(std::string(context) + ": non-finite response");
  for (const auto& term : terms) {
    if (term.values.rows() != Y.rows() || (term.values.cols() != 1 && term.values.cols() != Y.cols())) {
      throw ShapeError(std::string(context) + ": term '" + term.name + "' has the wrong shape");
    }
    if (!term.values.allFinite()) throw InputError(std::string(context) + ": term '" + term.name + "' is not finite");
  }
  if (Y.rows() <= static_cast<Eigen::Index>(terms.size())) {
    throw InputError(std::string(context) + ": fewer observations than design columns");
  }

  EngineResult res;
  const std::vector<bool> all(terms.size(), true);
  res.full = pointwise_ols(Y, terms, all);
  const Eigen::VectorXd& w = grid.trapezoid_weights();
  res.total_r2 = integrated_r2(res.full.sse, res.full.sst, w);

  std::string dropped;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (res.full.dropped[k] > 0) {
      dropped += (dropped.empty() ? "" : ", ") + terms[k].name + " (" + std::to_string(res.full.dropped[k]) + " points)";
    }
  }
  if (!dropped.empty()) log::info(std::string(context) + ": collinear columns dropped: " + dropped);

  const std::vector<double> lambda_grid = options.lambda_grid.empty() ? default_lambda_grid() : options.lambda_grid;
  const auto basis = std::make_shared<const BasisSystem>(BasisSystem::uniform(grid, options.n_breaks));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Eigen::VectorXd raw = res.full.coef.row(static_cast<Eigen::Index>(k)).transpose();
    res.curves.push_back(CoefficientCurve{terms[k].name, smooth_curve(raw, basis, lambda_grid), raw,
                                          res.full.se.row(static_cast<Eigen::Index>(k)).transpose()});
  }

  if (partials) {
    const double sse_full = w.dot(res.full.sse);
    auto partial_without = [&](auto&& drop) {
      std::vector<bool> keep(terms.size());
      for (std::size_t k = 0; k < terms.size(); ++k) keep[k] = !drop(terms[k]);
      const double sse_red = w.dot(pointwise_ols(Y, terms, keep).sse);
      // (R^2 - R^2_red) / (1 - R^2_red) written with integrated sums of squares.
      return sse_red > 0.0 ? std::clamp((sse_red - sse_full) / sse_red, 0.0, 1.0) : 0.0;
    };
    std::vector<std::string> predictors;
    for (const auto& term : terms) {
      if (!term.predictor.empty() && (predictors.empty() || predictors.back() != term.predictor)) {
        predictors.push_back(term.predictor);
      }
    }
    for (const auto& name : predictors) {
      res.partial_r2.emplace_back(name, partial_without([&](const Term& t) { return t.predictor == name; }));
    }
    res.partial_r2.emplace_back("group", partial_without([](const Term& t) { return t.dummy; }));
  }
  return res;
}

Eigen::MatrixXd ones(Eigen::Index n) { return Eigen::MatrixXd::Ones(n, 1); }

}  // namespace

FosFit fos_marginal(const Eigen::MatrixXd& Y, const Eigen::VectorXd& x, const Grid& grid,
                    const FunctionalOptions& options) {
  if (x.size() != Y.rows()) throw ShapeError("fos_marginal: covariate length differs from the number of curves");
  const Eigen::VectorXd xc = x.array() - x.mean();
  if (!(xc.squaredNorm() > 1e-24 * std::max(1.0, x.squaredNorm()))) {
    throw InputError("fos_marginal: covariate has zero variance");
  }
  std::vector<Term> terms{{"intercept", ones(Y.rows()), "", false}, {"x", x, "x", false}};
  EngineResult res = run_engine(Y, terms, grid, options, false, "fos_marginal");
  return FosFit{std::move(res.curves[0]), std::move(res.curves[1]), res.total_r2};
}

ConcurrentFit concurrent_fit(const Eigen::MatrixXd& Y, const ConcurrentSpec& spec, int lag, const Grid& grid,
                             const FunctionalOptions& options) {
  const Eigen::Index n = Y.rows();
  const auto T = static_cast<Eigen::Index>(grid.size());
  if (Y.cols() != T) throw ShapeError("concurrent_fit: response is not sampled on the grid");
  if (lag < 0 || T - lag < 4) throw InputError("concurrent_fit: lag " + std::to_string(lag) + " leaves too short a domain");
  if (spec.group.size() != n) throw ShapeError("concurrent_fit: group dummy needs one entry per unit");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (spec.group[i] != 0.0 && spec.group[i] != 1.0) throw InputError("concurrent_fit: group dummy must be 0 or 1");
  }
  std::set<std::string> names;
  for (const auto& f : spec.functional) {
    if (f.values.rows() != n || f.values.cols() != T) {
      throw ShapeError("concurrent_fit: functional predictor '" + f.name + "' has the wrong shape");
    }
    if (!names.insert(f.name).second) throw InputError("concurrent_fit: duplicate predictor '" + f.name + "'");
  }
  for (const auto& s : spec.scalar) {
    if (s.values.size() != n) throw ShapeError("concurrent_fit: scalar predictor '" + s.name + "' has the wrong length");
    if (!names.insert(s.name).second) throw InputError("concurrent_fit: duplicate predictor '" + s.name + "'");
  }

  const Eigen::Index Tl = T - lag;
  const auto d = spec.group.asDiagonal();
  std::vector<Term> terms;
  terms.push_back({"intercept", ones(n), "", false});
  terms.push_back({"d", spec.group, "", true});
  for (const auto& f : spec.functional) {
    const Eigen::MatrixXd lagged = f.values.leftCols(Tl);
    terms.push_back({f.name, lagged, f.name, false});
    terms.push_back({"d:" + f.name, d * lagged, f.name, true});
  }
  for (const auto& s : spec.scalar) {
    terms.push_back({s.name, s.values, s.name, false});
    terms.push_back({"d:" + s.name, d * s.values, s.name, true});
  }

  const Grid truncated = grid.truncated(static_cast<std::size_t>(lag));
  const Eigen::MatrixXd Yl = Y.rightCols(Tl);
  const std::string context = "concurrent_fit(lag " + std::to_string(lag) + ")";
  EngineResult res = run_engine(Yl, terms, truncated, options, true, context.c_str());
  ConcurrentFit fit{.lag = lag,
                    .grid = truncated,
                    .terms = std::move(res.curves),
                    .fitted = res.full.fitted,
                    .residuals = Yl - res.full.fitted,
                    .sse = res.full.sse,
                    .sst = res.full.sst,
                    .total_r2 = res.total_r2,
                    .partial_r2 = std::move(res.partial_r2)};
  return fit;
}

LagSweep lag_sweep(const Eigen::MatrixXd& Y, const ConcurrentSpec& spec, const std::vector<int>& lags,
                   const Grid& grid, const FunctionalOptions& options) {
  if (lags.empty()) throw InputError("lag_sweep: empty lag list");
  LagSweep sweep;
  for (int lag : lags) sweep.fits.push_back(concurrent_fit(Y, spec, lag, grid, options));
  const double count = static_cast<double>(lags.size());
  for (const auto& fit : sweep.fits) sweep.mean_total_r2 += fit.total_r2 / count;
  for (std::size_t k = 0; k < sweep.fits.front().partial_r2.size(); ++k) {
    double mean = 0.0;
    for (const auto& fit : sweep.fits) mean += fit.partial_r2[k].second / count;
    sweep.mean_partial_r2.emplace_back(sweep.fits.front().partial_r2[k].first, mean);
  }
  return sweep;
}

Eigen::MatrixXd collinearity_grid(const std::vector<FunctionalPredictor>& functional,
                                  const std::vector<ScalarPredictor>& scalar, const Grid& grid) {
  const auto rows = static_cast<Eigen::Index>(functional.size());
  const auto cols = static_cast<Eigen::Index>(functional.size() + scalar.size());
  Eigen::MatrixXd r2(rows, cols);
  const std::vector<bool> both{true, true};
  const Eigen::VectorXd& w = grid.trapezoid_weights();
  for (Eigen::Index a = 0; a < rows; ++a) {
    const Eigen::MatrixXd& Y = functional[static_cast<std::size_t>(a)].values;
    if (static_cast<std::size_t>(Y.cols()) != grid.size()) throw ShapeError("collinearity_grid: grid mismatch");
    for (Eigen::Index b = 0; b < cols; ++b) {
      Term predictor;
      if (b < rows) {
        predictor = {"x", functional[static_cast<std::size_t>(b)].values, "x", false};
      } else {
        predictor = {"x", scalar[static_cast<std::size_t>(b - rows)].values, "x", false};
      }
      if (predictor.values.rows() != Y.rows()) throw ShapeError("collinearity_grid: unit counts differ");
      const Pointwise fit = pointwise_ols(Y, {{"intercept", ones(Y.rows()), "", false}, predictor}, both);
      r2(a, b) = integrated_r2(fit.sse, fit.sst, w);
    }
  }
  return r2;
}

}  // namespace wavecurve
