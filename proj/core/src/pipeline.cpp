#include "wavecurve/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include <nlohmann/json.hpp>

#include "wavecurve/linear_model.hpp"
#include "wavecurve/quadrature.hpp"
#include "wavecurve/log.hpp"
#include "wavecurve/rng.hpp"

namespace wavecurve {

CsvWriter& Report::table(const std::string& name, const std::vector<std::string>& header) {
  auto it = tables_.find(name);
  if (it == tables_.end()) it = tables_.emplace(name, CsvWriter(header)).first;
  return it->second;
}

ArtifactSet Report::finish() {
  for (auto& [name, writer] : tables_) artifacts_.add(name, writer.str());
  tables_.clear();
  return std::move(artifacts_);
}

namespace {

using nlohmann::ordered_json;

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }

template <typename F>
void stage(Report& report, const std::string& scope, const std::string& name, F&& body) {
  try {
    body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(scope, name, e.what());
  }
  report.artifacts().stage(scope, name);
}

void skip(Report& report, const std::string& scope, const std::string& name, const std::string& notice) {
  report.artifacts().stage(scope, name, "skipped", notice);
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  return m(rows, Eigen::all);
}

Eigen::VectorXd standardized(const Eigen::VectorXd& v) { return standardize_vector(v); }

ordered_json dendrogram_json(const std::string& wave, const std::vector<std::string>& units, const Dendrogram& d,
                             const HartiganSelection& h) {
  ordered_json merges = ordered_json::array();
  for (const auto& m : d.merges) {
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", num(m.height)}, {"size", m.size}});
  }
  ordered_json within = ordered_json::array();
  for (double w : h.within_ss) within.push_back(num(w));
  ordered_json index = ordered_json::array();
  for (double v : h.index) index.push_back(num(v));
  return {{"wave", wave},      {"units", units},      {"merges", merges}, {"leaf_order", d.leaf_order},
          {"k", h.k},          {"within_ss", within}, {"hartigan", index}};
}

void write_curve_rows(CsvWriter& table, const std::vector<std::string>& prefix, const CoefficientCurve& c, int offset) {
  const Eigen::VectorXd v = c.values();
  const Eigen::VectorXd lo = c.lower();
  const Eigen::VectorXd hi = c.upper();
  const auto mask = c.significant_mask();
  const Grid& g = c.beta.grid();
  for (Eigen::Index t = 0; t < v.size(); ++t) {
    std::vector<std::string> row = prefix;
    row.insert(row.end(), {c.name, num(g[static_cast<std::size_t>(t)] + offset), num(v[t]), num(c.se[t]), num(lo[t]),
                           num(hi[t]), mask[static_cast<std::size_t>(t)] ? "1" : "0"});
    table.row(row);
  }
}

void write_sweep(Report& report, const std::string& wave, const std::string& model, const LagSweep& sweep) {
  const std::vector<std::string> curve_header{"wave", "model", "predictor", "t", "beta", "se", "lower", "upper",
                                              "significant"};
  const std::vector<std::string> r2_header{"wave", "model", "lag", "term", "kind", "r2"};
  CsvWriter& r2 = report.table("r2_summary.csv", r2_header);
  for (const auto& fit : sweep.fits) {
    CsvWriter& curves = report.table("concurrent_fit_" + std::to_string(fit.lag) + ".csv", curve_header);
    for (const auto& term : fit.terms) write_curve_rows(curves, {wave, model}, term, fit.lag);
    r2.row({wave, model, num(fit.lag), "all", "total", num(fit.total_r2)});
    for (const auto& [name, value] : fit.partial_r2) r2.row({wave, model, num(fit.lag), name, "partial", num(value)});
  }
  r2.row({wave, model, "mean", "all", "total", num(sweep.mean_total_r2)});
  for (const auto& [name, value] : sweep.mean_partial_r2) r2.row({wave, model, "mean", name, "partial", num(value)});
}

void write_stability(Report& report, const std::string& wave, const std::string& model,
                     const std::vector<std::string>& names, const Eigen::VectorXd& full_ratio,
                     const StabilitySummary* summary) {
  CsvWriter& t = report.table("stability.csv", {"wave", "model", "feature", "full_data_ratio", "mean_ratio",
                                                "replications", "used", "skipped"});
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (summary != nullptr) {
      t.row({wave, model, names[j], num(full_ratio[jj]), num(summary->mean_ratio[jj]), num(summary->replications),
             num(summary->used), num(summary->skipped)});
    } else {
      t.row({wave, model, names[j], num(full_ratio[jj]), "NA", "0", "0", "0"});
    }
  }
}

}  // namespace

WaveResult run_wave(const InputBundle& bundle, const RunConfig& config, const std::string& wave_id, Report& report) {
  const auto ws = std::find_if(config.waves.begin(), config.waves.end(),
                               [&](const WaveSettings& w) { return w.wave.id == wave_id; });
  if (ws == config.waves.end()) throw InputError("run_wave: unknown wave '" + wave_id + "'");
  const WaveConfig& wave = ws->wave;
  const WaveData& data = bundle.waves.at(wave_id);
  const std::string& id = wave_id;

  WaveResult res;
  res.wave_id = wave_id;
  res.units = bundle.units;
  const auto n = static_cast<Eigen::Index>(res.units.size());
  const Grid grid = Grid::daily(kWaveDays);
  const auto basis = std::make_shared<const BasisSystem>(
      BasisSystem::uniform(grid, config.smoothing.n_breaks, config.smoothing.degree));
  const std::vector<double> lambda_grid = config.smoothing.lambda_grid();
  std::map<std::string, int> shift_of;

  stage(report, id, "differential_mortality", [&] {
    res.mortality.resize(n, kWaveDays);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd deaths = data.deaths.row(i).transpose();
      const Eigen::VectorXd base = data.baseline.row(i).transpose();
      res.mortality.row(i) = differential_mortality(std::span(deaths.data(), kWaveDays), std::span(base.data(), kWaveDays),
                                                    bundle.population[i], config.features.per_population)
                                 .transpose();
    }
  });

  stage(report, id, "smoothing", [&] {
    res.smoothed = smooth_collection(res.mortality, basis, lambda_grid);
    log::info(id + ": shared smoothing lambda " + num(res.smoothed.selection.lambda));
  });

  stage(report, id, "registration", [&] {
    RegistrationOptions opts;
    opts.window = wave.window;
    opts.fill = config.fill;
    opts.lambda_grid = lambda_grid;
    opts.target_peak_day = ws->target_peak_day;
    res.registration = align_and_integrate(res.smoothed.values(), basis, opts);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      shift_of[res.units[ui]] = res.registration.shifts[ui];
      if (res.registration.flagged[ui]) {
        log::warn(id + ": unit '" + res.units[ui] + "' has no strict mortality peak in the window; not shifted");
      }
    }
  });

  stage(report, id, "mobility", [&] {
    for (const auto& [category, values] : data.mobility) {
      const SmoothedCollection sm = smooth_collection(values, basis, lambda_grid);
      res.shifted_mobility[category] = apply_shifts(KeyedSeries{res.units, sm.values()}, shift_of, config.fill).values;
    }
  });

  const Eigen::MatrixXd registered = res.registration.shifted_curves.values();
  stage(report, id, "clustering", [&] {
    const DistanceMatrix dist = l2_distance_matrix(registered, grid);
    res.dendrogram = hclust_complete(dist);
    res.hartigan = select_k_hartigan(registered, grid, res.dendrogram, config.clustering.k_max,
                                     config.clustering.threshold);
    res.labels = cut_tree(res.dendrogram, res.hartigan.k);
    res.severity = severity_order(res.labels, registered);
    res.group = group_dummy(res.severity.rank, res.hartigan.k);
    CsvWriter& t = report.table("clusters.csv", {"unit", "wave", "label", "severity_rank"});
    for (std::size_t i = 0; i < res.units.size(); ++i) {
      t.row({res.units[i], id, num(res.labels[i]), num(res.severity.rank[i])});
    }
  });

  stage(report, id, "features", [&] {
    const auto& fits = config.features.areas_from_registered ? res.registration.shifted_curves.fits : res.smoothed.fits;
    CsvWriter& areas = report.table("areas.csv", {"unit", "wave", "a_bef", "a_aft", "log_a_bef", "log_a_aft", "flag"});
    for (std::size_t i = 0; i < res.units.size(); ++i) {
      res.areas.push_back(area_split(fits[i].curve, wave));
      const AreaFeatures& a = res.areas.back();
      areas.row({res.units[i], id, num(a.a_bef), num(a.a_aft), a.log_a_bef ? num(*a.log_a_bef) : "NA",
                 a.log_a_aft ? num(*a.log_a_aft) : "NA", a.positive ? "1" : "0"});
    }
    res.lags = compute_lags(res.units, res.registration.peak_table, wave);
    CsvWriter& lags = report.table("lags.csv", {"unit", "wave", "peak_day", "lag", "peak_value", "shift", "flagged", "d"});
    for (std::size_t i = 0; i < res.lags.size(); ++i) {
      const LagRecord& l = res.lags[i];
      lags.row({l.unit, id, num(l.peak_day), num(l.lag), num(l.peak_value), num(res.registration.shifts[i]),
                res.registration.flagged[i] ? "1" : "0", num(res.group[i])});
    }
  });

  // Modeling set: units whose log areas exist.
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < res.units.size(); ++i) {
    if (res.areas[i].positive) {
      rows.push_back(static_cast<Eigen::Index>(i));
    } else {
      log::warn(id + ": unit '" + res.units[i] + "' has a nonpositive area and is left out of the regressions");
    }
  }
  std::vector<std::string> names{"a_bef"};
  names.insert(names.end(), kCovariateNames.begin(), kCovariateNames.end());
  const auto p = static_cast<int>(names.size());
  const std::vector<std::string> stages_after{"scalar_models", "functional_models", "concurrent_models"};
  if (static_cast<int>(rows.size()) < p + 3) {
    for (const auto& s : stages_after) {
      skip(report, id, s, "only " + std::to_string(rows.size()) + " units with positive areas");
    }
    return res;
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  std::vector<std::string> model_units;
  for (auto r : rows) model_units.push_back(res.units[static_cast<std::size_t>(r)]);
  std::vector<int> model_group;
  for (auto r : rows) model_group.push_back(res.group[static_cast<std::size_t>(r)]);

  const std::uint64_t wave_seed = derive_seed(config.seed, id);
  PathOptions path_opts;
  path_opts.grid_size = config.enet.grid_size;
  path_opts.min_ratio = config.enet.min_ratio;
  path_opts.l2_ratio = config.enet.l2_ratio;
  path_opts.refine_iterations = config.enet.refine_iterations;
  StabilityOptions stab_opts;
  stab_opts.replications = config.stability.replications;
  stab_opts.n_min = config.stability.n_min;
  stab_opts.n_max = config.stability.n_max;
  stab_opts.seed = wave_seed;
  stab_opts.path = path_opts;
  stab_opts.path.stop_when_all_entered = true;
  CvOptions cv_opts;
  cv_opts.folds = config.enet.cv_folds;
  cv_opts.seed = wave_seed;
  cv_opts.path = path_opts;

  ScalarModelResults sc;
  sc.units = model_units;
  sc.feature_names = names;
  sc.raw_features.resize(m, p);
  sc.response.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = static_cast<std::size_t>(rows[static_cast<std::size_t>(k)]);
    sc.raw_features(k, 0) = *res.areas[i].log_a_bef;
    sc.raw_features.row(k).tail(p - 1) = bundle.covariates.row(static_cast<Eigen::Index>(i));
    sc.response[k] = *res.areas[i].log_a_aft;
  }
  DesignMatrix design;
  Eigen::VectorXd pc1_std;
  Eigen::VectorXd abef_std;

  stage(report, id, "scalar_models", [&] {
    design = standardize(sc.raw_features, names);
    const Eigen::VectorXd ys = standardized(sc.response);
    sc.path = path_with_ratios(design.X, ys, path_opts);
    sc.cv = cv_select(design.X, ys, cv_opts);
    const Eigen::VectorXd yc = ys.array() - ys.mean();
    sc.coef_min = elastic_net_fit(design.X, yc, sc.cv.lambda_min, path_opts.l2_ratio * sc.cv.lambda_min).beta;
    sc.coef_1se = elastic_net_fit(design.X, yc, sc.cv.lambda_1se, path_opts.l2_ratio * sc.cv.lambda_1se).beta;
    sc.stability = stability(sc.raw_features, sc.response, stab_opts);
    sc.pca = pca_first(sc.raw_features.rightCols(p - 1));
    sc.vif = vif(sc.raw_features);
    for (int j = 0; j < p; ++j) sc.marginals.push_back(marginal_ols(sc.response, sc.raw_features.col(j)));
    pc1_std = standardized(sc.pca.scores);
    abef_std = design.X.col(0);

    CsvWriter& path = report.table("enet_path.csv", {"wave", "lambda1", "lambda2", "feature", "coef"});
    for (std::size_t g = 0; g < sc.path.lambda1.size(); ++g) {
      for (int j = 0; j < p; ++j) {
        path.row({id, num(sc.path.lambda1[g]), num(sc.path.l2_ratio * sc.path.lambda1[g]), names[static_cast<std::size_t>(j)],
                  num(sc.path.coefs(j, static_cast<Eigen::Index>(g)))});
      }
    }
    CsvWriter& sel = report.table("enet_selected.csv",
                                  {"wave", "model", "feature", "lambda1_min", "coef_min", "lambda1_1se", "coef_1se"});
    for (int j = 0; j < p; ++j) {
      sel.row({id, "scalar", names[static_cast<std::size_t>(j)], num(sc.cv.lambda_min), num(sc.coef_min[j]),
               num(sc.cv.lambda_1se), num(sc.coef_1se[j])});
    }
    write_stability(report, id, "scalar", names, sc.path.lambda_ratio, &sc.stability);
    CsvWriter& marg = report.table("marginals.csv", {"wave", "response", "feature", "beta", "se", "r2"});
    for (int j = 0; j < p; ++j) {
      const MarginalFit& f = sc.marginals[static_cast<std::size_t>(j)];
      marg.row({id, "log_a_aft", names[static_cast<std::size_t>(j)], num(f.beta), num(f.se), num(f.r2)});
    }
    CsvWriter& pca = report.table("pca.csv", {"wave", "feature", "loading", "variance_explained"});
    for (int j = 0; j < p - 1; ++j) {
      pca.row({id, names[static_cast<std::size_t>(j + 1)], num(sc.pca.loadings[j]), num(sc.pca.variance_explained)});
    }
    CsvWriter& v = report.table("vif.csv", {"wave", "feature", "vif", "infinite"});
    for (int j = 0; j < p; ++j) {
      const VifEntry& e = sc.vif[static_cast<std::size_t>(j)];
      v.row({id, names[static_cast<std::size_t>(j)], e.infinite ? "Inf" : num(e.value), e.infinite ? "1" : "0"});
    }
    // Joint scalar fit on a_bef and pc1 with partial R^2 for each.
    Eigen::MatrixXd Z(m, 3);
    Z << Eigen::VectorXd::Ones(m), abef_std, pc1_std;
    const OlsFit full = ols(Z, sc.response);
    const OlsFit no_abef = ols(Z(Eigen::all, std::vector<Eigen::Index>{0, 2}), sc.response);
    const OlsFit no_pc1 = ols(Z.leftCols(2), sc.response);
    CsvWriter& r2 = report.table("r2_summary.csv", {"wave", "model", "lag", "term", "kind", "r2"});
    r2.row({id, "joint_scalar", "NA", "all", "total", num(full.r2)});
    r2.row({id, "joint_scalar", "NA", "a_bef", "partial", num(partial_r2(full, no_abef))});
    r2.row({id, "joint_scalar", "NA", "pc1", "partial", num(partial_r2(full, no_pc1))});
  });
  res.scalar = sc;

  FunctionalModelResults fm;
  const Eigen::MatrixXd Y = select_rows(registered, rows);
  stage(report, id, "functional_models", [&] {
    FgenOptions solver;
    fm.path = fgen_path_ratios(design.X, Y, *basis, path_opts, solver);
    fm.cv = fgen_cv_select(design.X, Y, *basis, cv_opts, solver);
    const FGenFit fit = fgen_fit(design.X, Y, basis, fm.cv.lambda_min, path_opts.l2_ratio * fm.cv.lambda_min, solver);
    const Eigen::MatrixXd curves = fit.values();
    fm.norm_min.resize(p);
    CsvWriter& coefs = report.table("fgen_coefs.csv", {"wave", "feature", "t", "value"});
    for (int j = 0; j < p; ++j) {
      fm.norm_min[j] = l2_norm(curves.row(j).transpose(), grid);
      for (std::size_t t = 0; t < grid.size(); ++t) {
        coefs.row({id, names[static_cast<std::size_t>(j)], num(grid[t]), num(curves(j, static_cast<Eigen::Index>(t)))});
      }
    }
    CsvWriter& sel = report.table("enet_selected.csv",
                                  {"wave", "model", "feature", "lambda1_min", "coef_min", "lambda1_1se", "coef_1se"});
    for (int j = 0; j < p; ++j) {
      sel.row({id, "fgen_l2_norm", names[static_cast<std::size_t>(j)], num(fm.cv.lambda_min), num(fm.norm_min[j]),
               num(fm.cv.lambda_1se), "NA"});
    }
    if (config.stability.functional) {
      fm.stability = fgen_stability(sc.raw_features, Y, *basis, stab_opts, solver);
      write_stability(report, id, "fgen", names, fm.path.lambda_ratio, &*fm.stability);
    } else {
      write_stability(report, id, "fgen", names, fm.path.lambda_ratio, nullptr);
    }

    CsvWriter& marg = report.table("marginals.csv", {"wave", "response", "feature", "beta", "se", "r2"});
    CsvWriter& fos = report.table("fos_marginals.csv", {"wave", "model", "predictor", "t", "beta", "se", "lower",
                                                         "upper", "significant"});
    for (int j = 0; j < p; ++j) {
      FosFit f = fos_marginal(Y, design.X.col(j), grid);
      f.slope.name = names[static_cast<std::size_t>(j)];
      fm.marginal_r2.push_back(f.r2);
      marg.row({id, "mortality_curve", names[static_cast<std::size_t>(j)], "NA", "NA", num(f.r2)});
      write_curve_rows(fos, {id, "marginal"}, f.slope, 0);
    }
    // Joint functional fit on a_bef and pc1 (no group dummy).
    ConcurrentSpec joint;
    joint.scalar = {{"a_bef", abef_std}, {"pc1", pc1_std}};
    joint.group = Eigen::VectorXd::Zero(m);
    const ConcurrentFit jf = concurrent_fit(Y, joint, 0, grid);
    CsvWriter& r2 = report.table("r2_summary.csv", {"wave", "model", "lag", "term", "kind", "r2"});
    r2.row({id, "joint_functional", "0", "all", "total", num(jf.total_r2)});
    r2.row({id, "joint_functional", "0", "a_bef", "partial", num(jf.partial("a_bef"))});
    r2.row({id, "joint_functional", "0", "pc1", "partial", num(jf.partial("pc1"))});
  });

  stage(report, id, "concurrent_models", [&] {
    std::map<std::string, Eigen::MatrixXd> mob;
    for (const auto& [cat, values] : res.shifted_mobility) mob[cat] = select_rows(values, rows);
    Eigen::VectorXd d(m);
    for (Eigen::Index k = 0; k < m; ++k) d[k] = model_group[static_cast<std::size_t>(k)];
    const std::vector<int> lags = config.concurrent.lags();

    ConcurrentSpec a;
    a.functional = {{"workplace", mob.at("workplace")}};
    a.scalar = {{"pc1", pc1_std}};
    a.group = d;
    fm.model_a = lag_sweep(Y, a, lags, grid);
    write_sweep(report, id, "A", *fm.model_a);

    ConcurrentSpec b;
    b.functional = {{"grocery_pharmacy", mob.at("grocery_pharmacy")}, {"workplace", mob.at("workplace")}};
    b.scalar = {{"a_bef", abef_std}, {"pc1", pc1_std}};
    b.group = d;
    fm.model_b = lag_sweep(Y, b, lags, grid);
    write_sweep(report, id, "B", *fm.model_b);

    std::vector<FunctionalPredictor> fun;
    for (const auto& cat : kMobilityCategories) fun.push_back({cat, mob.at(cat)});
    const std::vector<ScalarPredictor> scal{{"a_bef", abef_std}, {"pc1", pc1_std}};
    fm.collinearity = collinearity_grid(fun, scal, grid);
    CsvWriter& cg = report.table("collinearity_grid.csv", {"wave", "row", "column", "r2"});
    for (Eigen::Index r = 0; r < fm.collinearity.rows(); ++r) {
      for (Eigen::Index c = 0; c < fm.collinearity.cols(); ++c) {
        const std::string col = c < static_cast<Eigen::Index>(fun.size())
                                    ? fun[static_cast<std::size_t>(c)].name
                                    : scal[static_cast<std::size_t>(c - static_cast<Eigen::Index>(fun.size()))].name;
        cg.row({id, fun[static_cast<std::size_t>(r)].name, col, num(fm.collinearity(r, c))});
      }
    }
  });
  res.functional = std::move(fm);
  return res;
}

void compare_sources(const InputBundle& bundle, const RunConfig& config, Report& report) {
  if (!bundle.comparison || (!bundle.comparison->has_deaths() && !bundle.comparison->has_cases())) {
    skip(report, "all", "compare_sources", "comparison inputs (regions plus DPC deaths or case counts) not provided");
    return;
  }
  const ComparisonData& cmp = *bundle.comparison;
  stage(report, "all", "compare_sources", [&] {
    CsvWriter& t = report.table("source_ratios.csv",
                                {"key", "wave", "kind", "numerator", "denominator", "ratio", "flag"});
    auto emit = [&](const std::vector<RatioEntry>& entries, const std::string& kind) {
      for (const auto& e : entries) {
        t.row({e.key, e.wave, kind, num(e.numerator), num(e.denominator), e.ratio ? num(*e.ratio) : "NA",
               e.ratio ? "0" : "1"});
      }
    };
    auto wave_total = [](const std::map<Date, double>& series, const WaveConfig& w) {
      double sum = 0.0;
      for (auto it = series.lower_bound(w.start); it != series.end() && it->first <= w.end; ++it) {
        if (std::isfinite(it->second)) sum += it->second;
      }
      return sum;
    };
    for (const auto& ws : config.waves) {
      const WaveConfig& w = ws.wave;
      if (cmp.has_deaths()) {
        // Excess deaths per unit over the wave, aggregated to regions.
        const WaveData& data = bundle.waves.at(w.id);
        std::map<std::string, double> excess;
        for (std::size_t i = 0; i < bundle.units.size(); ++i) {
          if (!cmp.region_of.contains(bundle.units[i])) continue;
          const auto ii = static_cast<Eigen::Index>(i);
          excess[bundle.units[i]] = (data.deaths.row(ii) - data.baseline.row(ii)).sum();
        }
        std::map<std::string, double> dpc;
        for (const auto& [region, series] : cmp.dpc_deaths) dpc[region] = wave_total(series, w);
        emit(source_ratio_report(dpc, aggregate_by_group(excess, cmp.region_of), w.id), "deaths");
      }
      if (cmp.has_cases()) {
        std::map<std::string, double> province;
        for (const auto& [unit, series] : cmp.cases_province) province[unit] = wave_total(series, w);
        std::map<std::string, double> regional;
        for (const auto& [region, series] : cmp.cases_region) regional[region] = wave_total(series, w);
        emit(source_ratio_report(aggregate_by_group(province, cmp.region_of), regional, w.id), "cases");
      }
    }
  });
}

namespace {

void cross_wave_ranks(const std::vector<WaveResult>& waves, Report& report) {
  if (waves.size() < 2) {
    skip(report, "all", "peak_ranks", "needs two waves");
    return;
  }
  stage(report, "all", "peak_ranks", [&] {
    auto peaks = [](const WaveResult& w) {
      KeyedValues out;
      for (const auto& l : w.lags) out.emplace_back(l.unit, l.peak_value);
      return out;
    };
    const auto records = peak_rank_diff(peaks(waves[0]), peaks(waves[1]));
    CsvWriter& t = report.table("ranks.csv", {"unit", "wave_first", "wave_second", "peak_first", "peak_second",
                                              "rank_first", "rank_second", "difference"});
    for (const auto& r : records) {
      t.row({r.unit, waves[0].wave_id, waves[1].wave_id, num(r.peak_first), num(r.peak_second), num(r.rank_first),
             num(r.rank_second), num(r.difference)});
    }
  });
}

RunResult finish(const RunConfig& config, Report& report, std::vector<WaveResult> waves, bool write,
                 const log::Capture& capture) {
  RunResult result;
  result.waves = std::move(waves);
  for (const auto& w : capture.warnings()) report.artifacts().warning(w);
  result.artifacts = report.finish();
  result.config_hash = sha256_hex(config.canonical_json());
  if (write) {
    result.manifest = result.artifacts.write(config.output_dir, result.config_hash, config.seed);
  } else {
    result.manifest = result.artifacts.manifest_json(result.config_hash, config.seed);
  }
  return result;
}

}  // namespace

RunResult run_pipeline(const RunConfig& config, bool write) {
  const log::Capture capture;
  const InputBundle bundle = ingest(config);
  Report report;
  std::vector<WaveResult> waves;
  ordered_json dendrograms = ordered_json::array();
  for (const auto& ws : config.waves) {
    waves.push_back(run_wave(bundle, config, ws.wave.id, report));
    const WaveResult& w = waves.back();
    dendrograms.push_back(dendrogram_json(w.wave_id, w.units, w.dendrogram, w.hartigan));
  }
  report.artifacts().add("dendrogram.json", ordered_json{{"waves", dendrograms}}.dump(2) + "\n");
  cross_wave_ranks(waves, report);
  compare_sources(bundle, config, report);
  return finish(config, report, std::move(waves), write, capture);
}

RunResult run_compare_sources(const RunConfig& config, bool write) {
  const log::Capture capture;
  const InputBundle bundle = ingest(config);
  Report report;
  compare_sources(bundle, config, report);
  return finish(config, report, {}, write, capture);
}

}  // namespace wavecurve
