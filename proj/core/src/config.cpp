#include "wavecurve/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wavecurve/error.hpp"
#include "wavecurve/smoothing.hpp"

namespace wavecurve {

using nlohmann::json;

std::vector<double> SmoothingSettings::lambda_grid() const {
  return log_spaced(lambda_min, lambda_max, lambda_count);
}

std::vector<int> ConcurrentSettings::lags() const {
  std::vector<int> out;
  for (int l = lag_min; l <= lag_max; ++l) out.push_back(l);
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string label) : label_(std::move(label)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ValidationError(label_, 0, key, message);
  }

  void only(const json& obj, const std::string& path, std::set<std::string> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.contains(key)) fail(join(path, key), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  template <typename T>
  void read(const json& obj, const std::string& path, const std::string& key, T& out, bool required = false) const {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "required key missing");
      return;
    }
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(join(path, key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(join(path, key), "expected a number");
      } else {
        if (!v.is_string()) fail(join(path, key), "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      fail(join(path, key), e.what());
    }
  }

  Date date(const json& obj, const std::string& path, const std::string& key) const {
    std::string text;
    read(obj, path, key, text, true);
    try {
      return parse_date(text);
    } catch (const InputError& e) {
      fail(join(path, key), e.what());
    }
  }

  std::pair<double, double> pair(const json& obj, const std::string& path, const std::string& key) const {
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(join(path, key), "expected a two-element numeric array");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  std::string label_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& given) {
  std::filesystem::path p(given);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string relative_text(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (base.empty()) return p.generic_string();
  const auto rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

}  // namespace

RunConfig RunConfig::parse(const std::string& json_text, const std::filesystem::path& base_dir,
                           const std::string& label) {
  const Reader r(label);
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(label, 0, "", std::string("invalid JSON: ") + e.what());
  }
  r.only(root, "", {"seed", "output_dir", "inputs", "waves", "smoothing", "registration", "clustering", "features",
                    "enet", "stability", "concurrent"});

  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (!root.contains("seed")) r.fail("seed", "required key missing (no nondeterministic default)");
  if (!root.at("seed").is_number_unsigned()) r.fail("seed", "expected a nonnegative integer");
  cfg.seed = root.at("seed").get<std::uint64_t>();

  std::string out = "output";
  r.read(root, "", "output_dir", out);
  cfg.output_dir = resolve(base_dir, out);

  if (!root.contains("inputs")) r.fail("inputs", "required key missing");
  const json& in = root.at("inputs");
  r.only(in, "inputs", {"deaths", "baseline", "population", "mobility", "covariates", "regions", "dpc_deaths",
                        "cases_province", "cases_region"});
  auto required_path = [&](const char* key, std::filesystem::path& dst) {
    std::string s;
    r.read(in, "inputs", key, s, true);
    dst = resolve(base_dir, s);
  };
  auto optional_path = [&](const char* key, std::optional<std::filesystem::path>& dst) {
    if (!in.contains(key)) return;
    std::string s;
    r.read(in, "inputs", key, s);
    dst = resolve(base_dir, s);
  };
  required_path("deaths", cfg.inputs.deaths);
  required_path("baseline", cfg.inputs.baseline);
  required_path("population", cfg.inputs.population);
  required_path("mobility", cfg.inputs.mobility);
  required_path("covariates", cfg.inputs.covariates);
  optional_path("regions", cfg.inputs.regions);
  optional_path("dpc_deaths", cfg.inputs.dpc_deaths);
  optional_path("cases_province", cfg.inputs.cases_province);
  optional_path("cases_region", cfg.inputs.cases_region);

  if (!root.contains("waves") || !root.at("waves").is_array() || root.at("waves").empty()) {
    r.fail("waves", "expected a nonempty array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < root.at("waves").size(); ++i) {
    const json& w = root.at("waves")[i];
    const std::string path = "waves[" + std::to_string(i) + "]";
    r.only(w, path, {"id", "start", "end", "restriction", "window", "target_peak_day"});
    WaveSettings ws;
    r.read(w, path, "id", ws.wave.id, true);
    if (ws.wave.id.empty() || !ids.insert(ws.wave.id).second) r.fail(path + ".id", "wave ids must be unique and nonempty");
    ws.wave.start = r.date(w, path, "start");
    ws.wave.end = r.date(w, path, "end");
    ws.wave.restriction = r.date(w, path, "restriction");
    if (w.contains("window")) {
      const auto [lo, hi] = r.pair(w, path, "window");
      ws.wave.window = PeakWindow{lo, hi};
    }
    if (w.contains("target_peak_day")) {
      double day = 0.0;
      r.read(w, path, "target_peak_day", day);
      ws.target_peak_day = day;
    }
    try {
      ws.wave.validate();
    } catch (const InputError& e) {
      r.fail(path, e.what());
    }
    if (!(ws.wave.window.lo < ws.wave.window.hi)) r.fail(path + ".window", "lower bound must be below upper bound");
    cfg.waves.push_back(std::move(ws));
  }

  if (root.contains("smoothing")) {
    const json& s = root.at("smoothing");
    r.only(s, "smoothing", {"n_breaks", "degree", "lambda_min", "lambda_max", "lambda_count"});
    r.read(s, "smoothing", "n_breaks", cfg.smoothing.n_breaks);
    r.read(s, "smoothing", "degree", cfg.smoothing.degree);
    r.read(s, "smoothing", "lambda_min", cfg.smoothing.lambda_min);
    r.read(s, "smoothing", "lambda_max", cfg.smoothing.lambda_max);
    r.read(s, "smoothing", "lambda_count", cfg.smoothing.lambda_count);
    if (cfg.smoothing.n_breaks < 2) r.fail("smoothing.n_breaks", "need at least two breakpoints");
    if (cfg.smoothing.degree < 2) r.fail("smoothing.degree", "roughness penalty needs degree >= 2");
    if (!(cfg.smoothing.lambda_min > 0.0 && cfg.smoothing.lambda_min <= cfg.smoothing.lambda_max)) {
      r.fail("smoothing.lambda_min", "need 0 < lambda_min <= lambda_max");
    }
    if (cfg.smoothing.lambda_count < 1) r.fail("smoothing.lambda_count", "must be positive");
  }
  if (root.contains("registration")) {
    const json& s = root.at("registration");
    r.only(s, "registration", {"fill"});
    std::string fill = "constant";
    r.read(s, "registration", "fill", fill);
    if (fill == "constant") {
      cfg.fill = FillMode::constant;
    } else if (fill == "zero") {
      cfg.fill = FillMode::zero;
    } else {
      r.fail("registration.fill", "expected 'constant' or 'zero'");
    }
  }
  if (root.contains("clustering")) {
    const json& s = root.at("clustering");
    r.only(s, "clustering", {"k_max", "threshold"});
    r.read(s, "clustering", "k_max", cfg.clustering.k_max);
    r.read(s, "clustering", "threshold", cfg.clustering.threshold);
    if (cfg.clustering.k_max < 1) r.fail("clustering.k_max", "must be positive");
  }
  if (root.contains("features")) {
    const json& s = root.at("features");
    r.only(s, "features", {"areas_from_registered", "per_population"});
    r.read(s, "features", "areas_from_registered", cfg.features.areas_from_registered);
    r.read(s, "features", "per_population", cfg.features.per_population);
    if (!(cfg.features.per_population > 0.0)) r.fail("features.per_population", "must be positive");
  }
  if (root.contains("enet")) {
    const json& s = root.at("enet");
    r.only(s, "enet", {"grid_size", "min_ratio", "l2_ratio", "refine_iterations", "cv_folds"});
    r.read(s, "enet", "grid_size", cfg.enet.grid_size);
    r.read(s, "enet", "min_ratio", cfg.enet.min_ratio);
    r.read(s, "enet", "l2_ratio", cfg.enet.l2_ratio);
    r.read(s, "enet", "refine_iterations", cfg.enet.refine_iterations);
    r.read(s, "enet", "cv_folds", cfg.enet.cv_folds);
    if (cfg.enet.grid_size < 2) r.fail("enet.grid_size", "need at least two points");
    if (!(cfg.enet.min_ratio > 0.0 && cfg.enet.min_ratio < 1.0)) r.fail("enet.min_ratio", "must be in (0, 1)");
    if (!(cfg.enet.l2_ratio >= 0.0)) r.fail("enet.l2_ratio", "must be nonnegative");
    if (cfg.enet.refine_iterations < 0) r.fail("enet.refine_iterations", "must be nonnegative");
    if (cfg.enet.cv_folds < 2) r.fail("enet.cv_folds", "need at least two folds");
  }
  if (root.contains("stability")) {
    const json& s = root.at("stability");
    r.only(s, "stability", {"replications", "subsample", "functional"});
    r.read(s, "stability", "replications", cfg.stability.replications);
    r.read(s, "stability", "functional", cfg.stability.functional);
    if (s.contains("subsample")) {
      const auto [lo, hi] = r.pair(s, "stability", "subsample");
      if (lo != std::floor(lo) || hi != std::floor(hi) || lo < 1 || hi < lo) {
        r.fail("stability.subsample", "expected integers 1 <= lo <= hi");
      }
      cfg.stability.n_min = static_cast<int>(lo);
      cfg.stability.n_max = static_cast<int>(hi);
    }
    if (cfg.stability.replications < 1) r.fail("stability.replications", "must be positive");
  }
  if (root.contains("concurrent")) {
    const json& s = root.at("concurrent");
    r.only(s, "concurrent", {"lags"});
    if (s.contains("lags")) {
      const auto [lo, hi] = r.pair(s, "concurrent", "lags");
      if (lo != std::floor(lo) || hi != std::floor(hi) || lo < 0 || hi < lo) {
        r.fail("concurrent.lags", "expected a nonempty integer range [lo, hi] with lo >= 0");
      }
      cfg.concurrent.lag_min = static_cast<int>(lo);
      cfg.concurrent.lag_max = static_cast<int>(hi);
    }
    if (cfg.concurrent.lag_max > kWaveDays - 4) r.fail("concurrent.lags", "lag leaves too short a domain");
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.filename().string(), 0, "", "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.parent_path(), path.filename().string());
}

std::string RunConfig::canonical_json() const {
  json j;  // nlohmann::json objects keep keys sorted
  j["seed"] = seed;
  json in;
  in["deaths"] = relative_text(inputs.deaths, base_dir);
  in["baseline"] = relative_text(inputs.baseline, base_dir);
  in["population"] = relative_text(inputs.population, base_dir);
  in["mobility"] = relative_text(inputs.mobility, base_dir);
  in["covariates"] = relative_text(inputs.covariates, base_dir);
  if (inputs.regions) in["regions"] = relative_text(*inputs.regions, base_dir);
  if (inputs.dpc_deaths) in["dpc_deaths"] = relative_text(*inputs.dpc_deaths, base_dir);
  if (inputs.cases_province) in["cases_province"] = relative_text(*inputs.cases_province, base_dir);
  if (inputs.cases_region) in["cases_region"] = relative_text(*inputs.cases_region, base_dir);
  j["inputs"] = in;
  json waves = json::array();
  for (const auto& w : this->waves) {
    json o;
    o["id"] = w.wave.id;
    o["start"] = format_date(w.wave.start);
    o["end"] = format_date(w.wave.end);
    o["restriction"] = format_date(w.wave.restriction);
    o["window"] = {w.wave.window.lo, w.wave.window.hi};
    if (w.target_peak_day) o["target_peak_day"] = *w.target_peak_day;
    waves.push_back(o);
  }
  j["waves"] = waves;
  j["smoothing"] = {{"n_breaks", smoothing.n_breaks},
                    {"degree", smoothing.degree},
                    {"lambda_min", smoothing.lambda_min},
                    {"lambda_max", smoothing.lambda_max},
                    {"lambda_count", smoothing.lambda_count}};
  j["registration"] = {{"fill", fill == FillMode::constant ? "constant" : "zero"}};
  j["clustering"] = {{"k_max", clustering.k_max}, {"threshold", clustering.threshold}};
  j["features"] = {{"areas_from_registered", features.areas_from_registered},
                   {"per_population", features.per_population}};
  j["enet"] = {{"grid_size", enet.grid_size},
               {"min_ratio", enet.min_ratio},
               {"l2_ratio", enet.l2_ratio},
               {"refine_iterations", enet.refine_iterations},
               {"cv_folds", enet.cv_folds}};
  j["stability"] = {{"replications", stability.replications},
                    {"subsample", {stability.n_min, stability.n_max}},
                    {"functional", stability.functional}};
  j["concurrent"] = {{"lags", {concurrent.lag_min, concurrent.lag_max}}};
  return j.dump();
}

}  // namespace wavecurve
