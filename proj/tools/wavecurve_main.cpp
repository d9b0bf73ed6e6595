#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "wavecurve/config.hpp"
#include "wavecurve/error.hpp"
#include "wavecurve/ingest.hpp"
#include "wavecurve/log.hpp"
#include "wavecurve/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kValidationError = 2;

wavecurve::RunConfig load_config(const std::string& path, const std::string& output) {
  auto config = wavecurve::RunConfig::load(path);
  if (!output.empty()) config.output_dir = output;
  return config;
}

void report(const wavecurve::RunResult& result, const wavecurve::RunConfig& config) {
  std::size_t skipped = 0;
  for (const auto& s : result.artifacts.stages()) {
    if (s.status != "ok") {
      ++skipped;
      std::cout << "skipped " << s.scope << " / " << s.stage << ": " << s.notice << "\n";
    }
  }
  std::cout << "wrote " << result.artifacts.files().size() << " artifacts and manifest.json to "
            << config.output_dir.string() << " (" << result.artifacts.warnings().size() << " warnings, "
            << skipped << " stages skipped)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional data analysis of epidemic waves"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output;

  auto* run = app.add_subcommand("run", "Run the full analysis and write all artifacts");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--output", output, "Override the configured output directory");

  auto* validate = app.add_subcommand("validate", "Check the configuration and every input file");
  validate->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("compare-sources", "Write the region-level source ratio tables");
  compare->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  compare->add_option("--output", output, "Override the configured output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidationError;
  }

  try {
    if (*validate) {
      const auto config = load_config(config_path, output);
      const auto bundle = wavecurve::ingest(config);
      std::cout << "ok: " << bundle.units.size() << " units, " << config.waves.size() << " waves";
      if (bundle.comparison) std::cout << ", comparison inputs present";
      std::cout << "\n";
      return kOk;
    }
    const auto config = load_config(config_path, output);
    const auto result = *run ? wavecurve::run_pipeline(config) : wavecurve::run_compare_sources(config);
    report(result, config);
    return kOk;
  } catch (const wavecurve::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const wavecurve::KeyedJoinError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
