#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "wavecurve_testing/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic two-wave input set and config for wavecurve"};
  std::string out;
  wavecurve::testing::FixtureOptions options;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--seed", options.seed, "Generator and run seed");
  app.add_option("--units-per-family", options.units_per_family, "Units in each severity family")
      ->check(CLI::Range(2, 1000));
  app.add_option("--replications", options.replications, "Stability runs in the written config")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto truth = wavecurve::testing::write_fixture(out, options);
    std::cout << "wrote " << truth.units.size() << " units; run with: wavecurve run --config "
              << truth.config.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
