// Regenerates the bundled scenario files under data/ from the in-code
// fixtures, plus the sample decision matrix and engine config. The files
// are committed; run this after changing the fixtures.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rulefoil/fixtures.hpp"
#include "rulefoil/topsis.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw rulefoil::StorageError("cannot write " + path.string());
  }
  out << text;
  std::cout << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out_dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(out_dir);

  for (const auto& name : rulefoil::fixture_names()) {
    const rulefoil::Scenario scenario = rulefoil::load_fixture(name);
    write_file(out_dir / ("office_" + name + ".json"),
               rulefoil::dump_scenario(scenario));
  }

  rulefoil::topsis::DecisionMatrix matrix;
  matrix.alternatives = {"Meeting room not occupied", "Rain at lunch",
                         "Closing time"};
  matrix.criteria = {"similarity", "ownership", "frequency", "occurrence"};
  matrix.values = {{1.0 / 3.0, 1, 65, 3}, {0, 0, 4, 4}, {0, 1, 90, 0}};
  write_file(out_dir / "office_test1_matrix.json",
             matrix.to_json().dump(2) + "\n");

  const nlohmann::json config{{"recency_window_minutes", 60},
                              {"counting_window_days", 30},
                              {"occurrence_scope", "per-user"},
                              {"rephrase_timeout_seconds", 5}};
  write_file(out_dir / "engine_config.sample.json", config.dump(2) + "\n");
  return 0;
}
