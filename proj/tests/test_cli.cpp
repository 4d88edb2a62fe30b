#include "actsub/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string command = std::string(ACTSUB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path workspace() {
  const auto dir = fs::temp_directory_path() / "actsub_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const auto file = workspace() / name;
  std::ofstream(file) << body;
  return file;
}

const char* kRidge = R"({"model": {"name": "ridge", "direction": [0.7, 0.3], "dimension": 6},
                          "samples": 12, "comparison": {"full_space_test_points": 50}})";

}  // namespace

TEST_CASE("pipeline writes the run directory and exits 0") {
  const auto cfg = write_config("ridge.json", kRidge);
  const auto out = workspace() / "run";
  fs::remove_all(out);
  CHECK(run("pipeline -c " + cfg.string() + " -o " + out.string()) == 0);
  for (const char* name : {"samples.csv", "subspace.json", "design.csv", "training.csv", "model.json",
                           "errors.csv", "report.json", "histogram.csv"})
    CHECK(fs::exists(out / name));
}

TEST_CASE("step-by-step subcommands chain") {
  const auto cfg = write_config("ridge.json", kRidge);
  const auto dir = workspace() / "steps";
  fs::remove_all(dir);
  CHECK(run("sample -c " + cfg.string() + " -o " + dir.string()) == 0);
  CHECK(run("subspace -s " + (dir / "samples.csv").string() + " -n 1 -o " + dir.string()) == 0);
  CHECK(run("design --subspace " + (dir / "subspace.json").string() + " -o " + dir.string()) == 0);
  CHECK(run("fit -c " + cfg.string() + " --subspace " + (dir / "subspace.json").string() + " --samples " +
            (dir / "samples.csv").string() + " --design " + (dir / "design.csv").string() + " -o " +
            dir.string()) == 0);
  CHECK(run("predict --model " + (dir / "model.json").string() + " --points " + (dir / "design.csv").string() +
            " -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "predictions.csv"));
  const auto training = actsub::read_training_csv(dir / "training.csv");
  const auto predictions = actsub::read_csv(dir / "predictions.csv");
  REQUIRE(predictions.rows.rows() == training.second.size());
  CHECK(predictions.header.size() >= 2);
}

TEST_CASE("comparison and perturbation subcommands") {
  const auto cfg = write_config("ridge.json", kRidge);
  const auto dir = workspace() / "compare";
  fs::remove_all(dir);
  CHECK(run("compare -c " + cfg.string() + " -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "comparison.json"));
  CHECK(run("perturb-study -c " + cfg.string() + " -o " + dir.string()) == 0);
  CHECK(fs::exists(dir / "perturbation.csv"));
}

TEST_CASE("configuration problems exit 2") {
  CHECK(run("pipeline -c " + write_config("bad.json", R"({"samples": -1})").string()) == 2);
  CHECK(run("pipeline -c " + write_config("unknown.json", R"({"sampels": 10})").string()) == 2);
  CHECK(run("pipeline -c " + write_config("broken.json", "{not json").string()) == 2);
  CHECK(run("pipeline -c " + (workspace() / "absent.json").string()) == 2);
  CHECK(run("no-such-command") == 2);
}

TEST_CASE("numerical failures exit 3") {
  const auto cfg = write_config("flat.json", R"({"model": {"name": "quadratic", "diagonal": [0, 0, 0]},
                                                  "samples": 5})");
  CHECK(run("pipeline -c " + cfg.string() + " -o " + (workspace() / "flat").string()) == 3);
}
