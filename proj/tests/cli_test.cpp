#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pathrep_cli/experiments.hpp"

namespace fs = std::filesystem;

namespace pathrep::cli {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pathrep_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int exit_status(const std::string& command) {
  const int rc = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ConfigError config_error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for " << text;
  return ConfigError("none");
}

TEST(Config, ShippedConfigsParseRoundTripAndPass) {
  // The table reader config expects the tabulated file beside a sibling out/.
  const fs::path root = scratch("shipped");
  fs::copy(PATHREP_CONFIG_DIR, root / "configs");
  Report tab = run_experiment(parse_config_file((root / "configs" / "tabulate.json").string()));
  write_outputs(tab, root / "out", "magnetic_oracle");

  int seen = 0;
  for (const auto& entry : fs::directory_iterator(root / "configs")) {
    const ExperimentConfig cfg = parse_config_file(entry.path().string());
    EXPECT_EQ(config_from_json(cfg.to_json()), cfg) << entry.path();
    const Report r = run_experiment(cfg, entry.path().parent_path());
    EXPECT_TRUE(r.pass()) << entry.path() << "\n" << r.text();
    ++seen;
  }
  EXPECT_GE(seen, 10);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  const ConfigError e = config_error_of("{\n  \"experiment\": \"transport\",\n  \"seed\": 1,,\n}");
  EXPECT_EQ(e.line(), 3);
  EXPECT_GT(e.column(), 0);
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
}

TEST(Config, CommentsAreAllowed) {
  const ExperimentConfig cfg = parse_config(
      "// transport along a line\n{\"experiment\": \"transport\", /* inline */ \"connection\": "
      "{\"preset\": \"magnetic\"}, \"path\": {\"kind\": \"affine\", \"origin\": [0, 0], \"direction\": [1, 1]}}");
  EXPECT_EQ(cfg.experiment, "transport");
}

TEST(Config, ErrorsNameTheKey) {
  const std::string path = R"("path": {"kind": "affine", "origin": [0, 0], "direction": [1, 0]})";
  EXPECT_EQ(config_error_of(R"({"experiment": "transport", "connection": {"preset": "nope"}, )" + path + "}").key(),
            "connection.preset");
  EXPECT_EQ(config_error_of(R"({"experiment": "transport", "connection": {"preset": "magnetic", "strenght": 2}, )" +
                            path + "}")
                .key(),
            "connection.strenght");
  EXPECT_EQ(config_error_of(R"({"experiment": "transport", "connection": {"preset": "magnetic"},
              "path": {"kind": "affine", "origin": [0, 0, 0], "direction": [1, 0]}})")
                .key()
                .rfind("path", 0),
            0u);
  EXPECT_EQ(config_error_of(R"({"experiment": "teleport"})").key(), "experiment");
  EXPECT_EQ(config_error_of(R"({"experiment": "transport", "bogus": 1})").key(), "bogus");
}

TEST(Config, ExperimentHint) {
  const std::string body = R"({"connection": {"preset": "magnetic"},
      "path": {"kind": "affine", "origin": [0, 0], "direction": [1, 0]}})";
  EXPECT_EQ(parse_config(body, "transport").experiment, "transport");
  EXPECT_THROW(parse_config(R"({"experiment": "holonomy"})", "transport"), ConfigError);
}

TEST(Config, MatricesAndTolerances) {
  const Matrix m = parse_matrix(json::parse(R"([[1, [0, 2]], [3, 4]])"), "m");
  EXPECT_EQ(m(0, 1), Complex(0, 2));
  EXPECT_EQ(parse_matrix(json(2.5), "m"), Matrix::Constant(1, 1, 2.5));
  EXPECT_THROW(parse_matrix(json::parse("[[1, 2], [3]]"), "m"), ConfigError);
  EXPECT_EQ(parse_tolerance("cocycle=1e-3"), (std::pair<std::string, double>{"cocycle", 1e-3}));
  EXPECT_THROW(parse_tolerance("cocycle"), ConfigError);
  EXPECT_THROW(parse_tolerance("cocycle=abc"), ConfigError);
}

TEST(Experiments, OutputsAreDeterministicAndEchoTheConfig) {
  const ExperimentConfig cfg = parse_config_file(std::string(PATHREP_CONFIG_DIR) + "/polynomial_transport.json");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  Report ra = run_experiment(cfg), rb = run_experiment(cfg);
  const auto files = write_outputs(ra, a, cfg.stem());
  write_outputs(rb, b, cfg.stem());
  ASSERT_GE(files.size(), 3u);
  for (const auto& f : files) EXPECT_EQ(slurp(f), slurp(b / f.filename())) << f;
  EXPECT_EQ(parse_config_file((a / (cfg.stem() + "_config.json")).string()), cfg);
}

TEST(Experiments, ToleranceOverrides) {
  ExperimentConfig cfg = parse_config_file(std::string(PATHREP_CONFIG_DIR) + "/flat_transport.json");
  cfg.tolerances["cocycle"] = 0.0;
  EXPECT_FALSE(run_experiment(cfg).pass());
  cfg.tolerances = {{"no_such_check", 1.0}};
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(Report, CsvAndOrderFit) {
  Table t{"t", {"n", "x", "s"}, {{Cell{3LL}, Cell{0.1}, Cell{std::string("a")}}}};
  EXPECT_EQ(t.csv(), "n,x,s\n3,1.00000000000000006e-01,a\n");
  std::vector<double> n{10, 20, 40, 80}, err;
  for (double k : n) err.push_back(3.0 / (k * k));
  EXPECT_NEAR(fitted_order(n, err), 2.0, 1e-12);
  EXPECT_TRUE(Check::within("o", 2.0, 1.8, 2.2).pass());
  EXPECT_FALSE(Check::below("e", std::nan(""), 1.0).pass());
}

class Binary : public ::testing::Test {
 protected:
  std::string bin = PATHREP_BIN;
  std::string configs = PATHREP_CONFIG_DIR;
};

TEST_F(Binary, ExitCodes) {
  const fs::path out = scratch("bin");
  const std::string o = " -q -o " + out.string();
  EXPECT_EQ(exit_status(bin + " run -c " + configs + "/flat_transport.json" + o), 0);
  EXPECT_TRUE(fs::exists(out / "transport_report.txt"));
  EXPECT_EQ(exit_status(bin + " transport -c " + configs + "/flat_transport.json" + o + " -t cocycle=0"), 1);
  EXPECT_EQ(exit_status(bin + " transport -c " + configs + "/flat_transport.json" + o + " -t nope=1"), 2);
  EXPECT_EQ(exit_status(bin + " holonomy -c " + configs + "/flat_transport.json" + o), 2);
  EXPECT_EQ(exit_status(bin + o), 2);

  const fs::path bad = out / "bad.json";
  std::ofstream(bad) << R"({"experiment": "transport", "connection": {"preset": "nope"}})";
  EXPECT_EQ(exit_status(bin + " run -c " + bad.string() + o), 2);
}

TEST_F(Binary, OutputDirFromEnvironment) {
  const fs::path out = scratch("env");
  EXPECT_EQ(exit_status("PATHREP_OUTPUT_DIR=" + out.string() + " " + bin + " run -q -c " + configs + "/snake.json"), 0);
  EXPECT_TRUE(fs::exists(out / "snake_config.json"));
}

}  // namespace
}  // namespace pathrep::cli
