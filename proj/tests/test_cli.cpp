#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spdemove/cli.hpp"
#include "spdemove/errors.hpp"
#include "spdemove/io.hpp"

using namespace spdemove;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spdemove-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int call(std::vector<std::string> args) {
    args.insert(args.begin(), "spdemove");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    err_.str("");
    return cli::dispatch(static_cast<int>(argv.size()), argv.data(), err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::ostringstream err_;
};

const std::vector<std::string> kModel = {"--theta", "0.5", "--beta", "10", "--sigma", "1",
                                         "--n-modes", "6", "--t-final", "0.1", "--dt", "0.001",
                                         "--seed", "9"};

std::vector<std::string> with_model(std::vector<std::string> head,
                                    std::vector<std::string> tail = {}) {
  head.insert(head.end(), kModel.begin(), kModel.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_F(CliTest, SimulateRoundTripsThroughCsv) {
  ASSERT_EQ(call(with_model({"simulate"}, {"--out", path("m.csv")})), 0) << err_.str();
  const auto loaded = io::read_modes_csv(path("m.csv"));
  const auto ens = simulate_ensemble(build_basis(1, 6), {0.5, 10, 1, 0}, std::vector<double>(6, 0.0),
                                     TimeGrid(0.1, 0.001), 9);
  ASSERT_EQ(loaded.paths.size(), 6u);
  EXPECT_NEAR(loaded.dt, 0.001, 1e-15);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(loaded.paths[k].values, ens.paths[k].values);
    EXPECT_EQ(loaded.paths[k].lambda, ens.paths[k].lambda);
  }
  const auto summary = json::parse(io::read_file(path("m.csv.json")));
  EXPECT_EQ(summary["command"], "simulate");
  EXPECT_EQ(summary["seed"], 9);
  EXPECT_EQ(summary["config"]["scheme"], "exact");
}

TEST_F(CliTest, EstimateFromInputMatchesDirect) {
  ASSERT_EQ(call(with_model({"simulate"}, {"--out", path("m.csv")})), 0);
  ASSERT_EQ(call({"estimate", "--input", path("m.csv"), "--sigma", "1", "--out", path("e.json")}), 0)
      << err_.str();
  ASSERT_EQ(call(with_model({"estimate"}, {"--out", path("d.json")})), 0) << err_.str();
  const auto a = json::parse(io::read_file(path("e.json")));
  const auto b = json::parse(io::read_file(path("d.json")));
  EXPECT_NEAR(a["theta_hat"].get<double>(), b["theta_hat"].get<double>(),
              1e-9 * std::abs(b["theta_hat"].get<double>()));
  EXPECT_NEAR(a["beta_hat"].get<double>(), b["beta_hat"].get<double>(),
              1e-9 * std::abs(b["beta_hat"].get<double>()));
  for (const char* key : {"j1", "j2", "det_factor", "r1", "r2", "fisher_theta"}) {
    EXPECT_TRUE(b.contains(key)) << key;
  }

  ASSERT_EQ(call(with_model({"estimate"}, {"--out", path("e.csv")})), 0);
  const auto csv = io::read_file(path("e.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "theta_hat,beta_hat,j1,j2,det_factor,r1,r2,fisher_theta");
  EXPECT_TRUE(fs::exists(path("e.csv.json")));
}

TEST_F(CliTest, MissingFieldsAreListedTogether) {
  EXPECT_EQ(call({"simulate", "--theta", "0.5", "--out", path("x.csv")}), 1);
  const std::string msg = err_.str();
  for (const char* key : {"beta", "sigma", "n_modes", "t_final", "dt", "seed"}) {
    EXPECT_NE(msg.find(key), std::string::npos) << key;
  }
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(CliTest, ValidationErrorsExitOne) {
  EXPECT_EQ(call(with_model({"simulate"}, {"--out", path("x.csv"), "--dt", "0.003"})), 1);
  EXPECT_EQ(call(with_model({"simulate"}, {"--out", path("x.csv"), "--theta", "-1"})), 1);
  EXPECT_EQ(call(with_model({"simulate"}, {"--out", path("x.csv"), "--scheme", "rk4"})), 1);
  EXPECT_EQ(call(with_model({"simulate"}, {"--out", path("x.csv"), "--theta", "abc"})), 1);
  EXPECT_EQ(call({"no-such-command"}), 1);
  EXPECT_EQ(call({"estimate", "--input", path("missing.csv"), "--sigma", "1", "--out",
                  path("e.json")}),
            1);
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(CliTest, NumericalErrorsExitTwoAndWriteNothing) {
  EXPECT_EQ(call({"simulate", "--theta", "0.5", "--beta", "10", "--sigma", "1", "--n-modes", "50",
                  "--t-final", "1", "--dt", "0.001", "--seed", "1", "--scheme", "euler", "--out",
                  path("o.csv")}),
            2);
  EXPECT_NE(err_.str().find("mode"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("o.csv")));
  EXPECT_FALSE(fs::exists(path("o.csv.json")));

  EXPECT_EQ(call({"mc-study", "--theta", "0.5", "--beta", "10", "--sigma", "1", "--n-modes", "1",
                  "--t-final", "0.1", "--dt", "0.001", "--seed", "1", "--reps", "3", "--out",
                  path("mc")}),
            2);
  EXPECT_FALSE(fs::exists(path("mc")));
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  {
    std::ofstream f(path("c.json"));
    f << R"({"theta": 0.3, "beta": 10, "sigma": 1, "n_modes": 4, "t_final": 0.1,
             "dt": 0.001, "seed": 5, "out": ")" << path("a.csv") << "\"}";
  }
  const auto cfg = cli::load_config(path("c.json"), cli::Command::simulate, {{"theta", 0.4}});
  EXPECT_EQ(cfg.study.params0.theta, 0.4);
  EXPECT_EQ(cfg.study.n_modes, 4u);
  EXPECT_EQ(cfg.study.seed, 5u);
  EXPECT_EQ(cfg.resolved["theta"], 0.4);
  EXPECT_EQ(cfg.resolved["gamma"], 0.0);

  ASSERT_EQ(call({"simulate", "--config", path("c.json"), "--theta", "0.45"}), 0) << err_.str();
  const auto summary = json::parse(io::read_file(path("a.csv.json")));
  EXPECT_EQ(summary["config"]["theta"], 0.45);

  EXPECT_THROW(cli::resolve_config(cli::Command::simulate, {{"bogus", 1}}, json::object()),
               ValidationError);
  EXPECT_THROW(cli::resolve_config(cli::Command::simulate, {{"theta", "x"}}, json::object()),
               ValidationError);
}

TEST_F(CliTest, SummaryReloadsAsConfig) {
  ASSERT_EQ(call(with_model({"mc-study"}, {"--reps", "4", "--workers", "2", "--out", path("mc")})),
            0)
      << err_.str();
  const auto first = json::parse(io::read_file(path("mc/summary.json")));
  EXPECT_EQ(first["n_ok"], 4);
  EXPECT_EQ(first["reps"], 4);
  const auto csv = io::read_file(path("mc/replications.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rep_id,theta_hat,beta_hat,j1,j2,status");

  ASSERT_EQ(call({"mc-study", "--config", path("mc/summary.json"), "--out", path("mc2")}), 0)
      << err_.str();
  const auto second = json::parse(io::read_file(path("mc2/summary.json")));
  EXPECT_EQ(first["theta"], second["theta"]);
  EXPECT_EQ(first["beta"], second["beta"]);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  ::setenv(cli::kOutputDirEnv, dir_.c_str(), 1);
  const int code = call({"fisher", "--theta", "0.5", "--beta", "1", "--sigma", "1", "--n-modes",
                         "10", "--t-final", "10"});
  ::unsetenv(cli::kOutputDirEnv);
  ASSERT_EQ(code, 0) << err_.str();
  const auto js = json::parse(io::read_file(path("fisher.json")));
  EXPECT_NEAR(js["fisher_asymptotic"].get<double>(), 32898.68133696453, 1e-8);
  EXPECT_GT(js["fisher_exact"].get<double>(), 0.0);
}

TEST_F(CliTest, TrajectoriesAndSweep) {
  ASSERT_EQ(call(with_model({"trajectories"}, {"--xi0", "0.5", "--xi", "0.25,0.5", "--out",
                                               path("t.csv")})),
            0)
      << err_.str();
  const auto t = io::read_file(path("t.csv"));
  EXPECT_EQ(t.substr(0, t.find('\n')), "t,value,xi");
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 1 + 2 * 101);

  ASSERT_EQ(call(with_model({"sweep"}, {"--axis", "N", "--values", "3,6", "--reps", "3", "--out",
                                        path("sw")})),
            0)
      << err_.str();
  const auto js = json::parse(io::read_file(path("sw/summary.json")));
  EXPECT_EQ(js["curve"].size(), 2u);
  EXPECT_EQ(js["axis"], "N");
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(call({"--help"}), 0); }

TEST(OutputTransaction, AllOrNothing) {
  const fs::path dir = fs::temp_directory_path() / "spdemove-tx";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "blocker") << "x";
  }
  io::OutputTransaction tx;
  tx.add(dir / "a.txt", "a");
  tx.add(dir / "blocker" / "b.txt", "b");
  EXPECT_ANY_THROW(tx.commit());
  EXPECT_FALSE(fs::exists(dir / "a.txt"));
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++n;
  EXPECT_EQ(n, 1u);

  io::OutputTransaction ok;
  ok.add(dir / "a.txt", "a");
  ok.add(dir / "sub" / "b.txt", "b");
  ok.commit();
  EXPECT_EQ(io::read_file(dir / "sub" / "b.txt"), "b");
  fs::remove_all(dir);
}

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
}
