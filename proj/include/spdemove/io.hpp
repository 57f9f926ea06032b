#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "spdemove/experiments.hpp"
#include "spdemove/inference.hpp"
#include "spdemove/simulator.hpp"

namespace spdemove::io {

/// Shortest-safe round-trip formatting: 17 significant digits, '.' separator.
std::string format_double(double x);

// CSV schemas. Every table starts with a header row.
//   modes:         t,mode,lambda,value
//   trajectories:  t,value,xi
//   replications:  rep_id,theta_hat,beta_hat,j1,j2,status
//   sweep:         axis_value,median_abs_err_theta,median_abs_err_beta,n_ok
//   estimate:      theta_hat,beta_hat,j1,j2,det_factor,r1,r2,fisher_theta
std::string modes_csv(const ModeEnsemble& ensemble);
std::string trajectories_csv(const TrajectoryBundle& bundle);
std::string replications_csv(const McSummary& summary);
std::string sweep_csv(std::span<const SweepPoint> curve);
std::string estimate_csv(const EstimateResult& result);

/// Paths read back from a modes CSV, with the grid spacing recovered from t.
struct LoadedModes {
  std::vector<ModePath> paths;
  double dt = 0.0;
};

LoadedModes parse_modes_csv(const std::string& text);
LoadedModes read_modes_csv(const std::filesystem::path& path);

nlohmann::json to_json(const EstimateResult& result);
nlohmann::json to_json(const ParameterSummary& summary);
nlohmann::json to_json(const McSummary& summary);

/// Writes a group of files so that either all of them appear or none do: each
/// file goes to a temporary sibling first and is renamed only after every
/// write succeeded.
class OutputTransaction {
 public:
  void add(std::filesystem::path path, std::string content);
  void commit();

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace spdemove::io
