#include "spdemove/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "spdemove/errors.hpp"
#include "spdemove/io.hpp"

namespace spdemove::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Kind { real, count, text, real_list };

struct KeySpec {
  const char* key;
  const char* flag;
  Kind kind;
  const char* help;
};

constexpr KeySpec kKeys[] = {
    {"theta", "--theta", Kind::real, "Diffusion parameter theta > 0"},
    {"beta", "--beta", Kind::real, "Advection parameter beta > 0"},
    {"sigma", "--sigma", Kind::real, "Noise amplitude sigma > 0"},
    {"gamma", "--gamma", Kind::real, "Spectral noise decay gamma >= 0 (default 0)"},
    {"dimension", "--dim", Kind::count, "Spatial dimension, 1 or 2 (default 1)"},
    {"n_modes", "--n-modes", Kind::count, "Number of Galerkin modes N"},
    {"t_final", "--t-final", Kind::real, "Time horizon T"},
    {"dt", "--dt", Kind::real, "Time step; must divide T"},
    {"reps", "--reps", Kind::count, "Monte Carlo replications"},
    {"seed", "--seed", Kind::count, "Random seed"},
    {"scheme", "--scheme", Kind::text, "exact (default) or euler"},
    {"workers", "--workers", Kind::count, "Worker threads (results do not depend on it)"},
    {"overflow_threshold", "--overflow-threshold", Kind::real, "Abort paths beyond |u| > this"},
    {"singularity_eps", "--singularity-eps", Kind::real, "Relative determinant threshold"},
    {"xi0", "--xi0", Kind::real_list, "Point-mass initial condition (x or x,y)"},
    {"xi", "--xi", Kind::real_list, "Comma-separated evaluation points"},
    {"axis", "--axis", Kind::text, "Sweep axis: T or N"},
    {"values", "--values", Kind::real_list, "Comma-separated sweep values"},
    {"input", "--input", Kind::text, "Modes CSV to estimate from instead of simulating"},
    {"out", "--out", Kind::text, "Output file (or directory for mc-study/sweep)"},
};

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::trajectories: return "trajectories";
    case Command::estimate: return "estimate";
    case Command::mc_study: return "mc-study";
    case Command::sweep: return "sweep";
    case Command::fisher: return "fisher";
  }
  return "?";
}

const char* default_output_name(Command c) {
  switch (c) {
    case Command::simulate: return "modes.csv";
    case Command::trajectories: return "trajectories.csv";
    case Command::estimate: return "estimate.json";
    case Command::mc_study: return "mc-study";
    case Command::sweep: return "sweep";
    case Command::fisher: return "fisher.json";
  }
  return "out";
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ValidationError(what + ": not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_count(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ValidationError(what + ": not a nonnegative integer: '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ValidationError(what + ": integer out of range: '" + s + "'");
  }
}

json flag_to_json(const KeySpec& k, const std::string& raw) {
  switch (k.kind) {
    case Kind::real: return parse_real(raw, k.flag);
    case Kind::count: return parse_count(raw, k.flag);
    case Kind::text: return raw;
    case Kind::real_list: {
      json arr = json::array();
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) arr.push_back(parse_real(item, k.flag));
      return arr;
    }
  }
  return nullptr;
}

void check_type(const KeySpec& k, const json& v) {
  bool ok = false;
  switch (k.kind) {
    case Kind::real: ok = v.is_number(); break;
    case Kind::count: ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); break;
    case Kind::text: ok = v.is_string(); break;
    case Kind::real_list:
      ok = v.is_array();
      if (ok) {
        for (const auto& e : v) ok = ok && e.is_number();
      }
      break;
  }
  if (!ok) throw ValidationError(std::string("config field '") + k.key + "' has the wrong type");
}

std::vector<std::string> required_keys(Command c, const json& merged) {
  const std::vector<std::string> model = {"theta", "beta", "sigma"};
  std::vector<std::string> sim = {"theta", "beta", "sigma", "n_modes", "t_final", "dt", "seed"};
  switch (c) {
    case Command::simulate:
    case Command::mc_study: return sim;
    case Command::trajectories:
      sim.insert(sim.end(), {"xi0", "xi"});
      return sim;
    case Command::sweep:
      sim.insert(sim.end(), {"axis", "values"});
      return sim;
    case Command::estimate:
      if (merged.contains("input")) return {"sigma"};
      return sim;
    case Command::fisher: return {"theta", "beta", "sigma", "n_modes", "t_final"};
  }
  return model;
}

std::vector<double> real_list(const json& v) {
  std::vector<double> out;
  for (const auto& e : v) out.push_back(e.get<double>());
  return out;
}

std::string summary_path_for(const std::string& out) { return out + ".json"; }

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json summary_header(const CliConfig& cfg) {
  return {{"command", to_string(cfg.command)},
          {"seed", cfg.resolved.value("seed", json(nullptr))},
          {"config", cfg.resolved}};
}

}  // namespace

std::string to_string(Command c) { return command_name(c); }

CliConfig resolve_config(Command command, const json& file, const json& flags) {
  const json& source = (file.is_object() && file.contains("config") && file["config"].is_object())
                           ? file["config"]
                           : file;
  if (!source.is_null() && !source.is_object()) {
    throw ValidationError("config file must contain a JSON object");
  }
  json merged = json::object();
  for (const json* layer : {&source, &flags}) {
    if (layer->is_null()) continue;
    for (auto it = layer->begin(); it != layer->end(); ++it) {
      const KeySpec* k = find_key(it.key());
      if (!k) throw ValidationError("unknown config field '" + it.key() + "'");
      if (it->is_null()) continue;
      check_type(*k, *it);
      merged[it.key()] = *it;
    }
  }

  if (!merged.contains("out")) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      merged["out"] = (fs::path(dir) / default_output_name(command)).string();
    }
  }

  std::vector<std::string> missing;
  for (const auto& key : required_keys(command, merged)) {
    if (!merged.contains(key)) missing.push_back(key);
  }
  if (!merged.contains("out")) missing.emplace_back("out");
  if (!missing.empty()) {
    std::string msg = "missing required config fields:";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }

  // Defaults.
  const StudyConfig defaults;
  merged.emplace("gamma", 0.0);
  merged.emplace("dimension", 1);
  merged.emplace("scheme", "exact");
  merged.emplace("workers", 1);
  merged.emplace("overflow_threshold", defaults.overflow_threshold);
  merged.emplace("singularity_eps", defaults.singularity_eps);
  merged.emplace("reps", command == Command::sweep ? 100 : 1000);
  // estimate --input carries its own grid; model drift parameters are unused.
  if (command == Command::estimate && merged.contains("input")) {
    merged.emplace("theta", defaults.params0.theta);
    merged.emplace("beta", defaults.params0.beta);
  }

  CliConfig cfg;
  cfg.command = command;
  StudyConfig& s = cfg.study;
  s.params0.theta = merged["theta"].get<double>();
  s.params0.beta = merged["beta"].get<double>();
  s.params0.sigma = merged["sigma"].get<double>();
  s.params0.gamma = merged["gamma"].get<double>();
  s.dimension = static_cast<int>(merged["dimension"].get<std::uint64_t>());
  s.reps = merged["reps"].get<std::uint64_t>();
  s.workers = merged["workers"].get<std::uint64_t>();
  s.scheme = parse_scheme(merged["scheme"].get<std::string>());
  s.overflow_threshold = merged["overflow_threshold"].get<double>();
  s.singularity_eps = merged["singularity_eps"].get<double>();
  if (merged.contains("n_modes")) s.n_modes = merged["n_modes"].get<std::uint64_t>();
  if (merged.contains("t_final")) s.t_final = merged["t_final"].get<double>();
  if (merged.contains("dt")) s.dt = merged["dt"].get<double>();
  if (merged.contains("seed")) s.seed = merged["seed"].get<std::uint64_t>();
  if (merged.contains("xi0")) s.xi0 = real_list(merged["xi0"]);
  if (merged.contains("xi")) cfg.xi = real_list(merged["xi"]);
  if (merged.contains("axis")) cfg.axis = parse_sweep_axis(merged["axis"].get<std::string>());
  if (merged.contains("values")) cfg.values = real_list(merged["values"]);
  if (merged.contains("input")) cfg.input = merged["input"].get<std::string>();
  cfg.out = merged["out"].get<std::string>();

  if (command == Command::fisher) {
    s.params0.validate();
    if (!(s.t_final > 0.0)) throw ValidationError("t_final must be positive");
    if (s.n_modes == 0) throw ValidationError("n_modes must be positive");
    if (s.dimension != 1 && s.dimension != 2) throw ValidationError("dimension must be 1 or 2");
  } else if (!(command == Command::estimate && cfg.input)) {
    s.validate();
  } else if (!(s.params0.sigma > 0.0) || !(s.params0.gamma >= 0.0)) {
    throw ValidationError("sigma must be positive and gamma nonnegative");
  }
  if (command == Command::trajectories && s.dimension != 1) {
    throw ValidationError("trajectories supports dimension 1 only");
  }
  cfg.resolved = merged;
  return cfg;
}

CliConfig load_config(const fs::path& path, Command command, const json& flags) {
  json file;
  try {
    file = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse config " + path.string() + ": " + e.what());
  }
  return resolve_config(command, file, flags);
}

int run(const CliConfig& cfg, std::ostream& err) {
  const StudyConfig& s = cfg.study;
  io::OutputTransaction tx;
  switch (cfg.command) {
    case Command::simulate: {
      const auto basis = s.basis();
      const auto ens = simulate_ensemble(basis, s.params0, s.initial_coefficients(basis), s.grid(),
                                         s.seed, s.scheme, {0, s.overflow_threshold});
      json summary = summary_header(cfg);
      summary["n_modes"] = basis.size();
      summary["n_points"] = ens.grid.n_points();
      tx.add(cfg.out, io::modes_csv(ens));
      tx.add(summary_path_for(cfg.out), summary.dump(2) + "\n");
      break;
    }
    case Command::trajectories: {
      const auto bundle = trajectory_bundle(s, cfg.xi);
      json summary = summary_header(cfg);
      summary["n_series"] = bundle.series.size();
      summary["n_points"] = bundle.times.size();
      tx.add(cfg.out, io::trajectories_csv(bundle));
      tx.add(summary_path_for(cfg.out), summary.dump(2) + "\n");
      break;
    }
    case Command::estimate: {
      SufficientStats stats;
      if (cfg.input) {
        const auto loaded = io::read_modes_csv(*cfg.input);
        stats = sufficient_statistics(loaded.paths, loaded.dt, s.params0.gamma, s.params0.sigma);
      } else {
        const auto basis = s.basis();
        const auto ens = simulate_ensemble(basis, s.params0, s.initial_coefficients(basis),
                                           s.grid(), s.seed, s.scheme, {0, s.overflow_threshold});
        stats = sufficient_statistics(ens);
      }
      const auto result = estimate(stats, s.singularity_eps);
      json summary = summary_header(cfg);
      summary.update(io::to_json(result));
      summary["statistics"] = {{"i1", stats.i1}, {"i2", stats.i2}, {"i3", stats.i3},
                               {"i4", stats.i4}, {"i5", stats.i5}};
      if (ends_with(cfg.out, ".csv")) {
        tx.add(cfg.out, io::estimate_csv(result));
        tx.add(summary_path_for(cfg.out), summary.dump(2) + "\n");
      } else {
        tx.add(cfg.out, summary.dump(2) + "\n");
      }
      break;
    }
    case Command::mc_study: {
      const auto summary = mc_study(s);
      if (summary.n_ok == 0) {
        err << "error: every replication failed; first failure: "
            << summary.outcomes.front().message << "\n";
        return kExitNumerical;
      }
      json js = summary_header(cfg);
      js.update(io::to_json(summary));
      const fs::path dir(cfg.out);
      tx.add(dir / "replications.csv", io::replications_csv(summary));
      tx.add(dir / "summary.json", js.dump(2) + "\n");
      err << "mc-study: " << summary.n_ok << " ok, " << summary.n_failed << " failed; mean theta "
          << io::format_double(summary.theta.mean) << ", mean beta "
          << io::format_double(summary.beta.mean) << "\n";
      break;
    }
    case Command::sweep: {
      const auto curve = consistency_sweep(s, *cfg.axis, cfg.values);
      json js = summary_header(cfg);
      json points = json::array();
      for (const auto& p : curve) {
        points.push_back({{"axis_value", p.value},
                          {"median_abs_err_theta", p.median_abs_err_theta},
                          {"median_abs_err_beta", p.median_abs_err_beta},
                          {"median_abs_j1", p.median_abs_j1},
                          {"n_ok", p.n_ok},
                          {"n_failed", p.n_failed}});
      }
      js["axis"] = to_string(*cfg.axis);
      js["curve"] = points;
      const fs::path dir(cfg.out);
      tx.add(dir / "sweep.csv", io::sweep_csv(curve));
      tx.add(dir / "summary.json", js.dump(2) + "\n");
      break;
    }
    case Command::fisher: {
      const auto basis = s.basis();
      const auto fi = fisher_information_theta(basis, s.params0, s.t_final);
      json js = summary_header(cfg);
      js["fisher_exact"] = fi.exact;
      js["fisher_asymptotic"] = fi.asymptotic;
      js["ratio"] = fi.exact / fi.asymptotic;
      tx.add(cfg.out, js.dump(2) + "\n");
      break;
    }
  }
  tx.commit();
  return kExitOk;
}

int dispatch(int argc, const char* const* argv, std::ostream& err) {
  CLI::App app{"Spectral-Galerkin simulation and drift-parameter MLE for a stochastic "
               "advection-diffusion model of animal movement"};
  app.require_subcommand(1);

  struct Sub {
    Command command;
    CLI::App* app;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    std::string config_path;
  };
  const std::pair<Command, const char*> commands[] = {
      {Command::simulate, "Simulate one ensemble of Fourier-mode paths"},
      {Command::trajectories, "Simulate from a point mass and write field trajectories"},
      {Command::estimate, "Estimate (theta, beta) from one simulated or loaded ensemble"},
      {Command::mc_study, "Monte Carlo study of the estimator"},
      {Command::sweep, "Consistency sweep over T or N"},
      {Command::fisher, "Fisher information for theta"},
  };
  std::vector<std::unique_ptr<Sub>> subs;
  for (const auto& [cmd, desc] : commands) {
    auto sub = std::make_unique<Sub>();
    sub->command = cmd;
    sub->app = app.add_subcommand(command_name(cmd), desc);
    sub->app->add_option("--config", sub->config_path, "JSON config file (flags override it)");
    for (const auto& k : kKeys) {
      sub->opts[k.key] = sub->app->add_option(k.flag, sub->raw[k.key], k.help);
    }
    subs.push_back(std::move(sub));
  }

  std::ostringstream help_out;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, help_out, err);
    err << help_out.str();
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitValidation;
  }

  try {
    for (const auto& sub : subs) {
      if (!sub->app->parsed()) continue;
      json flags = json::object();
      for (const auto& k : kKeys) {
        if (sub->opts[k.key]->count() > 0) flags[k.key] = flag_to_json(k, sub->raw[k.key]);
      }
      const CliConfig cfg = sub->config_path.empty()
                                ? resolve_config(sub->command, json::object(), flags)
                                : load_config(sub->config_path, sub->command, flags);
      return run(cfg, err);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace spdemove::cli
