#include "spdemove/io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "spdemove/errors.hpp"

namespace spdemove::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return {buf, res.ptr};
}

std::string modes_csv(const ModeEnsemble& ens) {
  std::string out = "t,mode,lambda,value\n";
  for (std::size_t i = 0; i < ens.grid.n_points(); ++i) {
    const std::string t = format_double(ens.grid.time(i));
    for (const auto& p : ens.paths) {
      out += t;
      out += ',';
      out += std::to_string(p.mode_index);
      out += ',';
      out += format_double(p.lambda);
      out += ',';
      out += format_double(p.values[i]);
      out += '\n';
    }
  }
  return out;
}

std::string trajectories_csv(const TrajectoryBundle& b) {
  std::string out = "t,value,xi\n";
  for (std::size_t s = 0; s < b.series.size(); ++s) {
    const std::string xi = format_double(b.xi[s]);
    for (std::size_t i = 0; i < b.times.size(); ++i) {
      out += format_double(b.times[i]);
      out += ',';
      out += format_double(b.series[s][i]);
      out += ',';
      out += xi;
      out += '\n';
    }
  }
  return out;
}

std::string replications_csv(const McSummary& s) {
  std::string out = "rep_id,theta_hat,beta_hat,j1,j2,status\n";
  for (const auto& o : s.outcomes) {
    out += std::to_string(o.rep_id);
    if (o.result) {
      for (double v : {o.result->theta_hat, o.result->beta_hat, o.result->j1, o.result->j2}) {
        out += ',';
        out += format_double(v);
      }
    } else {
      out += ",,,,";
    }
    out += ',';
    out += o.status;
    out += '\n';
  }
  return out;
}

std::string sweep_csv(std::span<const SweepPoint> curve) {
  std::string out = "axis_value,median_abs_err_theta,median_abs_err_beta,n_ok\n";
  for (const auto& p : curve) {
    out += format_double(p.value) + ',' + format_double(p.median_abs_err_theta) + ',' +
           format_double(p.median_abs_err_beta) + ',' + std::to_string(p.n_ok) + '\n';
  }
  return out;
}

std::string estimate_csv(const EstimateResult& r) {
  std::string out = "theta_hat,beta_hat,j1,j2,det_factor,r1,r2,fisher_theta\n";
  const double vals[] = {r.theta_hat, r.beta_hat, r.j1, r.j2, r.det_factor, r.r1, r.r2,
                         r.fisher_theta};
  for (std::size_t i = 0; i < std::size(vals); ++i) {
    if (i) out += ',';
    out += format_double(vals[i]);
  }
  out += '\n';
  return out;
}

namespace {

double parse_number(std::string_view field, std::size_t line) {
  std::string s(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ValidationError("modes CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

LoadedModes parse_modes_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,mode,lambda,value", 0) != 0) {
    throw ValidationError("modes CSV must start with header t,mode,lambda,value");
  }
  std::map<std::size_t, ModePath> by_mode;
  std::vector<double> times;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto pos = rest.find(',');
      f.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (f.size() != 4) {
      throw ValidationError("modes CSV line " + std::to_string(lineno) + ": expected 4 fields");
    }
    const double t = parse_number(f[0], lineno);
    const double mode_d = parse_number(f[1], lineno);
    const double lambda = parse_number(f[2], lineno);
    const double value = parse_number(f[3], lineno);
    if (!(mode_d >= 1.0) || mode_d != std::floor(mode_d)) {
      throw ValidationError("modes CSV line " + std::to_string(lineno) + ": bad mode index");
    }
    const auto mode = static_cast<std::size_t>(mode_d);
    auto& p = by_mode[mode];
    if (p.values.empty()) {
      p.mode_index = mode;
      p.lambda = lambda;
    } else if (p.lambda != lambda) {
      throw ValidationError("modes CSV: inconsistent lambda for mode " + std::to_string(mode));
    }
    if (p.values.size() == times.size()) times.push_back(t);
    else if (times[p.values.size()] != t) {
      throw ValidationError("modes CSV: modes are not on a common time grid");
    }
    p.values.push_back(value);
  }
  if (by_mode.empty() || times.size() < 2) {
    throw ValidationError("modes CSV needs at least two time points");
  }
  LoadedModes out;
  for (auto& [k, p] : by_mode) {
    if (p.values.size() != times.size()) {
      throw ValidationError("modes CSV: mode " + std::to_string(k) + " has a short path");
    }
    out.paths.push_back(std::move(p));
  }
  out.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - out.dt) > 1e-9 * std::max(1.0, times.back())) {
      throw ValidationError("modes CSV: time grid is not uniform");
    }
  }
  return out;
}

LoadedModes read_modes_csv(const fs::path& path) { return parse_modes_csv(read_file(path)); }

nlohmann::json to_json(const EstimateResult& r) {
  return {{"theta_hat", r.theta_hat}, {"beta_hat", r.beta_hat},
          {"j1", r.j1},               {"j2", r.j2},
          {"det_factor", r.det_factor}, {"r1", r.r1},
          {"r2", r.r2},               {"fisher_theta", r.fisher_theta}};
}

nlohmann::json to_json(const ParameterSummary& s) {
  return {{"mean", s.mean}, {"quantile_low", s.quantile_low}, {"quantile_high", s.quantile_high}};
}

nlohmann::json to_json(const McSummary& s) {
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& o : s.outcomes) {
    if (!o.result) {
      errors.push_back({{"rep_id", o.rep_id}, {"status", o.status}, {"message", o.message}});
    }
  }
  return {{"seed", s.config.seed},
          {"reps", s.config.reps},
          {"n_ok", s.n_ok},
          {"n_failed", s.n_failed},
          {"theta", to_json(s.theta)},
          {"beta", to_json(s.beta)},
          {"quantile_levels", {0.025, 0.975}},
          {"wall_seconds", s.wall_seconds},
          {"errors", errors}};
}

void OutputTransaction::add(fs::path path, std::string content) {
  files_.emplace_back(std::move(path), std::move(content));
}

void OutputTransaction::commit() {
  static std::atomic<unsigned> counter{0};
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  try {
    for (const auto& [path, content] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      fs::path tmp = path;
      tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
      temps.push_back(tmp);
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
      f << content;
      f.close();
      if (!f) throw std::runtime_error("failed writing " + tmp.string());
    }
    for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(temps[i], files_[i].first);
  } catch (...) {
    cleanup();
    throw;
  }
  files_.clear();
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace spdemove::io
