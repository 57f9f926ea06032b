#include "spdemove/model.hpp"

#include <cmath>
#include <sstream>

#include "spdemove/errors.hpp"

namespace spdemove {

void ModelParams::validate() const {
  std::ostringstream bad;
  if (!(theta > 0.0) || !std::isfinite(theta)) bad << " theta must be positive;";
  if (!(beta > 0.0) || !std::isfinite(beta)) bad << " beta must be positive;";
  if (!(sigma > 0.0) || !std::isfinite(sigma)) bad << " sigma must be positive;";
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) bad << " gamma must be nonnegative;";
  if (!bad.str().empty()) throw ValidationError("invalid model parameters:" + bad.str());
}

TimeGrid::TimeGrid(double t_final, double dt) : t_final_(t_final), dt_(dt), n_steps_(0) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw ValidationError("t_final must be positive and finite");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
  if (dt > t_final) throw ValidationError("dt must not exceed t_final");
  const double steps = std::round(t_final / dt);
  if (std::abs(steps * dt - t_final) > 1e-12 * t_final) {
    std::ostringstream os;
    os.precision(17);
    os << "dt = " << dt << " does not divide t_final = " << t_final;
    throw ValidationError(os.str());
  }
  n_steps_ = static_cast<std::size_t>(steps);
}

std::string_view to_string(Scheme s) { return s == Scheme::exact ? "exact" : "euler"; }

Scheme parse_scheme(std::string_view s) {
  if (s == "exact") return Scheme::exact;
  if (s == "euler" || s == "milstein") return Scheme::euler;
  throw ValidationError("unknown scheme '" + std::string(s) + "' (expected exact or euler)");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

NoiseStream::NoiseStream(std::uint64_t state_seed) : engine_(state_seed) {}

NoiseStream NoiseStream::substream(std::uint64_t seed, std::uint64_t replication,
                                   std::uint64_t mode) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(replication + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(mode + 0x8cb92ba72f3d8dd7ULL));
  return NoiseStream(h);
}

}  // namespace spdemove
