#include "erasure3d/netgen.hpp"

#include <cmath>
#include <numeric>

#include "erasure3d/errors.hpp"
#include "erasure3d/rng.hpp"

namespace erasure3d {

std::string_view to_string(DensityMode mode) {
  return mode == DensityMode::dense ? "dense" : "extended";
}

DensityMode parse_density_mode(std::string_view text) {
  if (text == "extended") return DensityMode::extended;
  if (text == "dense") return DensityMode::dense;
  throw ConfigError("unknown density mode '" + std::string(text) + "'");
}

void NetworkConfig::validate() const {
  if (n == 0) throw ConfigError("node count must be positive");
  if (!std::isfinite(lambda) || !std::isfinite(mu) || !std::isfinite(nu))
    throw ConfigError("exponents must be finite");
  if (std::abs(lambda + mu + nu - 1.0) > 1e-12)
    throw ConfigError("exponents must sum to 1");
  if (lambda <= 0.0 || mu <= 0.0)
    throw ConfigError("lambda and mu must be positive");
  if (nu < 0.0 || (nu == 0.0 && !allow_flat))
    throw ConfigError("nu must be positive (nu = 0 requires the flat flag)");
}

double NetworkConfig::dense_scale() const {
  return std::cbrt(static_cast<double>(n));
}

std::array<double, 3> NetworkConfig::effective_extent() const {
  const double nn = static_cast<double>(n);
  return {std::pow(nn, lambda), std::pow(nn, mu), std::pow(nn, nu)};
}

std::array<double, 3> NetworkConfig::extent() const {
  auto e = effective_extent();
  if (mode == DensityMode::dense) {
    const double s = dense_scale();
    for (auto& v : e) v /= s;
  }
  return e;
}

Point NetworkInstance::effective_position(std::size_t i) const {
  const Point& p = positions[i];
  if (config.mode == DensityMode::extended) return p;
  const double s = config.dense_scale();
  return {p.x * s, p.y * s, p.z * s};
}

std::vector<Point> NetworkInstance::effective_positions() const {
  std::vector<Point> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    out[i] = effective_position(i);
  return out;
}

NetworkInstance generate(const NetworkConfig& config) {
  config.validate();
  NetworkInstance inst;
  inst.config = config;

  // Draw in effective coordinates, then rescale, so that a dense instance
  // and an extended instance with the same seed describe the same geometry.
  Rng placement(mix_seed(config.seed, 0));
  const auto ext = config.effective_extent();
  const double shrink =
      config.mode == DensityMode::dense ? 1.0 / config.dense_scale() : 1.0;
  inst.positions.resize(config.n);
  for (auto& p : inst.positions) {
    p.x = placement.uniform() * ext[0] * shrink;
    p.y = placement.uniform() * ext[1] * shrink;
    p.z = placement.uniform() * ext[2] * shrink;
  }

  Rng pairing(mix_seed(config.seed, 1));
  inst.pairing.resize(config.n);
  std::iota(inst.pairing.begin(), inst.pairing.end(), std::size_t{0});
  for (std::size_t i = config.n; i > 1; --i) {
    const std::size_t j = pairing.below(i);
    std::swap(inst.pairing[i - 1], inst.pairing[j]);
  }
  return inst;
}

double effective_distance(double d, const NetworkConfig& config) {
  return config.mode == DensityMode::dense ? d * config.dense_scale() : d;
}

}  // namespace erasure3d
