#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "erasure3d/geometry.hpp"

namespace erasure3d {

enum class DensityMode { extended, dense };

std::string_view to_string(DensityMode mode);
DensityMode parse_density_mode(std::string_view text);

/// Shape and seed of a random network: n nodes in an
/// n^lambda x n^mu x n^nu cuboid (extended) or its unit-volume rescaling
/// (dense).
struct NetworkConfig {
  std::size_t n = 1;
  double lambda = 1.0 / 3.0;
  double mu = 1.0 / 3.0;
  double nu = 1.0 / 3.0;
  DensityMode mode = DensityMode::extended;
  std::uint64_t seed = 0;
  /// Accept nu == 0 (constant-height slab). Outside the proven regime.
  bool allow_flat = false;

  /// Throws ConfigError when the exponents do not sum to one or are not
  /// positive (nu == 0 is accepted only with allow_flat).
  void validate() const;

  bool flat() const { return nu == 0.0; }

  /// n^{1/3}: multiplier from dense coordinates to effective distance.
  double dense_scale() const;

  /// Cuboid side lengths in effective (unit node density) coordinates.
  std::array<double, 3> effective_extent() const;

  /// Side lengths in the coordinates positions are stored in.
  std::array<double, 3> extent() const;
};

/// Node coordinates plus the source -> destination permutation. Immutable
/// after generation.
struct NetworkInstance {
  NetworkConfig config;
  std::vector<Point> positions;
  /// pairing[s] is the destination of source s.
  std::vector<std::size_t> pairing;

  std::size_t size() const { return positions.size(); }

  /// Coordinates rescaled so that distances are effective distances. In
  /// extended mode this is the identity.
  Point effective_position(std::size_t i) const;
  std::vector<Point> effective_positions() const;
};

NetworkInstance generate(const NetworkConfig& config);

/// Distance fed to the erasure model: d in extended mode, d * n^{1/3} in
/// dense mode.
double effective_distance(double d, const NetworkConfig& config);

}  // namespace erasure3d
