#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "erasure3d/channel.hpp"
#include "erasure3d/geometry.hpp"
#include "erasure3d/netgen.hpp"

namespace erasure3d {

/// Sources on the low side of the mid-plane whose destinations lie on the
/// high side, and those destinations split into the unit-width slab next to
/// the plane (near) and the rest (far). Coordinates are effective.
struct CutPartition {
  Axis axis = Axis::x;
  double plane = 0.0;
  std::vector<std::size_t> sources;
  std::vector<std::size_t> dest_near;
  std::vector<std::size_t> dest_far;
};

CutPartition cut_partition(const NetworkInstance& instance, Axis axis);

/// Sum over cut sources of 1 - prod over cut destinations of eps. Zero when
/// either side is empty.
double cutset_bound(const NetworkInstance& instance, const ErasureModel& model, Axis axis);

/// Same sum for explicit sources/destinations (effective coordinates).
double cutset_sum(const std::vector<Point>& sources, const std::vector<Point>& destinations,
                  const ErasureModel& model);

struct PartitionedBound {
  /// One unit per near destination.
  double near_term = 0.0;
  /// Sum over sources and far destinations of 1 - eps.
  double far_term = 0.0;
  double total() const { return near_term + far_term; }
};

PartitionedBound cutset_bound_partitioned(const NetworkInstance& instance,
                                          const ErasureModel& model, Axis axis);

/// Far term after moving every node along the cut normal onto the nearest
/// unit-grid face (grid anchored at the cut plane) on the side facing the
/// plane. Distances only shrink, so the value never drops below the
/// original far term.
double displaced_far_term(const NetworkInstance& instance, const ErasureModel& model, Axis axis);

struct BoundReport {
  double T_x = 0.0;
  double T_y = 0.0;
  double T_z = 0.0;
  double min_bound = 0.0;
  Axis min_axis = Axis::x;
  /// Partitioned terms for the minimizing axis.
  double near_term = 0.0;
  double far_term = 0.0;
};

/// Exact bounds on all three mid-planes (evaluated concurrently when
/// `parallel`), plus the partitioned terms of the tightest one.
BoundReport evaluate_bounds(const NetworkInstance& instance, const ErasureModel& model,
                            bool parallel = true);

struct SeriesBound {
  double finite_sum = 0.0;
  double cap = 0.0;
};

/// Shell-count constant: lattice points at sup-distance s on the far side
/// of the cut are at most a1 (3s^2 + 3s + 1).
inline constexpr double kShellConstant = 4.0;

/// Unit-spaced regular network with half-length n_lambda_half along the
/// cut normal and n_mu x n_nu across: sum of gamma^distance over all
/// left/right pairs, and the geometric-series cap, linear in n_mu n_nu.
SeriesBound regular_series_bound_exponential(double gamma, int n_lambda_half, int n_mu,
                                             int n_nu);

/// Same for d^-alpha. The cap includes the grid-dependent ratio between the
/// exact inner sums and their separable surrogate. Requires alpha > 3.
SeriesBound regular_series_bound_polynomial(double alpha, int n_lambda_half, int n_mu,
                                            int n_nu);

/// 26x(1+x)/(1-x)^3 with x = gamma^{(k-1)c(d+1)}; requires x < 1.
double interference_bound_exponential(double k, double c, double d, double gamma);

/// 2(13 + K_alpha)/((k-1)c(d+1))^alpha; requires k > 1, alpha > 3.
double interference_bound_polynomial(double k, double c, double d, double alpha);

double interference_bound(const ErasureModel& model, double k, double c, double d);

struct InterferenceEstimate {
  /// Mean over draws of the probability that some interferer within the
  /// sampled layers survives, plus the union-bound tail of outer layers.
  double estimate = 0.0;
  double std_error = 0.0;
  double tail = 0.0;
  std::size_t draws = 0;
};

/// Monte Carlo estimate of the interference probability for a receiver
/// within hop d of a transmitter whose co-slot transmitters sit on a grid
/// of spacing k(d+1) subcubes, each jittered inside its subcube.
InterferenceEstimate interference_monte_carlo(const ErasureModel& model, double k, double c,
                                              double d, std::size_t draws, std::uint64_t seed,
                                              int layers = 4);

/// min(1 - lambda, 1 - mu, 1 - nu).
double theoretical_exponent(double lambda, double mu, double nu);

enum class BinGranularity { subcube, slab_cuboid, unit_cube };

std::string_view to_string(BinGranularity granularity);
BinGranularity parse_bin_granularity(std::string_view text);

struct BinningReport {
  BinGranularity granularity = BinGranularity::subcube;
  std::size_t bins = 0;
  std::size_t max_occupancy = 0;
  double threshold = 0.0;
  /// max_occupancy <= threshold, or at most one node per bin.
  bool holds = true;
};

/// Maximum bin occupancy against the whp threshold: ln(n^{1/3}/c) per
/// subcube, 2cw n^lambda per n^lambda x c x w cuboid, ln n per unit cube.
/// w = 0 uses w = c.
BinningReport binning_check(const NetworkInstance& instance, BinGranularity granularity,
                            double c, double w);

}  // namespace erasure3d
