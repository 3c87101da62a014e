#include "erasure3d/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <unordered_map>

#include "erasure3d/errors.hpp"
#include "erasure3d/rng.hpp"
#include "erasure3d/series.hpp"

namespace erasure3d {

namespace {

/// ln(1 - u) for u in [0, 1].
double log1m(double u) {
  if (u < 1e-4) return -u * (1.0 + u * (0.5 + u / 3.0));
  return std::log1p(-u);
}

/// Accumulates ln eps over destinations for one source; stops at -inf.
double log_erasure_product(const Point& src, const std::vector<Point>& dst,
                           const ErasureModel& model) {
  double acc = 0.0;
  for (const Point& d : dst) {
    const double u = model.success_sq(squared_distance(src, d));
    if (u >= 1.0) return -std::numeric_limits<double>::infinity();
    acc += log1m(u);
  }
  return acc;
}

std::vector<Point> gather(const NetworkInstance& instance, const std::vector<std::size_t>& idx) {
  std::vector<Point> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(instance.effective_position(i));
  return out;
}

}  // namespace

CutPartition cut_partition(const NetworkInstance& instance, Axis axis) {
  CutPartition part;
  part.axis = axis;
  const int a = axis_index(axis);
  part.plane = instance.config.effective_extent()[a] / 2.0;
  for (std::size_t s = 0; s < instance.size(); ++s) {
    const std::size_t d = instance.pairing[s];
    const double xs = instance.effective_position(s)[a];
    const double xd = instance.effective_position(d)[a];
    if (xs < part.plane && xd >= part.plane) {
      part.sources.push_back(s);
      if (xd < part.plane + 1.0)
        part.dest_near.push_back(d);
      else
        part.dest_far.push_back(d);
    }
  }
  return part;
}

double cutset_sum(const std::vector<Point>& sources, const std::vector<Point>& destinations,
                  const ErasureModel& model) {
  if (sources.empty() || destinations.empty()) return 0.0;
  double total = 0.0;
  for (const Point& s : sources) total += -std::expm1(log_erasure_product(s, destinations, model));
  return total;
}

double cutset_bound(const NetworkInstance& instance, const ErasureModel& model, Axis axis) {
  const CutPartition part = cut_partition(instance, axis);
  std::vector<std::size_t> dests = part.dest_near;
  dests.insert(dests.end(), part.dest_far.begin(), part.dest_far.end());
  return cutset_sum(gather(instance, part.sources), gather(instance, dests), model);
}

namespace {

double far_sum(const std::vector<Point>& sources, const std::vector<Point>& far,
               const ErasureModel& model) {
  double total = 0.0;
  for (const Point& s : sources)
    for (const Point& d : far) total += model.success_sq(squared_distance(s, d));
  return total;
}

}  // namespace

PartitionedBound cutset_bound_partitioned(const NetworkInstance& instance,
                                          const ErasureModel& model, Axis axis) {
  const CutPartition part = cut_partition(instance, axis);
  PartitionedBound out;
  out.near_term = static_cast<double>(part.dest_near.size());
  out.far_term = far_sum(gather(instance, part.sources), gather(instance, part.dest_far), model);
  return out;
}

double displaced_far_term(const NetworkInstance& instance, const ErasureModel& model, Axis axis) {
  const CutPartition part = cut_partition(instance, axis);
  const int a = axis_index(axis);
  auto sources = gather(instance, part.sources);
  auto far = gather(instance, part.dest_far);
  for (Point& p : sources) p[a] = part.plane - std::floor(part.plane - p[a]);
  for (Point& p : far) p[a] = part.plane + std::floor(p[a] - part.plane);
  return far_sum(sources, far, model);
}

BoundReport evaluate_bounds(const NetworkInstance& instance, const ErasureModel& model,
                            bool parallel) {
  BoundReport report;
  const std::array<Axis, 3> axes{Axis::x, Axis::y, Axis::z};
  std::array<double, 3> values{};
  if (parallel) {
    std::array<std::future<double>, 3> jobs;
    for (int i = 0; i < 3; ++i)
      jobs[i] = std::async(std::launch::async,
                           [&, i] { return cutset_bound(instance, model, axes[i]); });
    for (int i = 0; i < 3; ++i) values[i] = jobs[i].get();
  } else {
    for (int i = 0; i < 3; ++i) values[i] = cutset_bound(instance, model, axes[i]);
  }
  report.T_x = values[0];
  report.T_y = values[1];
  report.T_z = values[2];
  const int best = static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());
  report.min_axis = axes[best];
  report.min_bound = values[best];
  const auto part = cutset_bound_partitioned(instance, model, axes[best]);
  report.near_term = part.near_term;
  report.far_term = part.far_term;
  return report;
}

namespace {

/// Pair multiplicities of a sum over (i_l, i_r) in [1, N]^2 by
/// v = i_l + i_r - 1, and over (j_l, j_r) in [1, M]^2 by |j_l - j_r|.
std::vector<double> normal_multiplicity(int N) {
  std::vector<double> m(static_cast<std::size_t>(2 * N), 0.0);
  for (int v = 1; v <= 2 * N - 1; ++v) m[v] = std::min(v, 2 * N - v);
  return m;
}

std::vector<double> transverse_multiplicity(int M) {
  std::vector<double> m(static_cast<std::size_t>(M), 0.0);
  for (int u = 0; u < M; ++u) m[u] = u == 0 ? M : 2.0 * (M - u);
  return m;
}

template <class F>
double regular_sum(int N, int M, int L, F&& term) {
  const auto mv = normal_multiplicity(N);
  const auto mu = transverse_multiplicity(M);
  const auto mw = transverse_multiplicity(L);
  double total = 0.0;
  for (int v = 1; v <= 2 * N - 1; ++v)
    for (int u = 0; u < M; ++u)
      for (int w = 0; w < L; ++w)
        total += mv[v] * mu[u] * mw[w] * term(static_cast<double>(v * v + u * u + w * w));
  return total;
}

void check_grid(int a, int b, int c) {
  if (a < 1 || b < 1 || c < 1) throw ConfigError("regular grid dimensions must be positive");
}

}  // namespace

SeriesBound regular_series_bound_exponential(double gamma, int n_lambda_half, int n_mu,
                                             int n_nu) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  check_grid(n_lambda_half, n_mu, n_nu);
  const double lg = std::log(gamma);
  SeriesBound out;
  out.finite_sum = regular_sum(n_lambda_half, n_mu, n_nu,
                               [lg](double d2) { return std::exp(lg * std::sqrt(d2)); });
  const double a1 = kShellConstant;
  const double a2 = 3.0 * a1, a3 = 6.0 * a1, a4 = 4.0 * a1;
  const double q = 1.0 - gamma;
  const double a5 = a2 / q;
  const double a6 = a3 / (q * q);
  const double a7 = a4 * (1.0 + gamma) / (q * q * q);
  out.cap = static_cast<double>(n_mu) * n_nu *
            (a5 * gamma * (1.0 + gamma) / (q * q * q) + a6 * gamma / (q * q) + a7 * gamma / q);
  return out;
}

namespace {

/// sum_{v>=1} f(v) for a positive decreasing-tail f, summed directly to V
/// and closed with an integral tail (an upper estimate for decreasing f).
template <class F>
double tail_sum(F&& f, int V = 20000) {
  double s = 0.0;
  for (int v = V; v >= 1; --v) s += f(static_cast<double>(v));
  // integral from V to infinity of f, by substitution v = V / t on (0, 1].
  constexpr int kSteps = 64;
  double integral = 0.0;
  for (int i = 0; i < kSteps; ++i) {
    const double t = (i + 0.5) / kSteps;
    integral += f(V / t) * V / (t * t);
  }
  return s + integral / kSteps;
}

}  // namespace

SeriesBound regular_series_bound_polynomial(double alpha, int n_lambda_half, int n_mu,
                                            int n_nu) {
  if (!(alpha > 3.0)) throw ConfigError("regular series bound needs alpha > 3");
  check_grid(n_lambda_half, n_mu, n_nu);
  SeriesBound out;
  out.finite_sum = regular_sum(n_lambda_half, n_mu, n_nu, [alpha](double d2) {
    return d2 <= 1.0 ? 1.0 : std::pow(d2, -alpha / 2.0);
  });
  // Ratio of the exact shell sums to the separable surrogate, maximized over
  // the rows present in the grid.
  double rho = 1.0;
  for (int i = 1; i <= n_lambda_half; ++i) {
    const double r = i;
    const double exact = tail_sum([&](double v) {
      return (3 * r * r + 6 * r * v + 4 * v * v) * std::pow(r + v - 1.0, -alpha);
    });
    const double separable = 3.0 * std::pow(r, 2.0 - alpha) * riemann_zeta(alpha) +
                             6.0 * std::pow(r, 1.0 - alpha) * riemann_zeta(alpha - 1.0) +
                             4.0 * std::pow(r, -alpha) * riemann_zeta(alpha - 2.0);
    rho = std::max(rho, exact / separable);
  }
  const double a1 = kShellConstant;
  const double z0 = riemann_zeta(alpha), z1 = riemann_zeta(alpha - 1.0),
               z2 = riemann_zeta(alpha - 2.0);
  const double a2 = 3.0 * a1 * rho * z0, a3 = 6.0 * a1 * rho * z1, a4 = 4.0 * a1 * rho * z2;
  out.cap = static_cast<double>(n_mu) * n_nu * (a2 * z2 + a3 * z1 + a4 * z0);
  return out;
}

double interference_bound_exponential(double k, double c, double d, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  const double x = std::pow(gamma, (k - 1.0) * c * (d + 1.0));
  if (!(x < 1.0)) throw ConfigError("interference bound needs x < 1 (k > 1)");
  const double q = 1.0 - x;
  return 26.0 * x * (1.0 + x) / (q * q * q);
}

double interference_bound_polynomial(double k, double c, double d, double alpha) {
  if (!(k > 1.0)) throw ConfigError("interference bound needs k > 1");
  if (!(alpha > 3.0)) throw ConfigError("interference bound needs alpha > 3");
  return 2.0 * (13.0 + K_alpha(alpha)) / std::pow((k - 1.0) * c * (d + 1.0), alpha);
}

double interference_bound(const ErasureModel& model, double k, double c, double d) {
  return model.family() == DecayFamily::exponential
             ? interference_bound_exponential(k, c, d, model.gamma())
             : interference_bound_polynomial(k, c, d, model.alpha());
}

InterferenceEstimate interference_monte_carlo(const ErasureModel& model, double k, double c,
                                              double d, std::size_t draws, std::uint64_t seed,
                                              int layers) {
  if (draws == 0) throw ConfigError("need at least one draw");
  if (layers < 1) throw ConfigError("need at least one layer");
  const double spacing = k * (d + 1.0) * c;
  // Lattice offsets of all co-slot transmitters in layers 1..L.
  std::vector<std::array<int, 3>> offsets;
  for (int a = -layers; a <= layers; ++a)
    for (int b = -layers; b <= layers; ++b)
      for (int e = -layers; e <= layers; ++e)
        if (a != 0 || b != 0 || e != 0) offsets.push_back({a, b, e});

  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < draws; ++t) {
    // The intended transmitter's subcube is [0, c)^3; the receiver lies
    // within hop d (in subcubes) of it.
    Point rx{(rng.uniform() * (2.0 * d + 1.0) - d) * c, (rng.uniform() * (2.0 * d + 1.0) - d) * c,
             (rng.uniform() * (2.0 * d + 1.0) - d) * c};
    double log_all_erased = 0.0;
    for (const auto& o : offsets) {
      Point tx{o[0] * spacing + rng.uniform() * c, o[1] * spacing + rng.uniform() * c,
               o[2] * spacing + rng.uniform() * c};
      const double u = model.success_sq(squared_distance(tx, rx));
      if (u >= 1.0) {
        log_all_erased = -std::numeric_limits<double>::infinity();
        break;
      }
      log_all_erased += log1m(u);
    }
    const double p = -std::expm1(log_all_erased);
    sum += p;
    sum_sq += p * p;
  }
  InterferenceEstimate out;
  out.draws = draws;
  const double mean = sum / draws;
  const double var = std::max(0.0, sum_sq / draws - mean * mean);
  out.std_error = std::sqrt(var / draws);
  // Union bound over layers beyond L: layer i holds 24 i^2 + 2 transmitters,
  // each at distance at least (k i - 1)(d + 1) c from the receiver.
  double tail = 0.0;
  for (int i = layers + 1; i < 100000; ++i) {
    const double dist = (k * i - 1.0) * (d + 1.0) * c;
    const double term = (24.0 * i * i + 2.0) * model.success(std::max(dist, 0.0));
    tail += term;
    if (term < 1e-18 * std::max(tail, 1e-300)) break;
  }
  out.tail = tail;
  out.estimate = mean + tail;
  return out;
}

double theoretical_exponent(double lambda, double mu, double nu) {
  return std::min({1.0 - lambda, 1.0 - mu, 1.0 - nu});
}

std::string_view to_string(BinGranularity granularity) {
  switch (granularity) {
    case BinGranularity::subcube: return "subcube";
    case BinGranularity::slab_cuboid: return "slab_cuboid";
    case BinGranularity::unit_cube: return "unit_cube";
  }
  return "?";
}

BinGranularity parse_bin_granularity(std::string_view text) {
  if (text == "subcube") return BinGranularity::subcube;
  if (text == "slab_cuboid" || text == "cuboid") return BinGranularity::slab_cuboid;
  if (text == "unit_cube" || text == "unit") return BinGranularity::unit_cube;
  throw ConfigError("unknown bin granularity: " + std::string(text));
}

BinningReport binning_check(const NetworkInstance& instance, BinGranularity granularity,
                            double c, double w) {
  BinningReport report;
  report.granularity = granularity;
  const auto ext = instance.config.effective_extent();
  const double n = static_cast<double>(instance.config.n);
  if (w <= 0.0) w = c;
  std::array<double, 3> side{};
  switch (granularity) {
    case BinGranularity::subcube:
      side = {c, c, c};
      report.threshold = std::log(std::cbrt(n) / c);
      break;
    case BinGranularity::slab_cuboid:
      side = {std::max(ext[0], 1e-300), c, w};
      report.threshold = 2.0 * c * w * ext[0];
      break;
    case BinGranularity::unit_cube:
      side = {1.0, 1.0, 1.0};
      report.threshold = std::log(n);
      break;
  }
  std::array<long long, 3> dims{};
  for (int a = 0; a < 3; ++a)
    dims[a] = std::max<long long>(1, static_cast<long long>(std::ceil(ext[a] / side[a] - 1e-9)));
  report.bins = static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
  std::unordered_map<long long, std::size_t> counts;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Point p = instance.effective_position(i);
    std::array<long long, 3> b{};
    for (int a = 0; a < 3; ++a)
      b[a] = std::clamp(static_cast<long long>(std::floor(p[a] / side[a])), 0LL, dims[a] - 1);
    const long long key = (b[0] * dims[1] + b[1]) * dims[2] + b[2];
    report.max_occupancy = std::max(report.max_occupancy, ++counts[key]);
  }
  // A lone node per bin is never a concentration failure, whatever the
  // (possibly sub-unit) threshold at tiny n.
  report.holds = report.max_occupancy <= 1 ||
                 static_cast<double>(report.max_occupancy) <= report.threshold;
  return report;
}

}  // namespace erasure3d
