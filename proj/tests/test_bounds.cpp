#include <doctest.h>

#include <cmath>

#include "erasure3d/bounds.hpp"
#include "erasure3d/errors.hpp"
#include "erasure3d/routing.hpp"
#include "oracles.hpp"

using namespace erasure3d;

namespace {

NetworkInstance hand_placed(std::vector<Point> pos, std::vector<std::size_t> pairing) {
  NetworkInstance inst;
  inst.config.n = pos.size();
  inst.positions = std::move(pos);
  inst.pairing = std::move(pairing);
  return inst;
}

/// Direct long double evaluation of the cut-set sum along x.
long double cutset_oracle(const NetworkInstance& inst, const ErasureModel& model) {
  const long double plane = inst.config.effective_extent()[0] / 2.0L;
  std::vector<std::size_t> S;
  std::vector<std::size_t> D;
  for (std::size_t s = 0; s < inst.size(); ++s) {
    const auto t = inst.pairing[s];
    if (inst.positions[s].x < plane && inst.positions[t].x >= plane) {
      S.push_back(s);
      D.push_back(t);
    }
  }
  long double total = 0.0L;
  for (auto s : S) {
    long double prod = 1.0L;
    for (auto t : D) {
      const long double dx = inst.positions[s].x - inst.positions[t].x;
      const long double dy = inst.positions[s].y - inst.positions[t].y;
      const long double dz = inst.positions[s].z - inst.positions[t].z;
      const long double d = std::sqrt(dx * dx + dy * dy + dz * dz);
      long double eps;
      if (model.family() == DecayFamily::exponential)
        eps = 1.0L - std::pow(static_cast<long double>(model.gamma()), d);
      else
        eps = d <= 1.0L ? 0.0L : 1.0L - std::pow(d, -static_cast<long double>(model.alpha()));
      prod *= eps;
    }
    total += 1.0L - prod;
  }
  return total;
}

}  // namespace

TEST_CASE("single crossing pair contributes its success probability") {
  const auto inst = hand_placed({{0.1, 0.5, 0.5}, {1.1, 0.5, 0.5}}, {1, 0});
  const auto model = ErasureModel::exponential(0.6);
  CHECK(cutset_bound(inst, model, Axis::x) == doctest::Approx(0.6));
  const auto same = hand_placed({{0.6, 0.5, 0.5}, {0.6, 0.5, 0.5}}, {0, 1});
  CHECK(cutset_bound(same, model, Axis::x) == 0.0);
  CHECK(cutset_bound(hand_placed({{0.1, 0.1, 0.1}, {1.2, 0.1, 0.1}}, {1, 0}),
                     ErasureModel::polynomial(4.0), Axis::x) ==
        doctest::Approx(std::pow(1.1, -4.0)));
}

TEST_CASE("coincident source and destination give a unit bound") {
  // Source left of the plane, destination on the plane at distance 0.
  const double plane = std::cbrt(2.0) / 2.0;
  auto inst = hand_placed({{plane, 0.5, 0.5}, {plane, 0.5, 0.5}}, {1, 0});
  inst.positions[0].x = std::nextafter(plane, 0.0);
  CHECK(cutset_bound(inst, ErasureModel::exponential(0.3), Axis::x) ==
        doctest::Approx(1.0));
}

TEST_CASE("empty cut sides give a zero bound") {
  const auto inst = hand_placed({{0.1, 0.5, 0.5}, {0.2, 0.5, 0.5}}, {1, 0});
  CHECK(cutset_bound(inst, ErasureModel::exponential(0.5), Axis::x) == 0.0);
  const auto p = cutset_bound_partitioned(inst, ErasureModel::exponential(0.5), Axis::x);
  CHECK(p.total() == 0.0);
}

TEST_CASE("log-domain cut-set evaluation matches a high-precision oracle") {
  const std::vector<std::vector<Point>> fixtures{
      {{0.2, 0.3, 0.4}, {0.5, 1.4, 0.1}, {1.3, 0.2, 1.5}, {0.9, 0.8, 0.7}},
      {{0.05, 1.5, 1.5}, {0.7, 0.05, 0.05}, {1.5, 1.5, 0.05}, {1.0, 0.4, 1.2}},
      {{0.3, 0.3, 0.3}, {0.4, 0.3, 0.3}, {1.2, 0.3, 0.3}, {1.25, 0.35, 0.3}}};
  const std::vector<std::vector<std::size_t>> pairings{{2, 3, 0, 1}, {3, 2, 1, 0}, {2, 3, 1, 0}};
  for (const auto& model : {ErasureModel::polynomial(4.0), ErasureModel::exponential(0.7),
                            ErasureModel::exponential(0.01)}) {
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
      const auto inst = hand_placed(fixtures[f], pairings[f]);
      const double got = cutset_bound(inst, model, Axis::x);
      const long double want = cutset_oracle(inst, model);
      if (want == 0.0L) {
        CHECK(got == 0.0);
      } else {
        CHECK(std::abs(got - want) / want < 1e-9);
      }
    }
  }
}

TEST_CASE("partition terms in the extreme cases") {
  const auto model = ErasureModel::exponential(0.5);
  // Destination far from the plane (extent of n=2 is ~1.26; use n=64).
  std::vector<Point> pos(64, Point{0.1, 0.1, 0.1});
  std::vector<std::size_t> pairing(64);
  for (std::size_t i = 0; i < 64; ++i) pairing[i] = i;
  pos[1] = {3.9, 0.1, 0.1};
  std::swap(pairing[0], pairing[1]);
  auto far = hand_placed(pos, pairing);
  auto p = cutset_bound_partitioned(far, model, Axis::x);
  CHECK(p.near_term == 0.0);
  CHECK(p.far_term == doctest::Approx(std::pow(0.5, 3.8)));
  pos[1] = {2.1, 0.1, 0.1};
  auto near = hand_placed(pos, pairing);
  p = cutset_bound_partitioned(near, model, Axis::x);
  CHECK(p.near_term == 1.0);
  CHECK(p.far_term == 0.0);
  const auto cp = cut_partition(near, Axis::x);
  CHECK(cp.sources == std::vector<std::size_t>{0});
  CHECK(cp.dest_near == std::vector<std::size_t>{1});
  CHECK(cp.dest_far.empty());
}

TEST_CASE("partitioned bound relaxes the exact bound") {
  const auto model = ErasureModel::exponential(0.7);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    NetworkConfig cfg;
    cfg.n = 2048;
    cfg.seed = seed;
    const auto inst = generate(cfg);
    for (Axis a : {Axis::x, Axis::y, Axis::z}) {
      const double exact = cutset_bound(inst, model, a);
      const auto part = cutset_bound_partitioned(inst, model, a);
      CHECK(exact <= part.total() * (1 + 1e-12));
      const auto cp = cut_partition(inst, a);
      CHECK(part.near_term == doctest::Approx(double(cp.dest_near.size())));
    }
    const auto r = evaluate_bounds(inst, model);
    CHECK(r.min_bound == std::min({r.T_x, r.T_y, r.T_z}));
    const auto seq = evaluate_bounds(inst, model, false);
    CHECK(seq.T_x == r.T_x);
    CHECK(seq.T_z == r.T_z);
  }
}

TEST_CASE("node displacement never decreases the far term") {
  for (const auto& model : {ErasureModel::exponential(0.7), ErasureModel::polynomial(4.0)}) {
    for (std::size_t n : {64, 216, 512}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        NetworkConfig cfg;
        cfg.n = n;
        cfg.seed = seed;
        const auto inst = generate(cfg);
        for (Axis a : {Axis::x, Axis::y, Axis::z}) {
          const double before = cutset_bound_partitioned(inst, model, a).far_term;
          CHECK(displaced_far_term(inst, model, a) >= before * (1 - 1e-12));
        }
      }
    }
  }
}

TEST_CASE("regular series stays below its cap") {
  for (double g : {0.3, 0.5, 0.9}) {
    for (int h : {2, 5, 8}) {
      for (int m : {1, 4, 16}) {
        const auto b = regular_series_bound_exponential(g, h, m, m);
        CHECK(b.finite_sum <= b.cap);
        CHECK(b.finite_sum > 0.0);
      }
    }
  }
  const auto a = regular_series_bound_exponential(0.5, 4, 4, 4);
  const auto b = regular_series_bound_exponential(0.5, 4, 8, 4);
  CHECK(b.cap == doctest::Approx(2.0 * a.cap));
  CHECK(regular_series_bound_exponential(1e-12, 4, 4, 4).cap < 1e-9);
  for (int m : {2, 4, 8}) {
    const auto p = regular_series_bound_polynomial(4.0, m, m, m);
    CHECK(p.finite_sum <= p.cap);
  }
  CHECK_THROWS_AS(regular_series_bound_polynomial(3.0, 2, 2, 2), ConfigError);
  CHECK_THROWS_AS(regular_series_bound_exponential(1.0, 2, 2, 2), ConfigError);
}

TEST_CASE("interference closed forms") {
  CHECK(interference_bound_exponential(2, 1, 3, 0.5) ==
        doctest::Approx(26.0 * (1.0 / 16) * (17.0 / 16) / std::pow(15.0 / 16, 3)));
  CHECK(interference_bound_polynomial(2, 1, 3, 4) == doctest::Approx(0.5911).epsilon(1e-4));
  CHECK(interference_bound_polynomial(2, 1, 3000, 4) < 1e-11);
  CHECK(interference_bound_exponential(50, 1, 3, 0.5) < 1e-50);
  CHECK_THROWS_AS(interference_bound_exponential(1, 1, 3, 0.5), ConfigError);
  CHECK_THROWS_AS(interference_bound_polynomial(1, 1, 3, 4), ConfigError);
  CHECK_THROWS_AS(interference_bound_polynomial(2, 1, 3, 3), ConfigError);
  const auto poly = ErasureModel::polynomial(4.0);
  for (double d : {1.0, 5.0, 9.0}) {
    CHECK(interference_bound(poly, tdma_k_polynomial(1.5, d, 4.0), 1.5, d) < 1.0);
  }
}

TEST_CASE("Monte Carlo interference estimate respects the closed form") {
  const auto e = ErasureModel::exponential(0.7);
  const double k = tdma_k_exponential(1.5, 2.0, 0.7);
  const auto mc = interference_monte_carlo(e, k, 1.5, 2.0, 20000, 5);
  CHECK(mc.draws == 20000);
  CHECK(mc.estimate >= 0.0);
  CHECK(mc.estimate - 3 * mc.std_error <= interference_bound(e, k, 1.5, 2.0));
  const auto p = ErasureModel::polynomial(5.0);
  const double kp = tdma_k_polynomial(1.0, 3.0, 5.0);
  const auto mp = interference_monte_carlo(p, kp, 1.0, 3.0, 20000, 6);
  CHECK(mp.estimate - 3 * mp.std_error <= interference_bound(p, kp, 1.0, 3.0));
  // Same seed, same estimate.
  CHECK(interference_monte_carlo(p, kp, 1.0, 3.0, 1000, 9).estimate ==
        interference_monte_carlo(p, kp, 1.0, 3.0, 1000, 9).estimate);
}

TEST_CASE("theoretical exponents") {
  CHECK(theoretical_exponent(1.0 / 3, 1.0 / 3, 1.0 / 3) == doctest::Approx(2.0 / 3));
  CHECK(theoretical_exponent(0.5, 0.5, 0.0) == doctest::Approx(0.5));
  CHECK(theoretical_exponent(0.5, 0.3, 0.2) == doctest::Approx(0.5));
}

TEST_CASE("binning checks") {
  NetworkConfig one;
  one.n = 1;
  const auto single = generate(one);
  for (auto g : {BinGranularity::subcube, BinGranularity::slab_cuboid, BinGranularity::unit_cube}) {
    const auto r = binning_check(single, g, 1.5, 0);
    CHECK(r.max_occupancy <= 1);
    CHECK(r.holds);
    CHECK(parse_bin_granularity(to_string(g)) == g);
  }
  NetworkConfig cfg;
  cfg.n = 4096;
  cfg.seed = 11;
  const auto inst = generate(cfg);
  const auto u = binning_check(inst, BinGranularity::unit_cube, 1.5, 0);
  CHECK(u.threshold == doctest::Approx(std::log(4096.0)));
  CHECK(u.bins == 4096);
  const auto s = binning_check(inst, BinGranularity::slab_cuboid, 1.5, 0);
  CHECK(s.threshold == doctest::Approx(2 * 1.5 * 1.5 * 16.0));
  CHECK(s.holds);
  CHECK_THROWS_AS(parse_bin_granularity("voxel"), ConfigError);
}
