#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "erasure3d/errors.hpp"
#include "erasure3d/harness.hpp"

using namespace erasure3d;

namespace {

std::vector<std::pair<double, double>> power_law(double a, double b,
                                                 std::initializer_list<double> ns) {
  std::vector<std::pair<double, double>> pts;
  for (double n : ns) pts.emplace_back(n, a * std::pow(n, b));
  return pts;
}

std::size_t count_lines(const std::string& s) {
  std::size_t k = 0;
  for (char c : s) k += c == '\n';
  return k;
}

}  // namespace

TEST_CASE("exponent fits recover synthetic slopes") {
  for (double b : {2.0 / 3, 0.5, 0.0}) {
    const auto f = fit_exponent(power_law(3.0, b, {256, 1024, 4096, 16384}));
    CHECK(f.slope == doctest::Approx(b).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)));
    CHECK(f.std_error == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.points == 4);
  }
  // Scaling all values leaves the slope unchanged.
  auto pts = power_law(1.0, 0.6, {100, 1000, 10000});
  pts[1].second *= 1.3;
  auto scaled = pts;
  for (auto& p : scaled) p.second *= 42.0;
  CHECK(fit_exponent(scaled).slope == doctest::Approx(fit_exponent(pts).slope));
  CHECK(fit_exponent(pts).std_error > 0.0);
  // Two points: exact line, no error estimate.
  CHECK(fit_exponent(power_law(1, 0.7, {10, 100})).std_error == 0.0);
}

TEST_CASE("deflated fit removes a squared-log factor") {
  std::vector<std::pair<double, double>> pts;
  for (double n : {1024.0, 4096.0, 16384.0, 65536.0}) {
    const double l = std::log(n);
    pts.emplace_back(n, std::pow(n, 2.0 / 3) * l * l);
  }
  CHECK(fit_exponent_deflated(pts).slope == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(fit_exponent(pts).slope > 2.0 / 3 + 0.1);
}

TEST_CASE("fits reject degenerate input") {
  CHECK_THROWS_AS(fit_exponent({{100, 1.0}}), ConfigError);
  CHECK_THROWS_AS(fit_exponent({{100, 1.0}, {100, 2.0}}), ConfigError);
  CHECK_THROWS_AS(fit_exponent({{100, 1.0}, {200, 0.0}}), ConfigError);
}

TEST_CASE("size lists and numbers") {
  CHECK(parse_size_list("4096") == std::vector<std::size_t>{4096});
  CHECK(parse_size_list("2^12,2^13") == std::vector<std::size_t>{4096, 8192});
  CHECK(parse_size_list("[2^10, 3000]") == std::vector<std::size_t>{1024, 3000});
  CHECK(parse_number("1.5") == 1.5);
  CHECK(parse_number("2^-1") == 0.5);
  CHECK_THROWS_AS(parse_size_list("abc"), ConfigError);
  CHECK_THROWS_AS(parse_size_list("0"), ConfigError);
}

TEST_CASE("configuration files") {
  const auto table = parse_config_text(R"(
# comment
[network]
lambda = 0.5
mu = 0.25
nu = 0.25
[model]
family = "exponential"
gamma = 0.8
[percolation]
c = 1.2
[sweep]
n = [2^10, 2^11]
seeds = 3
mode = bound
)");
  ExperimentSpec spec;
  apply_config(spec, table);
  CHECK(spec.network.lambda == 0.5);
  CHECK(spec.family == DecayFamily::exponential);
  CHECK(spec.gamma == 0.8);
  CHECK(spec.percolation.c == 1.2);
  CHECK(spec.n_list == std::vector<std::size_t>{1024, 2048});
  CHECK(spec.seeds_per_n == 3);
  CHECK(spec.mode == SweepMode::bound);
  spec.validate();

  ExperimentSpec other;
  CHECK_THROWS_AS(apply_config(other, parse_config_text("[model]\nbeta = 2\n")), ConfigError);
  CHECK_THROWS_AS(apply_config(other, parse_config_text("[extra]\na = 1\n")), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model\n"), ConfigError);
}

TEST_CASE("invalid experiments are rejected") {
  ExperimentSpec spec;
  spec.alpha = 2.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.network.lambda = 0.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = {};
  spec.seeds_per_n = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK_THROWS_AS(parse_sweep_mode("fast"), ConfigError);
}

TEST_CASE("bound sweep produces one row per trial and metadata") {
  ExperimentSpec spec;
  spec.mode = SweepMode::bound;
  spec.family = DecayFamily::exponential;
  spec.n_list = {512, 1024};
  spec.seeds_per_n = 2;
  const auto r = run_sweep(spec);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].n == 512);
  CHECK(r.rows[1].seed == r.rows[0].seed + 1);
  REQUIRE(r.bound_fit);
  CHECK(r.bound_fit->points == 2);
  std::ostringstream csv;
  write_csv(csv, spec, r);
  const auto text = csv.str();
  CHECK(count_lines(text) == 1 + 4 + 1);
  CHECK(text.rfind("n,seed,mode,throughput", 0) == 0);
  const auto meta_at = text.rfind("# ");
  const auto meta = Json::parse(text.substr(meta_at + 2));
  CHECK(meta["config_hash"].get<std::string>().size() == 16);
  CHECK(meta["tool"] == "erasure3d");
  std::ostringstream jl;
  write_jsonl(jl, spec, r);
  CHECK(count_lines(jl.str()) == 5);
}

TEST_CASE("sweeps are reproducible and independent of worker count") {
  ExperimentSpec spec;
  spec.n_list = {512, 1000};
  spec.seeds_per_n = 2;
  spec.network.seed = 5;
  const auto a = run_sweep(spec);
  spec.jobs = 3;
  const auto b = run_sweep(spec);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].seed == b.rows[i].seed);
    CHECK(a.rows[i].throughput == b.rows[i].throughput);
    CHECK(a.rows[i].report.dump() == b.rows[i].report.dump());
  }
  CHECK(a.dominance_violations == 0);
  ExperimentSpec changed = spec;
  changed.gamma = 0.71;
  changed.family = DecayFamily::exponential;
  CHECK(changed.hash() != spec.hash());
  spec.jobs = 1;
  CHECK(spec.hash() == ExperimentSpec(spec).hash());
}

TEST_CASE("other sweep modes") {
  ExperimentSpec spec;
  spec.n_list = {1000};
  spec.mode = SweepMode::percolation_stats;
  auto r = run_trial(spec, 1000, 1);
  CHECK(r.throughput >= 0.0);
  CHECK(r.report.contains("lemma1_bound"));
  spec.mode = SweepMode::binning_stats;
  r = run_trial(spec, 1000, 1);
  CHECK(r.failed >= 0);
  CHECK(r.failed < 8);
  spec.mode = SweepMode::constants;
  r = run_trial(spec, 1000, 1);
  CHECK(r.report.dump().find("K_alpha") != std::string::npos);
}
