#include "erasure3d/channel.hpp"

#include <sstream>

#include "erasure3d/errors.hpp"

namespace erasure3d {

std::string_view to_string(DecayFamily family) {
  return family == DecayFamily::exponential ? "exponential" : "polynomial";
}

DecayFamily parse_decay_family(std::string_view text) {
  if (text == "exponential" || text == "exp") return DecayFamily::exponential;
  if (text == "polynomial" || text == "poly") return DecayFamily::polynomial;
  throw ConfigError("unknown erasure model '" + std::string(text) + "'");
}

ErasureModel ErasureModel::exponential(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ConfigError("exponential model requires 0 < gamma < 1");
  ErasureModel m;
  m.family_ = DecayFamily::exponential;
  m.gamma_ = gamma;
  m.log_gamma_ = std::log(gamma);
  m.d_star_ = -1.0 / m.log_gamma_;
  return m;
}

ErasureModel ErasureModel::polynomial(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("polynomial model requires alpha > 0");
  ErasureModel m;
  m.family_ = DecayFamily::polynomial;
  m.alpha_ = alpha;
  return m;
}

double log1mexp(double x) {
  if (x >= 0.0) return -std::numeric_limits<double>::infinity();
  // Maechler's switch point ln 2.
  return x > -0.6931471805599453 ? std::log(-std::expm1(x))
                                 : std::log1p(-std::exp(x));
}

double ErasureModel::log_erasure(double d) const {
  if (family_ == DecayFamily::exponential) return log1mexp(d * log_gamma_);
  if (d <= 1.0) return -std::numeric_limits<double>::infinity();
  return log1mexp(-alpha_ * std::log(d));
}

std::string ErasureModel::describe() const {
  std::ostringstream os;
  if (family_ == DecayFamily::exponential)
    os << "exponential(gamma=" << gamma_ << ")";
  else
    os << "polynomial(alpha=" << alpha_ << ")";
  return os.str();
}

double erasure_probability(double d, const ErasureModel& model) {
  return model.erasure(d);
}

double success_probability(double intended_distance,
                           std::span<const double> interferer_distances,
                           const ErasureModel& model) {
  const double p = model.success(intended_distance);
  if (p <= 0.0) return 0.0;
  double log_sum = std::log(p);
  for (double d : interferer_distances) {
    log_sum += model.log_erasure(d);
    if (log_sum == -std::numeric_limits<double>::infinity()) return 0.0;
  }
  return std::exp(log_sum);
}

bool decode_success(double intended_distance,
                    std::span<const double> interferer_distances,
                    const ErasureModel& model, Rng& rng) {
  if (!rng.bernoulli(model.success(intended_distance))) return false;
  for (double d : interferer_distances)
    if (rng.bernoulli(model.success(d))) return false;
  return true;
}

std::uint64_t arq_attempts(double success_prob, Rng& rng) {
  if (!(success_prob > 0.0))
    throw StalledLinkError("link success probability is zero");
  if (success_prob >= 1.0) return 1;
  // Inversion of the geometric CDF.
  const double u = rng.uniform_open_low();
  return 1 + static_cast<std::uint64_t>(
                 std::floor(std::log(u) / std::log1p(-success_prob)));
}

}  // namespace erasure3d
