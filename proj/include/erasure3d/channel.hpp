#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "erasure3d/rng.hpp"

namespace erasure3d {

enum class DecayFamily { exponential, polynomial };

std::string_view to_string(DecayFamily family);
DecayFamily parse_decay_family(std::string_view text);

/// Distance-dependent erasure law. Distances passed in are effective
/// distances (already rescaled in dense mode).
class ErasureModel {
 public:
  /// eps(d) = 1 - gamma^d, 0 < gamma < 1.
  static ErasureModel exponential(double gamma);
  /// eps(d) = max(0, 1 - d^-alpha), alpha > 0.
  static ErasureModel polynomial(double alpha);

  DecayFamily family() const { return family_; }
  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  /// Critical distance -1/ln(gamma); infinity for the polynomial family.
  double d_star() const { return d_star_; }

  /// True for polynomial models with alpha <= 3, where neither the TDMA
  /// construction nor the cut-set series converge.
  bool outside_proven_regime() const {
    return family_ == DecayFamily::polynomial && alpha_ <= 3.0;
  }

  /// 1 - eps(d): probability a symbol sent over distance d is not erased.
  double success(double d) const {
    if (family_ == DecayFamily::exponential) return std::exp(d * log_gamma_);
    if (d <= 1.0) return 1.0;
    return alpha_ == 4.0 ? 1.0 / ((d * d) * (d * d)) : std::pow(d, -alpha_);
  }

  /// Same as success(d) but from the squared distance; avoids the sqrt for
  /// the common integer alpha = 4 case.
  double success_sq(double d2) const {
    if (family_ == DecayFamily::polynomial && alpha_ == 4.0)
      return d2 <= 1.0 ? 1.0 : 1.0 / (d2 * d2);
    return success(std::sqrt(d2));
  }

  double erasure(double d) const { return 1.0 - success(d); }

  /// ln eps(d), computed without cancellation; -inf when eps = 0.
  double log_erasure(double d) const;

  std::string describe() const;

 private:
  ErasureModel() = default;
  DecayFamily family_ = DecayFamily::exponential;
  double gamma_ = 0.5;
  double alpha_ = 0.0;
  double log_gamma_ = 0.0;
  double d_star_ = std::numeric_limits<double>::infinity();
};

/// ln(1 - exp(x)) for x <= 0, accurate at both ends.
double log1mexp(double x);

double erasure_probability(double d, const ErasureModel& model);

/// (1 - eps_intended) * prod eps_interferer, evaluated in the log domain.
/// The distances of interferers are measured to the intended receiver.
double success_probability(double intended_distance,
                           std::span<const double> interferer_distances,
                           const ErasureModel& model);

/// Finite-field additive interference decoding rule with fresh Bernoulli
/// draws: succeeds iff the intended symbol survives and every interfering
/// symbol is erased. Draws stop at the first deciding outcome.
bool decode_success(double intended_distance,
                    std::span<const double> interferer_distances,
                    const ErasureModel& model, Rng& rng);

/// Number of slot attempts until the first success (geometric, mean
/// 1/success_prob). Throws StalledLinkError when success_prob == 0.
std::uint64_t arq_attempts(double success_prob, Rng& rng);

}  // namespace erasure3d
