#include "erasure3d/series.hpp"

#include <cmath>

#include "erasure3d/errors.hpp"

namespace erasure3d {

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw ConfigError("zeta requires s > 1");
  // Direct sum to N-1, then Euler-Maclaurin tail with Bernoulli corrections.
  constexpr int N = 32;
  double sum = 0.0;
  for (int i = 1; i < N; ++i) sum += std::pow(static_cast<double>(i), -s);
  const double n = N;
  const double ns = std::pow(n, -s);
  sum += n * ns / (s - 1.0) + 0.5 * ns;
  // B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
  static constexpr double kBernoulli[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0,
                                          -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0};
  double rising = s;  // s (s+1) ... (s + 2k - 2)
  double factorial = 2.0;
  double power = ns / n;
  for (int k = 1; k <= 6; ++k) {
    sum += kBernoulli[k - 1] / factorial * rising * power;
    rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    power /= n * n;
  }
  return sum;
}

double K_alpha(double alpha) {
  if (!(alpha > 3.0)) throw ConfigError("K_alpha requires alpha > 3");
  return 12.0 * riemann_zeta(alpha - 2.0) + 24.0 * riemann_zeta(alpha - 1.0) +
         13.0 * riemann_zeta(alpha);
}

}  // namespace erasure3d
