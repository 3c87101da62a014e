#pragma once

namespace erasure3d {

/// Riemann zeta for s > 1 (Euler-Maclaurin; relative error below 1e-13).
double riemann_zeta(double s);

/// sum_{i>=1} 12/i^{alpha-2} + 24/i^{alpha-1} + 13/i^alpha. Requires
/// alpha > 3.
double K_alpha(double alpha);

}  // namespace erasure3d
