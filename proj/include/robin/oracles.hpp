#pragma once

// Reference values that do not go through the finite-element pipeline: model
// problems on a half-line and an infinite sector, separable and radial domains,
// and the explicit trial-function bound for a single building block.

#include "robin/geometry.hpp"

namespace robin::oracles {

/// Positive root k of a scalar equation, lambda = -k^2.
struct TranscendentalRoot {
  double k = 0.0;
  double lambda = 0.0;
  double k_lo = 0.0;
  double k_hi = 0.0;
  /// |equation(k)| at the returned root.
  double residual = 0.0;
};

/// Rayleigh quotient of f(t) = exp(alpha t) - exp(alpha T) on [0, T] (zero beyond T)
/// for the form int |f'|^2 + alpha |f(0)|^2. Tends to -alpha^2 from above as T grows.
double halfline_quotient(double alpha, double T, int panels = 64);

/// Robin at 0, Neumann at ell: k tanh(k ell) = -alpha.
TranscendentalRoot interval_robin_neumann_root(double ell, double alpha);
double interval_robin_neumann(double ell, double alpha);

/// Robin at both ends, symmetric ground state: k tanh(k ell / 2) = -alpha.
TranscendentalRoot interval_robin_robin_root(double ell, double alpha);
double interval_robin_robin(double ell, double alpha);

/// Lower bound for Robin on the top graph of a subgraph domain whose vertical fibres
/// have length >= fibre and slopes |H'| <= lip, Neumann elsewhere: every fibre is an
/// interval with the boundary weight sqrt(1 + H'^2) folded into alpha.
/// Tends to -(1 + lip^2) alpha^2 as fibre grows.
double slicing_lower_bound(double fibre, double alpha, double lip);

/// Disk of radius R with Robin boundary: k I1(kR) + alpha I0(kR) = 0.
TranscendentalRoot disk_robin_root(double R, double alpha);
double disk_robin(double R, double alpha);

/// Modified Bessel functions scaled by exp(-x), x >= 0.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

/// Quotient of v = exp(-alpha y / sin(theta)) on the sector {|x| < -y tan(theta)}
/// cut at y = -T (Neumann on the cut). Tends to -alpha^2 / sin^2(theta).
double sector_quotient(double theta, double alpha, double T, int panels = 128);

/// Smooth cutoff: 1 for t >= -1/2, 0 for t <= -3/4.
double cutoff(double t);
double cutoff_derivative(double t);

/// Quotient of v_L(x, y) = exp(-alpha (y - L) / sin(theta)) chi((y - L) / L) on the
/// block U_{theta,L,eps,M}, Robin on the top curve. An upper bound for the principal
/// eigenvalue with Dirichlet sides; independent of M.
double block_trial_quotient(const geometry::SectorBlockParams& params, double alpha = -1.0);

}  // namespace robin::oracles
