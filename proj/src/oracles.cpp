#include "robin/oracles.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "robin/error.hpp"
#include "robin/quadrature.hpp"

namespace robin::oracles {

namespace {

void require_negative(double alpha, const char* who) {
  if (!(alpha <= 0.0) || !std::isfinite(alpha)) {
    throw NoRoot(std::string(who) + ": no negative eigenvalue for alpha >= 0");
  }
}

/// Bisection for f(k) = 0 on the wide bracket [1e-12, |alpha| + 10 + 10/ell].
TranscendentalRoot bisect(const std::function<double(double)>& f, double alpha, double ell, const char* who) {
  TranscendentalRoot r;
  if (alpha == 0.0) return r;
  double lo = 1e-12;
  double hi = std::abs(alpha) + 10.0 + 10.0 / ell;
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo < 0.0 && fhi > 0.0)) throw NoRoot(std::string(who) + ": bracket has no sign change");
  r.k_lo = lo;
  r.k_hi = hi;
  for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = std::midpoint(lo, hi);
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  r.k = std::midpoint(lo, hi);
  r.lambda = -r.k * r.k;
  r.residual = std::abs(f(r.k));
  return r;
}

}  // namespace

double halfline_quotient(double alpha, double T, int panels) {
  if (!(alpha < 0.0)) throw InvalidParameter("halfline_quotient: alpha must be negative");
  if (!(T > 0.0)) throw InvalidParameter("halfline_quotient: T must be positive");
  const double tail = std::exp(alpha * T);
  auto f = [&](double t) { return std::exp(alpha * t) - tail; };
  auto df2 = [&](double t) {
    const double d = alpha * std::exp(alpha * t);
    return d * d;
  };
  auto f2 = [&](double t) {
    const double v = f(t);
    return v * v;
  };
  const double num = quad::composite_gauss(df2, 0.0, T, panels) + alpha * f(0.0) * f(0.0);
  return num / quad::composite_gauss(f2, 0.0, T, panels);
}

TranscendentalRoot interval_robin_neumann_root(double ell, double alpha) {
  if (!(ell > 0.0)) throw InvalidParameter("interval length must be positive");
  require_negative(alpha, "interval_robin_neumann");
  return bisect([&](double k) { return k * std::tanh(k * ell) + alpha; }, alpha, ell, "interval_robin_neumann");
}

double interval_robin_neumann(double ell, double alpha) { return interval_robin_neumann_root(ell, alpha).lambda; }

TranscendentalRoot interval_robin_robin_root(double ell, double alpha) {
  if (!(ell > 0.0)) throw InvalidParameter("interval length must be positive");
  require_negative(alpha, "interval_robin_robin");
  return bisect([&](double k) { return k * std::tanh(0.5 * k * ell) + alpha; }, alpha, ell, "interval_robin_robin");
}

double interval_robin_robin(double ell, double alpha) { return interval_robin_robin_root(ell, alpha).lambda; }

namespace {

constexpr double kSeriesLimit = 30.0;

double bessel_series_scaled(int nu, double x) {
  const double q = 0.25 * x * x;
  double term = nu == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum * std::exp(-x);
}

double bessel_asymptotic_scaled(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    if (std::abs(term) > std::abs(prev)) break;
    sum += term;
    prev = term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * 3.14159265358979323846 * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
  if (x < 0.0) throw InvalidParameter("bessel argument must be non-negative");
  return x <= kSeriesLimit ? bessel_series_scaled(0, x) : bessel_asymptotic_scaled(0, x);
}

double bessel_i1_scaled(double x) {
  if (x < 0.0) throw InvalidParameter("bessel argument must be non-negative");
  return x <= kSeriesLimit ? bessel_series_scaled(1, x) : bessel_asymptotic_scaled(1, x);
}

TranscendentalRoot disk_robin_root(double R, double alpha) {
  if (!(R > 0.0)) throw InvalidParameter("disk radius must be positive");
  require_negative(alpha, "disk_robin");
  auto f = [&](double k) { return k * bessel_i1_scaled(k * R) / bessel_i0_scaled(k * R) + alpha; };
  return bisect(f, alpha, R, "disk_robin");
}

double disk_robin(double R, double alpha) { return disk_robin_root(R, alpha).lambda; }

double sector_quotient(double theta, double alpha, double T, int panels) {
  if (!(theta > 0.0 && theta < 0.5 * geometry::kPi)) throw InvalidParameter("theta must lie in (0, pi/2)");
  if (!(alpha < 0.0)) throw InvalidParameter("sector_quotient: alpha must be negative");
  if (!(T > 0.0)) throw InvalidParameter("sector_quotient: T must be positive");
  const double beta = -alpha / std::sin(theta);
  const double tn = std::tan(theta);
  // v^2 = exp(2 beta y); cross-section width 2|y| tan(theta); two sides of length dy / cos(theta).
  auto mass = [&](double y) { return 2.0 * std::abs(y) * tn * std::exp(2.0 * beta * y); };
  auto side = [&](double y) { return 2.0 * std::exp(2.0 * beta * y) / std::cos(theta); };
  const double m = quad::composite_gauss(mass, -T, 0.0, panels);
  const double s = quad::composite_gauss(side, -T, 0.0, panels);
  return (beta * beta * m + alpha * s) / m;
}

namespace {

double smooth_pos(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double smooth_pos_d(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

double cutoff(double t) {
  const double s = 4.0 * (t + 0.75);
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = smooth_pos(s);
  const double b = smooth_pos(1.0 - s);
  return a / (a + b);
}

double cutoff_derivative(double t) {
  const double s = 4.0 * (t + 0.75);
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double a = smooth_pos(s);
  const double b = smooth_pos(1.0 - s);
  const double da = smooth_pos_d(s);
  const double db = -smooth_pos_d(1.0 - s);
  return 4.0 * (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

double block_trial_quotient(const geometry::SectorBlockParams& params, double alpha) {
  params.validate();
  if (!(alpha < 0.0)) throw InvalidParameter("block_trial_quotient: alpha must be negative");
  const auto profile = geometry::mollified_profile(params);
  const double L = params.L;
  const double beta = -alpha / std::sin(params.theta);
  const double y_low = 0.25 * L;
  const double y_mid = 0.5 * L;

  auto g = [&](double y) { return std::exp(beta * (y - L)) * cutoff((y - L) / L); };
  auto dg = [&](double y) {
    const double e = std::exp(beta * (y - L));
    return beta * e * cutoff((y - L) / L) + e * cutoff_derivative((y - L) / L) / L;
  };
  auto inner = [&](const std::function<double(double)>& f, double top) {
    if (top <= y_low) return 0.0;
    if (top <= y_mid) return quad::composite_gauss(f, y_low, top, 8);
    return quad::composite_gauss(f, y_low, y_mid, 8) + quad::composite_gauss(f, y_mid, top, 8);
  };
  auto g2 = [&](double y) {
    const double v = g(y);
    return v * v;
  };
  auto dg2 = [&](double y) {
    const double v = dg(y);
    return v * v;
  };

  // Support in x: h(x) > L/4, found by bisection (h decreases in |x|).
  double lo = 0.0;
  double hi = params.half_support();
  for (int it = 0; it < 200; ++it) {
    const double mid = std::midpoint(lo, hi);
    (profile->value(mid) > y_low ? lo : hi) = mid;
  }
  const double x_max = hi;

  auto mass_x = [&](double x) { return inner(g2, profile->value(x)); };
  auto grad_x = [&](double x) { return inner(dg2, profile->value(x)); };
  auto trace_x = [&](double x) {
    const double h = profile->value(x);
    const double dh = profile->slope(x);
    const double v = h > y_low ? g(h) : 0.0;
    return v * v * std::sqrt(1.0 + dh * dh);
  };
  auto outer = [&](const std::function<double(double)>& f) {
    const double split = std::min(params.eps, x_max);
    double s = quad::composite_gauss(f, 0.0, split, 8);
    if (x_max > split) s += quad::composite_gauss(f, split, x_max, 48);
    return 2.0 * s;
  };
  const double mass = outer(mass_x);
  const double num = outer(grad_x) + alpha * outer(trace_x);
  return num / mass;
}

double slicing_lower_bound(double fibre, double alpha, double lip) {
  if (!(lip >= 0.0)) throw InvalidParameter("lip must be >= 0");
  return interval_robin_neumann(fibre, alpha * std::sqrt(1.0 + lip * lip));
}

}  // namespace robin::oracles
