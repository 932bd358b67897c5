#pragma once

#include <functional>

namespace robin::quad {

/// Fixed 32-point Gauss-Legendre rule on [a, b].
double gauss_legendre32(const std::function<double(double)>& f, double a, double b);

/// Composite Gauss-Legendre: `panels` equal panels with 32 nodes each.
double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels);

/// Globally adaptive Gauss-Kronrod integration; throws QuadratureFailure when the
/// estimated error stays above `tol` (absolute).
double adaptive(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace robin::quad
