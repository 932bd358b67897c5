#include "robin/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

#include "robin/error.hpp"

namespace robin::quad {

double gauss_legendre32(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 32>::integrate(f, a, b);
}

double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 1) throw InvalidParameter("composite_gauss: panels must be >= 1");
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == panels) ? b : lo + width;
    sum += gauss_legendre32(f, lo, hi);
  }
  return sum;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 5, 1e-15, &err);
  if (!(err <= tol) || !std::isfinite(value)) {
    throw QuadratureFailure("adaptive quadrature did not reach tolerance (estimate " +
                            std::to_string(err) + ")");
  }
  return value;
}

}  // namespace robin::quad
