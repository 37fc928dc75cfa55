#include "qdesign/golden.hpp"

#include <cmath>

namespace qdesign {

GoldenResult golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                     double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenResult out;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  out.evaluations = 2;
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++out.evaluations;
  }
  out.x = 0.5 * (a + b);
  out.fx = f(out.x);
  ++out.evaluations;
  if (fc < out.fx) {
    out.x = c;
    out.fx = fc;
  }
  if (fd < out.fx) {
    out.x = d;
    out.fx = fd;
  }
  return out;
}

}  // namespace qdesign
