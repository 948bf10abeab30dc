#pragma once

#include <cmath>
#include <functional>

#include "bnbp/errors.hpp"

namespace bnbp::detail {

inline double simpson(const std::function<double(double)>& f, double a,
                      double fa, double b, double fb, double& fm) {
  double m = 0.5 * (a + b);
  fm = f(m);
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double fa, double b, double fb,
                                   double fm, double whole, double tol,
                                   int depth) {
  double m = 0.5 * (a + b);
  double fml, fmr;
  double left = simpson(f, a, fa, m, fm, fml);
  double right = simpson(f, m, fm, b, fb, fmr);
  double delta = left + right - whole;
  if (depth <= 0) {
    if (std::abs(delta) > 1e3 * tol)
      throw numeric_error("adaptive quadrature: recursion limit reached");
    return left + right + delta / 15.0;
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, fml, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, fmr, right, 0.5 * tol,
                              depth - 1);
}

// plain adaptive Simpson with an absolute tolerance
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol,
                               int max_depth = 48) {
  if (!(b > a)) return 0.0;
  double fa = f(a), fb = f(b), fm;
  double whole = simpson(f, a, fa, b, fb, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, fm, whole, tol, max_depth);
}

// relative-tolerance wrapper: one coarse pass to scale the tolerance
inline double adaptive_simpson_rel(const std::function<double(double)>& f,
                                   double a, double b, double rel_tol) {
  double fa = f(a), fb = f(b), fm;
  double coarse = simpson(f, a, fa, b, fb, fm);
  double scale = std::abs(coarse);
  if (scale == 0.0) scale = 1.0;
  return adaptive_simpson(f, a, b, rel_tol * scale);
}

}  // namespace bnbp::detail
