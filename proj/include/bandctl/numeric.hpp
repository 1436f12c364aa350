#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "bandctl/errors.hpp"

namespace bandctl {

// Brent root finder on a bracketing interval [a, b] with f(a) f(b) <= 0.
// Converges to |interval| <= xtol (plus a floor of a few ulp).
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double xtol);

inline double brent_root(const std::function<double(double)>& f, double a,
                         double b, double xtol) {
  return brent_root(f, a, b, f(a), f(b), xtol);
}

// Plain bisection on a sign change; tolerant of non-smooth f.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double fa, double xtol);

// Golden-section minimizer of f on [a, b] to x-resolution xtol.
double golden_minimize(const std::function<double(double)>& f, double a,
                       double b, double xtol);

// Least-squares line y = c0 + c1 x; returns {c0, c1}.
std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y);

// Vertex abscissa of the parabola through (x0,y0), (x1,y1), (x2,y2); returns
// x1 when the points are collinear.
double parabola_peak(double x0, double y0, double x1, double y1, double x2,
                     double y2);

}  // namespace bandctl
