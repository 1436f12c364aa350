#include "bandctl/numeric.hpp"

#include <algorithm>

namespace bandctl {

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double xtol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  require(fa * fb < 0.0, errc::root_bracketing, "brent_root: no sign change in bracket");

  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * 2.22e-16 * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;

    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = m; e = m;
    } else {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = m; e = m;
      }
    }
    a = b; fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = b - a; e = d;
    }
  }
  return b;
}

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double fa, double xtol) {
  if (fa == 0.0) return a;
  while (b - a > xtol) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // reached representable resolution
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m; fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double golden_minimize(const std::function<double(double)>& f, double a,
                       double b, double xtol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  const size_t n = std::min(x.size(), y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  const double den = double(n) * sxx - sx * sx;
  if (den == 0.0) return {n ? sy / double(n) : 0.0, 0.0};
  const double c1 = (double(n) * sxy - sx * sy) / den;
  const double c0 = (sy - c1 * sx) / double(n);
  return {c0, c1};
}

double parabola_peak(double x0, double y0, double x1, double y1, double x2,
                     double y2) {
  const double d1 = (x1 - x0) * (y1 - y2);
  const double d2 = (x1 - x2) * (y1 - y0);
  const double num = (x1 - x0) * d1 - (x1 - x2) * d2;
  const double den = 2.0 * (d1 - d2);
  if (den == 0.0) return x1;
  return x1 - num / den;
}

}  // namespace bandctl
