#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bandctl/dirichlet.hpp"
#include "bandctl/potential.hpp"

using namespace bandctl;

namespace {

PeriodicPotential free_window(double length) {
  PeriodicPotential p;
  p.period = length;
  p.segments = {{length, 0.0}};
  return p;
}

}  // namespace

TEST_CASE("free box levels are n^2 on [0, pi]") {
  const auto w = free_window(M_PI);
  for (int n = 1; n <= 6; ++n)
    CHECK(dirichlet_eigenvalue(w, n) ==
          doctest::Approx(double(n) * double(n)).epsilon(1e-10));
}

TEST_CASE("shooting knot count steps at the eigenvalues") {
  const auto w = free_window(M_PI);
  CHECK(count_shooting_knots(w, 0.5) == 0);
  CHECK(count_shooting_knots(w, 2.0) == 1);
  CHECK(count_shooting_knots(w, 8.9) == 2);
  CHECK(count_shooting_knots(w, 9.1) == 3);
  CHECK(count_shooting_knots(w, -4.0) == 0);
}

TEST_CASE("eigenfunctions vanish at both window ends") {
  auto p = make_kronig_penney(M_PI, 1.0, 3.0);
  p = with_extra_spike(p, 1.7, -1.5);
  for (int n : {1, 2, 3}) {
    const double e = dirichlet_eigenvalue(p, n);
    const auto f = dirichlet_eigenfunction(p, e);
    double maxv = 0.0;
    for (int i = 0; i <= 64; ++i)
      maxv = std::max(maxv, std::abs(f.value(M_PI * i / 64.0)));
    CHECK(std::abs(f.value(0.0)) < 1e-9 * maxv);
    CHECK(std::abs(f.value(M_PI)) < 1e-9 * maxv);
    CHECK(f.deriv(0.0) > 0.0);  // sign convention
  }
}

TEST_CASE("free eigenfunctions are unit-norm sines") {
  const auto w = free_window(M_PI);
  const auto f = dirichlet_eigenfunction(w, dirichlet_eigenvalue(w, 2));
  const double amp = std::sqrt(2.0 / M_PI);
  for (double x : {0.3, 1.0, 2.2}) {
    CHECK(f.value(x) == doctest::Approx(amp * std::sin(2 * x)).epsilon(1e-9));
    CHECK(f.deriv(x) == doctest::Approx(2 * amp * std::cos(2 * x)).epsilon(1e-9));
  }
  CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("deep spike well pushes the ground level negative") {
  auto p = free_window(M_PI);
  p.spikes = {{M_PI / 2, -6.0}};
  const double e1 = dirichlet_eigenvalue(p, 1);
  CHECK(e1 < 0.0);
  // Single delta well on the line binds at -v²/4 = -9; walls raise it.
  CHECK(e1 > -9.0);
}

TEST_CASE("interval wave integrals") {
  const auto w = free_window(M_PI);
  SUBCASE("square integral of sin(x)") {
    const IntervalWave s(w, 1.0, 0.0, 0.0, 1.0);  // sin(x)
    for (double x : {0.5, 1.5, 3.0})
      CHECK(s.square_integral(x) ==
            doctest::Approx(0.5 * x - 0.25 * std::sin(2 * x)).epsilon(1e-12));
  }
  SUBCASE("cross integral via the wronskian identity") {
    const IntervalWave s1(w, 1.0, 0.0, 0.0, 1.0);  // sin x
    const IntervalWave s2(w, 4.0, 0.0, 0.0, 1.0);  // sin(2x)/2
    // ∫ sin(y) sin(2y)/2 dy = sin³(x)/3 (by substitution)
    for (double x : {0.4, 1.3, 2.8}) {
      const double want = std::pow(std::sin(x), 3) / 3.0;
      CHECK(s1.cross_integral(s2, x) == doctest::Approx(want).epsilon(1e-10));
    }
  }
  SUBCASE("orthogonality of distinct levels") {
    const auto f1 = dirichlet_eigenfunction(w, 1.0);
    const auto f2 = dirichlet_eigenfunction(w, 4.0);
    CHECK(std::abs(f1.cross_integral(f2, M_PI)) < 1e-10);
  }
  SUBCASE("evanescent pieces keep exact integrals") {
    auto barrier = make_kronig_penney(M_PI, 1.0, 30.0);
    const IntervalWave u(barrier, 2.0, 0.0, 0.0, 1.0);
    // Compare the closed-form cumulative against a trapezoid refinement.
    const double hi = u.square_integral(M_PI);
    double acc = 0.0;
    const int n = 20000;
    double prev = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double x = M_PI * double(i) / n;
      const double v = u.value(x);
      acc += 0.5 * (prev + v * v) * (M_PI / n);
      prev = v * v;
    }
    CHECK(hi == doctest::Approx(acc).epsilon(1e-6));
  }
}

TEST_CASE("anchored construction propagates both directions") {
  const auto w = free_window(M_PI);
  // Odd auxiliary about the midpoint at energy -4: sinh(2(x - π/2)).
  const IntervalWave bar(w, -4.0, M_PI / 2, 0.0, 1.0);
  for (double x : {0.0, 0.7, 2.0, M_PI}) {
    const double want = std::sinh(2.0 * (x - M_PI / 2)) / 2.0;
    CHECK(bar.value(x) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("window with an interior spike") {
  // Comb window shifted by eps: spike inside at period - eps; level 1 sits
  // inside the first gap of the periodic problem.
  const auto comb = make_dirac_comb(M_PI, 4.0);
  const auto window = shift_origin(comb, 0.8);
  const double e1 = dirichlet_eigenvalue(window, 1);
  CHECK(e1 > 1.0);
  CHECK(e1 < 2.4815);
  const auto f = dirichlet_eigenfunction(window, e1);
  // The kink at the spike: psi'(s+) - psi'(s-) = v psi(s).
  const double s = window.spikes[0].position;
  const double jump = f.deriv(s + 1e-9) - f.deriv(s - 1e-9);
  CHECK(jump == doctest::Approx(4.0 * f.value(s)).epsilon(1e-5));
}
