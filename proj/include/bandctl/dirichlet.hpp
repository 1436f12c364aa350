#pragma once

#include <memory>
#include <vector>

#include "bandctl/potential.hpp"

namespace bandctl {

// A solution of -psi'' + V psi = E psi on the window [0, L] (the potential's
// one period read as a finite interval). Values, derivatives and integrals
// evaluate in closed form span by span for piecewise-constant potentials;
// overlay regions carry a dense integrated cache with quintic Hermite
// interpolation between nodes.
class IntervalWave {
 public:
  IntervalWave() = default;

  // Propagate from a state (psi, dpsi) given at x = anchor (any point of the
  // window); the wave is then defined on all of [0, L].
  IntervalWave(const PeriodicPotential& window, double energy, double anchor,
               double psi, double dpsi);

  double energy() const { return energy_; }
  double length() const { return length_; }

  double value(double x) const;
  double deriv(double x) const;
  void value_deriv(double x, double& v, double& d) const;

  // Cumulative ∫_0^x psi(y)² dy.
  double square_integral(double x) const;
  double norm() const;

  // Multiply the amplitude by s.
  void scale(double s);
  // Scale to unit L² norm; keeps the sign of psi'(0).
  void normalize();

  // ∫_0^x psi(y) other(y) dy. Uses the exact Wronskian identity when the
  // energies differ, composite quadrature otherwise.
  double cross_integral(const IntervalWave& other, double x) const;

 private:
  struct Span {
    double lo = 0.0, hi = 0.0;
    double height = 0.0;
    bool overlay = false;
    double psi = 0.0, dpsi = 0.0;  // state at lo
    double cum = 0.0;              // ∫_0^lo psi²
    // Dense nodes through overlay spans: positions, states, cumulative ∫psi².
    std::vector<double> nx, npsi, ndpsi, ncum;
  };

  const Span& span_at(double x) const;
  double vfun(double x, const Span& s) const;

  double energy_ = 0.0;
  double length_ = 0.0;
  std::shared_ptr<const PeriodicPotential> window_;
  std::vector<Span> spans_;
  double total_square_ = 0.0;
};

// Number of interior zeros of the shooting solution (psi(0) = 0, psi'(0) = 1)
// on (0, L]; a step function of E that jumps exactly at Dirichlet eigenvalues.
int count_shooting_knots(const PeriodicPotential& window, double energy);

// n-th Dirichlet eigenvalue (1-based) of the window, refined to xtol.
double dirichlet_eigenvalue(const PeriodicPotential& window, int n,
                            double xtol = 1e-10);

std::vector<double> dirichlet_eigenvalues(const PeriodicPotential& window,
                                          int n_levels, double xtol = 1e-10);

// Unit-norm eigenfunction at the (already refined) eigenvalue, with the sign
// convention psi'(0) > 0.
IntervalWave dirichlet_eigenfunction(const PeriodicPotential& window,
                                     double eigenvalue);

}  // namespace bandctl
