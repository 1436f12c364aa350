#include "bandctl/potential.hpp"

#include <algorithm>
#include <cmath>

namespace bandctl {

namespace {
constexpr double kWidthSumTol = 1e-12;
}

double SampledOverlay::operator()(double x) const {
  if (values.size() < 2 || grid_step <= 0.0) return values.empty() ? 0.0 : values.front();
  const double t = x / grid_step;
  auto n = double(values.size() - 1);
  if (t <= 0.0) return values.front();
  if (t >= n) return values.back();
  const auto i = size_t(t);
  const double f = t - double(i);
  return values[i] * (1.0 - f) + values[i + 1] * f;
}

double PeriodicPotential::wrap(double x) const {
  double y = std::fmod(x, period);
  if (y < 0.0) y += period;
  // fmod can return exactly `period` after the negative fixup when x is a
  // tiny negative number.
  if (y >= period) y -= period;
  return y;
}

double PeriodicPotential::height_at_local(double x) const {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < segments.size(); ++i) {
    acc += segments[i].width;
    if (x < acc) return segments[i].height;
  }
  return segments.empty() ? 0.0 : segments.back().height;
}

double PeriodicPotential::overlay_at_local(double x) const {
  if (overlay_fn) return overlay_fn(x);
  if (overlay) return (*overlay)(x);
  return 0.0;
}

double PeriodicPotential::evaluate(double x) const {
  const double y = wrap(x);
  double v = height_at_local(y);
  if (has_overlay()) v += overlay_at_local(y);
  return v;
}

std::vector<double> PeriodicPotential::segment_boundaries() const {
  std::vector<double> b;
  b.reserve(segments.size() + 1);
  b.push_back(0.0);
  double acc = 0.0;
  for (size_t i = 0; i < segments.size(); ++i) {
    acc += segments[i].width;
    b.push_back(i + 1 == segments.size() ? period : acc);
  }
  return b;
}

double PeriodicPotential::min_height() const {
  double m = segments.empty() ? 0.0 : segments.front().height;
  for (const auto& s : segments) m = std::min(m, s.height);
  return m;
}

double PeriodicPotential::max_height() const {
  double m = segments.empty() ? 0.0 : segments.front().height;
  for (const auto& s : segments) m = std::max(m, s.height);
  return m;
}

double PeriodicPotential::max_abs_spike() const {
  double m = 0.0;
  for (const auto& s : spikes) m = std::max(m, std::abs(s.strength));
  return m;
}

void PeriodicPotential::validate() const {
  require(period > 0.0 && std::isfinite(period), errc::validation,
          "potential period must be positive and finite");
  require(!segments.empty(), errc::validation, "potential needs at least one segment");
  double sum = 0.0;
  for (const auto& s : segments) {
    require(s.width > 0.0, errc::validation, "segment width must be positive");
    require(std::isfinite(s.height), errc::validation, "segment height must be finite");
    sum += s.width;
  }
  require(std::abs(sum - period) <= kWidthSumTol * std::max(1.0, period),
          errc::validation, "segment widths must sum to the period");
  double prev = -1.0;
  for (const auto& s : spikes) {
    require(s.position >= 0.0 && s.position < period, errc::validation,
            "spike position must lie in [0, period)");
    require(std::isfinite(s.strength), errc::validation, "spike strength must be finite");
    require(s.position >= prev, errc::validation, "spikes must be sorted by position");
    prev = s.position;
  }
  if (overlay) {
    require(overlay->values.size() >= 2 && overlay->grid_step > 0.0, errc::validation,
            "sampled overlay needs a positive grid step and at least two values");
    require(std::abs(overlay->span() - period) <= 1e-9 * std::max(1.0, period),
            errc::validation, "sampled overlay must span exactly one period");
  }
}

PeriodicPotential make_kronig_penney(double period, double barrier_width,
                                     double barrier_height) {
  require(period > 0.0, errc::validation, "period must be positive");
  require(barrier_width > 0.0 && barrier_width < period, errc::validation,
          "barrier width must satisfy 0 < width < period");
  PeriodicPotential p;
  p.period = period;
  p.segments = {{period - barrier_width, 0.0}, {barrier_width, barrier_height}};
  p.validate();
  return p;
}

PeriodicPotential make_dirac_comb(double period, double strength) {
  require(period > 0.0, errc::validation, "period must be positive");
  PeriodicPotential p;
  p.period = period;
  p.segments = {{period, 0.0}};
  p.spikes = {{0.0, strength}};
  p.validate();
  return p;
}

PeriodicPotential shift_origin(const PeriodicPotential& p, double eps) {
  p.validate();
  require(eps >= 0.0 && eps < p.period, errc::validation,
          "origin shift must lie in [0, period)");
  if (eps == 0.0) return p;

  PeriodicPotential q;
  q.period = p.period;

  // Split the segment list at x = eps and rotate: [eps, a) then [0, eps).
  const auto bounds = p.segment_boundaries();
  std::vector<Segment> tail, head;
  for (size_t i = 0; i < p.segments.size(); ++i) {
    const double lo = bounds[i], hi = bounds[i + 1];
    if (hi <= eps) {
      head.push_back({hi - lo, p.segments[i].height});
    } else if (lo >= eps) {
      tail.push_back({hi - lo, p.segments[i].height});
    } else {
      tail.insert(tail.begin(), {hi - eps, p.segments[i].height});
      head.push_back({eps - lo, p.segments[i].height});
    }
  }
  q.segments = tail;
  q.segments.insert(q.segments.end(), head.begin(), head.end());
  // Re-anchor the final width so the sum stays exact under roundoff.
  double acc = 0.0;
  for (size_t i = 0; i + 1 < q.segments.size(); ++i) acc += q.segments[i].width;
  q.segments.back().width = q.period - acc;

  for (const auto& s : p.spikes) {
    double pos = s.position - eps;
    if (pos < 0.0) pos += p.period;
    q.spikes.push_back({pos, s.strength});
  }
  std::sort(q.spikes.begin(), q.spikes.end(),
            [](const DeltaSpike& a, const DeltaSpike& b) { return a.position < b.position; });

  if (p.has_overlay()) {
    const size_t n = p.overlay ? p.overlay->values.size() - 1 : 2048;
    SampledOverlay ov;
    ov.grid_step = p.period / double(n);
    ov.values.resize(n + 1);
    for (size_t i = 0; i <= n; ++i) {
      const double x = double(i) * ov.grid_step;
      ov.values[i] = p.overlay_at_local(p.wrap(x + eps));
    }
    q.overlay = std::move(ov);
    if (p.overlay_fn) {
      auto base = p;  // capture by value; potentials are immutable in use
      q.overlay_fn = [base, eps](double x) {
        return base.overlay_at_local(base.wrap(x + eps));
      };
    }
  }
  q.validate();
  return q;
}

PeriodicPotential with_constant_offset(const PeriodicPotential& p, double c) {
  PeriodicPotential q = p;
  for (auto& s : q.segments) s.height += c;
  return q;
}

PeriodicPotential with_extra_spike(const PeriodicPotential& p, double position,
                                   double strength) {
  PeriodicPotential q = p;
  q.spikes.push_back({q.wrap(position), strength});
  std::sort(q.spikes.begin(), q.spikes.end(),
            [](const DeltaSpike& a, const DeltaSpike& b) { return a.position < b.position; });
  q.validate();
  return q;
}

}  // namespace bandctl
