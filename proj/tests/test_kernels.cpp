#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bandctl/kernels.hpp"
#include "bandctl/propagator.hpp"

using namespace bandctl;
using kernels::Cell;

namespace {

// Random cell programs covering oscillatory, evanescent and near-degenerate
// segments plus spikes of both signs.
kernels::CompiledPotential random_program(std::mt19937& rng) {
  std::uniform_real_distribution<double> uw(0.05, 1.2);
  std::uniform_real_distribution<double> uh(-6.0, 6.0);
  std::uniform_real_distribution<double> uv(-5.0, 5.0);
  std::uniform_int_distribution<int> ncells(1, 7);
  std::uniform_int_distribution<int> kind(0, 3);

  kernels::CompiledPotential cp;
  const int n = ncells(rng);
  for (int i = 0; i < n; ++i) {
    if (kind(rng) == 0)
      cp.cells.push_back({Cell::Kind::spike, 0.0, 0.0, uv(rng)});
    else
      cp.cells.push_back({Cell::Kind::segment, uw(rng), uh(rng), 0.0});
  }
  if (cp.cells.empty())
    cp.cells.push_back({Cell::Kind::segment, 1.0, 0.0, 0.0});
  double period = 0.0;
  for (const auto& c : cp.cells) period += c.width;
  cp.period = std::max(period, 0.05);
  return cp;
}

}  // namespace

TEST_CASE("kernel variants agree with the scalar reference") {
  std::mt19937 rng(20250810);
  std::uniform_real_distribution<double> ue(-8.0, 40.0);

  for (const auto& variant : kernels::variants()) {
    CAPTURE(variant.name);
    for (int trial = 0; trial < 60; ++trial) {
      const auto cp = random_program(rng);
      std::vector<double> es(37);
      for (auto& e : es) e = ue(rng);
      // Exercise the E == height corner in some lanes.
      es[3] = cp.cells.front().kind == Cell::Kind::segment
                  ? cp.cells.front().height
                  : 0.0;
      es[11] = es[3] + 1e-13;

      const size_t n = es.size();
      std::vector<double> r11(n), r12(n), r21(n), r22(n), ht(n);
      std::vector<double> s11(n), s12(n), s21(n), s22(n), sht(n);
      kernels::monodromy_batch_scalar(cp.cells.data(), cp.cells.size(),
                                      es.data(), n, s11.data(), s12.data(),
                                      s21.data(), s22.data());
      kernels::half_trace_batch_scalar(cp.cells.data(), cp.cells.size(),
                                       es.data(), n, sht.data());
      variant.monodromy_batch(cp.cells.data(), cp.cells.size(), es.data(), n,
                              r11.data(), r12.data(), r21.data(), r22.data());
      variant.half_trace_batch(cp.cells.data(), cp.cells.size(), es.data(), n,
                               ht.data());
      for (size_t i = 0; i < n; ++i) {
        const double scale =
            std::max({1.0, std::abs(s11[i]), std::abs(s12[i]), std::abs(s21[i]),
                      std::abs(s22[i])});
        CHECK(std::abs(r11[i] - s11[i]) <= 1e-12 * scale);
        CHECK(std::abs(r12[i] - s12[i]) <= 1e-12 * scale);
        CHECK(std::abs(r21[i] - s21[i]) <= 1e-12 * scale);
        CHECK(std::abs(r22[i] - s22[i]) <= 1e-12 * scale);
        CHECK(std::abs(ht[i] - sht[i]) <= 1e-12 * scale);
        CHECK(std::abs(ht[i] - 0.5 * (r11[i] + r22[i])) <= 1e-13 * scale);
      }
    }
  }
}

TEST_CASE("batch monodromy conserves the wronskian") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ue(-10.0, 60.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cp = random_program(rng);
    std::vector<double> es(16);
    for (auto& e : es) e = ue(rng);
    std::vector<double> m11(16), m12(16), m21(16), m22(16);
    kernels::monodromy_batch(cp, es.data(), es.size(), m11.data(), m12.data(),
                             m21.data(), m22.data());
    for (size_t i = 0; i < es.size(); ++i) {
      const double det = m11[i] * m22[i] - m12[i] * m21[i];
      const double scale = std::max(
          {1.0, m11[i] * m11[i], m12[i] * m21[i], m22[i] * m22[i]});
      CHECK(std::abs(det - 1.0) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("compiled cells match the transfer-matrix walk") {
  const auto p = [] {
    auto q = make_kronig_penney(M_PI, M_PI / 3, 4.0);
    return with_extra_spike(q, 1.1, -2.0);
  }();
  const auto cp = kernels::compile(p);
  for (double e : {-3.0, -0.5, 0.1, 2.0, 4.0, 9.7, 33.0}) {
    double m11, m12, m21, m22;
    kernels::monodromy_batch(cp, &e, 1, &m11, &m12, &m21, &m22);
    const TransferMatrix m = monodromy(p, e);
    CHECK(m11 == doctest::Approx(m.m11).epsilon(1e-12));
    CHECK(m12 == doctest::Approx(m.m12).epsilon(1e-12));
    CHECK(m21 == doctest::Approx(m.m21).epsilon(1e-12));
    CHECK(m22 == doctest::Approx(m.m22).epsilon(1e-12));
  }
}

TEST_CASE("overlay potentials refuse to compile") {
  PeriodicPotential p;
  p.period = 1.0;
  p.segments = {{1.0, 0.0}};
  SampledOverlay ov;
  ov.grid_step = 0.5;
  ov.values = {0.0, 1.0, 0.0};
  p.overlay = ov;
  CHECK_THROWS_AS(kernels::compile(p), Error);
}

TEST_CASE("variant selection") {
  const auto& vs = kernels::variants();
  REQUIRE(!vs.empty());
  CHECK(std::string(vs.front().name) == "scalar");
  const std::string before = kernels::active().name;
  kernels::set_active("scalar");
  CHECK(std::string(kernels::active().name) == "scalar");
  CHECK_THROWS_AS(kernels::set_active("no-such-kernel"), Error);
  kernels::set_active(before);
}
