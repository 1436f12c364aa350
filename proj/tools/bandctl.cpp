// bandctl: band spectra of 1D periodic potentials and their control --
// scans, gap solutions, envelope beats, auxiliary-window sweeps, single-level
// shifts, weight-factor changes, delta edge shifts, transmission, and the
// coupled-channel models.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bandctl/bands.hpp"
#include "bandctl/channels.hpp"
#include "bandctl/floquet.hpp"
#include "bandctl/io.hpp"
#include "bandctl/kernels.hpp"
#include "bandctl/transform.hpp"

namespace {

using bandctl::io::json;

struct CommonOpts {
  std::string input;
  std::string out;
  double e_min = std::nan("");
  double e_max = std::nan("");
  int grid = 4000;
  int periods = 20;
  int level = 1;
  double shift = 0.0;
  double ratio = 1.0;
  double energy = std::nan("");
  double strength = 0.0;
  std::string placement = "mid-barrier";
  double tol = 1e-10;
};

json config_echo(const std::string& command, const CommonOpts& o) {
  json c;
  c["command"] = command;
  c["input"] = o.input;
  c["out"] = o.out;
  if (!std::isnan(o.e_min)) c["e_min"] = o.e_min;
  if (!std::isnan(o.e_max)) c["e_max"] = o.e_max;
  c["grid"] = o.grid;
  c["periods"] = o.periods;
  c["level"] = o.level;
  c["shift"] = o.shift;
  c["ratio"] = o.ratio;
  if (!std::isnan(o.energy)) c["energy"] = o.energy;
  c["strength"] = o.strength;
  c["placement"] = o.placement;
  c["tol"] = o.tol;
  c["kernel"] = bandctl::kernels::active().name;
  return c;
}

void resolve_range(const bandctl::PeriodicPotential& p, CommonOpts& o,
                   double default_span) {
  if (std::isnan(o.e_min)) o.e_min = bandctl::default_scan_floor(p);
  if (std::isnan(o.e_max)) o.e_max = o.e_min + default_span;
}

int run_bands(CommonOpts& o) {
  const auto p = bandctl::io::load_potential(o.input);
  resolve_range(p, o, 40.0);
  const auto cfg = config_echo("bands", o);
  const auto bs =
      bandctl::scan_bands(p, o.e_min, o.e_max, (o.e_max - o.e_min) / o.grid);

  std::vector<double> es(std::size_t(o.grid) + 1);
  for (int i = 0; i <= o.grid; ++i)
    es[std::size_t(i)] = o.e_min + (o.e_max - o.e_min) * double(i) / o.grid;
  const auto ds = bandctl::discriminant_grid(p, es);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const double ad = std::abs(ds[i]);
    const double imk = ad > 1.0 ? std::acosh(ad) / p.period : 0.0;
    rows.push_back({es[i], ds[i], imk, ad <= 1.0 ? 1.0 : 0.0});
  }
  bandctl::io::write_csv(o.out + "_disc.csv", cfg,
                         {"E", "discriminant", "imK", "in_band"}, rows);

  json body;
  body["table"] = bandctl::io::band_table_json(bs);
  body["warnings"] = bs.warnings;
  bandctl::io::write_json(o.out + "_bands.json", cfg, body);
  return 0;
}

int run_smart(CommonOpts& o) {
  const auto p = bandctl::io::load_potential(o.input);
  bandctl::require(!std::isnan(o.energy), bandctl::errc::validation,
                   "smart needs --energy inside a gap");
  const auto cfg = config_echo("smart", o);
  const auto [grow, decay] = bandctl::smart_pair(p, o.energy);

  const auto dump = [&](const bandctl::FloquetSolution& s, const std::string& tag) {
    const auto tr = bandctl::propagate_trace(p, s.energy, s.init_psi,
                                             s.init_dpsi, o.periods, 128);
    std::vector<std::vector<double>> rows;
    for (const double k : tr.knots)
      rows.push_back({std::floor(k / p.period), k});
    bandctl::io::write_csv(o.out + "_" + tag + "_knots.csv", cfg,
                           {"period_index", "knot_x"}, rows);
  };
  dump(grow, "grow");
  dump(decay, "decay");

  json body;
  body["multiplier_grow"] = grow.multiplier;
  body["multiplier_decay"] = decay.multiplier;
  body["growth_exponent"] = grow.growth_exponent;
  body["knot_lattice_grow"] = grow.knot_lattice;
  body["knot_lattice_decay"] = decay.knot_lattice;
  bandctl::io::write_json(o.out + "_smart.json", cfg, body);
  return 0;
}

int run_beats(CommonOpts& o) {
  const auto p = bandctl::io::load_potential(o.input);
  bandctl::require(!std::isnan(o.energy), bandctl::errc::validation,
                   "beats needs --energy inside a band");
  const auto cfg = config_echo("beats", o);
  const auto bp = bandctl::beat_profile(p, o.energy, o.periods);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < bp.period_amplitude.size(); ++i)
    rows.push_back({double(i), bp.period_amplitude[i]});
  bandctl::io::write_csv(o.out + "_envelope.csv", cfg,
                         {"period_index", "amplitude"}, rows);

  json body;
  body["envelope_maxima"] = bp.envelope_maxima;
  if (bp.beat_length)
    body["beat_length"] = *bp.beat_length;
  else
    body["beat_length"] = nullptr;
  body["knots_per_period"] = bp.knots_per_period;
  body["bloch_beat_length"] = bp.bloch_beat_length;
  bandctl::io::write_json(o.out + "_beats.json", cfg, body);
  return 0;
}

int run_eps_sweep(CommonOpts& o) {
  const auto p = bandctl::io::load_potential(o.input);
  const auto cfg = config_echo("eps-sweep", o);
  const int nsamp = std::min(o.grid, 4096);
  const auto sweep = bandctl::epsilon_sweep(p, o.level, nsamp);

  std::vector<std::vector<double>> rows;
  for (const auto& [eps, e] : sweep.samples) rows.push_back({eps, e});
  bandctl::io::write_csv(o.out + "_sweep.csv", cfg, {"epsilon", "E"}, rows);

  json body;
  body["level"] = sweep.level;
  body["refined_min"] = {{"epsilon", sweep.refined_min.first},
                         {"E", sweep.refined_min.second}};
  body["refined_max"] = {{"epsilon", sweep.refined_max.first},
                         {"E", sweep.refined_max.second}};
  bandctl::io::write_json(o.out + "_sweep.json", cfg, body);
  return 0;
}

int run_susy(CommonOpts& o) {
  bandctl::SusyShiftSpec spec;
  spec.base = bandctl::io::load_potential(o.input);
  spec.level_index = o.level;
  spec.shift = o.shift;
  spec.grid = std::max(64, o.grid == 4000 ? 2048 : o.grid);
  const auto cfg = config_echo("susy", o);
  const auto res = bandctl::susy_shift(spec);
  const auto usable =
      bandctl::susy_usable_shift_interval(spec.base, spec.level_index);

  bandctl::io::write_json(o.out + "_potential.json", cfg,
                          {{"potential",
                            bandctl::io::potential_to_json(res.new_potential)}});
  json diag;
  diag["level_energy"] = res.level_energy;
  diag["target_energy"] = res.target_energy;
  diag["symmetric_base"] = res.diagnostics.symmetric_base;
  diag["theta"] = res.diagnostics.theta;
  diag["usable_shift"] = {{"lo", usable.usable_shift_lo},
                          {"hi", usable.usable_shift_hi},
                          {"lo_open", usable.usable_shift_lo_open},
                          {"hi_open", usable.usable_shift_hi_open}};
  bandctl::io::write_json(o.out + "_diagnostics.json", cfg, diag);
  return 0;
}

int run_swf(CommonOpts& o) {
  bandctl::SwfSpec spec;
  spec.base = bandctl::io::load_potential(o.input);
  spec.level_index = o.level;
  spec.weight_ratio = o.ratio;
  spec.grid = std::max(64, o.grid == 4000 ? 2048 : o.grid);
  const auto cfg = config_echo("swf", o);
  const auto res = bandctl::swf_transform(spec);

  bandctl::io::write_json(o.out + "_potential.json", cfg,
                          {{"potential",
                            bandctl::io::potential_to_json(res.new_potential)}});
  json diag;
  diag["level_energy"] = res.level_energy;
  diag["denominator"] = res.diagnostics.denominator;
  bandctl::io::write_json(o.out + "_diagnostics.json", cfg, diag);
  return 0;
}

int run_delta_edge(CommonOpts& o) {
  const auto p = bandctl::io::load_potential(o.input);
  resolve_range(p, o, 40.0);
  const auto cfg = config_echo("delta-edge", o);
  const auto placement = o.placement == "mid-well"
                             ? bandctl::SpikePlacement::mid_well
                             : bandctl::SpikePlacement::mid_barrier;
  const auto rep =
      bandctl::delta_edge_shift(p, placement, o.strength, o.e_min, o.e_max);

  json body;
  body["before"] = bandctl::io::band_table_json(rep.before);
  body["after"] = bandctl::io::band_table_json(rep.after);
  json moves = json::array();
  for (const auto& m : rep.moves)
    moves.push_back({{"before", m.before_energy},
                     {"after", m.after_energy},
                     {"shift", m.after_energy - m.before_energy}});
  body["edge_moves"] = moves;
  bandctl::io::write_json(o.out + "_delta_edge.json", cfg, body);
  return 0;
}

int run_transmission(CommonOpts& o) {
  const auto p = bandctl::io::load_potential(o.input);
  if (std::isnan(o.e_min) || o.e_min <= 0.0) o.e_min = 1e-3;
  if (std::isnan(o.e_max)) o.e_max = o.e_min + 40.0;
  const auto cfg = config_echo("transmission", o);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= o.grid; ++i) {
    const double e = o.e_min + (o.e_max - o.e_min) * double(i) / o.grid;
    rows.push_back({e, bandctl::transmission(p, e, o.periods)});
  }
  bandctl::io::write_csv(o.out + "_transmission.csv", cfg, {"E", "T"}, rows);
  return 0;
}

bandctl::PeriodicPotential scenario_potential(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    bandctl::PeriodicPotential p;
    p.period = M_PI;
    p.segments = {{M_PI, 0.0}};
    return p;
  }
  if (j.at(key).is_string())
    return bandctl::io::load_potential(j.at(key).get<std::string>());
  return bandctl::io::potential_from_json(j.at(key));
}

int run_channels(CommonOpts& o) {
  std::ifstream in(o.input);
  bandctl::require(bool(in), bandctl::errc::validation,
                   "cannot open scenario: " + o.input);
  json scen;
  try {
    in >> scen;
  } catch (const std::exception& e) {
    bandctl::fail(bandctl::errc::validation,
                  std::string("bad scenario JSON: ") + e.what());
  }
  const auto cfg = config_echo("channels", o);

  bandctl::TwoChannelSystem sys;
  sys.threshold1 = scen.value("threshold1", 0.0);
  sys.threshold2 = scen.value("threshold2", 0.0);
  sys.v11 = scenario_potential(scen, "v11");
  sys.v22 = scen.contains("v22") ? scenario_potential(scen, "v22") : sys.v11;
  const auto coupling = scen.value("coupling", json::object());
  sys.v12 = coupling.value("strength", 0.0);
  sys.coupling = coupling.value("kind", "constant") == std::string("delta")
                     ? bandctl::TwoChannelSystem::Coupling::delta
                     : bandctl::TwoChannelSystem::Coupling::constant;

  const int model = scen.value("model", 1);
  json body;
  body["model"] = model;
  if (model == 1) {
    const auto [plus, minus] = bandctl::decouple_symmetric(sys);
    const double lo = bandctl::default_scan_floor(minus);
    const double hi = scen.value("e_max", lo + 40.0);
    body["effective_plus"] = bandctl::io::potential_to_json(plus);
    body["effective_minus"] = bandctl::io::potential_to_json(minus);
    body["bands_plus"] = bandctl::io::band_table_json(bandctl::scan_bands(plus, lo, hi));
    body["bands_minus"] =
        bandctl::io::band_table_json(bandctl::scan_bands(minus, lo, hi));
  } else if (model == 2) {
    const auto [rp, rm] = bandctl::weight_ratio(
        sys.threshold2 - sys.threshold1, sys.v12);
    body["ratio_plus"] = rp;
    body["ratio_minus"] = rm;
    body["ratio_sum"] = rp + rm;
    body["ratio_product"] = rp * rm;
  } else if (model == 3) {
    const double lo = scen.value("e_lo", sys.threshold1 + 1e-3);
    const double hi = scen.value("e_hi", sys.threshold1 + 2.0);
    const auto sol = bandctl::solve_delta_coupled(sys, lo, hi);
    body["energy"] = sol.energy;
    body["kinetic1"] = sol.kinetic1;
    body["kinetic2"] = sol.kinetic2;
    body["x1"] = sol.x1;
    body["psi1"] = sol.psi1;
    body["x2"] = sol.x2;
    body["psi2"] = sol.psi2;
  } else {
    bandctl::fail(bandctl::errc::validation, "unknown channel model");
  }
  bandctl::io::write_json(o.out + "_channels.json", cfg, body);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"band spectra of 1D periodic potentials and their control"};
  app.require_subcommand(1);

  CommonOpts o;
  const auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input)
      sub->add_option("input", o.input, "potential or scenario JSON")->required();
    sub->add_option("--out", o.out, "output path prefix")->required();
    sub->add_option("--e-min", o.e_min, "scan floor");
    sub->add_option("--e-max", o.e_max, "scan ceiling");
    sub->add_option("--grid", o.grid, "grid points / sweep samples")
        ->check(CLI::Range(8, 2000000));
    sub->add_option("--periods", o.periods, "periods to propagate")
        ->check(CLI::Range(0, 100000));
    sub->add_option("--level", o.level, "level index (1-based)")
        ->check(CLI::Range(1, 1000));
    sub->add_option("--shift", o.shift, "level shift t");
    sub->add_option("--ratio", o.ratio, "weight factor ratio r");
    sub->add_option("--energy", o.energy, "probe energy E");
    sub->add_option("--strength", o.strength, "spike strength");
    sub->add_option("--placement", o.placement, "mid-barrier | mid-well")
        ->check(CLI::IsMember({"mid-barrier", "mid-well"}));
    sub->add_option("--tol", o.tol, "refinement tolerance")
        ->check(CLI::Range(1e-14, 1.0));
  };

  struct Cmd {
    const char* name;
    int (*fn)(CommonOpts&);
  };
  const Cmd cmds[] = {
      {"bands", run_bands},         {"smart", run_smart},
      {"beats", run_beats},         {"eps-sweep", run_eps_sweep},
      {"susy", run_susy},           {"swf", run_swf},
      {"delta-edge", run_delta_edge}, {"transmission", run_transmission},
      {"channels", run_channels},
  };
  for (const auto& c : cmds) add_common(app.add_subcommand(c.name), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& c : cmds)
      if (app.get_subcommand(c.name)->parsed()) return c.fn(o);
    std::cerr << R"({"error":{"kind":"validation","message":"no subcommand"}})"
              << std::endl;
    return 2;
  } catch (const bandctl::Error& e) {
    bandctl::io::json err;
    err["error"] = {{"kind", bandctl::errc_name(e.code())},
                    {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << R"({"error":{"kind":"internal","message":")" << e.what()
              << R"("}})" << std::endl;
    return 3;
  }
}
