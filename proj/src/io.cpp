#include "bandctl/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace bandctl::io {

json potential_to_json(const PeriodicPotential& p) {
  json j;
  j["period"] = p.period;
  j["segments"] = json::array();
  for (const auto& s : p.segments)
    j["segments"].push_back({{"width", s.width}, {"height", s.height}});
  j["spikes"] = json::array();
  for (const auto& s : p.spikes)
    j["spikes"].push_back({{"position", s.position}, {"strength", s.strength}});
  if (p.overlay) {
    j["sampled_overlay"] = {{"grid_step", p.overlay->grid_step},
                            {"values", p.overlay->values}};
  }
  return j;
}

PeriodicPotential potential_from_json(const json& j) {
  require(j.is_object(), errc::validation, "potential JSON must be an object");
  require(j.contains("period"), errc::validation, "potential JSON needs a period");
  PeriodicPotential p;
  p.period = j.at("period").get<double>();
  if (j.contains("segments"))
    for (const auto& s : j.at("segments"))
      p.segments.push_back(
          {s.at("width").get<double>(), s.at("height").get<double>()});
  if (p.segments.empty()) p.segments.push_back({p.period, 0.0});
  if (j.contains("spikes"))
    for (const auto& s : j.at("spikes"))
      p.spikes.push_back(
          {s.at("position").get<double>(), s.at("strength").get<double>()});
  if (j.contains("sampled_overlay")) {
    SampledOverlay ov;
    ov.grid_step = j.at("sampled_overlay").at("grid_step").get<double>();
    ov.values = j.at("sampled_overlay").at("values").get<std::vector<double>>();
    p.overlay = std::move(ov);
  }
  p.validate();
  return p;
}

PeriodicPotential load_potential(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), errc::validation, "cannot open potential file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(errc::validation, "bad JSON in " + path + ": " + e.what());
  }
  return potential_from_json(j);
}

json band_table_json(const BandStructure& bs) {
  struct Row {
    double lo, hi;
    bool band;
  };
  std::vector<Row> rows;
  for (const auto& b : bs.bands) rows.push_back({b.lo, b.hi, true});
  for (const auto& g : bs.gaps) rows.push_back({g.lo, g.hi, false});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"lo", r.lo}, {"hi", r.hi}, {"kind", r.band ? "band" : "gap"}});
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const json& config,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  require(bool(out), errc::validation, "cannot write " + path);
  out << "# " << config.dump() << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
  require(bool(out), errc::validation, "short write to " + path);
}

void write_json(const std::string& path, const json& config, const json& body) {
  json j;
  j["config"] = config;
  for (const auto& [k, v] : body.items()) j[k] = v;
  std::ofstream out(path);
  require(bool(out), errc::validation, "cannot write " + path);
  out << j.dump(2) << "\n";
  require(bool(out), errc::validation, "short write to " + path);
}

}  // namespace bandctl::io
