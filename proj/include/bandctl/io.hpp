#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bandctl/bands.hpp"
#include "bandctl/potential.hpp"

namespace bandctl::io {

using json = nlohmann::ordered_json;

json potential_to_json(const PeriodicPotential& p);
PeriodicPotential potential_from_json(const json& j);
PeriodicPotential load_potential(const std::string& path);

// [{"lo": ..., "hi": ..., "kind": "band"|"gap"}, ...] in ascending order.
json band_table_json(const BandStructure& bs);

// Deterministic shortest-roundtrip double formatting used in CSV output.
std::string format_double(double v);

// CSV with '#'-prefixed header lines carrying the resolved config as JSON.
void write_csv(const std::string& path, const json& config,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// {"config": ..., <key>: <value>, ...} written with stable key order.
void write_json(const std::string& path, const json& config, const json& body);

}  // namespace bandctl::io
