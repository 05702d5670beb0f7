#pragma once

// JSON parameter documents:
//
//   {"vehicle": {"mass_kg", "air_density_kg_m3", "frontal_area_m2",
//                "drag_coefficient", "rolling_friction", "gravity_m_s2"},
//    "bsfc":    {"beta0_g_per_J", "gamma_g_per_J_W2", "p0_W"}}
//
// Absent keys keep their defaults; unknown keys are rejected by name.

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "pngopt/vehicle_model.hpp"

namespace pngopt {

struct ModelConfig {
  VehicleParams vehicle;
  BsfcParams bsfc;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <std::size_t N>
void read_fields(const nlohmann::json& obj, const std::string& section,
                 const std::pair<const char*, double*> (&fields)[N]) {
  if (!obj.is_object()) throw ConfigError("\"" + section + "\" must be an object");
  for (const auto& [key, value] : obj.items()) {
    double* target = nullptr;
    for (const auto& [name, slot] : fields) {
      if (key == name) target = slot;
    }
    if (target == nullptr) throw ConfigError("unknown key \"" + section + "." + key + "\"");
    if (!value.is_number()) throw ConfigError("\"" + section + "." + key + "\" must be a number");
    *target = value.template get<double>();
  }
}

} // namespace detail

[[nodiscard]] inline ModelConfig parse_config(const nlohmann::json& doc) {
  ModelConfig cfg;
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "vehicle") {
      auto& v = cfg.vehicle;
      const std::pair<const char*, double*> fields[] = {
          {"mass_kg", &v.mass},
          {"air_density_kg_m3", &v.air_density},
          {"frontal_area_m2", &v.frontal_area},
          {"drag_coefficient", &v.drag_coeff},
          {"rolling_friction", &v.rolling_friction},
          {"gravity_m_s2", &v.gravity},
      };
      detail::read_fields(value, key, fields);
    } else if (key == "bsfc") {
      auto& b = cfg.bsfc;
      const std::pair<const char*, double*> fields[] = {
          {"beta0_g_per_J", &b.beta0},
          {"gamma_g_per_J_W2", &b.gamma},
          {"p0_W", &b.p0},
      };
      detail::read_fields(value, key, fields);
    } else {
      throw ConfigError("unknown key \"" + key + "\"");
    }
  }
  try {
    validate(cfg.vehicle);
    validate(cfg.bsfc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

[[nodiscard]] inline ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_config(doc);
}

[[nodiscard]] inline nlohmann::json to_json(const ModelConfig& c) {
  return {
      {"vehicle",
       {{"mass_kg", c.vehicle.mass},
        {"air_density_kg_m3", c.vehicle.air_density},
        {"frontal_area_m2", c.vehicle.frontal_area},
        {"drag_coefficient", c.vehicle.drag_coeff},
        {"rolling_friction", c.vehicle.rolling_friction},
        {"gravity_m_s2", c.vehicle.gravity}}},
      {"bsfc",
       {{"beta0_g_per_J", c.bsfc.beta0},
        {"gamma_g_per_J_W2", c.bsfc.gamma},
        {"p0_W", c.bsfc.p0}}},
  };
}

} // namespace pngopt
