#pragma once

// Flat INI run configuration. Recognised keys (all optional unless noted):
//
//   [scenario]  id, note
//   [model]     type = cubic-quintic | cubic, omega (required)
//   [initial]   kind = plain-line-soliton | gaussian-perturbed |
//                      periodic-deformation | ground-state-embed, lambda
//   [grid]      Lx, Ly, Nx, Ny
//   [time]      T, Nt, snapshots = comma-separated times
//
// Unknown sections or keys are rejected so that typos do not silently fall
// back to defaults.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqnls/scenarios.hpp"

namespace cqnls {

inline std::vector<double> parse_time_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item.substr(b), &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "not a number in time list: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", b + used) != std::string::npos) {
      throw Error(ErrorCode::parse_error, "not a number in time list: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"scenario", {"id", "note"}},
      {"model", {"type", "omega"}},
      {"initial", {"kind", "lambda"}},
      {"grid", {"Lx", "Ly", "Nx", "Ny"}},
      {"time", {"T", "Nt", "snapshots"}}};
  return schema;
}

template <class T>
T get(const boost::property_tree::ptree& pt, const std::string& key, T fallback) {
  if (!pt.get_optional<std::string>(key)) return fallback;
  try {
    return pt.get<T>(key);
  } catch (const boost::property_tree::ptree_bad_data&) {
    throw Error(ErrorCode::parse_error, "bad value for '" + key + "': '" + pt.get<std::string>(key) + "'");
  }
}

}  // namespace detail

/// Parse an INI stream into a scenario without expectations.
inline Scenario parse_config(std::istream& is, const std::string& origin = "<config>") {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::parse_error, origin + ": " + e.message() + " at line " + std::to_string(e.line()));
  }
  const auto& schema = detail::config_schema();
  for (const auto& [section, body] : pt) {
    const auto it = schema.find(section);
    if (it == schema.end()) throw Error(ErrorCode::invalid_configuration, origin + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw Error(ErrorCode::invalid_configuration, origin + ": unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
  if (!pt.get_optional<std::string>("model.omega")) {
    throw Error(ErrorCode::invalid_configuration, origin + ": [model] omega is required");
  }
  Scenario s;
  s.id = detail::get<std::string>(pt, "scenario.id", "custom");
  s.note = detail::get<std::string>(pt, "scenario.note", "");
  s.model = parse_model(detail::get<std::string>(pt, "model.type", "cubic-quintic"));
  s.omega = detail::get<double>(pt, "model.omega", 0.0);
  s.kind = parse_initial_kind(detail::get<std::string>(pt, "initial.kind", "gaussian-perturbed"));
  s.lambda = detail::get<double>(pt, "initial.lambda", 0.0);
  s.Lx = detail::get<double>(pt, "grid.Lx", s.Lx);
  s.Ly = detail::get<double>(pt, "grid.Ly", s.Ly);
  s.Nx = detail::get<std::size_t>(pt, "grid.Nx", s.Nx);
  s.Ny = detail::get<std::size_t>(pt, "grid.Ny", s.Ny);
  s.T = detail::get<double>(pt, "time.T", s.T);
  s.Nt = detail::get<std::size_t>(pt, "time.Nt", s.Nt);
  s.snapshot_times = parse_time_list(detail::get<std::string>(pt, "time.snapshots", ""));
  s.validate();
  return s;
}

inline Scenario load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return parse_config(is, path.string());
}

}  // namespace cqnls
