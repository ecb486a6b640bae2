#pragma once

#include <string>
#include <string_view>

#include "cqnls/error.hpp"

namespace cqnls {

/// Nonlinearity of  i u_t + Δu = -|u|²u + σ|u|⁴u.
/// cubic_quintic has σ = 1, cubic has σ = 0.
enum class Model { cubic_quintic, cubic };

/// Upper end of the admissible frequency window (0, 3/16) for cubic-quintic.
inline constexpr double omega_max_cubic_quintic = 3.0 / 16.0;

constexpr double quintic_coefficient(Model m) { return m == Model::cubic_quintic ? 1.0 : 0.0; }

constexpr std::string_view to_string(Model m) {
  return m == Model::cubic_quintic ? "cubic-quintic" : "cubic";
}

inline Model parse_model(std::string_view name) {
  if (name == "cubic-quintic" || name == "cq") return Model::cubic_quintic;
  if (name == "cubic") return Model::cubic;
  throw Error(ErrorCode::invalid_configuration, "unknown model '" + std::string(name) + "'");
}

inline bool admissible_frequency(Model m, double omega) {
  if (!(omega > 0.0)) return false;
  return m == Model::cubic || omega < omega_max_cubic_quintic;
}

inline void require_admissible_frequency(Model m, double omega) {
  if (!admissible_frequency(m, omega)) {
    throw Error(ErrorCode::invalid_frequency,
                "omega = " + std::to_string(omega) + " outside the admissible window for the " +
                    std::string(to_string(m)) + " model");
  }
}

}  // namespace cqnls
