#pragma once

// Post-processing of fields and run records: line-soliton fitting, peak
// counting, shape anisotropy, final-state classification and the
// ground-state mass threshold for the transverse period.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cqnls/groundstate.hpp"
#include "cqnls/integrator.hpp"
#include "cqnls/profiles.hpp"

namespace cqnls {

/// Row maxima m(y_m) = max_x |u(x, y_m)|.
inline std::vector<double> row_maxima(const Field& u) {
  const auto& g = u.grid();
  std::vector<double> m(g.Ny(), 0.0);
  for (std::size_t row = 0; row < g.Ny(); ++row) {
    double best = 0.0;
    for (std::size_t j = 0; j < g.Nx(); ++j) best = std::max(best, std::norm(u(j, row)));
    m[row] = std::sqrt(best);
  }
  return m;
}

/// Mean over y of max over x of |u|.
inline double y_averaged_amplitude(const Field& u) {
  const auto m = row_maxima(u);
  double s = 0.0;
  for (double v : m) s += v;
  return s / static_cast<double>(m.size());
}

/// Amplitude that is inverted for ω*: the mean over y of the row maxima, or
/// the global sup norm.
enum class FitAmplitude { row_max_mean, sup_norm };

constexpr std::string_view to_string(FitAmplitude a) {
  return a == FitAmplitude::row_max_mean ? "row-max-mean" : "sup-norm";
}

struct FitResult {
  double omega_star = 0.0;
  double fit_amplitude = 0.0;
  double residual = 0.0;  ///< max |(|u| − φ_{ω*})| along the x-line through the peak
};

namespace detail {

struct Peak {
  std::size_t j = 0, row = 0;
  double value = 0.0;
};

inline Peak global_peak(const Field& u) {
  Peak p;
  double best = -1.0;
  for (std::size_t row = 0; row < u.grid().Ny(); ++row) {
    for (std::size_t j = 0; j < u.grid().Nx(); ++j) {
      const double v = std::norm(u(j, row));
      if (v > best) {
        best = v;
        p = {j, row, 0.0};
      }
    }
  }
  p.value = std::sqrt(best);
  return p;
}

// Sub-grid offset (in cells) of a sampled maximum from the parabola through
// three neighbours; zero for symmetric neighbours.
inline double parabolic_offset(double left, double centre, double right) {
  const double curvature = left - 2.0 * centre + right;
  if (curvature >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
}

}  // namespace detail

/// Fit a line soliton to |u|: the chosen amplitude is inverted for ω*, and
/// the fitted profile is compared along the x-line through the peak.
inline FitResult fit_line_soliton(const Field& u, Model model = Model::cubic_quintic,
                                  FitAmplitude amplitude = FitAmplitude::row_max_mean) {
  const auto& g = u.grid();
  FitResult fit;
  fit.fit_amplitude = amplitude == FitAmplitude::row_max_mean ? y_averaged_amplitude(u) : max_abs(u.values());
  if (!(fit.fit_amplitude > 0.0)) throw Error(ErrorCode::fit_impossible, "cannot fit a zero field");
  try {
    fit.omega_star = fit_omega_from_amplitude(fit.fit_amplitude, model);
  } catch (const Error& e) {
    throw Error(ErrorCode::fit_impossible, std::string("line-soliton fit failed: ") + e.what());
  }
  const SolitonProfile1D phi(model, fit.omega_star);
  const auto peak = detail::global_peak(u);
  const std::size_t nx = g.Nx();
  auto at = [&](std::size_t j) { return std::abs(u(j % nx, peak.row)); };
  const double offset = detail::parabolic_offset(at(peak.j + nx - 1), at(peak.j), at(peak.j + 1));
  const double centre = g.x(peak.j) + offset * g.dx();
  const double period = 2.0 * std::numbers::pi * g.Lx();
  for (std::size_t j = 0; j < nx; ++j) {
    double d = g.x(j) - centre;
    d -= period * std::round(d / period);
    fit.residual = std::max(fit.residual, std::abs(at(j) - phi(d)));
  }
  return fit;
}

/// Connected components of {|u| > rel·max|u|} under 4-neighbour periodic
/// adjacency.
inline std::size_t count_peaks(const Field& u, double rel_threshold = 0.5) {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
    throw Error(ErrorCode::invalid_configuration, "peak threshold must lie in (0, 1)");
  }
  const auto& g = u.grid();
  const std::size_t nx = g.Nx(), ny = g.Ny();
  const double level = rel_threshold * rel_threshold * std::pow(max_abs(u.values()), 2);
  std::vector<char> mask(g.size()), seen(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) mask[i] = std::norm(u[i]) > level;
  std::size_t components = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const std::size_t j = i % nx, row = i / nx;
      const std::size_t nbr[4] = {row * nx + (j + 1) % nx, row * nx + (j + nx - 1) % nx,
                                  ((row + 1) % ny) * nx + j, ((row + ny - 1) % ny) * nx + j};
      for (std::size_t k : nbr) {
        if (mask[k] && !seen[k]) {
          seen[k] = 1;
          stack.push_back(k);
        }
      }
    }
  }
  return components;
}

/// σx²/σy² of |u|² over the above-half-maximum component containing the
/// global maximum, with periodic minimal-image displacements from the peak.
inline double anisotropy(const Field& u) {
  const auto& g = u.grid();
  const std::size_t nx = g.Nx(), ny = g.Ny();
  const auto peak = detail::global_peak(u);
  const double level = 0.25 * peak.value * peak.value;
  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> stack{g.index(peak.j, peak.row)};
  seen[stack.back()] = 1;
  double w = 0.0, sxx = 0.0, syy = 0.0;
  auto wrap = [](std::ptrdiff_t d, std::ptrdiff_t n) {
    d %= n;
    if (d > n / 2) d -= n;
    if (d < -n / 2) d += n;
    return d;
  };
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const std::size_t j = i % nx, row = i / nx;
    const double weight = std::norm(u[i]);
    const double ddx = static_cast<double>(wrap(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(peak.j),
                                                static_cast<std::ptrdiff_t>(nx))) * g.dx();
    const double ddy = static_cast<double>(wrap(static_cast<std::ptrdiff_t>(row) -
                                                    static_cast<std::ptrdiff_t>(peak.row),
                                                static_cast<std::ptrdiff_t>(ny))) * g.dy();
    w += weight;
    sxx += weight * ddx * ddx;
    syy += weight * ddy * ddy;
    const std::size_t nbr[4] = {row * nx + (j + 1) % nx, row * nx + (j + nx - 1) % nx,
                                ((row + 1) % ny) * nx + j, ((row + ny - 1) % ny) * nx + j};
    for (std::size_t k : nbr) {
      if (!seen[k] && std::norm(u[k]) > level) {
        seen[k] = 1;
        stack.push_back(k);
      }
    }
  }
  if (syy == 0.0) return sxx == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return sxx / syy;
}

/// Relative transverse modulation (max_y m − min_y m)/max_y m of the row maxima.
inline double transverse_modulation(const Field& u) {
  const auto m = row_maxima(u);
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
}

enum class Classification { line_soliton_retained, lump_formed, blown_up, undecided };

constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::line_soliton_retained: return "line-soliton-retained";
    case Classification::lump_formed: return "lump-formed";
    case Classification::blown_up: return "blown-up";
    case Classification::undecided: return "undecided";
  }
  return "unknown";
}

struct ClassifierThresholds {
  double modulation = 0.25;
  double anisotropy_low = 0.5;
  double anisotropy_high = 2.0;
  double fit_residual = 0.05;  ///< relative to the fitted amplitude
  double peak_level = 0.5;
};

struct StabilityVerdict {
  Classification classification = Classification::undecided;
  std::size_t peak_count = 0;
  double anisotropy = 0.0;
  double modulation = 0.0;
  std::optional<FitResult> fit;
};

inline StabilityVerdict classify_final_state(const RunRecord& record, const Field& final_state,
                                             Model model = Model::cubic_quintic,
                                             const ClassifierThresholds& th = {}) {
  StabilityVerdict v;
  v.peak_count = count_peaks(final_state, th.peak_level);
  v.anisotropy = anisotropy(final_state);
  v.modulation = transverse_modulation(final_state);
  try {
    v.fit = fit_line_soliton(final_state, model);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::fit_impossible) throw;
  }
  if (record.termination != Termination::completed) {
    v.classification = Classification::blown_up;
  } else if (v.modulation > th.modulation && v.anisotropy >= th.anisotropy_low &&
             v.anisotropy <= th.anisotropy_high) {
    v.classification = Classification::lump_formed;
  } else if (v.fit && v.fit->residual < th.fit_residual * v.fit->fit_amplitude) {
    v.classification = Classification::line_soliton_retained;
  }
  return v;
}

inline void write_verdict_csv(std::ostream& os, const StabilityVerdict& v) {
  os << "classification,peak_count,anisotropy,omega_star,residual\n";
  os.precision(17);
  os << to_string(v.classification) << ',' << v.peak_count << ',' << v.anisotropy << ',';
  if (v.fit) {
    os << v.fit->omega_star << ',' << v.fit->residual << '\n';
  } else {
    os << "nan,nan\n";
  }
}

/// L_crit = M(Q_ω) / (2π M_1D(φ_ω)): the transverse half-period scale at
/// which the line soliton carries the mass of the lump.
inline double critical_torus_length(double omega, Model model = Model::cubic_quintic) {
  const auto gs = solve_ground_state_robust(model, omega);
  return gs.mass / (2.0 * std::numbers::pi * SolitonProfile1D(model, omega).mass());
}

}  // namespace cqnls
