#pragma once

// Radial ground states Q_ω of  −ΔQ + ωQ − Q³ + σQ⁵ = 0  in two dimensions.
//
// The radial problem −Q'' − Q'/r + ωQ − Q³ + σQ⁵ = 0, Q'(0) = 0, Q(R) = 0 is
// discretized on the uniform mesh r_i = i h, i = 0..N−1, h = R/N, with
// eighth-order central differences. Q is continued evenly to r < 0 and set to
// zero beyond R. At r = 0 the Laplacian is 2Q''(0). The discrete system is
// solved by damped Newton with a sparse LU of the banded Jacobian.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cqnls/grid.hpp"
#include "cqnls/model.hpp"
#include "cqnls/profiles.hpp"

namespace cqnls {

namespace radial {

inline constexpr int half_width = 4;
inline constexpr std::array<double, 5> d2_coeffs{-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0,
                                                 -1.0 / 560.0};
inline constexpr std::array<double, 5> d1_coeffs{0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
// Sixth-order fourth derivative.
inline constexpr std::array<double, 5> d4_coeffs{91.0 / 8.0, -122.0 / 15.0, 169.0 / 60.0, -2.0 / 5.0,
                                                 7.0 / 240.0};

/// Value at signed mesh index i of an even function stored for i >= 0 and
/// vanishing past the end of the mesh.
inline double even_at(std::span<const double> v, std::ptrdiff_t i) {
  const auto a = static_cast<std::size_t>(i < 0 ? -i : i);
  return a < v.size() ? v[a] : 0.0;
}

/// First derivative of an even mesh function (odd result).
inline std::vector<double> derivative(std::span<const double> v, double h) {
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto si = static_cast<std::ptrdiff_t>(i);
    double s = 0.0;
    for (int k = 1; k <= half_width; ++k) s += d1_coeffs[k] * (even_at(v, si + k) - even_at(v, si - k));
    d[i] = s / h;
  }
  return d;
}

/// ∫_0^R g(r) r dr for an even, smooth g sampled on the mesh and negligible at
/// R. Trapezoid sum plus Euler–Maclaurin corrections at r = 0, where the
/// integrand r g(r) has nonzero odd derivatives.
inline double integral_r_dr(std::span<const double> g, double h) {
  double trap = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) trap += g[i] * static_cast<double>(i) * h;
  trap *= h;
  double g2 = d2_coeffs[0] * g[0], g4 = d4_coeffs[0] * g[0];
  for (int k = 1; k <= half_width; ++k) {
    g2 += 2.0 * d2_coeffs[k] * even_at(g, k);
    g4 += 2.0 * d4_coeffs[k] * even_at(g, k);
  }
  g2 /= h * h;
  g4 /= h * h * h * h;
  const double h2 = h * h;
  // f = r g:  f'(0) = g(0),  f'''(0) = 3 g''(0),  f⁽⁵⁾(0) = 5 g''''(0).
  return trap + h2 / 12.0 * g[0] - h2 * h2 / 720.0 * 3.0 * g2 + h2 * h2 * h2 / 30240.0 * 5.0 * g4;
}

}  // namespace radial

struct GroundStateOptions {
  /// Domain radius; 0 selects 30/√ω.
  double radius = 0.0;
  /// Mesh nodes; 0 selects N so that h√ω ≈ 0.05.
  std::size_t nodes = 0;
  /// Target max-norm of the discrete residual.
  double tolerance = 1e-12;
  std::size_t max_iterations = 50;
};

struct GroundState {
  Model model = Model::cubic_quintic;
  double omega = 0.0;
  double h = 0.0;
  std::vector<double> Q;  ///< Q(r_i), r_i = i h
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  double mass = 0.0;       ///< 2π∫Q² r dr
  double energy = 0.0;     ///< 2π∫(½Q'² − ¼Q⁴ + σ/6 Q⁶) r dr
  double amplitude = 0.0;  ///< Q(0)

  double radius() const { return h * static_cast<double>(Q.size()); }
  double r(std::size_t i) const { return h * static_cast<double>(i); }

  void write_csv(std::ostream& os) const {
    os << "r,Q\n";
    os.precision(17);
    for (std::size_t i = 0; i < Q.size(); ++i) os << r(i) << ',' << Q[i] << '\n';
  }
};

namespace detail {

class RadialProblem {
 public:
  RadialProblem(Model model, double omega, double h, std::size_t n)
      : sigma_(quintic_coefficient(model)), omega_(omega), h_(h), n_(n) {}

  std::vector<double> residual(std::span<const double> q) const {
    std::vector<double> f(n_);
    const double ih2 = 1.0 / (h_ * h_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto si = static_cast<std::ptrdiff_t>(i);
      double d2 = radial::d2_coeffs[0] * q[i];
      double d1 = 0.0;
      for (int k = 1; k <= radial::half_width; ++k) {
        const double p = radial::even_at(q, si + k), m = radial::even_at(q, si - k);
        d2 += radial::d2_coeffs[k] * (p + m);
        d1 += radial::d1_coeffs[k] * (p - m);
      }
      d2 *= ih2;
      const double lap = i == 0 ? 2.0 * d2 : d2 + d1 / (h_ * h_ * static_cast<double>(i));
      const double v = q[i], v2 = v * v;
      f[i] = -lap + omega_ * v - v2 * v + sigma_ * v2 * v2 * v;
    }
    return f;
  }

  Eigen::SparseMatrix<double> jacobian(std::span<const double> q) const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(n_ * (2 * radial::half_width + 1));
    const double ih2 = 1.0 / (h_ * h_);
    auto add = [&](std::size_t row, std::ptrdiff_t col, double value) {
      const auto c = static_cast<std::size_t>(col < 0 ? -col : col);
      if (c < n_) t.emplace_back(static_cast<int>(row), static_cast<int>(c), value);
    };
    for (std::size_t i = 0; i < n_; ++i) {
      const auto si = static_cast<std::ptrdiff_t>(i);
      const double d2_scale = (i == 0 ? -2.0 : -1.0) * ih2;
      const double d1_scale = i == 0 ? 0.0 : -1.0 / (h_ * h_ * static_cast<double>(i));
      add(i, si, d2_scale * radial::d2_coeffs[0]);
      for (int k = 1; k <= radial::half_width; ++k) {
        add(i, si + k, d2_scale * radial::d2_coeffs[k] + d1_scale * radial::d1_coeffs[k]);
        add(i, si - k, d2_scale * radial::d2_coeffs[k] - d1_scale * radial::d1_coeffs[k]);
      }
      const double v2 = q[i] * q[i];
      add(i, si, omega_ - 3.0 * v2 + 5.0 * sigma_ * v2 * v2);
    }
    Eigen::SparseMatrix<double> J(static_cast<int>(n_), static_cast<int>(n_));
    J.setFromTriplets(t.begin(), t.end());
    J.makeCompressed();
    return J;
  }

 private:
  double sigma_, omega_, h_;
  std::size_t n_;
};

inline double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double two_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline std::vector<double> resample(const GroundState& from, double h, std::size_t n) {
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline(
      from.Q.begin(), from.Q.end(), 0.0, from.h, 0.0);
  std::vector<double> q(n);
  const double r_end = from.r(from.Q.size() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = h * static_cast<double>(i);
    q[i] = r <= r_end ? spline(r) : 0.0;
  }
  return q;
}

}  // namespace detail

inline void finalize_scalars(GroundState& gs) {
  const double sigma = quintic_coefficient(gs.model);
  const auto dq = radial::derivative(gs.Q, gs.h);
  std::vector<double> q2(gs.Q.size()), dens(gs.Q.size());
  for (std::size_t i = 0; i < gs.Q.size(); ++i) {
    const double v2 = gs.Q[i] * gs.Q[i];
    q2[i] = v2;
    dens[i] = 0.5 * dq[i] * dq[i] - 0.25 * v2 * v2 + sigma * v2 * v2 * v2 / 6.0;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  gs.mass = two_pi * radial::integral_r_dr(q2, gs.h);
  gs.energy = two_pi * radial::integral_r_dr(dens, gs.h);
  gs.amplitude = gs.Q.front();
}

/// Solve for Q_ω. Without a guess, Newton starts from 1.5 φ_ω(r), the line
/// profile inflated to roughly the lump amplitude; with a guess (typically the
/// converged state at a nearby ω) it starts from that state resampled onto the
/// new mesh.
inline GroundState solve_ground_state(Model model, double omega, const GroundStateOptions& opt = {},
                                      const GroundState* guess = nullptr) {
  require_admissible_frequency(model, omega);
  const double sqrt_omega = std::sqrt(omega);
  const double R = opt.radius > 0.0 ? opt.radius : 30.0 / sqrt_omega;
  std::size_t n = opt.nodes;
  if (n == 0) n = std::max<std::size_t>(512, static_cast<std::size_t>(std::ceil(R * sqrt_omega / 0.05)));
  if (n < 512) throw Error(ErrorCode::invalid_configuration, "ground state mesh needs >= 512 nodes");
  if (R * sqrt_omega < 30.0 - 1e-9) {
    throw Error(ErrorCode::invalid_configuration, "ground state radius must be >= 30/sqrt(omega)");
  }

  GroundState gs;
  gs.model = model;
  gs.omega = omega;
  gs.h = R / static_cast<double>(n);
  if (guess) {
    gs.Q = detail::resample(*guess, gs.h, n);
  } else {
    const SolitonProfile1D line(model, omega);
    gs.Q.resize(n);
    for (std::size_t i = 0; i < n; ++i) gs.Q[i] = 1.5 * line(gs.r(i));
  }

  const detail::RadialProblem problem(model, omega, gs.h, n);
  auto f = problem.residual(gs.Q);
  double res = detail::max_norm(f);
  std::size_t it = 0;
  for (; it < opt.max_iterations && res > opt.tolerance; ++it) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(problem.jacobian(gs.Q));
    if (lu.info() != Eigen::Success) throw NoConvergence("singular Newton Jacobian", res);
    const Eigen::Map<const Eigen::VectorXd> rhs(f.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd step = lu.solve(rhs);

    const double norm0 = detail::two_norm(f);
    bool accepted = false;
    for (double alpha = 1.0; alpha > 1e-3; alpha *= 0.5) {
      std::vector<double> trial(gs.Q);
      for (std::size_t i = 0; i < n; ++i) trial[i] -= alpha * step[static_cast<Eigen::Index>(i)];
      auto f_trial = problem.residual(trial);
      if (detail::two_norm(f_trial) < norm0) {
        gs.Q = std::move(trial);
        f = std::move(f_trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    res = detail::max_norm(f);
  }
  gs.residual_norm = res;
  gs.iterations = it;
  if (res > opt.tolerance) {
    throw NoConvergence("Newton iteration for the ground state at omega = " + std::to_string(omega) +
                            " stalled",
                        res);
  }
  // Reject the trivial solution and nodal states.
  if (!(gs.Q.front() > 1e-3 * sqrt_omega)) {
    throw NoConvergence("Newton iteration collapsed to the zero solution", res);
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (gs.Q[i] < -1e-12 || gs.Q[i] > gs.Q[i - 1] + 1e-12) {
      throw NoConvergence("converged state is not positive and decreasing", res);
    }
  }
  finalize_scalars(gs);
  return gs;
}

/// Reach a target frequency from an already converged state by stepping ω.
/// A failed step is retried at half the size; successful steps grow back
/// towards max_step.
inline GroundState continue_ground_state(const GroundState& start, double omega,
                                         const GroundStateOptions& opt = {}, double max_step = 0.01) {
  GroundState current = start;
  double step = max_step;
  while (current.omega != omega) {
    const double remaining = omega - current.omega;
    const double w = std::abs(remaining) <= step ? omega : current.omega + std::copysign(step, remaining);
    try {
      current = solve_ground_state(start.model, w, opt, &current);
      step = std::min(max_step, 1.5 * step);
    } catch (const NoConvergence& e) {
      step *= 0.5;
      if (step < 1e-3 * max_step) {
        throw NoConvergence("continuation towards omega = " + std::to_string(omega) + " stalled at omega = " +
                                std::to_string(current.omega),
                            e.last_residual());
      }
    }
  }
  return current;
}

/// Direct solve, falling back to continuation from ω = 0.1 for frequencies
/// close to 3/16 where the inflated line profile is outside Newton's basin.
inline GroundState solve_ground_state_robust(Model model, double omega, const GroundStateOptions& opt = {}) {
  try {
    return solve_ground_state(model, omega, opt);
  } catch (const NoConvergence&) {
    if (model != Model::cubic_quintic || omega <= 0.1) throw;
  }
  const auto base = solve_ground_state(model, 0.1, opt);
  return continue_ground_state(base, omega, opt, 0.005);
}

struct GroundStateCurveRow {
  double omega = 0.0;
  std::optional<GroundState> state;  ///< empty when the solve failed
  std::string error;
};

/// Sweep ω in the given (sorted) order, using each converged state as the
/// Newton guess for the next one. Failures are recorded and the sweep goes on.
inline std::vector<GroundStateCurveRow> ground_state_curves(Model model, const std::vector<double>& omegas,
                                                            const GroundStateOptions& opt = {}) {
  std::vector<GroundStateCurveRow> rows;
  std::optional<GroundState> previous;
  for (double w : omegas) {
    GroundStateCurveRow row{w, std::nullopt, {}};
    try {
      if (previous) {
        try {
          row.state = continue_ground_state(*previous, w, opt, 0.01);
        } catch (const NoConvergence&) {
          row.state = solve_ground_state_robust(model, w, opt);
        }
      } else {
        row.state = solve_ground_state_robust(model, w, opt);
      }
      previous = row.state;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_curves_csv(std::ostream& os, const std::vector<GroundStateCurveRow>& rows) {
  os << "omega,mass,energy,amplitude\n";
  os.precision(17);
  for (const auto& row : rows) {
    if (!row.state) continue;
    os << row.omega << ',' << row.state->mass << ',' << row.state->energy << ',' << row.state->amplitude << '\n';
  }
}

/// Interpolate Q(|x|) onto the Cartesian grid with a cubic spline.
inline Field embed_radial(const GroundState& gs, const Grid2D& g) {
  const double half_x = std::numbers::pi * g.Lx(), half_y = std::numbers::pi * g.Ly();
  const double corner = std::hypot(half_x, half_y);
  if (gs.Q.empty()) return Field(g);
  if (corner > gs.radius() && std::abs(gs.Q.back()) >= 1e-10) {
    throw Error(ErrorCode::domain_mismatch, "ground state radius " + std::to_string(gs.radius()) +
                                                " does not cover the grid diagonal " + std::to_string(corner));
  }
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline(gs.Q.begin(), gs.Q.end(), 0.0, gs.h, 0.0);
  const double r_end = gs.r(gs.Q.size() - 1);
  return sample(g, [&](double x, double y) {
    const double rho = std::hypot(x, y);
    return complex(rho <= r_end ? spline(rho) : 0.0);
  });
}

struct GridRefinement {
  std::size_t newton_iterations = 0;
  std::size_t krylov_iterations = 0;
  double initial_residual = 0.0;
  double residual = 0.0;  ///< max-norm of the spectral stationary residual
};

namespace detail {

// Restarted GMRES for A x = b with right preconditioner M; x starts at zero.
template <class Apply, class Precondition>
std::size_t gmres(const Apply& apply, const Precondition& precondition, std::span<const double> b,
                  std::span<double> x, double rel_tol, std::size_t restart, std::size_t max_iter) {
  const std::size_t n = b.size();
  auto dot = [n](std::span<const double> p, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i] * q[i];
    return s;
  };
  std::fill(x.begin(), x.end(), 0.0);
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) return 0;
  std::vector<double> r(b.begin(), b.end()), w(n), z(n);
  std::size_t total = 0;
  while (total < max_iter) {
    const double beta = std::sqrt(dot(r, r));
    if (beta <= rel_tol * b_norm) break;
    std::vector<std::vector<double>> v{std::vector<double>(n)}, zs;
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::vector<std::vector<double>> hess;
    std::vector<double> cs, sn, g{beta};
    std::size_t k = 0;
    for (; k < restart && total < max_iter; ++k, ++total) {
      zs.emplace_back(n);
      precondition(v[k], zs[k]);
      apply(zs[k], w);
      std::vector<double> hcol(k + 2, 0.0);
      for (std::size_t j = 0; j <= k; ++j) {
        hcol[j] = dot(w, v[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= hcol[j] * v[j][i];
      }
      hcol[k + 1] = std::sqrt(dot(w, w));
      v.emplace_back(n);
      if (hcol[k + 1] > 0.0) {
        for (std::size_t i = 0; i < n; ++i) v[k + 1][i] = w[i] / hcol[k + 1];
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double t = cs[j] * hcol[j] + sn[j] * hcol[j + 1];
        hcol[j + 1] = -sn[j] * hcol[j] + cs[j] * hcol[j + 1];
        hcol[j] = t;
      }
      const double d = std::hypot(hcol[k], hcol[k + 1]);
      cs.push_back(hcol[k] / d);
      sn.push_back(hcol[k + 1] / d);
      hcol[k] = d;
      hcol[k + 1] = 0.0;
      g.push_back(-sn[k] * g[k]);
      g[k] *= cs[k];
      hess.push_back(std::move(hcol));
      if (std::abs(g[k + 1]) <= rel_tol * b_norm) {
        ++k;
        ++total;
        break;
      }
    }
    // Back substitution for the k×k triangular system, then x += Z y.
    std::vector<double> y(k);
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= hess[j][i] * y[j];
      y[i] = s / hess[i][i];
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * zs[j][i];
    }
    apply(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
  }
  return total;
}

}  // namespace detail

/// Newton–GMRES polish of a real stationary state on the periodic grid, so
/// that  −Δu + ωu − u³ + σu⁵ = 0  holds for the spectral Laplacian. An
/// embedded radial profile that is not exactly zero at the box edge is not a
/// stationary state of the periodic problem; this removes that mismatch
/// (and the interpolation error) before it can drive a time evolution.
inline GridRefinement refine_on_grid(Field& u, Model model, double omega, double tolerance = 1e-12,
                                     std::size_t max_newton = 20) {
  require_admissible_frequency(model, omega);
  const auto& g = u.grid();
  const std::size_t n = g.size();
  const double sigma = quintic_coefficient(model);
  const FftEngine fft(g);
  const auto k2 = g.k_squared();
  Spectrum hat(g);
  Field work(g);

  auto laplacian_plus = [&](std::span<const double> in, std::span<double> out, auto&& spectral_factor) {
    for (std::size_t i = 0; i < n; ++i) work[i] = in[i];
    fft.forward(work.values(), hat.values());
    for (std::size_t i = 0; i < n; ++i) hat[i] *= spectral_factor(k2[i]);
    fft.inverse(hat.values(), work.values());
    for (std::size_t i = 0; i < n; ++i) out[i] = work[i].real();
  };

  std::vector<double> q(n), f(n), step(n), weight(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = u[i].real();
  auto residual = [&](std::span<const double> v, std::span<double> out) {
    laplacian_plus(v, out, [omega](double k) { return k + omega; });
    for (std::size_t i = 0; i < n; ++i) {
      const double v2 = v[i] * v[i];
      out[i] += -v2 * v[i] + sigma * v2 * v2 * v[i];
    }
    return detail::max_norm(out);
  };

  GridRefinement report;
  double res = residual(q, f);
  report.initial_residual = res;
  for (; report.newton_iterations < max_newton && res > tolerance; ++report.newton_iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v2 = q[i] * q[i];
      weight[i] = -3.0 * v2 + 5.0 * sigma * v2 * v2;
    }
    auto apply = [&](std::span<const double> in, std::span<double> out) {
      laplacian_plus(in, out, [omega](double k) { return k + omega; });
      for (std::size_t i = 0; i < n; ++i) out[i] += weight[i] * in[i];
    };
    auto precondition = [&](std::span<const double> in, std::span<double> out) {
      laplacian_plus(in, out, [omega](double k) { return 1.0 / (k + omega); });
    };
    report.krylov_iterations += detail::gmres(apply, precondition, f, step, 1e-10, 60, 600);
    for (std::size_t i = 0; i < n; ++i) q[i] -= step[i];
    const double next = residual(q, f);
    if (!(next < res)) {
      res = next;
      ++report.newton_iterations;
      break;
    }
    res = next;
  }
  report.residual = res;
  if (res > tolerance) throw NoConvergence("grid refinement of the ground state stalled", res);
  for (std::size_t i = 0; i < n; ++i) u[i] = q[i];
  return report;
}

}  // namespace cqnls
