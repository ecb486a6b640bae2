#pragma once

// Exact line solitary waves and the initial data built from them.
//
// Cubic-quintic (0 < ω < 3/16):
//   φ_ω(x) = (1/(4ω) + sqrt(1/(16ω²) − 1/(3ω)) cosh(2√ω x))^{-1/2}
// Cubic (ω > 0):
//   φ_ω(x) = sqrt(2ω) sech(√ω x)
// Both solve −φ'' + ωφ − φ³ + σφ⁵ = 0 on the line.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <variant>
#include <vector>

#include "cqnls/grid.hpp"
#include "cqnls/model.hpp"

namespace cqnls {

class SolitonProfile1D {
 public:
  SolitonProfile1D(Model model, double omega) : model_(model), omega_(omega) {
    require_admissible_frequency(model, omega);
    sqrt_omega_ = std::sqrt(omega);
    if (model == Model::cubic_quintic) {
      a_ = 1.0 / (4.0 * omega);
      b_ = std::sqrt(1.0 / (16.0 * omega * omega) - 1.0 / (3.0 * omega));
    }
  }

  Model model() const { return model_; }
  double omega() const { return omega_; }

  double operator()(double x) const {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::out_of_range, "profile evaluated at a non-finite point");
    }
    if (model_ == Model::cubic) return std::sqrt(2.0 * omega_) / std::cosh(sqrt_omega_ * x);
    const double arg = 2.0 * sqrt_omega_ * std::abs(x);
    if (arg > 700.0) return std::sqrt(2.0 / b_) * std::exp(-0.5 * arg);
    return 1.0 / std::sqrt(a_ + b_ * std::cosh(arg));
  }

  double derivative(double x) const {
    const double phi = (*this)(x);
    if (model_ == Model::cubic) return -sqrt_omega_ * std::tanh(sqrt_omega_ * x) * phi;
    const double arg = 2.0 * sqrt_omega_ * x;
    if (std::abs(arg) > 700.0) return -std::copysign(sqrt_omega_, x) * phi;
    return -sqrt_omega_ * b_ * std::sinh(arg) * phi * phi * phi;
  }

  /// ‖φ_ω‖_∞ = φ_ω(0).
  double amplitude() const {
    if (model_ == Model::cubic) return std::sqrt(2.0 * omega_);
    return 1.0 / std::sqrt(a_ + b_);
  }

  /// ∫ φ² dx over the line.
  double mass() const {
    return integrate([this](double x) {
      const double p = (*this)(x);
      return p * p;
    });
  }

  /// ½∫φ'² − ¼∫φ⁴ + (σ/6)∫φ⁶.
  double energy() const {
    const double sigma = quintic_coefficient(model_);
    return integrate([this, sigma](double x) {
      const double p = (*this)(x);
      const double d = derivative(x);
      const double p2 = p * p;
      return 0.5 * d * d - 0.25 * p2 * p2 + sigma * p2 * p2 * p2 / 6.0;
    });
  }

  /// Write (x, φ(x)) pairs as CSV.
  void write_csv(std::ostream& os, double x_max, std::size_t n) const {
    os << "x,phi\n";
    os.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -x_max + 2.0 * x_max * static_cast<double>(i) / static_cast<double>(n - 1);
      os << x << ',' << (*this)(x) << '\n';
    }
  }

 private:
  // Composite Gauss–Legendre on [0, 50/√ω], doubled by symmetry. The
  // integrands decay like e^{-2√ω x}, so the truncated tail is below e^{-100}.
  template <class F>
  double integrate(F&& f) const {
    const double x_end = 50.0 / sqrt_omega_;
    constexpr int panels = 400;
    const double width = x_end / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      sum += boost::math::quadrature::gauss<double, 20>::integrate(f, p * width, (p + 1) * width);
    }
    return 2.0 * sum;
  }

  Model model_;
  double omega_;
  double sqrt_omega_ = 0.0;
  double a_ = 0.0, b_ = 0.0;
};

/// Cubic line soliton mass, 4√ω.
inline double cubic_mass_1d_closed_form(double omega) { return 4.0 * std::sqrt(omega); }

/// Invert the amplitude map: cubic-quintic ω = a²/2 − a⁴/3 on (0, √3/2),
/// cubic ω = a²/2.
inline double fit_omega_from_amplitude(double a, Model model = Model::cubic_quintic) {
  if (model == Model::cubic) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::out_of_range, "cubic amplitude must be positive");
    }
    return 0.5 * a * a;
  }
  constexpr double a_max = 0.8660254037844386;  // √3/2, amplitude at ω = 3/16
  if (!(a > 0.0) || !(a < a_max)) {
    throw Error(ErrorCode::out_of_range,
                "amplitude " + std::to_string(a) + " outside (0, sqrt(3)/2)");
  }
  const double a2 = a * a;
  return 0.5 * a2 - a2 * a2 / 3.0;
}

struct PlainLineSoliton {};

/// φ(x) + λ e^{−(x²+y²)}, centered at the origin.
struct GaussianBump {
  double lambda = 0.0;
};

/// φ(x − λ cos y).
struct PeriodicDeformation {
  double lambda = 0.0;
};

using LineSolitonPerturbation = std::variant<PlainLineSoliton, GaussianBump, PeriodicDeformation>;

struct LineSolitonInitialCondition {
  SolitonProfile1D profile;
  LineSolitonPerturbation perturbation = PlainLineSoliton{};
};

/// Signed bump height ±√(2ω)/10 used for the cubic experiments.
inline double cubic_bump_lambda(double omega, int sign) {
  return (sign >= 0 ? 1.0 : -1.0) * std::sqrt(2.0 * omega) / 10.0;
}

/// Largest |u| on the x = −Lxπ column (the seam of the periodic box).
inline double max_boundary_magnitude(const Field& u) {
  double m = 0.0;
  for (std::size_t row = 0; row < u.grid().Ny(); ++row) m = std::max(m, std::abs(u(0, row)));
  return m;
}

inline constexpr double boundary_tolerance = 1e-12;

/// Sample the initial condition at the grid nodes. With strict set, data
/// that is not numerically zero at the x seam is rejected.
inline Field build_initial_condition(const LineSolitonInitialCondition& ic, const Grid2D& g,
                                     bool strict = false) {
  const auto& phi = ic.profile;
  Field u = std::visit(
      [&](const auto& p) -> Field {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, PlainLineSoliton>) {
          return sample(g, [&](double x, double) { return complex(phi(x)); });
        } else if constexpr (std::is_same_v<P, GaussianBump>) {
          return sample(g, [&](double x, double y) {
            return complex(phi(x) + p.lambda * std::exp(-(x * x + y * y)));
          });
        } else {
          return sample(g, [&](double x, double y) { return complex(phi(x - p.lambda * std::cos(y))); });
        }
      },
      ic.perturbation);
  if (strict && max_boundary_magnitude(u) >= boundary_tolerance) {
    throw Error(ErrorCode::domain_too_small,
                "initial data is " + std::to_string(max_boundary_magnitude(u)) +
                    " at x = -Lx*pi; enlarge Lx");
  }
  return u;
}

struct ProfileCurveRow {
  double omega, mass, energy, amplitude;
};

inline std::vector<ProfileCurveRow> profile_curves(Model model, const std::vector<double>& omegas) {
  std::vector<ProfileCurveRow> rows;
  rows.reserve(omegas.size());
  for (double w : omegas) {
    SolitonProfile1D p(model, w);
    rows.push_back({w, p.mass(), p.energy(), p.amplitude()});
  }
  return rows;
}

}  // namespace cqnls
