#pragma once

// Time stepping for the semi-discrete system
//
//   ∂t û = −i|k|² û + i F(|u|²u − σ|u|⁴u),
//
// which is i u_t + Δu = −|u|²u + σ|u|⁴u written in Fourier space (focusing
// cubic, defocusing quintic).
//
// Composite RK4. Each Fourier mode is advanced with the classical RK4 tableau
// (c = 0, ½, ½, 1; b = ⅙, ⅓, ⅓, ⅙). Modes with dt|k|² <= stiff_threshold
// treat the linear term explicitly inside RK4. Stiffer modes are advanced in
// the integrating-factor variable v = e^{i|k|²t} û, so their linear part is
// propagated exactly by e^{−i|k|²c dt}. Both halves share the four nonlinear
// stage evaluations, so the whole step is RK4 applied to a single
// non-autonomous system and is fourth order in dt for every mode.
// Explicit RK4 damps a linear mode by about (dt|k|²)⁶/144 per step, so the
// default threshold keeps that loss below roundoff.
//
// Per mode, with L = −i|k|², E½ = e^{L dt/2}, E = e^{L dt}, N_s the
// nonlinear term at stage s:
//   explicit: a = û + dt/2 (Lû + N₁),  b = û + dt/2 (La + N₂),
//             c = û + dt (Lb + N₃),
//             û⁺ = û + dt/6 (k₁ + 2k₂ + 2k₃ + k₄),  k_s = L·stage_s + N_s
//   stiff:    a = E½ (û + dt/2 N₁),  b = E½ û + dt/2 N₂,
//             c = E û + dt E½ N₃,
//             û⁺ = E û + dt/6 (E N₁ + 2E½ (N₂ + N₃) + N₄)

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "cqnls/grid.hpp"
#include "cqnls/model.hpp"

namespace cqnls {

/// Pointwise nonlinear term i(|u|²u − σ|u|⁴u) transformed to Fourier space.
class NonlinearTerm {
 public:
  NonlinearTerm(const Grid2D& g, Model model, bool dealias = false)
      : fft_(g), sigma_(quintic_coefficient(model)), dealias_(dealias), work_(g) {}

  void operator()(const Field& u, Spectrum& out) {
    auto w = work_.values();
    auto in = u.values();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double a2 = std::norm(in[i]);
      const double g = a2 - sigma_ * a2 * a2;
      w[i] = {-g * in[i].imag(), g * in[i].real()};
    }
    fft_.forward(work_.values(), out.values());
    if (dealias_) dealias_two_thirds(out);
  }

 private:
  FftEngine fft_;
  double sigma_;
  bool dealias_;
  Field work_;
};

/// Right-hand side of the semi-discrete system for a given spectrum.
inline Spectrum rhs(Model model, const Spectrum& uhat) {
  const auto& g = uhat.grid();
  const FftEngine fft(g);
  const Field u = fft.inverse(uhat);
  Spectrum out(g);
  NonlinearTerm(g, model)(u, out);
  if (!all_finite(out.values())) throw Diverged("non-finite nonlinear term", 0);
  const auto k2 = g.k_squared();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += complex(0.0, -k2[i]) * uhat[i];
  return out;
}

/// Spectrum together with its physical-space samples; steppers keep the two
/// consistent so the first stage of a step needs no extra transform.
struct State {
  Spectrum hat;
  Field phys;

  explicit State(const Field& u) : hat(transform(u)), phys(u) {}
};

class CompositeRk4 {
 public:
  CompositeRk4(const Grid2D& g, Model model, double dt, bool dealias = false, double stiff_threshold = 0.01)
      : dt_(dt),
        fft_(g),
        nonlinear_(g, model, dealias),
        acc_(g),
        stage_(g),
        nl_(g),
        work_(g) {
    const auto k2 = g.k_squared();
    modes_.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) {
      auto& m = modes_[i];
      m.linear = complex(0.0, -k2[i]);
      m.stiff = dt * k2[i] > stiff_threshold;
      m.half = std::exp(m.linear * (0.5 * dt));
      m.full = std::exp(m.linear * dt);
    }
  }

  double dt() const { return dt_; }

  std::size_t stiff_mode_count() const {
    return static_cast<std::size_t>(std::count_if(modes_.begin(), modes_.end(), [](const Mode& m) { return m.stiff; }));
  }

  void step(State& s) {
    const double h = dt_, h2 = 0.5 * dt_, h6 = dt_ / 6.0;
    auto u = s.hat.values();
    auto acc = acc_.values();
    auto st = stage_.values();
    auto nl = nl_.values();

    nonlinear_(s.phys, nl_);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& m = modes_[i];
      if (m.stiff) {
        acc[i] = mul(m.full, nl[i]);
        st[i] = mul(m.half, u[i] + h2 * nl[i]);
      } else {
        const complex k = mul(m.linear, u[i]) + nl[i];
        acc[i] = k;
        st[i] = u[i] + h2 * k;
      }
    }

    evaluate_stage();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& m = modes_[i];
      if (m.stiff) {
        acc[i] += 2.0 * mul(m.half, nl[i]);
        st[i] = mul(m.half, u[i]) + h2 * nl[i];
      } else {
        const complex k = mul(m.linear, st[i]) + nl[i];
        acc[i] += 2.0 * k;
        st[i] = u[i] + h2 * k;
      }
    }

    evaluate_stage();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& m = modes_[i];
      if (m.stiff) {
        acc[i] += 2.0 * mul(m.half, nl[i]);
        st[i] = mul(m.full, u[i]) + h * mul(m.half, nl[i]);
      } else {
        const complex k = mul(m.linear, st[i]) + nl[i];
        acc[i] += 2.0 * k;
        st[i] = u[i] + h * k;
      }
    }

    evaluate_stage();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& m = modes_[i];
      if (m.stiff) {
        u[i] = mul(m.full, u[i]) + h6 * (acc[i] + nl[i]);
      } else {
        u[i] += h6 * (acc[i] + mul(m.linear, st[i]) + nl[i]);
      }
    }
    fft_.inverse(s.hat.values(), s.phys.values());
  }

 private:
  struct Mode {
    complex linear, half, full;
    bool stiff;
  };

  void evaluate_stage() {
    fft_.inverse(stage_.values(), work_.values());
    nonlinear_(work_, nl_);
  }

  double dt_;
  FftEngine fft_;
  NonlinearTerm nonlinear_;
  std::vector<Mode> modes_;
  Spectrum acc_, stage_, nl_;
  Field work_;
};

/// Second-order Strang splitting: exact nonlinear phase rotation for dt/2,
/// exact linear flow for dt, nonlinear rotation for dt/2. The nonlinear flow
/// conserves |u| pointwise, which makes each substep exact.
class SplitStepStrang {
 public:
  SplitStepStrang(const Grid2D& g, Model model, double dt, bool dealias = false)
      : dt_(dt), sigma_(quintic_coefficient(model)), dealias_(dealias), fft_(g) {
    const auto k2 = g.k_squared();
    propagator_.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) propagator_[i] = std::exp(complex(0.0, -k2[i] * dt));
  }

  double dt() const { return dt_; }

  void step(State& s) {
    rotate(s.phys, 0.5 * dt_);
    fft_.forward(s.phys.values(), s.hat.values());
    for (std::size_t i = 0; i < propagator_.size(); ++i) s.hat[i] = mul(s.hat[i], propagator_[i]);
    if (dealias_) dealias_two_thirds(s.hat);
    fft_.inverse(s.hat.values(), s.phys.values());
    rotate(s.phys, 0.5 * dt_);
    fft_.forward(s.phys.values(), s.hat.values());
  }

 private:
  void rotate(Field& u, double tau) const {
    for (auto& z : u.values()) {
      const double a2 = std::norm(z);
      const double phase = tau * (a2 - sigma_ * a2 * a2);
      z = mul(z, complex(std::cos(phase), std::sin(phase)));
    }
  }

  double dt_, sigma_;
  bool dealias_;
  FftEngine fft_;
  std::vector<complex> propagator_;
};

/// One composite RK4 step of u; throws Diverged on non-finite output.
inline Field step_driscoll(const Field& u, double dt, Model model = Model::cubic_quintic) {
  State s(u);
  CompositeRk4(u.grid(), model, dt).step(s);
  if (!all_finite(s.phys.values())) throw Diverged("non-finite state after composite RK4 step", 1);
  return s.phys;
}

/// One Strang split step of u; throws Diverged on non-finite output.
inline Field step_splitstep_oracle(const Field& u, double dt, Model model = Model::cubic_quintic) {
  State s(u);
  SplitStepStrang(u.grid(), model, dt).step(s);
  if (!all_finite(s.phys.values())) throw Diverged("non-finite state after split step", 1);
  return s.phys;
}

enum class Scheme { composite_rk4, split_step };

constexpr std::string_view to_string(Scheme s) {
  return s == Scheme::composite_rk4 ? "composite-rk4" : "split-step";
}

struct StopRule {
  double energy_drift = 1e-3;  ///< stop once Δ_E exceeds this
  double overflow = 1e6;       ///< stop once ‖u‖_∞ exceeds this
};

struct Evolution {
  Model model = Model::cubic_quintic;
  double T = 1.0;
  std::size_t steps = 1000;
  StopRule stop;
  std::size_t sample_stride = 0;  ///< 0 selects max(1, steps/1000)
  std::vector<double> snapshot_times;
  bool dealias = false;
  Scheme scheme = Scheme::composite_rk4;
  double stiff_threshold = 0.01;

  double dt() const { return T / static_cast<double>(steps); }
  std::size_t stride() const { return sample_stride ? sample_stride : std::max<std::size_t>(1, steps / 1000); }

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T) || steps == 0) {
      throw Error(ErrorCode::invalid_configuration, "T must be positive and Nt >= 1");
    }
    if (!(stop.energy_drift > 0.0 && stop.energy_drift < 1.0)) {
      throw Error(ErrorCode::invalid_configuration, "energy drift threshold must lie in (0, 1)");
    }
    if (!(stop.overflow > 0.0)) throw Error(ErrorCode::invalid_configuration, "overflow guard must be positive");
    for (double t : snapshot_times) {
      if (!(t >= 0.0) || t > T * (1.0 + 1e-12)) {
        throw Error(ErrorCode::invalid_configuration, "snapshot time " + std::to_string(t) + " outside [0, T]");
      }
    }
  }
};

enum class Termination { completed, energy_drift_stop, overflow_stop };

constexpr std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::energy_drift_stop: return "energy-drift-stop";
    case Termination::overflow_stop: return "overflow-stop";
  }
  return "unknown";
}

struct SnapshotRecord {
  double t;
  std::string reference;
};

struct RunRecord {
  std::vector<double> times, sup_norms, masses, energies, delta_E;
  Termination termination = Termination::completed;
  double end_time = 0.0;
  std::size_t steps_taken = 0;
  std::vector<SnapshotRecord> snapshots;

  std::size_t samples() const { return times.size(); }

  double max_mass_drift() const {
    double d = 0.0;
    for (double m : masses) d = std::max(d, std::abs(m / masses.front() - 1.0));
    return d;
  }
};

struct RunResult {
  RunRecord record;
  Field final_state;
};

/// Called with the time and field at every requested snapshot; returns the
/// reference (file name, label) stored in the record.
using SnapshotSink = std::function<std::string(double, const Field&)>;

/// Called after every sampled diagnostic row on the driving thread.
using SampleObserver = std::function<void(double t, const Field&)>;

/// Map requested snapshot times to step indices: nearest step, duplicates
/// collapsed.
inline std::set<std::size_t> snapshot_steps(const Evolution& ev) {
  std::set<std::size_t> steps;
  for (double t : ev.snapshot_times) {
    const auto n = static_cast<std::size_t>(std::llround(t / ev.dt()));
    steps.insert(std::min(n, ev.steps));
  }
  return steps;
}

namespace detail {

template <class Stepper>
RunResult run(Stepper& stepper, State& s, const Evolution& ev, const SnapshotSink& sink,
              const SampleObserver& observer) {
  RunResult result{RunRecord{}, Field(s.phys.grid())};
  auto& rec = result.record;
  const auto snaps = snapshot_steps(ev);
  const std::size_t stride = ev.stride();
  const double dt = ev.dt();

  double e0 = 0.0;
  auto sample = [&](std::size_t n, double sup, const Integrals& I) {
    const double t = static_cast<double>(n) * dt;
    const double e = energy(I, ev.model);
    if (n == 0) e0 = e;
    rec.times.push_back(t);
    rec.sup_norms.push_back(sup);
    rec.masses.push_back(I.mass);
    rec.energies.push_back(e);
    rec.delta_E.push_back(e0 != 0.0 ? std::abs(e / e0 - 1.0) : std::abs(e - e0));
    if (observer) observer(t, s.phys);
  };
  auto snapshot = [&](std::size_t n) {
    if (!snaps.contains(n)) return;
    const double t = static_cast<double>(n) * dt;
    rec.snapshots.push_back({t, sink ? sink(t, s.phys) : std::string{}});
  };

  sample(0, max_abs(s.phys.values()), quadrature_integrals(s.phys, s.hat));
  snapshot(0);

  std::size_t n = 1;
  for (; n <= ev.steps; ++n) {
    stepper.step(s);
    const double sup = max_abs(s.phys.values());
    if (!std::isfinite(sup) || sup > ev.stop.overflow) {
      rec.termination = Termination::overflow_stop;
      const double t = static_cast<double>(n) * dt;
      rec.times.push_back(t);
      rec.sup_norms.push_back(sup);
      rec.masses.push_back(std::nan(""));
      rec.energies.push_back(std::nan(""));
      rec.delta_E.push_back(std::nan(""));
      break;
    }
    const auto I = quadrature_integrals(s.phys, s.hat);
    const double e = energy(I, ev.model);
    const double drift = e0 != 0.0 ? std::abs(e / e0 - 1.0) : std::abs(e - e0);
    if (drift > ev.stop.energy_drift) {
      rec.termination = Termination::energy_drift_stop;
      sample(n, sup, I);
      break;
    }
    if (n % stride == 0 || n == ev.steps) sample(n, sup, I);
    snapshot(n);
  }
  rec.steps_taken = std::min(n, ev.steps);
  rec.end_time = static_cast<double>(rec.steps_taken) * dt;
  result.final_state = s.phys;
  return result;
}

}  // namespace detail

/// Advance ic by ev.steps fixed steps of size T/Nt, or stop early when the
/// relative energy drift or the sup norm exceeds the stop rule. Early stops
/// are recorded in RunRecord::termination, not thrown.
inline RunResult evolve(const Field& ic, const Evolution& ev, const SnapshotSink& sink = {},
                        const SampleObserver& observer = {}) {
  ev.validate();
  if (!all_finite(ic.values())) throw Error(ErrorCode::invalid_configuration, "initial data is not finite");
  State s(ic);
  if (ev.scheme == Scheme::composite_rk4) {
    CompositeRk4 stepper(ic.grid(), ev.model, ev.dt(), ev.dealias, ev.stiff_threshold);
    return detail::run(stepper, s, ev, sink, observer);
  }
  SplitStepStrang stepper(ic.grid(), ev.model, ev.dt(), ev.dealias);
  return detail::run(stepper, s, ev, sink, observer);
}

}  // namespace cqnls
