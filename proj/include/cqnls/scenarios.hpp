#pragma once

// Scenario registry and runner. A scenario fixes the physics (model, ω,
// initial data, torus) and a resolution; run_scenario evolves it, writes the
// run artifacts and checks the expectation block.
//
// Artifacts in the output directory:
//   meta.json     configuration echo (written before stepping), then the
//                 termination status and check results
//   run.csv       t, sup_norm, mass, energy, delta_E
//   verdict.csv   classification, peak_count, anisotropy, omega_star, residual
//   snap_*.cqnls  CQNLS1 snapshots at the requested times

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cqnls/diagnostics.hpp"
#include "cqnls/groundstate.hpp"
#include "cqnls/integrator.hpp"
#include "cqnls/profiles.hpp"
#include "cqnls/snapshot.hpp"

namespace cqnls {

enum class InitialKind { plain_line_soliton, gaussian_perturbed, periodic_deformation, ground_state_embed };

constexpr std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::plain_line_soliton: return "plain-line-soliton";
    case InitialKind::gaussian_perturbed: return "gaussian-perturbed";
    case InitialKind::periodic_deformation: return "periodic-deformation";
    case InitialKind::ground_state_embed: return "ground-state-embed";
  }
  return "unknown";
}

inline InitialKind parse_initial_kind(std::string_view s) {
  for (auto k : {InitialKind::plain_line_soliton, InitialKind::gaussian_perturbed, InitialKind::periodic_deformation,
                 InitialKind::ground_state_embed}) {
    if (s == to_string(k)) return k;
  }
  throw Error(ErrorCode::invalid_configuration, "unknown initial condition kind '" + std::string(s) + "'");
}

inline Classification parse_classification(std::string_view s) {
  for (auto c : {Classification::line_soliton_retained, Classification::lump_formed, Classification::blown_up,
                 Classification::undecided}) {
    if (s == to_string(c)) return c;
  }
  throw Error(ErrorCode::invalid_configuration, "unknown classification '" + std::string(s) + "'");
}

struct Window {
  double lo = 0.0, hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct FitExpectation {
  double t = 0.0;
  Window omega_star;
  double max_relative_residual = 0.05;
  FitAmplitude amplitude = FitAmplitude::sup_norm;
};

struct Expectation {
  std::optional<Termination> termination;
  std::optional<Window> stop_time;
  std::optional<double> min_sup_at_stop;
  std::optional<Classification> classification;
  std::optional<std::size_t> peak_count;
  std::vector<FitExpectation> fits;
  std::optional<double> max_error;  ///< vs u₀e^{iωT} for stationary initial data
  std::optional<double> max_energy_drift;
  std::optional<double> max_mass_drift;
  std::optional<Window> anisotropy;
  std::optional<Window> final_sup;
  std::optional<Window> jump_time;
  double jump_factor = 1.25;  ///< jump = first t with ‖u‖_∞ ≥ factor·‖u₀‖_∞

  bool expects_stop() const { return termination && *termination != Termination::completed; }
};

struct Scenario {
  std::string id;
  std::string note;
  Model model = Model::cubic_quintic;
  double omega = 0.1;
  InitialKind kind = InitialKind::gaussian_perturbed;
  double lambda = 0.0;
  double Lx = 40.0, Ly = 2.0;
  std::size_t Nx = 1024, Ny = 128, Nt = 1000;
  double T = 1.0;
  std::vector<double> snapshot_times;
  Expectation expected;
  bool long_running = false;
  bool desk = false;

  Grid2D grid() const { return make_grid(Lx, Ly, Nx, Ny); }
  double dt() const { return T / static_cast<double>(Nt); }

  void validate() const {
    if (id.empty()) throw Error(ErrorCode::invalid_configuration, "scenario id is empty");
    if (!(Lx > 0.0) || !(Ly > 0.0) || !(T > 0.0) || Nt == 0) {
      throw Error(ErrorCode::invalid_configuration, id + ": Lx, Ly, T and Nt must be positive");
    }
    require_admissible_frequency(model, omega);
    if (kind == InitialKind::periodic_deformation && lambda < 0.0) {
      throw Error(ErrorCode::invalid_configuration, id + ": deformation amplitude must be non-negative");
    }
    (void)grid();
  }
};

inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json j{{"id", s.id},
                   {"note", s.note},
                   {"model", std::string(to_string(s.model))},
                   {"omega", s.omega},
                   {"initial", std::string(to_string(s.kind))},
                   {"lambda", s.lambda},
                   {"Lx", s.Lx},
                   {"Ly", s.Ly},
                   {"Nx", s.Nx},
                   {"Ny", s.Ny},
                   {"Nt", s.Nt},
                   {"T", s.T},
                   {"dt", s.dt()},
                   {"snapshot_times", s.snapshot_times},
                   {"long_running", s.long_running},
                   {"desk", s.desk}};
  return j;
}

namespace detail {

inline Scenario make(std::string id, std::string note, Model model, double omega, InitialKind kind, double lambda,
                     double Lx, double Ly, std::size_t Nx, std::size_t Ny, std::size_t Nt, double T) {
  Scenario s;
  s.id = std::move(id);
  s.note = std::move(note);
  s.model = model;
  s.omega = omega;
  s.kind = kind;
  s.lambda = lambda;
  s.Lx = Lx;
  s.Ly = Ly;
  s.Nx = Nx;
  s.Ny = Ny;
  s.Nt = Nt;
  s.T = T;
  s.snapshot_times = {T};
  return s;
}

// Reduced-resolution copy: Nx/4 and Nt/4 (time step ×4); the registry adjusts individual runs.
inline Scenario desk_variant(const Scenario& full) {
  Scenario d = full;
  d.id = full.id + "-desk";
  d.desk = true;
  d.long_running = false;
  d.Nx = full.Nx / 4;
  d.Nt = full.Nt / 4;
  d.note = "desk: " + full.note;
  return d;
}

}  // namespace detail

/// Every reproduction run, full resolution first, followed by the desk
/// variants of the long runs.
inline std::vector<Scenario> registry() {
  using detail::make;
  constexpr auto cq = Model::cubic_quintic;
  constexpr auto cub = Model::cubic;
  constexpr auto gauss = InitialKind::gaussian_perturbed;
  constexpr auto deform = InitialKind::periodic_deformation;
  std::vector<Scenario> r;

  {
    auto s = make("validate-line-soliton", "exact line soliton propagated to t=1; compare with phi e^{0.1 i}", cq, 0.1,
                  InitialKind::plain_line_soliton, 0.0, 40, 3, 1024, 32, 1000, 1.0);
    s.expected.termination = Termination::completed;
    s.expected.max_error = 1e-12;
    s.expected.max_energy_drift = 1e-12;
    r.push_back(s);
  }
  {
    auto s = make("validate-ground-state", "radial ground state Q_0.1 propagated to t=1; compare with Q e^{0.1 i}", cq,
                  0.1, InitialKind::ground_state_embed, 0.0, 10, 10, 256, 256, 10000, 1.0);
    s.expected.termination = Termination::completed;
    s.expected.max_error = 1e-8;
    s.expected.max_energy_drift = 1e-12;
    r.push_back(s);
  }
  for (int sign : {+1, -1}) {
    const std::string suffix = sign > 0 ? "plus" : "minus";
    auto s = make("cubic-w004-" + suffix, "cubic, mass below the ground-state mass; no blow-up expected", cub, 0.04, gauss,
                  cubic_bump_lambda(0.04, sign), 100, 2, 4096, 128, 10000, 100.0);
    s.expected.termination = Termination::completed;
    s.expected.classification = Classification::line_soliton_retained;
    s.expected.max_mass_drift = 1e-10;
    s.long_running = true;
    r.push_back(s);
  }
  {
    auto s = make("cubic-blowup-plus", "cubic, bump on the crest; single-point blow-up", cub, 1.0, gauss,
                  cubic_bump_lambda(1.0, +1), 100, 2, 4096, 128, 10000, 100.0);
    s.expected.termination = Termination::energy_drift_stop;
    s.expected.stop_time = Window{2.0, 2.7};
    s.expected.min_sup_at_stop = 30.0;
    s.expected.classification = Classification::blown_up;
    s.snapshot_times = {1.0, 2.0};
    r.push_back(s);
  }
  {
    auto s = make("cubic-blowup-minus", "cubic, hole in the crest; blow-up at two separated peaks", cub, 1.0, gauss,
                  cubic_bump_lambda(1.0, -1), 100, 2, 4096, 128, 10000, 100.0);
    s.expected.termination = Termination::energy_drift_stop;
    s.expected.stop_time = Window{2.7, 3.6};
    s.expected.peak_count = 2;
    s.expected.classification = Classification::blown_up;
    s.snapshot_times = {1.0, 2.0, 3.0};
    r.push_back(s);
  }
  for (int sign : {+1, -1}) {
    const std::string suffix = sign > 0 ? "plus" : "minus";
    auto s = make("stable-Ly2-" + suffix, "line soliton mass below M(Q_0.1); retains its shape", cq, 0.1, gauss,
                  0.05 * sign, 40, 2, 1024, 128, 1000, 20.0);
    s.expected.termination = Termination::completed;
    s.expected.classification = Classification::line_soliton_retained;
    s.expected.max_mass_drift = 1e-10;
    s.expected.fits.push_back(sign > 0 ? FitExpectation{5.0, {0.1007, 0.1027}} : FitExpectation{20.0, {0.0994, 0.1014}});
    s.snapshot_times = {5.0, 20.0};
    r.push_back(s);
  }
  for (int sign : {+1, -1}) {
    const std::string suffix = sign > 0 ? "plus" : "minus";
    auto s = make("unstable-Ly3-" + suffix, "line soliton mass above M(Q_0.1); decays into a lump", cq, 0.1, gauss,
                  0.05 * sign, 150, 3, 4096, 128, 50000, 500.0);
    s.expected.termination = Termination::completed;
    s.expected.classification = Classification::lump_formed;
    s.expected.anisotropy = Window{0.5, 2.0};
    s.expected.final_sup = Window{0.5, 1.0};
    s.snapshot_times = {100.0, 200.0, 300.0, 400.0, 500.0};
    s.long_running = true;
    r.push_back(s);
  }
  const std::pair<double, double> freq_targets[] = {{0.1809, 0.1805}};
  for (double ly : {3.0, 5.0}) {
    for (int sign : {+1, -1}) {
      const std::string suffix = sign > 0 ? "plus" : "minus";
      const bool narrow = ly == 3.0;
      auto s = make(std::string("freq-w018-Ly") + (narrow ? "3-" : "5-") + suffix,
                    narrow ? "omega near 3/16 stays a line soliton on the period that destabilises omega=0.1"
                           : "omega near 3/16 on the wider period L_y=5",
                    cq, 0.18, gauss, 0.077 * sign, 150, ly, 4096, 128, narrow ? 100000 : 20000, 1000.0);
      s.expected.termination = Termination::completed;
      if (narrow) {
        const double target = sign > 0 ? freq_targets[0].first : freq_targets[0].second;
        s.expected.classification = Classification::line_soliton_retained;
        s.expected.fits.push_back({1000.0, {target - 0.001, target + 0.001}});
      }
      s.snapshot_times = {250.0, 500.0, 750.0, 1000.0};
      s.long_running = true;
      r.push_back(s);
    }
  }
  {
    auto s = make("deform-cubic-w004", "cubic periodic deformation below the ground-state mass; stays bounded", cub,
                  0.04, deform, 0.8, 100, 2, 4096, 128, 10000, 100.0);
    s.expected.termination = Termination::completed;
    s.snapshot_times = {85.0, 90.0, 100.0};
    s.long_running = true;
    r.push_back(s);
  }
  {
    auto s = make("deform-cubic-w1", "cubic periodic deformation above the ground-state mass; blow-up", cub, 1.0,
                  deform, 0.8, 10, 2, 4096, 128, 10000, 100.0);
    s.expected.termination = Termination::energy_drift_stop;
    s.expected.stop_time = Window{2.3, 3.2};
    s.expected.classification = Classification::blown_up;
    s.snapshot_times = {1.0, 2.0};
    r.push_back(s);
  }
  for (double ly : {2.0, 3.0}) {
    const bool narrow = ly == 2.0;
    auto s = make(std::string("deform-cq-Ly") + (narrow ? "2" : "3"),
                  narrow ? "cubic-quintic periodic deformation, stable period"
                         : "cubic-quintic periodic deformation, unstable period; sudden growth of the sup norm",
                  cq, 0.1, deform, 0.8, 150, ly, 4096, 64, 10000, 1000.0);
    s.expected.termination = Termination::completed;
    if (!narrow) s.expected.jump_time = Window{280.0, 380.0};
    s.snapshot_times = {250.0, 500.0, 750.0, 1000.0};
    s.long_running = true;
    r.push_back(s);
  }

  // Desk variants of the long runs.
  std::vector<Scenario> desk;
  for (const auto& s : r) {
    if (!s.long_running) continue;
    auto d = detail::desk_variant(s);
    if (s.id.starts_with("unstable-Ly3")) {
      // dt = 0.02 keeps the mass drift below 1e-10; expectations as the full run.
      d.Nt = s.Nt / 2;
    } else if (s.id.starts_with("freq-w018-Ly3")) {
      d.T = 200.0;
      d.Nt = static_cast<std::size_t>(std::llround(d.T / (4.0 * s.dt())));
      d.snapshot_times = {100.0, 200.0};
      d.expected.fits = {{200.0, {0.1795, 0.1820}}};
    } else if (s.id.starts_with("deform-cq-")) {
      // dt = 0.02 keeps the mass drift below 1e-10 after the lump forms.
      d.Nt = 5 * s.Nt;
      if (s.expected.jump_time) d.expected.jump_time = Window{200.0, 500.0};
    } else if (s.id.starts_with("freq-w018-Ly5")) {
      d.snapshot_times = {250.0, 500.0, 750.0, 1000.0};
    }
    desk.push_back(d);
  }
  r.insert(r.end(), desk.begin(), desk.end());
  return r;
}

inline const Scenario& find_scenario(const std::vector<Scenario>& reg, std::string_view id) {
  for (const auto& s : reg) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::invalid_configuration, "unknown scenario '" + std::string(id) + "'");
}

/// Initial data of a scenario on its grid.
inline Field build_scenario_field(const Scenario& s) {
  const auto g = s.grid();
  if (s.kind == InitialKind::ground_state_embed) {
    const auto gs = solve_ground_state_robust(s.model, s.omega);
    auto u = embed_radial(gs, g);
    refine_on_grid(u, s.model, s.omega);
    return u;
  }
  LineSolitonInitialCondition ic{SolitonProfile1D(s.model, s.omega), PlainLineSoliton{}};
  if (s.kind == InitialKind::gaussian_perturbed) ic.perturbation = GaussianBump{s.lambda};
  if (s.kind == InitialKind::periodic_deformation) ic.perturbation = PeriodicDeformation{s.lambda};
  return build_initial_condition(ic, g);
}

/// First sampled time at which ‖u‖_∞ reaches factor·‖u₀‖_∞.
inline std::optional<double> jump_time(const RunRecord& rec, double factor) {
  if (rec.sup_norms.empty()) return std::nullopt;
  const double level = factor * rec.sup_norms.front();
  for (std::size_t i = 0; i < rec.samples(); ++i) {
    if (rec.sup_norms[i] >= level) return rec.times[i];
  }
  return std::nullopt;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOptions {
  std::filesystem::path out_dir;  ///< empty: no files written
  bool write_snapshots = true;
};

struct ScenarioOutcome {
  RunRecord record;
  StabilityVerdict verdict;
  std::vector<CheckResult> checks;
  std::map<double, FitResult> fits;
  double max_error = std::nan("");
  int exit_code = 0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

namespace exit_code {
inline constexpr int pass = 0;
inline constexpr int expectation_failure = 1;
inline constexpr int configuration_error = 2;
inline constexpr int divergence = 3;
}  // namespace exit_code

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline std::string fmt(const Window& w) { return "[" + fmt(w.lo) + ", " + fmt(w.hi) + "]"; }

inline void write_run_csv(const std::filesystem::path& path, const RunRecord& rec) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  os << "t,sup_norm,mass,energy,delta_E\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < rec.samples(); ++i) {
    os << rec.times[i] << ',' << rec.sup_norms[i] << ',' << rec.masses[i] << ',' << rec.energies[i] << ','
       << rec.delta_E[i] << '\n';
  }
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  os << j.dump(2) << '\n';
}

inline std::string snapshot_name(double t) {
  std::ostringstream os;
  os << "snap_t" << std::fixed << std::setprecision(4) << t << ".cqnls";
  return os.str();
}

}  // namespace detail

/// Evolve a scenario, write its artifacts and evaluate its expectations.
/// Numerical divergence is reported through the exit code, never thrown.
inline ScenarioOutcome run_scenario(const Scenario& s, const RunOptions& opt = {}) {
  s.validate();
  ScenarioOutcome out;
  const auto& exp = s.expected;
  const bool write = !opt.out_dir.empty();

  std::vector<double> fit_times;
  for (const auto& f : exp.fits) fit_times.push_back(f.t);
  Evolution ev;
  ev.model = s.model;
  ev.T = s.T;
  ev.steps = s.Nt;
  ev.snapshot_times = s.snapshot_times;
  ev.snapshot_times.insert(ev.snapshot_times.end(), fit_times.begin(), fit_times.end());
  ev.validate();

  nlohmann::json meta{{"scenario", to_json(s)},
                      {"integrator",
                       {{"scheme", std::string(to_string(ev.scheme))},
                        {"stiff_threshold", ev.stiff_threshold},
                        {"dealias", ev.dealias},
                        {"energy_drift_stop", ev.stop.energy_drift},
                        {"overflow_stop", ev.stop.overflow},
                        {"sample_stride", ev.stride()}}},
                      {"fft_threads", detail::configured_fft_threads()},
                      {"status", "running"}};
  if (write) {
    std::filesystem::create_directories(opt.out_dir);
    detail::write_json(opt.out_dir / "meta.json", meta);
  }

  const Field u0 = build_scenario_field(s);
  auto sink = [&](double t, const Field& f) -> std::string {
    for (double ft : fit_times) {
      if (std::abs(ft - t) <= 0.5 * s.dt()) {
        try {
          const auto& fe = *std::find_if(exp.fits.begin(), exp.fits.end(), [&](const FitExpectation& x) { return x.t == ft; });
          out.fits[ft] = fit_line_soliton(f, s.model, fe.amplitude);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::fit_impossible) throw;
        }
      }
    }
    if (!write || !opt.write_snapshots) return {};
    const auto name = detail::snapshot_name(t);
    write_snapshot(opt.out_dir / name, f, t);
    return name;
  };

  RunResult result{RunRecord{}, Field(u0.grid())};
  bool diverged = false;
  try {
    result = evolve(u0, ev, sink);
  } catch (const Diverged& e) {
    diverged = true;
    out.checks.push_back({"no numerical divergence", false, e.what()});
  }
  out.record = result.record;
  const auto& rec = out.record;
  if (!diverged) out.verdict = classify_final_state(rec, result.final_state, s.model);

  auto check = [&](std::string name, bool ok, std::string detail) {
    out.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  if (!diverged) {
    if (exp.termination) {
      check("termination", rec.termination == *exp.termination,
            std::string(to_string(rec.termination)) + " at t=" + detail::fmt(rec.end_time) + ", expected " +
                std::string(to_string(*exp.termination)));
    }
    if (exp.stop_time) {
      check("stop time", rec.termination != Termination::completed && exp.stop_time->contains(rec.end_time),
            "t=" + detail::fmt(rec.end_time) + " in " + detail::fmt(*exp.stop_time));
    }
    if (exp.min_sup_at_stop) {
      check("sup norm at stop", rec.sup_norms.back() >= *exp.min_sup_at_stop,
            detail::fmt(rec.sup_norms.back()) + " >= " + detail::fmt(*exp.min_sup_at_stop));
    }
    if (exp.classification) {
      check("classification", out.verdict.classification == *exp.classification,
            std::string(to_string(out.verdict.classification)) + ", expected " +
                std::string(to_string(*exp.classification)));
    }
    if (exp.peak_count) {
      check("peak count", out.verdict.peak_count == *exp.peak_count,
            std::to_string(out.verdict.peak_count) + ", expected " + std::to_string(*exp.peak_count));
    }
    for (const auto& f : exp.fits) {
      const auto it = out.fits.find(f.t);
      if (it == out.fits.end()) {
        check("fit at t=" + detail::fmt(f.t), false, "no fit (run ended early or amplitude out of range)");
        continue;
      }
      const auto& fit = it->second;
      check("omega* at t=" + detail::fmt(f.t), f.omega_star.contains(fit.omega_star),
            detail::fmt(fit.omega_star) + " in " + detail::fmt(f.omega_star) + " (" +
                std::string(to_string(f.amplitude)) + " fit)");
      check("fit residual at t=" + detail::fmt(f.t), fit.residual <= f.max_relative_residual * fit.fit_amplitude,
            detail::fmt(fit.residual / fit.fit_amplitude) + " <= " + detail::fmt(f.max_relative_residual));
    }
    if (exp.max_error) {
      Field exact = u0;
      exact *= std::polar(1.0, s.omega * s.T);
      out.max_error = max_abs_difference(result.final_state.values(), exact.values());
      check("error vs exact", out.max_error <= *exp.max_error,
            detail::fmt(out.max_error) + " <= " + detail::fmt(*exp.max_error));
    }
    if (exp.max_energy_drift) {
      const double d = *std::max_element(rec.delta_E.begin(), rec.delta_E.end());
      check("energy drift", d <= *exp.max_energy_drift, detail::fmt(d) + " <= " + detail::fmt(*exp.max_energy_drift));
    }
    if (exp.max_mass_drift) {
      check("mass drift", rec.max_mass_drift() <= *exp.max_mass_drift,
            detail::fmt(rec.max_mass_drift()) + " <= " + detail::fmt(*exp.max_mass_drift));
    }
    if (exp.anisotropy) {
      check("anisotropy", exp.anisotropy->contains(out.verdict.anisotropy),
            detail::fmt(out.verdict.anisotropy) + " in " + detail::fmt(*exp.anisotropy));
    }
    if (exp.final_sup) {
      check("final sup norm", exp.final_sup->contains(rec.sup_norms.back()),
            detail::fmt(rec.sup_norms.back()) + " in " + detail::fmt(*exp.final_sup));
    }
    if (exp.jump_time) {
      const auto tj = jump_time(rec, exp.jump_factor);
      check("sup-norm jump time", tj && exp.jump_time->contains(*tj),
            (tj ? "t=" + detail::fmt(*tj) : std::string("no jump")) + " in " + detail::fmt(*exp.jump_time));
    }
  }

  const bool unexpected_stop = !diverged && rec.termination != Termination::completed && !exp.expects_stop();
  if (diverged || unexpected_stop) {
    out.exit_code = exit_code::divergence;
  } else {
    out.exit_code = out.passed() ? exit_code::pass : exit_code::expectation_failure;
  }

  if (write) {
    detail::write_run_csv(opt.out_dir / "run.csv", rec);
    {
      std::ofstream os(opt.out_dir / "verdict.csv");
      write_verdict_csv(os, out.verdict);
    }
    meta["status"] = out.exit_code == exit_code::pass ? "pass" : out.exit_code == exit_code::divergence ? "divergence" : "fail";
    meta["termination"] = {{"status", std::string(to_string(rec.termination))},
                           {"end_time", rec.end_time},
                           {"steps_taken", rec.steps_taken}};
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : out.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    meta["checks"] = checks;
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& sn : rec.snapshots) snaps.push_back({{"t", sn.t}, {"file", sn.reference}});
    meta["snapshots"] = snaps;
    meta["exit_code"] = out.exit_code;
    detail::write_json(opt.out_dir / "meta.json", meta);
  }
  return out;
}

}  // namespace cqnls
