// Acceptance suite: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Run artifacts go to the directory given as the first argument
// (default: acceptance-runs in the working directory).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cqnls/diagnostics.hpp"
#include "cqnls/groundstate.hpp"
#include "cqnls/integrator.hpp"
#include "cqnls/profiles.hpp"
#include "cqnls/scenarios.hpp"
#include "oracles.hpp"

using namespace cqnls;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string name;
  bool passed = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    details.push_back(std::string(ok ? "" : "FAILED ") + what);
  }
};

std::vector<Criterion> results;

void report(Criterion c) {
  std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
  for (std::size_t i = 0; i < c.details.size(); ++i) std::cout << (i ? "; " : ": ") << c.details[i];
  std::cout << std::endl;
  results.push_back(std::move(c));
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

fs::path out_root;
std::vector<std::pair<std::string, double>> completed_mass_drifts;

ScenarioOutcome run(const std::string& id) {
  static const auto reg = registry();
  const auto& s = find_scenario(reg, id);
  const auto start = std::chrono::steady_clock::now();
  std::cerr << "running " << id << " ..." << std::flush;
  auto out = run_scenario(s, {out_root / id});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << " " << (out.passed() ? "pass" : "FAIL") << " (" << num(secs) << " s)\n";
  for (const auto& c : out.checks) {
    if (!c.passed) std::cerr << "  failed check " << c.name << ": " << c.detail << "\n";
  }
  if (out.record.termination == Termination::completed) completed_mass_drifts.emplace_back(id, out.record.max_mass_drift());
  return out;
}

std::string checks_summary(const std::string& id, const ScenarioOutcome& out) {
  std::string s = id + " {";
  bool first = true;
  for (const auto& c : out.checks) {
    s += (first ? "" : ", ") + c.name + " " + c.detail;
    first = false;
  }
  return s + "}";
}

void require_scenario(Criterion& c, const std::string& id) {
  const auto out = run(id);
  c.require(out.passed() && out.exit_code == exit_code::pass, checks_summary(id, out));
}

Field evolve_scheme(const Field& u0, Model model, double T, std::size_t steps, Scheme scheme) {
  Evolution ev;
  ev.model = model;
  ev.T = T;
  ev.steps = steps;
  ev.scheme = scheme;
  return evolve(u0, ev).final_state;
}

void validation_a() {
  Criterion c{"Validation A (line soliton, t=1)"};
  require_scenario(c, "validate-line-soliton");
  report(std::move(c));
}

void validation_b() {
  Criterion c{"Validation B (ground state, t=1)"};
  require_scenario(c, "validate-ground-state");
  report(std::move(c));
}

void ground_state_scalars() {
  Criterion c{"Ground-state scalars"};
  const auto q = solve_ground_state(Model::cubic_quintic, 0.1);
  c.require(std::abs(q.mass - 23.74) <= 0.05, "M(Q_0.1) = " + num(q.mass));
  c.require(std::abs(q.amplitude - 0.75) <= 0.02, "|Q_0.1|_inf = " + num(q.amplitude));
  const auto a = solve_ground_state(Model::cubic, 0.25);
  const auto b = solve_ground_state(Model::cubic, 1.0);
  c.require(std::abs(b.mass - 11.70) <= 0.1, "M(Q^cub_1) = " + num(b.mass));
  const double spread = std::abs(a.mass / b.mass - 1.0);
  c.require(spread <= 1e-4, "cubic mass spread over omega in {0.25, 1} = " + num(spread));
  report(std::move(c));
}

void line_mass_anchor() {
  Criterion c{"1D mass anchor"};
  const double m = 4.0 * std::numbers::pi * SolitonProfile1D(Model::cubic_quintic, 0.1).mass();
  c.require(std::abs(m - 20.22) <= 0.02, "4 pi M_1D(phi_0.1) = " + num(m));
  double worst = 0.0;
  for (double w : {0.04, 0.25, 1.0, 4.0}) {
    worst = std::max(worst, std::abs(SolitonProfile1D(Model::cubic, w).mass() / (4.0 * std::sqrt(w)) - 1.0));
  }
  c.require(worst <= 1e-10, "cubic M_1D vs 4 sqrt(omega) rel. error " + num(worst));
  report(std::move(c));
}

void cubic_blowup() {
  Criterion c{"Cubic blow-up and subcritical runs"};
  for (const char* id : {"cubic-blowup-plus", "cubic-blowup-minus", "cubic-w004-plus", "cubic-w004-minus"}) {
    require_scenario(c, id);
  }
  report(std::move(c));
}

void stable_regime() {
  Criterion c{"Stable regime (L_y=2)"};
  require_scenario(c, "stable-Ly2-plus");
  require_scenario(c, "stable-Ly2-minus");
  report(std::move(c));
}

void unstable_regime() {
  Criterion c{"Unstable regime and deformation jump (desk scale)"};
  require_scenario(c, "unstable-Ly3-plus-desk");
  require_scenario(c, "unstable-Ly3-minus-desk");
  require_scenario(c, "deform-cq-Ly3-desk");
  report(std::move(c));
}

void frequency_study() {
  Criterion c{"Frequency study omega=0.18, L_y=3 (desk scale)"};
  require_scenario(c, "freq-w018-Ly3-plus-desk");
  require_scenario(c, "freq-w018-Ly3-minus-desk");
  report(std::move(c));
}

void property_suite() {
  Criterion c{"Property suite"};

  {
    const auto g = make_grid(10, 1, 128, 16);
    const auto u0 = build_initial_condition({SolitonProfile1D(Model::cubic_quintic, 0.1), GaussianBump{0.3}}, g);
    const auto ref = evolve_scheme(u0, Model::cubic_quintic, 0.5, 160, Scheme::composite_rk4);
    const double e1 =
        max_abs_difference(evolve_scheme(u0, Model::cubic_quintic, 0.5, 20, Scheme::composite_rk4).values(), ref.values());
    const double e2 =
        max_abs_difference(evolve_scheme(u0, Model::cubic_quintic, 0.5, 40, Scheme::composite_rk4).values(), ref.values());
    c.require(std::abs(e1 / e2 - 16.0) <= 3.0, "dt-halving error ratio " + num(e1 / e2));
  }

  {
    const auto reg = registry();
    const auto& a = find_scenario(reg, "validate-line-soliton");
    const auto u0 = build_scenario_field(a);
    const auto rk = evolve_scheme(u0, a.model, a.T, 10000, Scheme::composite_rk4);
    const auto ss = evolve_scheme(u0, a.model, a.T, 10000, Scheme::split_step);
    const double d = max_abs_difference(rk.values(), ss.values());
    c.require(d <= 1e-8, "composite vs split step on the line-soliton validation, Nt=1e4: " + num(d));

    const auto& b = find_scenario(reg, "validate-ground-state");
    const auto q0 = build_scenario_field(b);
    Field exact = q0;
    exact *= std::polar(1.0, b.omega * b.T);
    const auto qs = evolve_scheme(q0, b.model, b.T, b.Nt, Scheme::split_step);
    const double es = max_abs_difference(qs.values(), exact.values());
    c.require(es <= 1e-8, "split step on the ground-state validation, error vs exact " + num(es));
  }

  {
    double worst = 0.0;
    std::string where;
    for (const auto& [id, d] : completed_mass_drifts) {
      if (d > worst) {
        worst = d;
        where = id;
      }
    }
    c.require(worst <= 1e-10, "max mass drift over " + std::to_string(completed_mass_drifts.size()) +
                                  " completed runs " + num(worst) + (where.empty() ? "" : " (" + where + ")"));
  }

  {
    const auto g = make_grid(8, 2, 128, 32);
    auto u0 = build_initial_condition({SolitonProfile1D(Model::cubic_quintic, 0.12), GaussianBump{0.2}}, g);
    const auto noise = oracle::random_field(g, 17);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] += 0.05 * noise[i] * std::abs(u0[i]);
    const auto base = evolve_scheme(u0, Model::cubic_quintic, 0.2, 20, Scheme::composite_rk4);
    const complex phase = std::polar(1.0, 1.234);
    Field rotated = u0;
    rotated *= phase;
    Field expect = base;
    expect *= phase;
    const double dg =
        max_abs_difference(evolve_scheme(rotated, Model::cubic_quintic, 0.2, 20, Scheme::composite_rk4).values(),
                           expect.values());
    Field moved(g), base_moved(g);
    for (std::size_t m = 0; m < g.Ny(); ++m) {
      for (std::size_t j = 0; j < g.Nx(); ++j) {
        moved((j + 41) % g.Nx(), (m + 7) % g.Ny()) = u0(j, m);
        base_moved((j + 41) % g.Nx(), (m + 7) % g.Ny()) = base(j, m);
      }
    }
    const double dt =
        max_abs_difference(evolve_scheme(moved, Model::cubic_quintic, 0.2, 20, Scheme::composite_rk4).values(),
                           base_moved.values());
    const double scale = max_abs(base.values());
    c.require(dg <= 1e-12 * scale && dt <= 1e-12 * scale,
              "gauge / translation equivariance " + num(dg / scale) + " / " + num(dt / scale));
  }

  {
    double worst = 0.0;
    for (double w : {0.02, 0.05, 0.08, 0.1, 0.12, 0.15, 0.17, 0.18}) {
      const auto p = oracle::pohozaev_residuals(solve_ground_state_robust(Model::cubic_quintic, w));
      worst = std::max({worst, std::abs(p.nehari), std::abs(p.pohozaev)});
    }
    for (double w : {0.25, 1.0}) {
      const auto p = oracle::pohozaev_residuals(solve_ground_state(Model::cubic, w));
      worst = std::max({worst, std::abs(p.nehari), std::abs(p.pohozaev)});
    }
    c.require(worst <= 1e-8, "Pohozaev identities, worst relative residual " + num(worst));
  }

  {
    double worst = 0.0;
    for (double w = 0.005; w < 0.1875; w += 0.005) {
      const double back = fit_omega_from_amplitude(oracle::cq_amplitude(w));
      worst = std::max(worst, std::abs(back / w - 1.0));
    }
    c.require(worst <= 1e-12, "fit round trip omega -> amplitude -> omega " + num(worst));
  }

  {
    bool line_monotone = true, ground_monotone = true;
    double prev_line = 0.0, prev_ground = 0.0;
    std::vector<double> omegas;
    for (int i = 2; i <= 18; i += 2) omegas.push_back(0.01 * i);
    const auto rows = ground_state_curves(Model::cubic_quintic, omegas);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      const double ml = SolitonProfile1D(Model::cubic_quintic, omegas[i]).mass();
      if (i > 0 && !(ml > prev_line)) line_monotone = false;
      prev_line = ml;
      if (!rows[i].state) {
        ground_monotone = false;
        continue;
      }
      if (i > 0 && !(rows[i].state->mass > prev_ground)) ground_monotone = false;
      prev_ground = rows[i].state->mass;
    }
    c.require(line_monotone && ground_monotone, std::string("monotone M(phi_omega) ") +
                                                    (line_monotone ? "yes" : "no") + ", M(Q_omega) " +
                                                    (ground_monotone ? "yes" : "no"));
  }

  {
    const double l = critical_torus_length(0.1);
    c.require(l >= 2.0 && l <= 3.0, "L_crit(0.1) = " + num(l));
  }

  report(std::move(c));
}

}  // namespace

int main(int argc, char** argv) {
  out_root = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance-runs";
  fs::create_directories(out_root);
  const auto start = std::chrono::steady_clock::now();

  validation_a();
  validation_b();
  ground_state_scalars();
  line_mass_anchor();
  cubic_blowup();
  stable_regime();
  unstable_regime();
  frequency_study();
  property_suite();

  const auto failed = std::count_if(results.begin(), results.end(), [](const Criterion& c) { return !c.passed; });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed in "
            << num(secs) << " s" << std::endl;
  return failed == 0 ? 0 : 1;
}
