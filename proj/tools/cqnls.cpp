// Command-line front end: simulate, groundstate, profile-curves, fit,
// reproduce, list-scenarios.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "cqnls/config.hpp"
#include "cqnls/diagnostics.hpp"
#include "cqnls/groundstate.hpp"
#include "cqnls/profiles.hpp"
#include "cqnls/scenarios.hpp"
#include "cqnls/snapshot.hpp"

namespace {

using namespace cqnls;

void print_outcome(const Scenario& s, const ScenarioOutcome& out) {
  std::cout << s.id << ": " << to_string(out.record.termination) << " at t=" << out.record.end_time << " ("
            << out.record.steps_taken << " steps)\n";
  std::cout << "  verdict: " << to_string(out.verdict.classification) << ", peaks=" << out.verdict.peak_count
            << ", anisotropy=" << out.verdict.anisotropy;
  if (out.verdict.fit) std::cout << ", omega*=" << out.verdict.fit->omega_star;
  std::cout << '\n';
  for (const auto& c : out.checks) std::cout << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
  const char* status = out.exit_code == exit_code::pass                  ? "pass"
                       : out.exit_code == exit_code::expectation_failure ? "expectation failure"
                                                                         : "numerical divergence";
  std::cout << s.id << ": " << status << '\n';
}

struct SimulateArgs {
  std::string config;
  std::optional<std::string> model, initial;
  std::optional<double> omega, lambda, Lx, Ly, T;
  std::optional<std::size_t> Nx, Ny, Nt;
  std::vector<double> snapshots;
  std::string out = "run";
};

Scenario simulate_scenario(const SimulateArgs& a) {
  Scenario s;
  if (!a.config.empty()) {
    s = load_config(a.config);
  } else {
    s.id = "custom";
    s.snapshot_times.clear();
  }
  if (a.model) s.model = parse_model(*a.model);
  if (a.initial) s.kind = parse_initial_kind(*a.initial);
  if (a.omega) s.omega = *a.omega;
  if (a.lambda) s.lambda = *a.lambda;
  if (a.Lx) s.Lx = *a.Lx;
  if (a.Ly) s.Ly = *a.Ly;
  if (a.T) s.T = *a.T;
  if (a.Nx) s.Nx = *a.Nx;
  if (a.Ny) s.Ny = *a.Ny;
  if (a.Nt) s.Nt = *a.Nt;
  if (!a.snapshots.empty()) s.snapshot_times = a.snapshots;
  if (a.config.empty() && !a.omega) throw Error(ErrorCode::invalid_configuration, "--omega is required without --config");
  s.validate();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cubic-quintic and cubic NLS on R x T: simulation, ground states and reproduction runs"};
  app.require_subcommand(1);

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Evolve initial data from a config file and/or flags");
  simulate->add_option("-c,--config", sim.config, "INI configuration file")->check(CLI::ExistingFile);
  simulate->add_option("--model", sim.model, "cubic-quintic | cubic");
  simulate->add_option("--omega", sim.omega, "line soliton frequency");
  simulate->add_option("--initial", sim.initial,
                       "plain-line-soliton | gaussian-perturbed | periodic-deformation | ground-state-embed");
  simulate->add_option("--lambda", sim.lambda, "perturbation or deformation amplitude");
  simulate->add_option("--lx", sim.Lx, "x half-period scale (domain [-Lx pi, Lx pi])");
  simulate->add_option("--ly", sim.Ly, "y half-period scale");
  simulate->add_option("--nx", sim.Nx, "Fourier modes in x (power of two)");
  simulate->add_option("--ny", sim.Ny, "Fourier modes in y (power of two)");
  simulate->add_option("--nt", sim.Nt, "time steps");
  simulate->add_option("--T", sim.T, "final time");
  simulate->add_option("--snapshots", sim.snapshots, "snapshot times")->delimiter(',');
  simulate->add_option("-o,--out", sim.out, "output directory");

  // groundstate
  std::string gs_model = "cubic-quintic";
  std::vector<double> gs_omegas;
  double gs_radius = 0.0;
  std::size_t gs_nodes = 0;
  std::string gs_profile, gs_curves;
  auto* groundstate = app.add_subcommand("groundstate", "Radial ground states Q_omega and their scalars");
  groundstate->add_option("--model", gs_model, "cubic-quintic | cubic");
  groundstate->add_option("--omega", gs_omegas, "frequencies (comma separated, sorted for continuation)")
      ->required()
      ->delimiter(',');
  groundstate->add_option("--radius", gs_radius, "radial domain R (default 30/sqrt(omega))");
  groundstate->add_option("--nodes", gs_nodes, "radial nodes (default h sqrt(omega) = 0.05)");
  groundstate->add_option("--profile-csv", gs_profile, "write (r, Q) of the first frequency");
  groundstate->add_option("--curves-csv", gs_curves, "write (omega, mass, energy, amplitude) rows");

  // profile-curves
  std::string pc_model = "cubic-quintic", pc_out;
  std::vector<double> pc_omegas;
  auto* profile_curves_cmd = app.add_subcommand("profile-curves", "Mass, energy and amplitude of line solitons");
  profile_curves_cmd->add_option("--model", pc_model, "cubic-quintic | cubic");
  profile_curves_cmd->add_option("--omega", pc_omegas, "frequencies (comma separated)")->required()->delimiter(',');
  profile_curves_cmd->add_option("-o,--out", pc_out, "CSV output (default stdout)");

  // fit
  std::string fit_path, fit_model = "cubic-quintic";
  auto* fit = app.add_subcommand("fit", "Fit a line soliton to a CQNLS1 snapshot and classify it");
  fit->add_option("snapshot", fit_path, "snapshot file")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", fit_model, "cubic-quintic | cubic");

  // reproduce
  std::string rp_id, rp_out;
  std::optional<std::size_t> rp_nx, rp_ny, rp_nt;
  std::optional<double> rp_T, rp_lambda, rp_omega, rp_Lx, rp_Ly;
  bool rp_desk = false, rp_unlock = false, rp_no_snapshots = false;
  auto* reproduce = app.add_subcommand("reproduce", "Run a registry scenario and check its expectations");
  reproduce->add_option("id", rp_id, "scenario id (see list-scenarios)")->required();
  reproduce->add_option("-o,--out", rp_out, "output directory (default runs/<id>)");
  reproduce->add_option("--nx", rp_nx, "override Nx");
  reproduce->add_option("--ny", rp_ny, "override Ny");
  reproduce->add_option("--nt", rp_nt, "override Nt");
  reproduce->add_option("--T", rp_T, "override the final time");
  reproduce->add_flag("--desk", rp_desk, "use the reduced-resolution variant");
  reproduce->add_flag("--unlock", rp_unlock, "allow physics overrides (--lambda, --omega, --lx, --ly)");
  reproduce->add_option("--lambda", rp_lambda, "perturbation amplitude (needs --unlock)");
  reproduce->add_option("--omega", rp_omega, "frequency (needs --unlock)");
  reproduce->add_option("--lx", rp_Lx, "x half-period scale (needs --unlock)");
  reproduce->add_option("--ly", rp_Ly, "y half-period scale (needs --unlock)");
  reproduce->add_flag("--no-snapshots", rp_no_snapshots, "skip snapshot files");

  // list-scenarios
  bool ls_all = true;
  auto* list = app.add_subcommand("list-scenarios", "List registry scenarios");
  list->add_flag("--all,!--quick", ls_all, "include long-running scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::configuration_error;
  }

  try {
    if (*simulate) {
      const auto s = simulate_scenario(sim);
      const auto out = run_scenario(s, {sim.out, true});
      print_outcome(s, out);
      return out.exit_code;
    }
    if (*groundstate) {
      const auto model = parse_model(gs_model);
      GroundStateOptions opt;
      opt.radius = gs_radius;
      opt.nodes = gs_nodes;
      const auto rows = ground_state_curves(model, gs_omegas, opt);
      std::cout << std::setprecision(12);
      int rc = 0;
      for (const auto& row : rows) {
        if (row.state) {
          std::cout << "omega=" << row.omega << " mass=" << row.state->mass << " energy=" << row.state->energy
                    << " amplitude=" << row.state->amplitude << " residual=" << row.state->residual_norm
                    << " newton=" << row.state->iterations << '\n';
        } else {
          std::cout << "omega=" << row.omega << " failed: " << row.error << '\n';
          rc = exit_code::divergence;
        }
      }
      if (!gs_profile.empty() && rows.front().state) {
        std::ofstream os(gs_profile);
        rows.front().state->write_csv(os);
      }
      if (!gs_curves.empty()) {
        std::ofstream os(gs_curves);
        write_curves_csv(os, rows);
      }
      return rc;
    }
    if (*profile_curves_cmd) {
      const auto rows = profile_curves(parse_model(pc_model), pc_omegas);
      std::ofstream file;
      if (!pc_out.empty()) file.open(pc_out);
      std::ostream& os = pc_out.empty() ? std::cout : file;
      os << "omega,mass,energy,amplitude\n" << std::setprecision(17);
      for (const auto& r : rows) os << r.omega << ',' << r.mass << ',' << r.energy << ',' << r.amplitude << '\n';
      return 0;
    }
    if (*fit) {
      const auto snap = read_snapshot(fit_path);
      const auto model = parse_model(fit_model);
      std::cout << std::setprecision(10) << "t=" << snap.t << " sup=" << max_abs(snap.field.values())
                << " peaks=" << count_peaks(snap.field) << " anisotropy=" << anisotropy(snap.field)
                << " modulation=" << transverse_modulation(snap.field) << '\n';
      for (auto mode : {FitAmplitude::row_max_mean, FitAmplitude::sup_norm}) {
        const auto r = fit_line_soliton(snap.field, model, mode);
        std::cout << to_string(mode) << ": omega*=" << r.omega_star << " amplitude=" << r.fit_amplitude
                  << " residual=" << r.residual << '\n';
      }
      return 0;
    }
    if (*reproduce) {
      const auto reg = registry();
      auto s = find_scenario(reg, rp_desk ? rp_id + "-desk" : rp_id);
      const bool physics = rp_lambda || rp_omega || rp_Lx || rp_Ly;
      if (physics && !rp_unlock) {
        throw Error(ErrorCode::invalid_configuration, "physics parameters are locked for registry scenarios; add --unlock");
      }
      if (rp_nx) s.Nx = *rp_nx;
      if (rp_ny) s.Ny = *rp_ny;
      if (rp_nt) s.Nt = *rp_nt;
      if (rp_T) {
        s.T = *rp_T;
        std::erase_if(s.snapshot_times, [&](double t) { return t > s.T; });
        std::erase_if(s.expected.fits, [&](const FitExpectation& f) { return f.t > s.T; });
      }
      if (rp_lambda) s.lambda = *rp_lambda;
      if (rp_omega) s.omega = *rp_omega;
      if (rp_Lx) s.Lx = *rp_Lx;
      if (rp_Ly) s.Ly = *rp_Ly;
      s.validate();
      const std::filesystem::path out_dir = rp_out.empty() ? std::filesystem::path("runs") / s.id : std::filesystem::path(rp_out);
      const auto out = run_scenario(s, {out_dir, !rp_no_snapshots});
      print_outcome(s, out);
      std::cout << "artifacts: " << out_dir.string() << '\n';
      return out.exit_code;
    }
    if (*list) {
      for (const auto& s : registry()) {
        if (!ls_all && s.long_running) continue;
        std::cout << std::left << std::setw(28) << s.id << ' ' << std::setw(14) << to_string(s.model) << " omega="
                  << s.omega << " lambda=" << s.lambda << " L=(" << s.Lx << ',' << s.Ly << ") N=(" << s.Nx << ','
                  << s.Ny << ") Nt=" << s.Nt << " T=" << s.T << (s.long_running ? "  [long]" : "") << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::diverged:
      case ErrorCode::no_convergence: return exit_code::divergence;
      default: return exit_code::configuration_error;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::configuration_error;
  }
  return 0;
}
