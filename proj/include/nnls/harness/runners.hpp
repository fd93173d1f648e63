#pragma once

// Experiment drivers behind the command-line subcommands. Each run_* function
// validates everything it needs before the first output file is created, and
// removes its partial outputs when it fails.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nnls/analysis.hpp"
#include "nnls/harness/config.hpp"
#include "nnls/simulation.hpp"

namespace nnls::harness {

/// A config resolved into library objects.
struct PreparedRun {
  RunConfig cfg;
  Grid<double> grid;
  ModelParams<double> params;
  FieldState<double> initial;
  std::optional<SolitonSpec<double>> soliton;
  /// Exact solution, when one is known: the soliton, the plane wave, or the
  /// exact linear flow when f vanishes identically.
  Reference<double> reference;
};

/// Throws ConfigError on any inconsistency, including t_end - t0 not being a
/// multiple of dt for a snapshot initial state.
PreparedRun prepare(const RunConfig& cfg);

/// Number of grid modes with |xi| > xi_+. These grow exponentially under the
/// exact linear flow, amplifying roundoff.
Index unstable_mode_count(const PreparedRun& run);

/// True when f vanishes identically (detuned_cubic with delta = alpha = 0).
bool is_zero_model(const Nonlinearity<double>& model);

// --- simulate ---------------------------------------------------------------

SimulationResult<double> run_simulate(const PreparedRun& run, const std::filesystem::path& out_dir);

// --- converge ---------------------------------------------------------------

struct ConvergenceReport {
  std::vector<double> dt_list;
  std::vector<double> err_u;
  std::vector<double> err_v;
  std::vector<double> observed_orders_u;
  std::vector<double> observed_orders_v;
  std::vector<double> err_hamiltonian;
  std::vector<double> hamiltonian_orders;
  std::vector<long> total_iterations;
};

/// Checks that `dts` halves strictly and that every entry divides the run length.
void validate_dt_list(const PreparedRun& run, const std::vector<double>& dts);

/// One simulation per dt (run concurrently), sampled at a common interval
/// sample_every * stepper.dt of the config. Results are in dt order.
std::vector<SimulationResult<double>> convergence_runs(const PreparedRun& run, const std::vector<double>& dts);

/// Relative L2 errors at t_end, maximum relative Hamiltonian error over the
/// samples, and log2 ratios between consecutive entries.
ConvergenceReport make_report(const PreparedRun& run, const std::vector<double>& dts,
                              const std::vector<SimulationResult<double>>& runs);

ConvergenceReport run_converge(const PreparedRun& run, const std::vector<double>& dts,
                               const std::filesystem::path& out_dir);

std::string report_json(const ConvergenceReport& report);

// --- dispersion ---------------------------------------------------------------

struct DispersionRow {
  std::string kind;  // "scan" or "root"
  double xi{};
  double omega_t{};
  double residual{};
  double continuous_residual{};  // continuous relation at (xi/h, omega_t/dt)
};

/// Residual scan over the configured (xi, omega_t) box, followed by the zero
/// set along omega_t at every scanned xi (sign-change bracket, then bisection).
std::vector<DispersionRow> dispersion_rows(const PreparedRun& run, bool nonlinear);

std::vector<DispersionRow> run_dispersion(const PreparedRun& run, bool nonlinear,
                                          const std::filesystem::path& out_dir);

// --- residuals ----------------------------------------------------------------

struct ResidualRow {
  double t{};
  double energy_max{};
  double energy_l2{};
  double momentum_max{};
  double momentum_l2{};
};

/// Local conservation-law residuals over consecutive windows of three samples
/// spaced sample_every * dt, taken from the integrator or from the exact
/// solution (config residuals.source).
std::vector<ResidualRow> residual_rows(const PreparedRun& run);

std::vector<ResidualRow> run_residuals(const PreparedRun& run, const std::filesystem::path& out_dir);

}  // namespace nnls::harness
