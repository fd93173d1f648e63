#include "nnls/harness/runners.hpp"

#include <cmath>
#include <deque>
#include <future>
#include <limits>

#include "json.hpp"
#include "nnls/harness/io.hpp"
#include "nnls/invariants.hpp"

namespace nnls::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_drift(double x, double x0) {
  return x0 != 0 ? std::abs(x - x0) / std::abs(x0) : std::abs(x - x0);
}

std::vector<double> log2_ratios(const std::vector<double>& e) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) out.push_back(std::log2(e[i] / e[i + 1]));
  return out;
}

double sampling_interval(const RunConfig& cfg) { return cfg.sample_every * cfg.stepper.dt; }

}  // namespace

bool is_zero_model(const Nonlinearity<double>& model) {
  const auto* d = std::get_if<DetunedCubic<double>>(&model);
  return d != nullptr && d->delta == 0 && d->alpha == 0;
}

Index unstable_mode_count(const PreparedRun& run) {
  const double xi_plus = degenerate_wavenumber(run.params);
  const RealVector<double> xi = mode_wavenumbers(run.grid);
  return (xi.array().abs() > xi_plus).count();
}

PreparedRun prepare(const RunConfig& cfg) {
  PreparedRun run{cfg, make_grid<double>(cfg.grid.a, cfg.grid.b, cfg.grid.n),
                  make_model_params(cfg.kappa, cfg.beta, cfg.model), {}, {}, nullptr};
  const auto& grid = run.grid;
  switch (cfg.initial.kind) {
    case InitialKind::soliton: {
      run.soliton = make_soliton_spec(cfg.initial.eta, cfg.initial.vel, run.params);
      auto [u, v] = soliton_samples(grid, 0.0, *run.soliton);
      run.initial = {std::move(u), std::move(v), 0.0};
      const auto sp = *run.soliton;
      run.reference = [grid, sp](double t) {
        auto [u, v] = soliton_samples(grid, t, sp);
        return FieldState<double>{std::move(u), std::move(v), t};
      };
      break;
    }
    case InitialKind::plane_wave: {
      const double A = cfg.initial.amplitude;
      const double k = cfg.initial.mode * grid.base_wavenumber();
      const double omega = continuous_dispersion_roots(k, A, run.params).first;
      if (!std::isfinite(omega)) {
        throw ConfigError("initial: plane_wave mode has no real frequency (complex dispersion roots)");
      }
      const auto nodes = grid.nodes;
      run.reference = [nodes, A, k, omega](double t) {
        FieldState<double> s{ComplexVector<double>(nodes.size()), ComplexVector<double>(nodes.size()), t};
        for (Index j = 0; j < nodes.size(); ++j) {
          s.u[j] = std::polar(A, k * nodes[j] + omega * t);
          s.v[j] = std::complex<double>(0, omega) * s.u[j];
        }
        return s;
      };
      run.initial = run.reference(0.0);
      break;
    }
    case InitialKind::file:
      run.initial = read_state_json(cfg.base_dir / cfg.initial.path, cfg.grid);
      check_state(run.initial, grid);
      break;
  }
  if (!run.reference && is_zero_model(cfg.model)) {
    const FieldState<double> init = run.initial;
    const auto params = run.params;
    run.reference = [init, params, grid](double t) { return exact_linear_step(init, params, grid, t - init.t); };
  }
  (void)step_count(run.initial.t, cfg.t_end, cfg.stepper.dt);
  return run;
}

// --- simulate ---------------------------------------------------------------

SimulationResult<double> run_simulate(const PreparedRun& run, const std::filesystem::path& out_dir) {
  const auto& cfg = run.cfg;
  OutputGuard guard(out_dir);
  const auto res = simulate(run.initial, run.params, run.grid, cfg.stepper, cfg.t_end, cfg.sample_every, {},
                            run.reference);
  const auto d0 = diagnose(run.initial, run.params, run.grid, 0, static_cast<const Reference<double>*>(nullptr));
  if (cfg.outputs.csv) {
    CsvWriter csv(guard.file("timeseries.csv"), {"t", "H", "I1", "I2", "l2_norm", "fp_iters", "err_u", "err_v",
                                                 "rel_drift_H", "rel_drift_I1", "rel_drift_I2"});
    for (const auto& r : res.records) {
      csv.row(r.t, r.hamiltonian, r.i1, r.i2, r.l2_norm, r.fp_iters, r.err_u, r.err_v,
              relative_drift(r.hamiltonian, d0.hamiltonian), relative_drift(r.i1, d0.i1), relative_drift(r.i2, d0.i2));
    }
    csv.close();
  }
  if (cfg.outputs.json) write_state_json(guard.file("final_state.json"), res.final_state, cfg.grid);
  guard.commit();
  return res;
}

// --- converge ---------------------------------------------------------------

void validate_dt_list(const PreparedRun& run, const std::vector<double>& dts) {
  if (dts.size() < 2) throw ConfigError("converge: need at least two time steps");
  if (!run.reference) {
    throw ConfigError("converge: no exact reference for this initial state (use a soliton, a plane wave, or f = 0)");
  }
  if (!(run.cfg.t_end > run.initial.t)) throw ConfigError("converge: t_end must exceed the initial time");
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0) || !std::isfinite(dts[i])) throw ConfigError("converge: time steps must be positive");
    if (i > 0 && std::abs(dts[i - 1] / dts[i] - 2) > 1e-9) {
      throw ConfigError("converge: time steps must halve strictly (each dt = previous / 2)");
    }
    (void)step_count(run.initial.t, run.cfg.t_end, dts[i]);
  }
}

std::vector<SimulationResult<double>> convergence_runs(const PreparedRun& run, const std::vector<double>& dts) {
  validate_dt_list(run, dts);
  const double tau = sampling_interval(run.cfg);
  std::vector<std::future<SimulationResult<double>>> jobs;
  for (const double dt : dts) {
    StepperConfig<double> sc = run.cfg.stepper;
    sc.dt = dt;
    const int every = std::max(1, static_cast<int>(std::lround(tau / dt)));
    jobs.push_back(std::async(std::launch::async, [&run, sc, every] {
      return simulate(run.initial, run.params, run.grid, sc, run.cfg.t_end, every, {}, run.reference);
    }));
  }
  std::vector<SimulationResult<double>> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

ConvergenceReport make_report(const PreparedRun& run, const std::vector<double>& dts,
                              const std::vector<SimulationResult<double>>& runs) {
  const double H0 = hamiltonian_h(run.initial, run.params, run.grid);
  ConvergenceReport rep;
  rep.dt_list = dts;
  for (const auto& r : runs) {
    const auto& last = r.records.back();
    rep.err_u.push_back(last.err_u.value_or(kNaN));
    rep.err_v.push_back(last.err_v.value_or(kNaN));
    double eh = 0;
    for (const auto& rec : r.records) eh = std::max(eh, relative_drift(rec.hamiltonian, H0));
    rep.err_hamiltonian.push_back(eh);
    rep.total_iterations.push_back(r.total_iterations);
  }
  rep.observed_orders_u = log2_ratios(rep.err_u);
  rep.observed_orders_v = log2_ratios(rep.err_v);
  rep.hamiltonian_orders = log2_ratios(rep.err_hamiltonian);
  return rep;
}

std::string report_json(const ConvergenceReport& r) {
  nlohmann::json doc;
  doc["dt_list"] = r.dt_list;
  doc["err_u"] = r.err_u;
  doc["err_v"] = r.err_v;
  doc["observed_orders_u"] = r.observed_orders_u;
  doc["observed_orders_v"] = r.observed_orders_v;
  doc["err_hamiltonian"] = r.err_hamiltonian;
  doc["hamiltonian_orders"] = r.hamiltonian_orders;
  doc["total_iterations"] = r.total_iterations;
  return doc.dump(2) + "\n";
}

ConvergenceReport run_converge(const PreparedRun& run, const std::vector<double>& dts,
                               const std::filesystem::path& out_dir) {
  validate_dt_list(run, dts);
  OutputGuard guard(out_dir);
  const auto runs = convergence_runs(run, dts);
  const auto rep = make_report(run, dts, runs);
  if (run.cfg.outputs.csv) {
    CsvWriter csv(guard.file("convergence.csv"),
                  {"dt", "err_u", "err_v", "err_H", "order_u", "order_v", "order_H", "fp_iters_total"});
    for (std::size_t i = 0; i < dts.size(); ++i) {
      auto order = [i](const std::vector<double>& o) {
        return i == 0 ? std::optional<double>() : std::optional<double>(o[i - 1]);
      };
      csv.row(rep.dt_list[i], rep.err_u[i], rep.err_v[i], rep.err_hamiltonian[i], order(rep.observed_orders_u),
              order(rep.observed_orders_v), order(rep.hamiltonian_orders),
              static_cast<long long>(rep.total_iterations[i]));
    }
    csv.close();
  }
  if (run.cfg.outputs.json) write_text(guard.file("convergence.json"), report_json(rep));
  guard.commit();
  return rep;
}

// --- dispersion ---------------------------------------------------------------

std::vector<DispersionRow> dispersion_rows(const PreparedRun& run, bool nonlinear) {
  if (nonlinear && is_x_dependent(run.params.nonlinearity)) {
    throw ConfigError("dispersion: the nonlinear relation needs a model without x dependence");
  }
  const auto& s = run.cfg.dispersion;
  const double h = run.grid.h;
  const double dt = run.cfg.stepper.dt;
  const double amp = nonlinear ? 1.0 : 0.0;
  auto axis = [](const std::array<double, 2>& r, int n, int i) { return r[0] + (r[1] - r[0]) * i / (n - 1); };
  auto rel = [&](double xi, double w) { return numerical_dispersion_relation(xi, w, nonlinear, run.params, h, dt); };

  std::vector<DispersionRow> rows;
  std::vector<DispersionRow> roots;
  std::vector<double> col(static_cast<std::size_t>(s.resolution[1]));
  for (int i = 0; i < s.resolution[0]; ++i) {
    const double xi = axis(s.xi_range, s.resolution[0], i);
    for (int j = 0; j < s.resolution[1]; ++j) {
      const double w = axis(s.omega_range, s.resolution[1], j);
      col[j] = rel(xi, w);
      rows.push_back({"scan", xi, w, std::abs(col[j]),
                      continuous_dispersion_residual(psi_space(xi, h), w / dt, amp, run.params)});
    }
    for (int j = 0; j + 1 < s.resolution[1]; ++j) {
      if ((col[j] > 0) == (col[j + 1] > 0) && col[j] != 0) continue;
      const double lo = axis(s.omega_range, s.resolution[1], j);
      const double hi = axis(s.omega_range, s.resolution[1], j + 1);
      if (col[j + 1] == 0) continue;  // picked up as the left end of the next bracket
      const double w = bisect_root([&](double x) { return rel(xi, x); }, lo, hi);
      roots.push_back({"root", xi, w, std::abs(rel(xi, w)),
                       continuous_dispersion_residual(psi_space(xi, h), w / dt, amp, run.params)});
    }
  }
  rows.insert(rows.end(), roots.begin(), roots.end());
  return rows;
}

std::vector<DispersionRow> run_dispersion(const PreparedRun& run, bool nonlinear,
                                          const std::filesystem::path& out_dir) {
  const auto rows = dispersion_rows(run, nonlinear);
  OutputGuard guard(out_dir);
  CsvWriter csv(guard.file("dispersion.csv"), {"kind", "xi", "omega_t", "residual", "continuous_residual"});
  for (const auto& r : rows) csv.row(r.kind, r.xi, r.omega_t, r.residual, r.continuous_residual);
  csv.close();
  guard.commit();
  return rows;
}

// --- residuals ----------------------------------------------------------------

std::vector<ResidualRow> residual_rows(const PreparedRun& run) {
  const auto& cfg = run.cfg;
  const Index steps = step_count(run.initial.t, cfg.t_end, cfg.stepper.dt);
  if (steps % cfg.sample_every != 0) {
    throw ConfigError("residuals: the number of steps must be a multiple of sample_every");
  }
  const Index samples = steps / cfg.sample_every + 1;
  if (samples < 3) throw ConfigError("residuals: need at least three samples (t_end >= 2 sample_every dt)");
  if (cfg.residual_source == ResidualSource::analytic && !run.reference) {
    throw ConfigError("residuals: analytic source needs an exact solution for this initial state");
  }

  std::vector<ResidualRow> rows;
  std::deque<FieldState<double>> window;
  auto push = [&](const FieldState<double>& s) {
    window.push_back(s);
    if (window.size() > 3) window.pop_front();
    if (window.size() < 3) return;
    const auto r = local_conservation_residuals(std::array<FieldState<double>, 3>{window[0], window[1], window[2]},
                                                run.params, run.grid);
    const double h = run.grid.h;
    rows.push_back({window[1].t, r.energy.cwiseAbs().maxCoeff(), std::sqrt(h * r.energy.squaredNorm()),
                    r.momentum.cwiseAbs().maxCoeff(), std::sqrt(h * r.momentum.squaredNorm())});
  };

  const double tau = sampling_interval(cfg);
  if (cfg.residual_source == ResidualSource::analytic) {
    for (Index k = 0; k < samples; ++k) push(run.reference(run.initial.t + static_cast<double>(k) * tau));
  } else {
    push(run.initial);
    const Observer<double> obs = [&](const FieldState<double>& s, const DiagnosticsRecord<double>&) { push(s); };
    (void)simulate(run.initial, run.params, run.grid, cfg.stepper, cfg.t_end, cfg.sample_every, {obs});
  }
  return rows;
}

std::vector<ResidualRow> run_residuals(const PreparedRun& run, const std::filesystem::path& out_dir) {
  const auto& cfg = run.cfg;
  const Index steps = step_count(run.initial.t, cfg.t_end, cfg.stepper.dt);
  if (steps % cfg.sample_every != 0 || steps / cfg.sample_every < 2) {
    throw ConfigError("residuals: t_end must span at least two whole sampling intervals (sample_every dt)");
  }
  OutputGuard guard(out_dir);
  const auto rows = residual_rows(run);
  CsvWriter csv(guard.file("residuals.csv"), {"t", "energy_max", "energy_l2", "momentum_max", "momentum_l2"});
  for (const auto& r : rows) csv.row(r.t, r.energy_max, r.energy_l2, r.momentum_max, r.momentum_l2);
  csv.close();
  guard.commit();
  return rows;
}

}  // namespace nnls::harness
