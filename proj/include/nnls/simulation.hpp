#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nnls/errors.hpp"
#include "nnls/integrator.hpp"
#include "nnls/invariants.hpp"

namespace nnls {

/// Called at every sampled step with the current state and its diagnostics.
template <typename Scalar = double>
using Observer = std::function<void(const FieldState<Scalar>&, const DiagnosticsRecord<Scalar>&)>;

/// Exact (u, v) at time t, used to fill err_u / err_v.
template <typename Scalar = double>
using Reference = std::function<FieldState<Scalar>(Scalar t)>;

template <typename Scalar = double>
struct SimulationResult {
  FieldState<Scalar> final_state;
  std::vector<DiagnosticsRecord<Scalar>> records;
  Index steps{};
  long total_iterations{};
};

/// Number of steps of size dt covering [t0, t_end]; rejects spans that are not
/// an integer multiple of dt (relative mismatch above 1e-9).
template <typename Scalar>
Index step_count(Scalar t0, Scalar t_end, Scalar dt) {
  const Scalar span = t_end - t0;
  if (span < 0) throw ConfigError("simulate: t_end precedes the initial time");
  if (!(dt > 0)) throw ConfigError("simulate: dt must be > 0");
  const Scalar ratio = span / dt;
  const Scalar n = std::round(ratio);
  if (std::abs(ratio - n) > Scalar(1e-9) * std::max<Scalar>(1, ratio)) {
    throw ConfigError("simulate: t_end - t0 must be an integer multiple of dt");
  }
  return static_cast<Index>(n);
}

template <typename Scalar>
DiagnosticsRecord<Scalar> diagnose(const FieldState<Scalar>& s, const ModelParams<Scalar>& params,
                                   const Grid<Scalar>& grid, int fp_iters, const Reference<Scalar>* reference) {
  DiagnosticsRecord<Scalar> rec;
  rec.t = s.t;
  rec.hamiltonian = hamiltonian_h(s, params, grid);
  rec.i1 = invariant_i1(s, params, grid);
  rec.i2 = invariant_i2(s, params, grid);
  rec.l2_norm = discrete_l2_norm(s.u, grid);
  rec.fp_iters = fp_iters;
  if (reference != nullptr && *reference) {
    const FieldState<Scalar> ref = (*reference)(s.t);
    rec.err_u = relative_l2_error(s.u, ref.u);
    rec.err_v = relative_l2_error(s.v, ref.v);
  }
  return rec;
}

/// Repeated midpoint steps from `initial` to t_end. Diagnostics are recorded
/// after every `sample_every`-th step and after the final step; the initial
/// state itself is not recorded. Stepper errors are rethrown with the step
/// index prepended.
template <typename Scalar>
SimulationResult<Scalar> simulate(const FieldState<Scalar>& initial, const ModelParams<Scalar>& params,
                                  const Grid<Scalar>& grid, const StepperConfig<Scalar>& cfg, Scalar t_end,
                                  int sample_every, const std::vector<Observer<Scalar>>& observers = {},
                                  const Reference<Scalar>& reference = nullptr) {
  if (sample_every < 1) throw ConfigError("simulate: sample_every must be >= 1");
  validate(cfg);
  const Index steps = step_count(initial.t, t_end, cfg.dt);
  check_state(initial, grid);

  SimulationResult<Scalar> out;
  out.final_state = initial;
  out.steps = steps;
  MidpointStepper<Scalar> stepper(params, grid, cfg);
  for (Index n = 1; n <= steps; ++n) {
    StepResult<Scalar> r;
    try {
      r = stepper.step(out.final_state);
    } catch (const DivergenceError& e) {
      throw DivergenceError("step " + std::to_string(n) + ": " + e.what(), e.last_residual(), e.iterations());
    } catch (const InstabilityError& e) {
      throw InstabilityError("step " + std::to_string(n) + ": " + e.what());
    }
    out.final_state = std::move(r.state);
    out.final_state.t = initial.t + static_cast<Scalar>(n) * cfg.dt;
    out.total_iterations += r.iterations;
    if (n % sample_every == 0 || n == steps) {
      out.records.push_back(diagnose(out.final_state, params, grid, r.iterations, &reference));
      for (const auto& obs : observers) obs(out.final_state, out.records.back());
    }
  }
  return out;
}

}  // namespace nnls
