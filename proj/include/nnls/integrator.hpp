#pragma once

// Time stepping for the pseudospectral semi-discretization
//
//   kappa u'' + i u' + beta A_h u + f(u) = 0,   A_h = B_h^2,
//
// written as the first-order system u' = v, kappa v' = -i v - beta A_h u - f(u).
//
// The implicit midpoint rule is solved in Fourier space. With (u, chi) the
// midpoint value of (u, v), every mode m satisfies
//
//   kappa chi^(m) + i u^(m) + beta dt/2 mu_m^2 u^(m) = kappa chi^n(m) + i u^n(m) - dt/2 f(u)^(m)
//   u^(m) - dt/2 chi^(m) = u^n(m)
//
// where f(u) is evaluated at the nodes from the current midpoint iterate and
// then transformed. Eliminating chi leaves one scalar equation per mode,
//
//   (2 kappa/dt + i + beta dt/2 mu_m^2) u^(m) = kappa chi^n(m) + (2 kappa/dt + i) u^n(m) - dt/2 f(u)^(m),
//
// solved exactly at every fixed-point sweep. The step ends with
// u^{n+1} = 2u - u^n and v^{n+1} = 2 chi - v^n.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>

#include "nnls/analysis.hpp"
#include "nnls/errors.hpp"
#include "nnls/grid_spectral.hpp"
#include "nnls/models.hpp"

namespace nnls {

/// Nodal values of u and v = u_t at time t.
template <typename Scalar = double>
struct FieldState {
  ComplexVector<Scalar> u;
  ComplexVector<Scalar> v;
  Scalar t{};
};

/// Solution (du, dv) of the variational equation at time t.
template <typename Scalar = double>
struct TangentState {
  ComplexVector<Scalar> du;
  ComplexVector<Scalar> dv;
  Scalar t{};
};

/// Converged midpoint value (u, chi) of one step, at nodes.
template <typename Scalar = double>
struct Midpoint {
  ComplexVector<Scalar> u;
  ComplexVector<Scalar> chi;
};

template <typename Scalar = double>
struct StepperConfig {
  Scalar dt{};
  Scalar fp_tol{1e-13};
  int fp_max_iters{200};

  bool operator==(const StepperConfig&) const = default;
};

template <typename Scalar = double>
struct StepResult {
  FieldState<Scalar> state;
  Midpoint<Scalar> midpoint;
  int iterations{};
  /// Last sweep-to-sweep difference (the quantity compared to fp_tol).
  Scalar residual{};
};

/// Throws ConfigError unless dt is finite and nonzero, fp_tol >= 1e-15 and
/// fp_max_iters >= 1. A negative dt steps backward in time.
template <typename Scalar>
void validate(const StepperConfig<Scalar>& cfg) {
  if (!std::isfinite(cfg.dt) || cfg.dt == 0) throw ConfigError("stepper: dt must be finite and nonzero");
  if (!(cfg.fp_tol >= Scalar(1e-15))) throw ConfigError("stepper: fp_tol must be >= 1e-15");
  if (cfg.fp_max_iters < 1) throw ConfigError("stepper: fp_max_iters must be >= 1");
}

template <typename Scalar>
void check_state(const FieldState<Scalar>& s, const Grid<Scalar>& grid) {
  detail::check_length(s.u, grid, "field state u");
  detail::check_length(s.v, grid, "field state v");
  if (!s.u.allFinite() || !s.v.allFinite()) throw InstabilityError("field state has non-finite entries");
}

template <typename Scalar>
FieldState<Scalar> zero_state(const Grid<Scalar>& grid, Scalar t = 0) {
  return {ComplexVector<Scalar>::Zero(grid.n), ComplexVector<Scalar>::Zero(grid.n), t};
}

/// Implicit-midpoint integrator with per-trajectory scratch state. The initial
/// fixed-point guess is the midpoint of the previous step when the incoming
/// state continues that step, and the incoming u otherwise.
///
/// Single-threaded; use one instance per trajectory.
template <typename Scalar = double>
class MidpointStepper {
 public:
  MidpointStepper(ModelParams<Scalar> params, Grid<Scalar> grid, StepperConfig<Scalar> cfg)
      : params_(std::move(params)), grid_(std::move(grid)), cfg_(cfg), mu_(spectral_multipliers(grid_)) {
    validate(cfg_);
    denom_.resize(grid_.n);
    const Scalar c = 2 * params_.kappa / cfg_.dt;
    for (Index k = 0; k < grid_.n; ++k) {
      denom_[k] = std::complex<Scalar>(c, 1) + params_.beta * cfg_.dt / 2 * mu_.second[k];
    }
  }

  const Grid<Scalar>& grid() const { return grid_; }
  const ModelParams<Scalar>& params() const { return params_; }
  const StepperConfig<Scalar>& config() const { return cfg_; }

  /// Forget the stored midpoint so the next step starts from the incoming state.
  void reset_guess() { guess_.reset(); }

  /// Advance by cfg.dt.
  StepResult<Scalar> step(const FieldState<Scalar>& state) {
    using C = std::complex<Scalar>;
    check_state(state, grid_);
    const Scalar dt = cfg_.dt;
    const Scalar k = params_.kappa;

    const ComplexVector<Scalar> u_hat_n = forward_transform(state.u, grid_);
    const ComplexVector<Scalar> v_hat_n = forward_transform(state.v, grid_);
    const ComplexVector<Scalar> rhs0 =
        k * v_hat_n + C(2 * k / dt, 1) * u_hat_n;

    ComplexVector<Scalar> u_mid =
        (guess_ && guess_->t == state.t && guess_->u_mid.size() == grid_.n) ? guess_->u_mid : state.u;

    const Scalar chi_weight = std::max<Scalar>(1, 2 / std::abs(dt));
    ComplexVector<Scalar> nl(grid_.n);
    int it = 0;
    Scalar diff = 0;
    for (it = 1; it <= cfg_.fp_max_iters; ++it) {
      for (Index j = 0; j < grid_.n; ++j) nl[j] = evaluate_f(params_.nonlinearity, u_mid[j], grid_.nodes[j]);
      const ComplexVector<Scalar> nl_hat = forward_transform(nl, grid_);
      const ComplexVector<Scalar> u_hat = (rhs0 - (dt / 2) * nl_hat).cwiseQuotient(denom_);
      ComplexVector<Scalar> u_new = inverse_transform(u_hat, grid_);
      if (!u_new.allFinite()) {
        throw InstabilityError("midpoint_step: non-finite midpoint iterate at sweep " + std::to_string(it));
      }
      // chi = (2/dt)(u - u^n), so its sweep difference is (2/dt) times that of u.
      diff = chi_weight * (u_new - u_mid).cwiseAbs().maxCoeff();
      u_mid = std::move(u_new);
      if (diff < cfg_.fp_tol) break;
    }
    if (it > cfg_.fp_max_iters) {
      std::ostringstream os;
      os << "midpoint_step: fixed-point iteration did not converge in " << cfg_.fp_max_iters
         << " sweeps (last difference " << diff << ")";
      throw DivergenceError(os.str(), static_cast<double>(diff), cfg_.fp_max_iters);
    }

    StepResult<Scalar> r;
    r.midpoint.u = u_mid;
    r.midpoint.chi = (2 / dt) * (u_mid - state.u);
    r.state.u = 2 * u_mid - state.u;
    r.state.v = 2 * r.midpoint.chi - state.v;
    r.state.t = state.t + dt;
    r.iterations = it;
    r.residual = diff;

    // Guess for the next step: this step's midpoint.
    guess_ = Guess{r.state.t, u_mid};
    return r;
  }

  /// Implicit midpoint rule for the linearized system
  ///   kappa du'' + i du' + beta A_h du + Df(u)[du] = 0,
  /// Df(u)[w] = f_z w + f_zbar conj(w), frozen at the converged midpoint of the
  /// base step. This is the exact derivative of the discrete step map.
  TangentState<Scalar> variational_step(const TangentState<Scalar>& tangent, const Midpoint<Scalar>& base) const {
    using C = std::complex<Scalar>;
    detail::check_length(tangent.du, grid_, "tangent du");
    detail::check_length(tangent.dv, grid_, "tangent dv");
    detail::check_length(base.u, grid_, "base midpoint u");
    const Scalar dt = cfg_.dt;
    const Scalar k = params_.kappa;

    ComplexVector<Scalar> a(grid_.n), b(grid_.n);
    for (Index j = 0; j < grid_.n; ++j) {
      const auto d = evaluate_df(params_.nonlinearity, base.u[j], grid_.nodes[j]);
      a[j] = d.dz;
      b[j] = d.dzbar;
    }
    const ComplexVector<Scalar> rhs0 =
        k * forward_transform(tangent.dv, grid_) + C(2 * k / dt, 1) * forward_transform(tangent.du, grid_);

    ComplexVector<Scalar> w = tangent.du;
    ComplexVector<Scalar> lin(grid_.n);
    const Scalar chi_weight = std::max<Scalar>(1, 2 / std::abs(dt));
    int it = 0;
    Scalar diff = 0;
    for (it = 1; it <= cfg_.fp_max_iters; ++it) {
      lin = a.cwiseProduct(w) + b.cwiseProduct(w.conjugate());
      const ComplexVector<Scalar> w_hat = (rhs0 - (dt / 2) * forward_transform(lin, grid_)).cwiseQuotient(denom_);
      ComplexVector<Scalar> w_new = inverse_transform(w_hat, grid_);
      if (!w_new.allFinite()) throw InstabilityError("variational_step: non-finite tangent iterate");
      const Scalar scale = std::max<Scalar>(1, w_new.cwiseAbs().maxCoeff());
      diff = chi_weight * (w_new - w).cwiseAbs().maxCoeff() / scale;
      w = std::move(w_new);
      if (diff < cfg_.fp_tol) break;
    }
    if (it > cfg_.fp_max_iters) {
      std::ostringstream os;
      os << "variational_step: iteration did not converge in " << cfg_.fp_max_iters << " sweeps (last difference "
         << diff << ")";
      throw DivergenceError(os.str(), static_cast<double>(diff), cfg_.fp_max_iters);
    }
    TangentState<Scalar> out;
    const ComplexVector<Scalar> chi = (2 / dt) * (w - tangent.du);
    out.du = 2 * w - tangent.du;
    out.dv = 2 * chi - tangent.dv;
    out.t = tangent.t + dt;
    return out;
  }

 private:
  struct Guess {
    Scalar t;
    ComplexVector<Scalar> u_mid;
  };

  ModelParams<Scalar> params_;
  Grid<Scalar> grid_;
  StepperConfig<Scalar> cfg_;
  SpectralMultipliers<Scalar> mu_;
  ComplexVector<Scalar> denom_;
  std::optional<Guess> guess_;
};

/// One implicit-midpoint step from `state`, starting the fixed-point iteration
/// at the current state. Returns the new state, the converged midpoint and the
/// number of sweeps.
template <typename Scalar>
StepResult<Scalar> midpoint_step(const FieldState<Scalar>& state, const ModelParams<Scalar>& params,
                                 const Grid<Scalar>& grid, const StepperConfig<Scalar>& cfg) {
  MidpointStepper<Scalar> stepper(params, grid, cfg);
  return stepper.step(state);
}

/// Tangent step along the base step whose converged midpoint is `base`.
template <typename Scalar>
TangentState<Scalar> variational_step(const TangentState<Scalar>& tangent, const Midpoint<Scalar>& base,
                                      const ModelParams<Scalar>& params, const Grid<Scalar>& grid,
                                      const StepperConfig<Scalar>& cfg) {
  MidpointStepper<Scalar> stepper(params, grid, cfg);
  return stepper.variational_step(tangent, base);
}

/// Exact flow of the linear semi-discrete system (f ignored) over time dt:
/// every stored mode is multiplied by exp(-dt A(xi)), xi its real wavenumber
/// (zero for the Nyquist mode, matching A_h). Any real dt is allowed.
template <typename Scalar>
FieldState<Scalar> exact_linear_step(const FieldState<Scalar>& state, const ModelParams<Scalar>& params,
                                     const Grid<Scalar>& grid, Scalar dt) {
  check_state(state, grid);
  ComplexVector<Scalar> u_hat = forward_transform(state.u, grid);
  ComplexVector<Scalar> v_hat = forward_transform(state.v, grid);
  const RealVector<Scalar> xi = mode_wavenumbers(grid);
  for (Index k = 0; k < grid.n; ++k) {
    const Matrix2c<Scalar> m = linear_multiplier(xi[k], dt, params);
    const std::complex<Scalar> uk = u_hat[k];
    const std::complex<Scalar> vk = v_hat[k];
    u_hat[k] = m(0, 0) * uk + m(0, 1) * vk;
    v_hat[k] = m(1, 0) * uk + m(1, 1) * vk;
  }
  return {inverse_transform(u_hat, grid), inverse_transform(v_hat, grid), state.t + dt};
}

}  // namespace nnls
