#pragma once

// Discrete conserved functionals and structure diagnostics. All functionals
// carry the factor h, so values are comparable across resolutions. With
// u = p + i q and v = u_t = phi + i varphi:
//
//   h H_h    = h ( -1/2 [beta (<p,A_h p> + <q,A_h q>) + kappa (<phi,phi> + <varphi,varphi>)] - <G(p,q), 1> )
//   h I_1,h  = -h ( 1/2 (<p,p> + <q,q>) + kappa (<p,varphi> - <q,phi>) )
//   h I_2,h  = h ( -kappa (<B_h p,phi> + <B_h q,varphi>) + 1/2 (<B_h p,q> - <p,B_h q>) )
//
// G is the energy potential (grad G = (Re f, Im f)); see models.hpp.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include "nnls/errors.hpp"
#include "nnls/grid_spectral.hpp"
#include "nnls/integrator.hpp"
#include "nnls/models.hpp"

namespace nnls {

/// Per-sample diagnostics of a trajectory.
template <typename Scalar = double>
struct DiagnosticsRecord {
  Scalar t{};
  Scalar hamiltonian{};  // h H_h
  Scalar i1{};           // h I_1,h
  Scalar i2{};           // h I_2,h
  Scalar l2_norm{};      // sqrt(h sum |u_j|^2)
  int fp_iters{};
  std::optional<Scalar> err_u;  // relative discrete L2 error vs. a reference
  std::optional<Scalar> err_v;
};

/// Two variational solutions along one base trajectory.
template <typename Scalar = double>
struct MSFormPair {
  TangentState<Scalar> U;
  TangentState<Scalar> V;
};

template <typename Scalar>
Scalar hamiltonian_h(const FieldState<Scalar>& state, const ModelParams<Scalar>& params, const Grid<Scalar>& grid) {
  check_state(state, grid);
  const ComplexVector<Scalar> Au = spectral_derivative(state.u, 2, grid);
  const Scalar uAu = (state.u.conjugate().cwiseProduct(Au)).real().sum();
  const Scalar vv = state.v.squaredNorm();
  Scalar pot = 0;
  for (Index j = 0; j < grid.n; ++j) pot += energy_potential(params.nonlinearity, state.u[j], grid.nodes[j]);
  return grid.h * (-(params.beta * uAu + params.kappa * vv) / 2 - pot);
}

/// h I_1,h. Conservation requires f(z) = z g(|z|); for the x-dependent model the
/// value is computed but not expected to be invariant.
template <typename Scalar>
Scalar invariant_i1(const FieldState<Scalar>& state, const ModelParams<Scalar>& params, const Grid<Scalar>& grid) {
  check_state(state, grid);
  // Im(conj(u) v) = p varphi - q phi
  const Scalar cross = (state.u.conjugate().cwiseProduct(state.v)).imag().sum();
  return -grid.h * (state.u.squaredNorm() / 2 + params.kappa * cross);
}

template <typename Scalar>
Scalar invariant_i2(const FieldState<Scalar>& state, const ModelParams<Scalar>& params, const Grid<Scalar>& grid) {
  check_state(state, grid);
  const ComplexVector<Scalar> Bu = spectral_derivative(state.u, 1, grid);
  // Re(conj(B u) v) = <B p, phi> + <B q, varphi>
  const Scalar flow = (Bu.conjugate().cwiseProduct(state.v)).real().sum();
  // Im(conj(u) B u) = <p, B q> - <q, B p>
  const Scalar twist = (state.u.conjugate().cwiseProduct(Bu)).imag().sum();
  return grid.h * (-params.kappa * flow - twist / 2);
}

/// sqrt(h sum |u_j|^2).
template <typename Scalar>
Scalar discrete_l2_norm(const ComplexVector<Scalar>& u, const Grid<Scalar>& grid) {
  return std::sqrt(grid.h * u.squaredNorm());
}

/// ||u - ref|| / ||ref|| in the discrete L2 norm.
template <typename Scalar>
Scalar relative_l2_error(const ComplexVector<Scalar>& u, const ComplexVector<Scalar>& ref) {
  return (u - ref).norm() / ref.norm();
}

/// Total symplecticity h sum_j omega_j(U, V) with
/// omega = dp^dq - kappa (dp^dphi + dq^dvarphi), read from the complex tangents
/// (du = dp + i dq, dv = dphi + i dvarphi).
template <typename Scalar>
Scalar symplectic_form(const TangentState<Scalar>& U, const TangentState<Scalar>& V, Scalar kappa,
                       const Grid<Scalar>& grid) {
  detail::check_length(U.du, grid, "symplectic_form U");
  detail::check_length(V.du, grid, "symplectic_form V");
  Scalar sum = 0;
  for (Index j = 0; j < grid.n; ++j) {
    const Scalar Up = U.du[j].real(), Uq = U.du[j].imag(), Uf = U.dv[j].real(), Ug = U.dv[j].imag();
    const Scalar Vp = V.du[j].real(), Vq = V.du[j].imag(), Vf = V.dv[j].real(), Vg = V.dv[j].imag();
    sum += (Up * Vq - Uq * Vp) - kappa * (Up * Vf - Uf * Vp + Uq * Vg - Ug * Vq);
  }
  return grid.h * sum;
}

template <typename Scalar = double>
struct ConservationResiduals {
  RealVector<Scalar> energy;    // E_t + F_x
  RealVector<Scalar> momentum;  // I_t + M_x
};

namespace detail {

template <typename Scalar>
RealVector<Scalar> real_derivative(const RealVector<Scalar>& f, const Grid<Scalar>& grid) {
  const ComplexVector<Scalar> c = f.template cast<std::complex<Scalar>>();
  return spectral_derivative(c, 1, grid).real();
}

// Energy density E and momentum density I of one state.
template <typename Scalar>
std::pair<RealVector<Scalar>, RealVector<Scalar>> local_densities(const FieldState<Scalar>& s,
                                                                  const ModelParams<Scalar>& params,
                                                                  const Grid<Scalar>& grid) {
  const ComplexVector<Scalar> ux = spectral_derivative(s.u, 1, grid);
  const ComplexVector<Scalar> uxx = spectral_derivative(s.u, 2, grid);
  const ComplexVector<Scalar> vx = spectral_derivative(s.v, 1, grid);
  RealVector<Scalar> E(grid.n), I(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    const auto cu = std::conj(s.u[j]);
    const Scalar G = energy_potential(params.nonlinearity, s.u[j], grid.nodes[j]);
    E[j] = G + params.kappa * std::norm(s.v[j]) / 2 + params.beta / 2 * std::real(cu * uxx[j]);
    I[j] = params.kappa / 2 * (-std::real(cu * vx[j]) + std::real(std::conj(ux[j]) * s.v[j])) +
           std::imag(cu * ux[j]) / 2;
  }
  return {E, I};
}

}  // namespace detail

/// Pointwise residuals of the local energy and momentum laws of the
/// multi-symplectic formulation, z = (p, q, v, w, phi, varphi), v + i w = u_x:
///
///   E = G + kappa (phi^2 + varphi^2)/2 + beta/2 (p v_x + q w_x)
///   F = beta/2 (v phi + w varphi - p v_t - q w_t)
///   I = kappa/2 (-p phi_x - q varphi_x + v phi + w varphi) + 1/2 (p q_x - q p_x)
///   M = G + beta (v^2 + w^2)/2 - 1/2 (p varphi - q phi - kappa (p phi_t + q varphi_t))
///
/// evaluated at the middle state of a window of three equally spaced samples.
/// x-derivatives are spectral; t-derivatives are centred differences over the
/// window, so the residual of an exact solution is O(spacing^2).
template <typename Scalar>
ConservationResiduals<Scalar> local_conservation_residuals(const std::array<FieldState<Scalar>, 3>& window,
                                                           const ModelParams<Scalar>& params,
                                                           const Grid<Scalar>& grid) {
  for (const auto& s : window) check_state(s, grid);
  const Scalar d0 = window[1].t - window[0].t;
  const Scalar d1 = window[2].t - window[1].t;
  if (!(d0 > 0) || std::abs(d1 - d0) > Scalar(1e-9) * std::max<Scalar>(1, std::abs(d0))) {
    throw ConfigError("local_conservation_residuals: window samples must be increasing and equally spaced");
  }
  const Scalar two_dt = window[2].t - window[0].t;
  const auto& mid = window[1];

  const auto [E0, I0] = detail::local_densities(window[0], params, grid);
  const auto [E2, I2] = detail::local_densities(window[2], params, grid);

  const ComplexVector<Scalar> ux = spectral_derivative(mid.u, 1, grid);
  const ComplexVector<Scalar> ux_t = spectral_derivative(ComplexVector<Scalar>((window[2].u - window[0].u) / two_dt), 1, grid);
  const ComplexVector<Scalar> v_t = (window[2].v - window[0].v) / two_dt;

  RealVector<Scalar> F(grid.n), M(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    const auto cu = std::conj(mid.u[j]);
    const Scalar G = energy_potential(params.nonlinearity, mid.u[j], grid.nodes[j]);
    F[j] = params.beta / 2 * (std::real(std::conj(ux[j]) * mid.v[j]) - std::real(cu * ux_t[j]));
    M[j] = G + params.beta * std::norm(ux[j]) / 2 -
           (std::imag(cu * mid.v[j]) - params.kappa * std::real(cu * v_t[j])) / 2;
  }
  ConservationResiduals<Scalar> r;
  r.energy = (E2 - E0) / two_dt + detail::real_derivative(F, grid);
  r.momentum = (I2 - I0) / two_dt + detail::real_derivative(M, grid);
  return r;
}

}  // namespace nnls
