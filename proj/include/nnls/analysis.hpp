#pragma once

// Closed-form objects of the equation kappa u_tt + i u_t + beta u_xx + f(u) = 0:
// the Fourier multiplier of the linear part, its eigenvalues, continuous and
// fully discrete dispersion relations, the exact cubic soliton for beta = 1/2,
// and the residual of the relative-equilibrium profile equation.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "nnls/errors.hpp"
#include "nnls/grid_spectral.hpp"
#include "nnls/models.hpp"

namespace nnls {

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Window on |4 beta kappa xi^2 - 1| inside which the multiplier is evaluated
/// by the confluent expansion instead of the eigen-decomposition.
inline constexpr double kConfluentWindow = 1e-10;

/// Generator A(xi) of d/dt (u^, v^) + A (u^, v^) = 0.
template <typename Scalar>
Matrix2c<Scalar> linear_generator(Scalar xi, const ModelParams<Scalar>& params) {
  using C = std::complex<Scalar>;
  Matrix2c<Scalar> A;
  A << C(0), C(-1), C(-params.beta * xi * xi / params.kappa), C(0, 1 / params.kappa);
  return A;
}

/// Eigenvalues (lambda_+, lambda_-) of A(xi):
/// i/(2 kappa) +- sqrt(4 beta kappa xi^2 - 1)/(2 kappa), principal complex root.
template <typename Scalar>
std::pair<std::complex<Scalar>, std::complex<Scalar>> lambda_eigenvalues(Scalar xi,
                                                                         const ModelParams<Scalar>& params) {
  using C = std::complex<Scalar>;
  const Scalar k = params.kappa;
  const C root = std::sqrt(C(4 * params.beta * k * xi * xi - 1, 0));
  const C centre(0, 1 / (2 * k));
  return {centre + root / (2 * k), centre - root / (2 * k)};
}

/// Degenerate wavenumber xi_+ = 1 / (2 sqrt(beta kappa)).
template <typename Scalar>
Scalar degenerate_wavenumber(const ModelParams<Scalar>& params) {
  return 1 / (2 * std::sqrt(params.beta * params.kappa));
}

/// Fourier multiplier m(xi, t) = exp(-t A(xi)).
///
/// Away from xi_+- it is assembled from the spectral decomposition
///   m = [e^{-t l+} (A - l- I) - e^{-t l-} (A - l+ I)] / (l+ - l-).
/// Inside the confluent window it uses exp(-t A) = e^{-t l} [cosh(t d) I -
/// sinh(t d)/d (A - l I)], l = i/(2 kappa), d^2 = (4 beta kappa xi^2 - 1)/(4 kappa^2),
/// with both hyperbolic factors summed as series in (t d)^2; at xi_+- exactly
/// this is the Jordan form e^{-t l} [I - t (A - l I)].
template <typename Scalar>
Matrix2c<Scalar> linear_multiplier(Scalar xi, Scalar t, const ModelParams<Scalar>& params) {
  using C = std::complex<Scalar>;
  const Matrix2c<Scalar> A = linear_generator(xi, params);
  const Matrix2c<Scalar> I = Matrix2c<Scalar>::Identity();
  const Scalar k = params.kappa;
  const Scalar disc = 4 * params.beta * k * xi * xi - 1;
  if (t == 0) return I;

  if (std::abs(disc) >= Scalar(kConfluentWindow)) {
    const auto [lp, lm] = lambda_eigenvalues(xi, params);
    const C ep = std::exp(-t * lp);
    const C em = std::exp(-t * lm);
    return (ep * (A - lm * I) - em * (A - lp * I)) / (lp - lm);
  }

  const C centre(0, 1 / (2 * k));
  const Scalar z = t * t * disc / (4 * k * k);  // (t d)^2, real
  // cosh_sum = sum z^j/(2j)!, sinhc_sum = sum z^j/(2j+1)!
  Scalar cosh_sum = 1;
  Scalar sinhc_sum = 1;
  Scalar c_term = 1;
  Scalar s_term = 1;
  for (int j = 1; j < 400; ++j) {
    const Scalar two_j = static_cast<Scalar>(2 * j);
    c_term *= z / ((two_j - 1) * two_j);
    s_term *= z / (two_j * (two_j + 1));
    cosh_sum += c_term;
    sinhc_sum += s_term;
    if (std::abs(c_term) <= std::numeric_limits<Scalar>::epsilon() * std::abs(cosh_sum) &&
        std::abs(s_term) <= std::numeric_limits<Scalar>::epsilon() * std::abs(sinhc_sum))
      break;
  }
  const C scale = std::exp(-t * centre);
  return scale * (cosh_sum * I - (t * sinhc_sum) * (A - centre * I));
}

// ---------------------------------------------------------------------------
// Dispersion relations

/// kappa w^2 + w + beta k^2 - g(A), with the g term dropped when A = 0.
template <typename Scalar>
Scalar continuous_dispersion_relation(Scalar k, Scalar omega, Scalar amplitude, const ModelParams<Scalar>& params) {
  Scalar d = params.kappa * omega * omega + omega + params.beta * k * k;
  if (amplitude > 0) d -= evaluate_g(params.nonlinearity, amplitude);
  return d;
}

/// |kappa w^2 + w + beta k^2 - g(A)| for plane waves A exp(i(kx + wt)). For A > 0
/// the cubic relation kappa w^2 + w + beta k^2 - A^2 is generalized through g.
template <typename Scalar>
Scalar continuous_dispersion_residual(Scalar k, Scalar omega, Scalar amplitude, const ModelParams<Scalar>& params) {
  if (amplitude < 0) throw ConfigError("continuous_dispersion_residual: amplitude must be >= 0");
  return std::abs(continuous_dispersion_relation(k, omega, amplitude, params));
}

/// Both roots w of kappa w^2 + w + (beta k^2 - g(A)) = 0, ordered (slow, fast).
/// Returns NaNs when the roots are complex.
template <typename Scalar>
std::pair<Scalar, Scalar> continuous_dispersion_roots(Scalar k, Scalar amplitude, const ModelParams<Scalar>& params) {
  const Scalar c = continuous_dispersion_relation(k, Scalar(0), amplitude, params);
  const Scalar disc = 1 - 4 * params.kappa * c;
  if (disc < 0) {
    const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
    return {nan, nan};
  }
  // q = -(1 + sqrt(disc))/2 avoids cancellation for small kappa.
  const Scalar q = -(1 + std::sqrt(disc)) / 2;
  return {c / q, q / params.kappa};
}

/// psi_1(xi) = xi / h.
template <typename Scalar>
Scalar psi_space(Scalar xi, Scalar h) {
  return xi / h;
}

/// psi_2(w~) = (2 / dt) tan(w~ / 2).
template <typename Scalar>
Scalar psi_time(Scalar omega_t, Scalar dt) {
  return 2 / dt * std::tan(omega_t / 2);
}

/// Signed numerical dispersion relation of the midpoint/pseudospectral scheme:
///   kappa psi2^2 + psi2 + beta psi1^2            (linear)
///   kappa psi2^2 + psi2 + beta psi1^2 - g(|cos(w~/2)|)   (unit-amplitude nonlinear)
template <typename Scalar>
Scalar numerical_dispersion_relation(Scalar xi, Scalar omega_t, bool nonlinear, const ModelParams<Scalar>& params,
                                     Scalar h, Scalar dt) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(std::abs(omega_t) < pi)) {
    throw ConfigError("numerical_dispersion_residual: scaled frequency must lie in (-pi, pi)");
  }
  const Scalar p1 = psi_space(xi, h);
  const Scalar p2 = psi_time(omega_t, dt);
  Scalar d = params.kappa * p2 * p2 + p2 + params.beta * p1 * p1;
  if (nonlinear) d -= evaluate_g(params.nonlinearity, std::abs(std::cos(omega_t / 2)));
  return d;
}

template <typename Scalar>
Scalar numerical_dispersion_residual(Scalar xi, Scalar omega_t, bool nonlinear, const ModelParams<Scalar>& params,
                                     Scalar h, Scalar dt) {
  return std::abs(numerical_dispersion_relation(xi, omega_t, nonlinear, params, h, dt));
}

/// A sample of a dispersion relation.
template <typename Scalar = double>
struct DispersionPoint {
  Scalar k_or_xi{};
  Scalar omega{};
  Scalar residual{};
};

/// Bisection on a bracketing interval [lo, hi] with f(lo) f(hi) <= 0. Stops when
/// the bracket is below x_tol or after 200 halvings.
template <typename Scalar, typename F>
Scalar bisect_root(F&& f, Scalar lo, Scalar hi, Scalar x_tol = 0) {
  Scalar f_lo = f(lo);
  const Scalar f_hi = f(hi);
  if (f_lo == 0) return lo;
  if (f_hi == 0) return hi;
  if ((f_lo > 0) == (f_hi > 0)) throw ConfigError("bisect_root: interval does not bracket a root");
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi || hi - lo <= x_tol) break;
    const Scalar f_mid = f(mid);
    if (f_mid == 0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

// ---------------------------------------------------------------------------
// Exact soliton of the cubic equation with beta = 1/2

/// Soliton parameters: amplitude eta, transverse velocity vel, and the derived
/// relative-equilibrium multipliers. The solution is u(x,t) = u0(x + mu2 t)
/// exp(i mu1 t) with mu2 = vel and mu1 = (s - 1)/(2 kappa) + s vel^2.
template <typename Scalar = double>
struct SolitonSpec {
  Scalar eta{};
  Scalar vel{};
  Scalar kappa{};
  Scalar mu1{};
  Scalar mu2{};
  Scalar s{};             // sqrt((1 + 2 kappa eta^2) / (1 + 2 kappa vel^2))
  Scalar inv_width{};     // eta / sqrt(1 + 2 kappa vel^2)
  Scalar phase_rate{};    // (s - 1) / (2 kappa)
};

template <typename Scalar>
SolitonSpec<Scalar> make_soliton_spec(Scalar eta, Scalar vel, const ModelParams<Scalar>& params) {
  if (!(eta > 0)) throw ConfigError("soliton: eta must be > 0");
  if (params.beta != Scalar(0.5)) throw ConfigError("soliton: closed form requires beta = 1/2");
  const auto* pl = std::get_if<PowerLaw<Scalar>>(&params.nonlinearity);
  if (pl == nullptr || pl->q != Scalar(2)) {
    throw ConfigError("soliton: closed form requires the cubic nonlinearity (power_law, q = 2)");
  }
  SolitonSpec<Scalar> sp;
  const Scalar k = params.kappa;
  const Scalar denom = 1 + 2 * k * vel * vel;
  sp.eta = eta;
  sp.vel = vel;
  sp.kappa = k;
  sp.s = std::sqrt((1 + 2 * k * eta * eta) / denom);
  sp.inv_width = eta / std::sqrt(denom);
  // s - 1 = (s^2 - 1)/(s + 1), with s^2 - 1 = 2 kappa (eta^2 - vel^2)/denom.
  sp.phase_rate = (eta * eta - vel * vel) / (denom * (sp.s + 1));
  sp.mu2 = vel;
  sp.mu1 = sp.phase_rate + sp.s * vel * vel;
  return sp;
}

namespace detail {

template <typename Scalar>
struct SolitonLocal {
  Scalar rho, drho, d2rho;
  std::complex<Scalar> phase;
};

template <typename Scalar>
SolitonLocal<Scalar> soliton_local(Scalar x, Scalar t, const SolitonSpec<Scalar>& sp) {
  const Scalar c = sp.inv_width;
  const Scalar X = c * (x + sp.vel * t);
  const Scalar sech = 1 / std::cosh(X);
  const Scalar th = std::tanh(X);
  SolitonLocal<Scalar> L;
  L.rho = sp.eta * sech;
  L.drho = -sp.eta * c * sech * th;
  L.d2rho = sp.eta * c * c * sech * (1 - 2 * sech * sech);
  const Scalar theta = sp.phase_rate * t - sp.s * sp.vel * x;
  L.phase = std::polar(Scalar(1), theta);
  return L;
}

}  // namespace detail

/// u(x,t) = rho(x + V t) exp(i s (t/(2 kappa) - V x) - i t/(2 kappa)),
/// rho(X) = eta sech(eta X / sqrt(1 + 2 kappa V^2)).
template <typename Scalar>
std::complex<Scalar> soliton_value(Scalar x, Scalar t, const SolitonSpec<Scalar>& sp) {
  const auto L = detail::soliton_local(x, t, sp);
  return L.rho * L.phase;
}

template <typename Scalar>
std::complex<Scalar> soliton_x_derivative(Scalar x, Scalar t, const SolitonSpec<Scalar>& sp) {
  const auto L = detail::soliton_local(x, t, sp);
  const Scalar k = sp.s * sp.vel;
  return std::complex<Scalar>(L.drho, -k * L.rho) * L.phase;
}

template <typename Scalar>
struct SolitonTimeDerivatives {
  std::complex<Scalar> u_t;
  std::complex<Scalar> u_tt;
};

/// Analytic u_t and u_tt of the soliton.
template <typename Scalar>
SolitonTimeDerivatives<Scalar> soliton_time_derivatives(Scalar x, Scalar t, const SolitonSpec<Scalar>& sp) {
  using C = std::complex<Scalar>;
  const auto L = detail::soliton_local(x, t, sp);
  const Scalar V = sp.vel;
  const Scalar w = sp.phase_rate;
  const C ut = C(V * L.drho, w * L.rho) * L.phase;
  const C utt = C(V * V * L.d2rho - w * w * L.rho, 2 * V * w * L.drho) * L.phase;
  return {ut, utt};
}

/// Soliton samples (u, u_t) on the grid at time t.
template <typename Scalar>
std::pair<ComplexVector<Scalar>, ComplexVector<Scalar>> soliton_samples(const Grid<Scalar>& grid, Scalar t,
                                                                       const SolitonSpec<Scalar>& sp) {
  ComplexVector<Scalar> u(grid.n), v(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    u[j] = soliton_value(grid.nodes[j], t, sp);
    v[j] = soliton_time_derivatives(grid.nodes[j], t, sp).u_t;
  }
  return {std::move(u), std::move(v)};
}

/// Pointwise magnitude of
///   (beta + kappa mu2^2) u0'' + f(u0) + i mu2 (1 + 2 kappa mu1) u0' - mu1 (1 + kappa mu1) u0
/// with spectral x-derivatives.
template <typename Scalar>
RealVector<Scalar> relative_equilibrium_residual(const ComplexVector<Scalar>& profile, Scalar mu1, Scalar mu2,
                                                 const ModelParams<Scalar>& params, const Grid<Scalar>& grid) {
  using C = std::complex<Scalar>;
  detail::check_length(profile, grid, "relative_equilibrium_residual");
  const ComplexVector<Scalar> d1 = spectral_derivative(profile, 1, grid);
  const ComplexVector<Scalar> d2 = spectral_derivative(profile, 2, grid);
  const Scalar k = params.kappa;
  const Scalar c2 = params.beta + k * mu2 * mu2;
  const C c1(0, mu2 * (1 + 2 * k * mu1));
  const Scalar c0 = mu1 * (1 + k * mu1);
  RealVector<Scalar> res(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    const C f = evaluate_f(params.nonlinearity, profile[j], grid.nodes[j]);
    res[j] = std::abs(c2 * d2[j] + f + c1 * d1[j] - c0 * profile[j]);
  }
  return res;
}

}  // namespace nnls
