#pragma once

// Catalogue of nonlinear terms f(u) for kappa u_tt + i u_t + beta u_xx + f(u) = 0.
//
// Every variant is written as f(z) = z g(|z|; x). Two potentials are exposed:
//
//   evaluate_V       Wirtinger potential, f = dV/dz-bar = (V_p + i V_q) / 2.
//   energy_potential V / 2, the potential entering the Hamiltonian, the
//                    multi-symplectic potential and the local conservation
//                    laws (its p- and q-gradients are Re f and Im f).
//
// Both vanish at z = 0.

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "nnls/errors.hpp"

namespace nnls {

/// f(u) = |u|^q u.
template <typename Scalar = double>
struct PowerLaw {
  Scalar q{2};

  bool operator==(const PowerLaw&) const = default;
};

/// f(u) = alpha |u|^sigma u - gamma |u|^{2 sigma} u.
template <typename Scalar = double>
struct CubicQuintic {
  Scalar alpha{1};
  Scalar gamma{1};
  Scalar sigma{2};

  bool operator==(const CubicQuintic&) const = default;
};

/// f(u) = alpha0 |u|^2 u + (alpha1 + alpha2 |u|^2) H(x) u, with H(0) = 1.
template <typename Scalar = double>
struct HeavisideKerr {
  Scalar alpha0{0};
  Scalar alpha1{0};
  Scalar alpha2{0};

  bool operator==(const HeavisideKerr&) const = default;
};

/// f(u) = (delta / (4 kappa_ref) - alpha |u|^2) u. With delta = alpha = 0 this
/// is the linear equation.
template <typename Scalar = double>
struct DetunedCubic {
  Scalar delta{0};
  Scalar alpha{0};
  Scalar kappa_ref{1};

  bool operator==(const DetunedCubic&) const = default;
};

/// f(u) = (1/2) (2 + gamma |u|^2) / (1 + gamma |u|^2)^2 |u|^2 u.
template <typename Scalar = double>
struct Saturable {
  Scalar gamma{1};

  bool operator==(const Saturable&) const = default;
};

template <typename Scalar = double>
using Nonlinearity = std::variant<PowerLaw<Scalar>, CubicQuintic<Scalar>, HeavisideKerr<Scalar>,
                                  DetunedCubic<Scalar>, Saturable<Scalar>>;

/// Equation coefficients: nonparaxiality kappa, diffraction beta, and f.
template <typename Scalar = double>
struct ModelParams {
  Scalar kappa{};
  Scalar beta{};
  Nonlinearity<Scalar> nonlinearity;
};

/// Complex derivatives of f: Df(z)[w] = dz * w + dzbar * conj(w).
template <typename Scalar = double>
struct NonlinearityDerivative {
  std::complex<Scalar> dz;
  std::complex<Scalar> dzbar;
};

template <typename Scalar>
std::string model_tag(const Nonlinearity<Scalar>& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PowerLaw<Scalar>>) return "power_law";
        else if constexpr (std::is_same_v<M, CubicQuintic<Scalar>>) return "cubic_quintic";
        else if constexpr (std::is_same_v<M, HeavisideKerr<Scalar>>) return "heaviside_kerr";
        else if constexpr (std::is_same_v<M, DetunedCubic<Scalar>>) return "detuned_cubic";
        else return "saturable";
      },
      model);
}

template <typename Scalar>
bool is_x_dependent(const Nonlinearity<Scalar>& model) {
  return std::holds_alternative<HeavisideKerr<Scalar>>(model);
}

/// Throws ConfigError when a parameter violates its sign constraint.
template <typename Scalar>
void validate(const Nonlinearity<Scalar>& model) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("model: ") + what);
  };
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PowerLaw<Scalar>>) {
          require(m.q > 0, "power_law requires q > 0");
        } else if constexpr (std::is_same_v<M, CubicQuintic<Scalar>>) {
          require(m.alpha > 0 && m.gamma > 0 && m.sigma > 0,
                  "cubic_quintic requires alpha, gamma, sigma > 0");
        } else if constexpr (std::is_same_v<M, HeavisideKerr<Scalar>>) {
          require(m.alpha0 >= 0 && m.alpha1 >= 0 && m.alpha2 >= 0,
                  "heaviside_kerr requires alpha0, alpha1, alpha2 >= 0");
        } else if constexpr (std::is_same_v<M, DetunedCubic<Scalar>>) {
          require(m.delta >= 0 && m.alpha >= 0, "detuned_cubic requires delta, alpha >= 0");
          require(m.kappa_ref > 0, "detuned_cubic requires kappa_ref > 0");
        } else {
          require(m.gamma > 0, "saturable requires gamma > 0");
        }
      },
      model);
}

/// Validated ModelParams. A DetunedCubic model must carry kappa_ref == kappa.
template <typename Scalar>
ModelParams<Scalar> make_model_params(Scalar kappa, Scalar beta, Nonlinearity<Scalar> model) {
  if (!(kappa > 0)) throw ConfigError("physics: kappa must be > 0");
  if (!(beta > 0)) throw ConfigError("physics: beta must be > 0");
  validate(model);
  if (const auto* d = std::get_if<DetunedCubic<Scalar>>(&model)) {
    if (d->kappa_ref != kappa) {
      std::ostringstream os;
      os << "model: detuned_cubic kappa_ref (" << d->kappa_ref << ") must equal kappa (" << kappa << ")";
      throw ConfigError(os.str());
    }
  }
  return ModelParams<Scalar>{kappa, beta, std::move(model)};
}

/// Linear equation (f = 0) expressed through the catalogue.
template <typename Scalar>
Nonlinearity<Scalar> linear_model(Scalar kappa) {
  return DetunedCubic<Scalar>{Scalar(0), Scalar(0), kappa};
}

template <typename Scalar>
Scalar heaviside(Scalar x) {
  return x >= Scalar(0) ? Scalar(1) : Scalar(0);
}

namespace detail {

// Radial data of f(z) = z g(r): g(r) and r g'(r), at fixed x.
template <typename Scalar>
struct Radial {
  Scalar g;
  Scalar r_dg;
};

template <typename Scalar>
Radial<Scalar> radial(const Nonlinearity<Scalar>& model, Scalar r, Scalar x) {
  return std::visit(
      [&](const auto& m) -> Radial<Scalar> {
        using M = std::decay_t<decltype(m)>;
        const Scalar r2 = r * r;
        if constexpr (std::is_same_v<M, PowerLaw<Scalar>>) {
          if (r == 0) return {0, 0};
          const Scalar rq = std::pow(r, m.q);
          return {rq, m.q * rq};
        } else if constexpr (std::is_same_v<M, CubicQuintic<Scalar>>) {
          if (r == 0) return {0, 0};
          const Scalar rs = std::pow(r, m.sigma);
          const Scalar r2s = rs * rs;
          return {m.alpha * rs - m.gamma * r2s, m.sigma * (m.alpha * rs - Scalar(2) * m.gamma * r2s)};
        } else if constexpr (std::is_same_v<M, HeavisideKerr<Scalar>>) {
          const Scalar H = heaviside(x);
          return {m.alpha0 * r2 + H * (m.alpha1 + m.alpha2 * r2),
                  Scalar(2) * (m.alpha0 + H * m.alpha2) * r2};
        } else if constexpr (std::is_same_v<M, DetunedCubic<Scalar>>) {
          return {m.delta / (Scalar(4) * m.kappa_ref) - m.alpha * r2, Scalar(-2) * m.alpha * r2};
        } else {
          const Scalar d = Scalar(1) + m.gamma * r2;
          return {Scalar(0.5) * (Scalar(2) + m.gamma * r2) * r2 / (d * d), Scalar(2) * r2 / (d * d * d)};
        }
      },
      model);
}

}  // namespace detail

/// f(z) at position x (x is only read by HeavisideKerr).
template <typename Scalar>
std::complex<Scalar> evaluate_f(const Nonlinearity<Scalar>& model, std::complex<Scalar> z, Scalar x = 0) {
  return z * detail::radial(model, std::abs(z), x).g;
}

/// Radial factor g with f(z) = z g(|z|). Undefined for the x-dependent model.
template <typename Scalar>
Scalar evaluate_g(const Nonlinearity<Scalar>& model, Scalar r) {
  if (is_x_dependent(model)) {
    throw UnsupportedModelError("evaluate_g: heaviside_kerr depends on x; no radial factor g(|z|)");
  }
  return detail::radial(model, r, Scalar(0)).g;
}

/// Wirtinger potential V with f = dV/dz-bar and V(0) = 0.
template <typename Scalar>
Scalar evaluate_V(const Nonlinearity<Scalar>& model, std::complex<Scalar> z, Scalar x = 0) {
  const Scalar r = std::abs(z);
  const Scalar r2 = r * r;
  return std::visit(
      [&](const auto& m) -> Scalar {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PowerLaw<Scalar>>) {
          return Scalar(2) * std::pow(r, m.q + 2) / (m.q + 2);
        } else if constexpr (std::is_same_v<M, CubicQuintic<Scalar>>) {
          return Scalar(2) * m.alpha * std::pow(r, m.sigma + 2) / (m.sigma + 2) -
                 Scalar(2) * m.gamma * std::pow(r, 2 * m.sigma + 2) / (2 * m.sigma + 2);
        } else if constexpr (std::is_same_v<M, HeavisideKerr<Scalar>>) {
          return m.alpha0 * r2 * r2 / 2 + heaviside(x) * (m.alpha1 * r2 + m.alpha2 * r2 * r2 / 2);
        } else if constexpr (std::is_same_v<M, DetunedCubic<Scalar>>) {
          return m.delta * r2 / (Scalar(4) * m.kappa_ref) - m.alpha * r2 * r2 / 2;
        } else {
          return Scalar(0.5) * r2 * r2 / (Scalar(1) + m.gamma * r2);
        }
      },
      model);
}

/// Potential G = V / 2 with dG/dp = Re f and dG/dq = Im f.
template <typename Scalar>
Scalar energy_potential(const Nonlinearity<Scalar>& model, std::complex<Scalar> z, Scalar x = 0) {
  return evaluate_V(model, z, x) / 2;
}

/// df/dz and df/dz-bar at z. For f = z g(r): df/dz = g + r g'/2 and
/// df/dz-bar = (z/r)^2 r g'/2.
template <typename Scalar>
NonlinearityDerivative<Scalar> evaluate_df(const Nonlinearity<Scalar>& model, std::complex<Scalar> z,
                                           Scalar x = 0) {
  const Scalar r = std::abs(z);
  const auto rad = detail::radial(model, r, x);
  NonlinearityDerivative<Scalar> d;
  d.dz = std::complex<Scalar>(rad.g + rad.r_dg / 2, 0);
  if (r == 0) {
    d.dzbar = 0;
  } else {
    const std::complex<Scalar> phase = z / r;
    d.dzbar = phase * phase * (rad.r_dg / 2);
  }
  return d;
}

/// |f(z) - (D_p V + i D_q V) / 2| with central differences of step eps.
template <typename Scalar>
Scalar wirtinger_residual(const Nonlinearity<Scalar>& model, std::complex<Scalar> z, Scalar x, Scalar eps) {
  const std::complex<Scalar> dp(eps, 0);
  const std::complex<Scalar> dq(0, eps);
  const Scalar Vp = (evaluate_V(model, z + dp, x) - evaluate_V(model, z - dp, x)) / (2 * eps);
  const Scalar Vq = (evaluate_V(model, z + dq, x) - evaluate_V(model, z - dq, x)) / (2 * eps);
  return std::abs(evaluate_f(model, z, x) - std::complex<Scalar>(Vp, Vq) / Scalar(2));
}

}  // namespace nnls
