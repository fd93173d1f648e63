#pragma once

// Independent reference computations used by the tests. None of these call the
// library code paths they are compared against.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nnls/nnls.hpp"

namespace oracle {

using nnls::ComplexVector;
using nnls::Index;
using C = std::complex<double>;

/// O(n^2) forward DFT, c_k = sum_j u_j exp(-2 pi i j k / n).
inline ComplexVector<double> direct_dft(const ComplexVector<double>& u) {
  const Index n = u.size();
  ComplexVector<double> c = ComplexVector<double>::Zero(n);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j)
      c[k] += u[j] * std::polar(1.0, -2 * std::numbers::pi * static_cast<double>((j * k) % n) / n);
  return c;
}

/// Classical closed form of the even-n periodic differentiation matrix on
/// [a, a + L): D_lj = (pi / L) (-1)^(l-j) cot(pi (l - j) / n), D_ll = 0.
inline Eigen::MatrixXd cot_differentiation_matrix(Index n, double L) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index j = 0; j < n; ++j) {
      if (l == j) continue;
      const double sign = ((l - j) % 2 == 0) ? 1.0 : -1.0;
      D(l, j) = std::numbers::pi / L * sign / std::tan(std::numbers::pi * static_cast<double>(l - j) / n);
    }
  return D;
}

/// exp(M) by scaling and squaring with a 30-term Taylor series.
inline Eigen::Matrix2cd expm(const Eigen::Matrix2cd& M) {
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::Matrix2cd X = M / std::pow(2.0, s);
  Eigen::Matrix2cd term = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * X / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline ComplexVector<double> random_vector(Index n, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  ComplexVector<double> v(n);
  for (Index j = 0; j < n; ++j) v[j] = C(N(rng), N(rng));
  return v;
}

inline C random_complex(std::mt19937& rng, double radius = 2.0) {
  std::uniform_real_distribution<double> U(-radius, radius);
  return {U(rng), U(rng)};
}

/// Trigonometric polynomial with random coefficients on modes |m| <= mmax.
inline ComplexVector<double> random_smooth(const nnls::Grid<double>& g, int mmax, std::mt19937& rng,
                                           double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  ComplexVector<double> u = ComplexVector<double>::Zero(g.n);
  for (int m = -mmax; m <= mmax; ++m) {
    const C c(N(rng), N(rng));
    for (Index j = 0; j < g.n; ++j) u[j] += c * std::polar(1.0, m * g.base_wavenumber() * (g.nodes[j] - g.a));
  }
  return u;
}

/// Composite Simpson rule with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3;
}

/// Reflection about the interval midpoint on the periodic grid: j -> (n - j) mod n
/// maps x_j - a to (b - a) - (x_j - a).
inline ComplexVector<double> reflect(const ComplexVector<double>& u) {
  const Index n = u.size();
  ComplexVector<double> r(n);
  for (Index j = 0; j < n; ++j) r[j] = u[(n - j) % n];
  return r;
}

/// All model variants with representative parameters.
inline std::vector<nnls::Nonlinearity<double>> catalogue(double kappa = 0.5) {
  return {nnls::PowerLaw<double>{2.0},           nnls::PowerLaw<double>{1.5},
          nnls::CubicQuintic<double>{1.0, 0.5, 1.0}, nnls::CubicQuintic<double>{0.7, 0.2, 2.0},
          nnls::HeavisideKerr<double>{1.0, 0.5, 0.25}, nnls::DetunedCubic<double>{0.3, 1.0, kappa},
          nnls::Saturable<double>{2.0}};
}

}  // namespace oracle
