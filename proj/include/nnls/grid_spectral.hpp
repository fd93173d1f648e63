#pragma once

/// Periodic uniform grids and Fourier pseudospectral differentiation.
///
/// Transform convention (fixed for the whole library):
///
///   forward:  c_k = sum_{j=0}^{n-1} u_j exp(-2 pi i j k / n)
///   inverse:  u_j = (1/n) sum_{k=0}^{n-1} c_k exp(+2 pi i j k / n)
///
/// Coefficients are stored in the native FFT ordering: storage index k holds
/// mode m = k for k < n/2 and m = k - n for k >= n/2, so m runs over
/// -n/2 .. n/2-1. Mode m has wavenumber m * 2 pi / (b - a).
///
/// The first-derivative multiplier of the Nyquist mode m = -n/2 is zero, which
/// keeps the differentiation matrix real and skew-symmetric. The second
/// derivative multiplier is the square of the first, so A_h = B_h^2 holds
/// exactly (Nyquist included).

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "nnls/errors.hpp"

namespace nnls {

using Index = Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Uniform periodic grid on [a, b) with n nodes x_j = a + j h.
template <typename Scalar = double>
struct Grid {
  Scalar a{};
  Scalar b{};
  Index n{};
  Scalar h{};
  RealVector<Scalar> nodes;

  Scalar length() const { return b - a; }
  /// Wavenumber of one unit of mode number: 2 pi / (b - a).
  Scalar base_wavenumber() const { return Scalar(2) * std::numbers::pi_v<Scalar> / length(); }
};

/// Mode number m in [-n/2, n/2) stored at FFT index k.
inline Index mode_number(Index k, Index n) { return k < n / 2 ? k : k - n; }

/// FFT storage index of mode m in [-n/2, n/2).
inline Index storage_index(Index m, Index n) { return m >= 0 ? m : m + n; }

template <typename Scalar>
Grid<Scalar> make_grid(Scalar a, Scalar b, Index n) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(b > a)) {
    std::ostringstream os;
    os << "grid: right endpoint must exceed left endpoint (a=" << a << ", b=" << b << ")";
    throw ConfigError(os.str());
  }
  if (n < 4) {
    throw ConfigError("grid: node count must be at least 4 (n=" + std::to_string(n) + ")");
  }
  if (n % 2 != 0) {
    throw ConfigError("grid: node count must be even (n=" + std::to_string(n) + ")");
  }
  Grid<Scalar> g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.h = (b - a) / static_cast<Scalar>(n);
  g.nodes.resize(n);
  for (Index j = 0; j < n; ++j) g.nodes[j] = a + static_cast<Scalar>(j) * g.h;
  return g;
}

/// Fourier multipliers of the pseudospectral derivative operators, in FFT
/// storage order. `first` realizes B_h and `second` realizes A_h = B_h^2.
template <typename Scalar = double>
struct SpectralMultipliers {
  ComplexVector<Scalar> first;
  ComplexVector<Scalar> second;
};

template <typename Scalar>
SpectralMultipliers<Scalar> spectral_multipliers(const Grid<Scalar>& grid) {
  const Index n = grid.n;
  const Scalar k0 = grid.base_wavenumber();
  SpectralMultipliers<Scalar> mu;
  mu.first.resize(n);
  mu.second.resize(n);
  for (Index k = 0; k < n; ++k) {
    const Index m = mode_number(k, n);
    const Scalar xi = (m == -n / 2) ? Scalar(0) : static_cast<Scalar>(m) * k0;
    mu.first[k] = Complex<Scalar>(0, xi);
    mu.second[k] = Complex<Scalar>(-xi * xi, 0);
  }
  return mu;
}

/// Real wavenumber of each stored mode, with the Nyquist mode mapped to 0 (the
/// symbol seen by A_h).
template <typename Scalar>
RealVector<Scalar> mode_wavenumbers(const Grid<Scalar>& grid) {
  return spectral_multipliers(grid).first.imag();
}

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& thread_fft() {
  thread_local Eigen::FFT<Scalar> fft;
  return fft;
}

template <typename Derived, typename Scalar>
void check_length(const Eigen::MatrixBase<Derived>& v, const Grid<Scalar>& grid, const char* who) {
  if (v.size() != grid.n) {
    std::ostringstream os;
    os << who << ": length " << v.size() << " does not match grid size " << grid.n;
    throw DimensionError(os.str());
  }
}

}  // namespace detail

/// Discrete Fourier coefficients of nodal values (unnormalized forward DFT).
template <typename Scalar>
ComplexVector<Scalar> forward_transform(const ComplexVector<Scalar>& field, const Grid<Scalar>& grid) {
  detail::check_length(field, grid, "forward_transform");
  ComplexVector<Scalar> coeffs(grid.n);
  detail::thread_fft<Scalar>().fwd(coeffs, field);
  return coeffs;
}

/// Nodal values from Fourier coefficients (inverse DFT, scaled by 1/n).
template <typename Scalar>
ComplexVector<Scalar> inverse_transform(const ComplexVector<Scalar>& coeffs, const Grid<Scalar>& grid) {
  detail::check_length(coeffs, grid, "inverse_transform");
  ComplexVector<Scalar> field(grid.n);
  detail::thread_fft<Scalar>().inv(field, coeffs);
  return field;
}

/// Pseudospectral derivative of order 1 (B_h u) or 2 (A_h u).
template <typename Scalar>
ComplexVector<Scalar> spectral_derivative(const ComplexVector<Scalar>& field, int order,
                                          const Grid<Scalar>& grid) {
  if (order != 1 && order != 2) {
    throw ConfigError("spectral_derivative: unsupported order " + std::to_string(order));
  }
  detail::check_length(field, grid, "spectral_derivative");
  const auto mu = spectral_multipliers(grid);
  ComplexVector<Scalar> c = forward_transform(field, grid);
  c.array() *= (order == 1 ? mu.first : mu.second).array();
  return inverse_transform(c, grid);
}

/// Entry (l, j) of the dense pseudospectral differentiation matrix B_h,
///
///   Re( 2 pi i / (n (b-a)) sum_{m=-n/2}^{n/2-1} theta^{m (j-l)} m ),
///   theta = exp(-2 pi i / n),
///
/// summed directly (O(n) per entry, independent of the FFT path).
template <typename Scalar>
Scalar bh_entry(Index l, Index j, const Grid<Scalar>& grid) {
  const Index n = grid.n;
  if (l < 0 || l >= n || j < 0 || j >= n) {
    std::ostringstream os;
    os << "bh_entry: index (" << l << ", " << j << ") out of range for n = " << n;
    throw DimensionError(os.str());
  }
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Complex<Scalar> sum(0, 0);
  for (Index m = -n / 2; m < n / 2; ++m) {
    const Scalar angle = -two_pi * static_cast<Scalar>((m * (j - l)) % n) / static_cast<Scalar>(n);
    sum += static_cast<Scalar>(m) * std::polar(Scalar(1), angle);
  }
  const Complex<Scalar> prefactor(0, two_pi / (static_cast<Scalar>(n) * grid.length()));
  return std::real(prefactor * sum);
}

/// Dense B_h assembled entrywise from bh_entry. Intended for small n.
template <typename Scalar>
RealMatrix<Scalar> differentiation_matrix(const Grid<Scalar>& grid) {
  RealMatrix<Scalar> B(grid.n, grid.n);
  for (Index l = 0; l < grid.n; ++l)
    for (Index j = 0; j < grid.n; ++j) B(l, j) = bh_entry(l, j, grid);
  return B;
}

}  // namespace nnls
