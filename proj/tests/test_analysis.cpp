#include "doctest.h"
#include "oracles.hpp"

using namespace nnls;
using oracle::C;

namespace {

const ModelParams<double> kPaper = make_model_params<double>(1e-4, 0.5, PowerLaw<double>{2.0});
const ModelParams<double> kModerate = make_model_params<double>(0.25, 0.5, linear_model(0.25));
const ModelParams<double> kUnit = make_model_params<double>(1.0, 0.5, linear_model(1.0));

double rel(const Matrix2c<double>& a, const Matrix2c<double>& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("eigenvalues of the linear generator") {
  const auto [p0, m0] = lambda_eigenvalues(0.0, kPaper);
  CHECK(std::abs(p0 - C(0, 1e4)) < 1e-9);
  CHECK(std::abs(m0) < 1e-9);
  CHECK(degenerate_wavenumber(kPaper) == doctest::Approx(70.71067811865476).epsilon(1e-14));
  const double xp = degenerate_wavenumber(kPaper);
  const auto [pp, mp] = lambda_eigenvalues(xp, kPaper);
  CHECK(std::abs(pp - mp) < 1e-2);
  CHECK(std::abs(pp - C(0, 5e3)) < 1e-2);

  for (const double xi : {-2.0, 0.3, 1.0, 1.5, 4.0}) {
    const auto A = linear_generator(xi, kModerate);
    const auto [lp, lm] = lambda_eigenvalues(xi, kModerate);
    CHECK(std::abs(lp + lm - A.trace()) < 1e-12);
    CHECK(std::abs(lp * lm - (A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0))) < 1e-12);
  }
}

TEST_CASE("multiplier equals the matrix exponential") {
  const double xp = degenerate_wavenumber(kModerate);
  for (const double xi : {0.0, 0.4, -1.0, 1.3, xp, -xp, xp * (1 + 1e-12), xp * (1 - 1e-9), xp * (1 + 1e-6), 1.6, 3.0}) {
    for (const double t : {0.3, 1.0, 2.5, -0.7}) {
      const auto m = linear_multiplier(xi, t, kModerate);
      const Matrix2c<double> ref = oracle::expm(-t * linear_generator(xi, kModerate));
      INFO("xi = " << xi << ", t = " << t);
      CHECK(rel(m, ref) < 1e-10);
    }
  }
  CHECK(linear_multiplier(1.0, 0.0, kModerate) == Matrix2c<double>::Identity());
}

TEST_CASE("multiplier semigroup property") {
  for (const double xi : {0.0, 0.5, degenerate_wavenumber(kModerate), 2.0}) {
    for (const auto& [s, t] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {1.0, 1.0}, {2.0, -0.5}}) {
      const auto lhs = linear_multiplier(xi, s, kModerate) * linear_multiplier(xi, t, kModerate);
      CHECK(rel(lhs, linear_multiplier(xi, s + t, kModerate)) < 1e-10);
    }
  }
}

TEST_CASE("multiplier is continuous across the degenerate wavenumbers") {
  const double xp = degenerate_wavenumber(kUnit);
  const double t = 1.0;
  for (int i = 0; i <= 400; ++i) {
    const double xi = -2 * xp + 4 * xp * i / 400;
    CHECK(rel(linear_multiplier(xi, t, kUnit), oracle::expm(-t * linear_generator(xi, kUnit))) < 1e-10);
  }
  for (const double sign : {1.0, -1.0}) {
    Matrix2c<double> prev = linear_multiplier(sign * xp * (1 - 2e-10), t, kUnit);
    for (int k = -19; k <= 20; ++k) {
      const Matrix2c<double> cur = linear_multiplier(sign * xp * (1 + k * 1e-11), t, kUnit);
      CHECK((cur - prev).norm() < 1e-9);
      prev = cur;
    }
  }
}

TEST_CASE("continuous dispersion relation") {
  CHECK(continuous_dispersion_residual(0.0, 0.0, 0.0, kPaper) == 0.0);
  CHECK(continuous_dispersion_relation(0.0, 0.0, 1.0, kPaper) == doctest::Approx(-1.0));
  CHECK(continuous_dispersion_residual(1.0, 0.0, 1.0, kPaper) == doctest::Approx(0.5));
  CHECK_THROWS_AS(continuous_dispersion_residual(1.0, 0.0, -1.0, kPaper), ConfigError);
  for (const double k : {0.0, 0.5, 2.0}) {
    const auto [slow, fast] = continuous_dispersion_roots(k, 0.0, kPaper);
    CHECK(continuous_dispersion_residual(k, slow, 0.0, kPaper) < 1e-12);
    CHECK(continuous_dispersion_residual(k, fast, 0.0, kPaper) < 1e-12 * 1e4);
    CHECK(slow == doctest::Approx(-0.5 * k * k).epsilon(1e-3));
    CHECK(fast == doctest::Approx(-1e4).epsilon(1e-3));
  }
  const auto roots = continuous_dispersion_roots(20.0, 0.0, kModerate);
  CHECK(std::isnan(roots.first));
}

TEST_CASE("numerical dispersion relation") {
  CHECK(psi_space(0.5, 0.25) == 2.0);
  CHECK(psi_time(0.0, 0.1) == 0.0);
  CHECK(psi_time(std::numbers::pi / 2, 0.1) == doctest::Approx(20.0));
  CHECK(numerical_dispersion_relation(0.0, 0.0, false, kPaper, 0.2, 0.1) == 0.0);
  CHECK(numerical_dispersion_relation(0.0, 0.0, true, kPaper, 0.2, 0.1) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(numerical_dispersion_residual(0.0, 3.2, false, kPaper, 0.2, 0.1), ConfigError);
}

TEST_CASE("bisection") {
  const double r = bisect_root([](double x) { return std::cos(x); }, 0.0, 3.0);
  CHECK(std::abs(r - std::numbers::pi / 2) < 1e-15);
  CHECK(bisect_root([](double x) { return x; }, 0.0, 1.0) == 0.0);
  CHECK(std::abs(bisect_root([](double x) { return x - 0.3; }, 0.0, 1.0, 1e-3) - 0.3) < 1e-3);
  CHECK_THROWS_AS(bisect_root([](double x) { return x * x + 1; }, -1.0, 1.0), ConfigError);
}

TEST_CASE("numerical roots approach continuous roots at second order") {
  const double h = 0.2;
  const double k = 1.0;
  const double exact = continuous_dispersion_roots(k, 0.0, kPaper).first;
  std::vector<double> err;
  for (const double dt : {0.2, 0.1, 0.05, 0.025}) {
    auto f = [&](double w) { return numerical_dispersion_relation(k * h, w, false, kPaper, h, dt); };
    const double w = bisect_root(f, -1.0, 0.0);
    CHECK(numerical_dispersion_residual(k * h, w, false, kPaper, h, dt) < 1e-10);
    err.push_back(std::abs(w / dt - exact));
  }
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("soliton parameters and samples") {
  const auto sp = make_soliton_spec(1.0, 1.0, kPaper);
  CHECK(sp.s == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sp.mu2 == 1.0);
  CHECK(sp.mu1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(soliton_value(0.0, 0.0, sp) - C(1, 0)) < 1e-15);
  CHECK(std::abs(soliton_value(10.0, 0.0, sp)) == doctest::Approx(1 / std::cosh(10.0 / std::sqrt(1 + 2e-4))));

  const auto sp2 = make_soliton_spec(1.3, 0.7, make_model_params<double>(0.05, 0.5, PowerLaw<double>{2.0}));
  for (const double x : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
    for (const double t : {0.0, 1.5, 4.0}) {
      const double e = 1e-5;
      const C ux = (soliton_value(x + e, t, sp2) - soliton_value(x - e, t, sp2)) / (2 * e);
      const C ut = (soliton_value(x, t + e, sp2) - soliton_value(x, t - e, sp2)) / (2 * e);
      const double e2 = 1e-4;
      const C utt = (soliton_value(x, t + e2, sp2) - 2.0 * soliton_value(x, t, sp2) + soliton_value(x, t - e2, sp2)) / (e2 * e2);
      const auto td = soliton_time_derivatives(x, t, sp2);
      CHECK(std::abs(soliton_x_derivative(x, t, sp2) - ux) < 1e-8);
      CHECK(std::abs(td.u_t - ut) < 1e-8);
      CHECK(std::abs(td.u_tt - utt) < 1e-5);
      const C moved = soliton_value(x + sp2.mu2 * t, 0.0, sp2) * std::polar(1.0, sp2.mu1 * t);
      CHECK(std::abs(soliton_value(x, t, sp2) - moved) < 1e-12);
    }
  }

  CHECK_THROWS_AS(make_soliton_spec(0.0, 1.0, kPaper), ConfigError);
  CHECK_THROWS_AS(make_soliton_spec(1.0, 1.0, make_model_params<double>(1e-4, 0.4, PowerLaw<double>{2.0})), ConfigError);
  CHECK_THROWS_AS(make_soliton_spec(1.0, 1.0, make_model_params<double>(1e-4, 0.5, PowerLaw<double>{3.0})), ConfigError);
}

TEST_CASE("soliton satisfies the equation on the grid") {
  const auto grid = make_grid(-150.0, 50.0, 1000);
  const auto sp = make_soliton_spec(1.0, 1.0, kPaper);
  const auto [u, v] = soliton_samples(grid, 0.0, sp);
  const ComplexVector<double> uxx = spectral_derivative(u, 2, grid);
  double worst = 0;
  for (Index j = 0; j < grid.n; ++j) {
    const auto td = soliton_time_derivatives(grid.nodes[j], 0.0, sp);
    CHECK(v[j] == td.u_t);
    const C r = kPaper.kappa * td.u_tt + C(0, 1) * td.u_t + kPaper.beta * uxx[j] + evaluate_f(kPaper.nonlinearity, u[j]);
    worst = std::max(worst, std::abs(r));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("relative-equilibrium residual of the soliton profile") {
  const auto grid = make_grid(-150.0, 50.0, 1000);
  for (const auto& [eta, vel] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {1.2, 0.5}}) {
    const auto sp = make_soliton_spec(eta, vel, kPaper);
    const auto [u, v] = soliton_samples(grid, 0.0, sp);
    CHECK(relative_equilibrium_residual(u, sp.mu1, sp.mu2, kPaper, grid).maxCoeff() < 1e-7);
    CHECK(relative_equilibrium_residual(u, sp.mu1 + 0.05, sp.mu2, kPaper, grid).maxCoeff() > 1e-2);
    CHECK(relative_equilibrium_residual(u, sp.mu1, -sp.mu2, kPaper, grid).maxCoeff() > 1e-2);
  }
  CHECK_THROWS_AS(relative_equilibrium_residual(ComplexVector<double>(ComplexVector<double>::Zero(10)), 1.0, 1.0, kPaper, grid),
                  DimensionError);
}

TEST_CASE("invariants of the exact soliton do not depend on time") {
  const auto grid = make_grid(-150.0, 50.0, 1000);
  const auto sp = make_soliton_spec(1.0, 1.0, kPaper);
  const auto s0 = soliton_samples(grid, 0.0, sp);
  const FieldState<double> a{s0.first, s0.second, 0.0};
  for (const double t : {20.0, 50.0}) {
    const auto st = soliton_samples(grid, t, sp);
    const FieldState<double> b{st.first, st.second, t};
    CHECK(hamiltonian_h(b, kPaper, grid) == doctest::Approx(hamiltonian_h(a, kPaper, grid)).epsilon(1e-10));
    CHECK(invariant_i1(b, kPaper, grid) == doctest::Approx(invariant_i1(a, kPaper, grid)).epsilon(1e-10));
    CHECK(invariant_i2(b, kPaper, grid) == doctest::Approx(invariant_i2(a, kPaper, grid)).epsilon(1e-10));
  }
}

}  // TEST_SUITE
