#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "sac/spectral.hpp"

using sac::Field;
using sac::Index;

namespace {

constexpr double kPi = 3.14159265358979323846;

sac::Field<double> random_field(Index n, unsigned seed, double decay = 0.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  sac::Field<double> v(n);
  for (Index m = 0; m < n; ++m) v[m] = normal(rng) / std::pow(double(m + 1), decay);
  return v;
}

}  // namespace

TEST_CASE("eigenvalues match the closed form") {
  sac::LaplaceEigenbasis<double> b1(1, 1.0, 1.0);
  CHECK(b1.eigenvalues()[0] == doctest::Approx(kPi * kPi).epsilon(1e-15));

  sac::LaplaceEigenbasis<double> b4(4, 1.0, 1.0);
  for (Index m = 0; m < 4; ++m) {
    const double expected = (m + 1) * kPi * (m + 1) * kPi;
    CHECK(b4.eigenvalues()[m] == doctest::Approx(expected).epsilon(1e-15));
    if (m > 0) CHECK(b4.eigenvalues()[m] > b4.eigenvalues()[m - 1]);
  }

  sac::LaplaceEigenbasis<double> b23(2, 2.0, 3.0);
  CHECK(b23.eigenvalues()[0] == doctest::Approx(3.0 * (kPi / 2.0) * (kPi / 2.0)).epsilon(1e-15));
}

TEST_CASE("constructor rejects non-positive arguments") {
  CHECK_THROWS_AS(sac::LaplaceEigenbasis<double>(0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sac::LaplaceEigenbasis<double>(4, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sac::LaplaceEigenbasis<double>(4, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("basis functions are L2-orthonormal under collocation quadrature") {
  sac::LaplaceEigenbasis<double> basis(16, 2.5, 0.7);
  sac::CollocationGrid<double> grid(basis, 2);
  for (Index a = 0; a < basis.n_modes(); ++a) {
    Field<double> ea = Field<double>::Zero(16);
    ea[a] = 1.0;
    const auto na = grid.to_nodal(ea);
    for (Index b = a; b < basis.n_modes(); ++b) {
      Field<double> eb = Field<double>::Zero(16);
      eb[b] = 1.0;
      const double ip = grid.inner(na, grid.to_nodal(eb));
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("nodal transform round trip") {
  sac::LaplaceEigenbasis<double> basis(16, 1.0, 1.0);
  sac::CollocationGrid<double> grid(basis, 2);

  SUBCASE("single mode") {
    Field<double> e1 = Field<double>::Zero(16);
    e1[0] = 1.0;
    const auto nodal = grid.to_nodal(e1);
    for (Index i = 0; i < grid.nodes(); ++i) {
      const double xi = grid.node_coordinates()[i];
      CHECK(nodal[i] == doctest::Approx(std::sqrt(2.0) * std::sin(kPi * xi)).epsilon(1e-13));
    }
    const auto back = grid.to_spectral(nodal);
    CHECK(std::abs(back[0] - 1.0) < 1e-12);
    for (Index m = 1; m < 16; ++m) CHECK(std::abs(back[m]) < 1e-12);
  }

  SUBCASE("zero field") {
    const Field<double> zero = Field<double>::Zero(16);
    CHECK(grid.to_nodal(zero).abs().maxCoeff() == 0.0);
    CHECK(grid.to_spectral(sac::NodalValues<double>::Zero(grid.nodes())).abs().maxCoeff() == 0.0);
  }

  SUBCASE("random 16-mode field") {
    const Field<double> v = random_field(16, 7);
    const auto back = grid.to_spectral(grid.to_nodal(v));
    CHECK((back - v).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("transform validation") {
  sac::LaplaceEigenbasis<double> basis(8, 1.0, 1.0);
  CHECK_THROWS_AS(sac::CollocationGrid<double>(basis, 1), std::invalid_argument);
  sac::CollocationGrid<double> grid(basis, 2);
  CHECK_THROWS_AS(grid.to_nodal(Field<double>::Zero(9)), std::invalid_argument);
  CHECK_THROWS_AS(grid.to_spectral(sac::NodalValues<double>::Zero(5)), std::invalid_argument);
}

TEST_CASE("diagonal symbol application") {
  sac::LaplaceEigenbasis<double> basis(8, 1.0, 0.5);

  SUBCASE("resolvent scales a pure mode by 1/(1 + k lambda / 2)") {
    Field<double> e3 = Field<double>::Zero(8);
    e3[2] = 2.0;
    const double lam = basis.eigenvalues()[2];
    const auto out = sac::apply_diagonal(basis, e3, sac::ResolventHalf<double>(1.0));
    CHECK(out[2] == doctest::Approx(2.0 / (1.0 + lam / 2.0)).epsilon(1e-15));
    // the scalar example: lambda = 2, k = 1 halves the coefficient
    CHECK(sac::ResolventHalf<double>(1.0)(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  }

  SUBCASE("perturbed generator degenerates to A at k = 0") {
    const sac::PerturbedGenerator<double> a0(0.0);
    for (double lam : {0.1, 1.0, 42.0, 1e6}) CHECK(a0(lam) == doctest::Approx(lam).epsilon(1e-15));
  }

  SUBCASE("midpoint times resolvent stays in [1/2, 1]") {
    // symbol of M_k R_{k/2}: (1 + k lambda/4) / (1 + k lambda/2)
    for (double k : {1e-6, 0.01, 0.1, 0.5, 1.0}) {
      const sac::Midpoint<double> mk(k);
      const sac::ResolventHalf<double> rk(k);
      for (double lam = 0.0; lam <= 1e6; lam = lam == 0.0 ? 1e-3 : lam * 1.7) {
        const double sym = mk(lam) * rk(lam);
        CHECK(sym <= 1.0 + 1e-15);
        CHECK(sym >= 0.5 - 1e-15);
      }
    }
  }

  SUBCASE("contractions and commutation") {
    const Field<double> v = random_field(8, 11);
    const auto r = sac::ResolventHalf<double>(0.3);
    const auto e = sac::Semigroup<double>(0.7);
    const auto ek = sac::PerturbedSemigroup<double>(0.3, 0.7);
    CHECK(sac::norm_s(basis, sac::apply_diagonal(basis, v, r), 0.0) <=
          sac::norm_s(basis, v, 0.0));
    CHECK(sac::norm_s(basis, sac::apply_diagonal(basis, v, e), 0.0) <=
          sac::norm_s(basis, v, 0.0));
    CHECK(sac::norm_s(basis, sac::apply_diagonal(basis, v, ek), 0.0) <=
          sac::norm_s(basis, v, 0.0));
    const auto re = sac::apply_diagonal(basis, sac::apply_diagonal(basis, v, e), r);
    const auto er = sac::apply_diagonal(basis, sac::apply_diagonal(basis, v, r), e);
    CHECK((re - er).abs().maxCoeff() < 1e-15);
  }

  SUBCASE("negative parameters are rejected") {
    CHECK_THROWS_AS(sac::ResolventHalf<double>(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(sac::Semigroup<double>(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(sac::PerturbedSemigroup<double>(0.1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(sac::Midpoint<double>(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(sac::PerturbedGenerator<double>(-0.5), std::invalid_argument);
  }
}

TEST_CASE("fractional norms") {
  sac::LaplaceEigenbasis<double> basis(4, 1.0, 1.0);

  Field<double> e1 = Field<double>::Zero(4);
  e1[0] = 1.0;
  CHECK(sac::norm_s(basis, e1, 1.0) == doctest::Approx(kPi).epsilon(1e-14));

  CHECK(sac::norm_s(basis, Field<double>::Zero(4), -1.3) == 0.0);
  CHECK(sac::norm_s(basis, Field<double>::Zero(4), 2.0) == 0.0);

  Field<double> e12 = Field<double>::Zero(4);
  e12[0] = 1.0;
  e12[1] = 1.0;
  const double expected = std::sqrt(std::pow(kPi, 4.0) + 16.0 * std::pow(kPi, 4.0));
  CHECK(sac::norm_s(basis, e12, 2.0) == doctest::Approx(expected).epsilon(1e-14));

  // norm_s(., 0) is the plain L2 norm
  const Field<double> v = random_field(4, 3);
  CHECK(sac::norm_s(basis, v, 0.0) == doctest::Approx(std::sqrt(v.square().sum())).epsilon(1e-15));
}

TEST_CASE("smoothing bound lambda^alpha e^{-lambda t} <= C_alpha t^{-alpha}") {
  for (double alpha : {0.0, 0.5, 1.0}) {
    const double c_alpha = alpha == 0.0 ? 1.0 : std::pow(alpha, alpha) * std::exp(-alpha);
    for (double lam = 1e-2; lam <= 1e7; lam *= 3.7) {
      for (double t = 1e-6; t <= 10.0; t *= 4.1) {
        const double lhs = std::pow(lam, alpha) * std::exp(-lam * t);
        CHECK(lhs <= c_alpha * std::pow(t, -alpha) * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("Yosida interpolation lambda/(1 + k lambda/2) <= 2 k^{-s/2} lambda^{(2-s)/2}") {
  for (double s : {0.0, 1.0, 2.0}) {
    for (double k = 1e-4; k <= 1.0; k *= 3.1) {
      for (double lam = 1e-2; lam <= 1e7; lam *= 2.9) {
        const double lhs = lam / (1.0 + k * lam / 2.0);
        const double rhs = 2.0 * std::pow(k, -s / 2.0) * std::pow(lam, (2.0 - s) / 2.0);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("resolvent difference identity is exact") {
  // 1/(1+k1 l/2) - 1/(1+k2 l/2) = (k2-k1)/2 * l / ((1+k1 l/2)(1+k2 l/2))
  for (double k1 : {1.0, 0.3, 0.05}) {
    for (double k2 : {0.9, 0.2, 0.0}) {
      if (k2 > k1) continue;
      const sac::ResolventHalf<double> r1(k1), r2(k2);
      for (double lam = 1e-3; lam <= 1e7; lam *= 2.3) {
        const double lhs = r1(lam) - r2(lam);
        const double rhs = 0.5 * (k2 - k1) * lam * r1(lam) * r2(lam);
        // the subtraction cancels, so "machine precision" is relative to the
        // resolvent values themselves (both <= 1)
        const double tol = 8.0 * std::numeric_limits<double>::epsilon() * (r1(lam) + r2(lam));
        CHECK(std::abs(lhs - rhs) <= tol);
      }
    }
  }
}

TEST_CASE("perturbed generator sandwich") {
  for (double k : {1e-5, 1e-3, 0.1, 1.0}) {
    const sac::PerturbedGenerator<double> ak(k);
    for (double lam = 1e-3; lam <= 1e7; lam *= 2.7) {
      const double yos = lam / (1.0 + k * lam / 2.0);
      CHECK(ak(lam) >= 0.5 * yos * (1.0 - 1e-14));
      CHECK(ak(lam) <= yos * (1.0 + 1e-14));
    }
  }
}
