#include "nsk/operators.hpp"
#include "support.hpp"

#include "doctest.h"

#include <random>

using namespace nsk;
using test::kPi;

namespace {

VectorField shear(const Grid& g, Real b = 1.0) {
  std::vector<ScalarField> c(g.dim(), ScalarField(g));
  c[0] = ScalarField::from_function(g, [b](const Point& x) { return b * std::sin(2 * kPi * x[1]); });
  return {g, c};
}

}  // namespace

TEST_CASE("coefficient presets") {
  const auto p = CoefficientSet::standard();
  CHECK(p.bd_compatible());
  CHECK_FALSE(p.satisfies_relation());
  const auto q = CoefficientSet::quantum();
  CHECK(q.bd_compatible());
  CHECK(q.satisfies_relation());

  CoefficientSet c;
  c.h = {1.0, 2.0};
  c.g = {1.0, 2.0};  // rho h' - h = rho^2
  CHECK(c.bd_compatible());
  c.g = {1.0, 1.0};
  CHECK_FALSE(c.bd_compatible());

  CoefficientSet bad;
  bad.h = {1.0, 1.0};
  bad.g = {-1.0, 1.0};  // h + 3g = -2 rho
  CHECK_THROWS(bad.validate_range(0.1, 2.0));
  CHECK_NOTHROW(p.validate_range(0.0, 10.0));

  PhysicsParams bad_gamma;
  bad_gamma.gamma = 1.0;
  CHECK_THROWS(bad_gamma.validate());
}

TEST_CASE("laws with negative exponents refuse vacuum") {
  const Grid g(1, 16);
  const auto rho = ScalarField::from_function(g, [](const Point& x) { return std::pow(std::sin(kPi * x[0]), 2); });
  CHECK_THROWS_AS(evaluate(CoefficientSet::quantum().k, rho, "k"), NumericalError);
  CHECK_NOTHROW(evaluate(CoefficientSet::standard().h, rho, "h"));
}

TEST_CASE("density clamp") {
  const Grid g(1, 8);
  Eigen::ArrayXd v = Eigen::ArrayXd::Ones(8);
  v[2] = -5e-13;
  CHECK(nonnegative_density(ScalarField(g, v))[2] == 0.0);
  v[2] = -1e-6;
  CHECK_THROWS_WITH_AS(nonnegative_density(ScalarField(g, v)), doctest::Contains("-1e-06"), NumericalError);
}

TEST_CASE("constant inputs give zero except where the formula says otherwise") {
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, 16);
    const auto rho = ScalarField::constant(g, 1.7);
    const auto u = VectorField::constant(g, {0.3, -0.2, 0.5});
    CHECK(test::max_abs(pressure_gradient(rho, 2.0)) == 0.0);
    CHECK(test::max_abs(pressure_gradient_factored(rho, 1.4)) == 0.0);
    CHECK(test::max_abs(viscous_divergence(rho, u, CoefficientSet::standard())) == 0.0);
    CHECK(test::max_abs(korteweg_divergence(rho, CoefficientSet::standard())) == 0.0);
    CHECK(test::max_abs(korteweg_divergence(rho, CoefficientSet::quantum())) == 0.0);
    CHECK(test::max_abs(capillarity_simple(rho)) == 0.0);
    CHECK(test::max_abs(quantum_correction(rho, 0.1, 1e-8)) == 0.0);
  }
}

TEST_CASE("drag terms follow the direct formula") {
  const Grid g(3, 8);
  const auto one = ScalarField::constant(g, 1.0);
  const auto d = drag_terms(one, VectorField::constant(g, {1.0, 0.0, 0.0}), 0.25);
  CHECK(d[0][0] == doctest::Approx(0.5));
  CHECK(d[1][5] == 0.0);
  CHECK(test::max_abs(drag_terms(one, VectorField(g), 0.25)) == 0.0);
  CHECK(test::max_abs(drag_terms(one, VectorField::constant(g, {1.0, 2.0, 3.0}), 0.0)) == 0.0);
}

TEST_CASE("pressure gradient of rho squared") {
  const Grid g(2, 64);
  const auto rho = ScalarField::from_function(g, [](const Point& x) { return 1.0 + 0.1 * std::sin(2 * kPi * x[0]); });
  const auto want0 = ScalarField::from_function(g, [](const Point& x) {
    return 2.0 * (1.0 + 0.1 * std::sin(2 * kPi * x[0])) * 0.2 * kPi * std::cos(2 * kPi * x[0]);
  });
  const auto p = pressure_gradient(rho, 2.0);
  CHECK(test::rel_l2(p[0], want0) <= 1e-9);
  CHECK(test::max_abs(p[1]) <= 1e-12);
  CHECK(test::rel_l2(pressure_gradient_factored(rho, 2.0), p) <= 1e-9);
}

TEST_CASE("viscous divergence on a shear flow") {
  const Grid g(2, 32);
  const auto one = ScalarField::constant(g, 1.0);
  const auto v = viscous_divergence(one, shear(g), CoefficientSet::standard());
  // div(Du)_1 = d_2 (pi cos 2 pi x2) = -2 pi^2 sin 2 pi x2
  const auto want = ScalarField::from_function(g, [](const Point& x) { return -2 * kPi * kPi * std::sin(2 * kPi * x[1]); });
  CHECK(test::rel_l2(v[0], want) <= 1e-10);
  CHECK(test::max_abs(v[1]) <= 1e-10);
}

TEST_CASE("bulk viscosity term alone gives grad of div") {
  std::mt19937_64 rng(11);
  const Grid g(2, 32);
  const auto f = test::random_band_limited(g, rng, 4);
  CoefficientSet c;
  c.h = {0.0, 0.0};
  c.g = {1.0, 0.0};
  const auto v = viscous_divergence(ScalarField::constant(g, 1.0), grad(f), c);
  CHECK(test::rel_l2(v, grad(laplacian(f))) <= 1e-9);
}

TEST_CASE("unit capillarity matches rho grad lap rho") {
  std::mt19937_64 rng(12);
  for (int d = 1; d <= 2; ++d) {
    const Grid g(d, d == 1 ? 128 : 32);
    for (int trial = 0; trial < 10; ++trial) {
      const auto rho = test::random_positive(g, rng, 4);
      CHECK(test::rel_l2(korteweg_divergence(rho, CoefficientSet::standard()), capillarity_simple(rho)) <= 1e-8);
    }
  }
}

TEST_CASE("quantum capillarity is twice the Bohm correction") {
  std::mt19937_64 rng(13);
  for (int d = 1; d <= 2; ++d) {
    const Grid g(d, d == 1 ? 128 : 64);
    const auto rho = test::random_positive(g, rng, 2);
    const auto k = korteweg_divergence(rho, CoefficientSet::quantum());
    const auto q = quantum_correction(rho, 1.0, 1e-8);
    CHECK(test::rel_l2(k, 2.0 * q) <= 1e-8);
    CHECK(test::rel_l2(div(quantum_stress(rho, 1e-8)), q) <= 1e-8);
  }
}

TEST_CASE("Bohm correction edge cases") {
  const Grid g(1, 64);
  const auto rho = ScalarField::from_function(g, [](const Point& x) { return 1.0 + 0.5 * std::cos(2 * kPi * x[0]); });
  const auto z = quantum_correction(rho, 0.0, 1e-8);
  CHECK(test::max_abs(z) == 0.0);
  const auto vac = ScalarField::from_function(g, [](const Point& x) { return std::pow(std::sin(kPi * x[0]), 4); });
  CHECK_THROWS_AS(quantum_correction(vac, 0.1, 1e-6), NumericalError);
}

TEST_CASE("capillarity weak form against test functions") {
  std::mt19937_64 rng(14);
  const Grid g(2, 32);
  const auto rho = test::random_positive(g, rng, 3);
  const auto lap = laplacian(rho);
  const auto gr = grad(rho);
  const auto cap = capillarity_simple(rho);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorField psi(g, {test::random_band_limited(g, rng, 3), test::random_band_limited(g, rng, 3)});
    const Real strong = integrate(dot(cap, psi));
    const Real weak = -integrate(lap * dot(gr, psi)) - integrate(rho * lap * div(psi));
    CHECK(std::abs(strong - weak) <= 1e-8 * std::max(1.0, std::abs(strong)));
  }
}

TEST_CASE("divergence-form terms exchange no momentum") {
  std::mt19937_64 rng(15);
  const Grid g(2, 32);
  const auto rho = test::random_positive(g, rng, 3);
  const VectorField u(g, {test::random_band_limited(g, rng, 3), test::random_band_limited(g, rng, 3)});
  for (const auto& set : {CoefficientSet::standard(), CoefficientSet::quantum()}) {
    const auto v = viscous_divergence(rho, u, set);
    const auto k = korteweg_divergence(rho, set);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(integrate(v[i])) <= 1e-10);
      CHECK(std::abs(integrate(k[i])) <= 1e-10);
    }
  }
}
