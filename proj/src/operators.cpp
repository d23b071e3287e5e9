#include "nsk/operators.hpp"

#include <cmath>
#include <sstream>

namespace nsk {

namespace {

constexpr Real kLawTol = 1e-12;

bool same(Real x, Real y) { return std::abs(x - y) <= kLawTol * std::max(1.0, std::abs(y)); }

void require_floor(const ScalarField& rho, Real floor, const std::string& what) {
  if (!(floor > 0.0)) throw std::invalid_argument(what + " needs a strictly positive density floor");
  const auto& v = rho.values();
  Index where = 0;
  const Real m = v.minCoeff(&where);
  if (m < floor) {
    std::ostringstream msg;
    msg << what << ": density " << m << " below floor " << floor << " at flat index " << where;
    throw NumericalError(msg.str());
  }
}

}  // namespace

Real PowerLaw::operator()(Real rho) const {
  if (c == 0.0) return 0.0;
  if (a == 0.0) return c;
  return c * std::pow(rho, a);
}

Real PowerLaw::derivative(Real rho) const {
  if (c == 0.0 || a == 0.0) return 0.0;
  if (a == 1.0) return c;
  return c * a * std::pow(rho, a - 1.0);
}

CoefficientSet CoefficientSet::standard() { return {"standard", {1.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}}; }

CoefficientSet CoefficientSet::quantum() { return {"quantum", {1.0, 1.0}, {0.0, 0.0}, {1.0, -1.0}}; }

bool CoefficientSet::bd_compatible() const {
  // rho h' - h = c_h (a_h - 1) rho^{a_h}
  const Real coeff = h.c * (h.a - 1.0);
  if (same(coeff, 0.0)) return g.is_zero();
  return same(g.c, coeff) && same(g.a, h.a);
}

bool CoefficientSet::satisfies_relation() const {
  // h'^2 / rho = (c_h a_h)^2 rho^{2 a_h - 3}
  const Real coeff = h.c * h.a * h.c * h.a;
  if (same(coeff, 0.0)) return k.is_zero();
  return same(k.c, coeff) && same(k.a, 2.0 * h.a - 3.0);
}

void CoefficientSet::validate_range(Real rho_min, Real rho_max) const {
  constexpr int kSamples = 257;
  const Real lo = std::max(rho_min, 0.0);
  for (int i = 0; i < kSamples; ++i) {
    const Real rho = lo + (rho_max - lo) * i / (kSamples - 1);
    if (rho == 0.0 && (h.singular_at_vacuum() || g.singular_at_vacuum())) continue;
    const Real hv = h(rho);
    const Real gv = g(rho);
    if (hv < 0.0 || hv + 3.0 * gv < 0.0) {
      std::ostringstream msg;
      msg << "coefficient set '" << name << "' violates h >= 0, h + 3g >= 0 at rho = " << rho;
      throw std::invalid_argument(msg.str());
    }
  }
}

void PhysicsParams::validate() const {
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
}

ScalarField evaluate(const PowerLaw& law, const ScalarField& rho, const std::string& what) {
  if (law.singular_at_vacuum() && rho.min() <= 0.0)
    throw NumericalError(what + ": coefficient law with negative exponent evaluated at vacuum; floor the density first");
  return rho.map([&law](Real r) { return law(r); });
}

ScalarField evaluate_derivative(const PowerLaw& law, const ScalarField& rho, const std::string& what) {
  if (law.c != 0.0 && law.a < 1.0 && law.a != 0.0 && rho.min() <= 0.0)
    throw NumericalError(what + ": coefficient derivative singular at vacuum");
  return rho.map([&law](Real r) { return law.derivative(r); });
}

ScalarField nonnegative_density(const ScalarField& rho) {
  const Real m = rho.min();
  if (m < -1e-12) {
    std::ostringstream msg;
    msg << "negative density: min value " << m;
    throw NumericalError(msg.str());
  }
  return rho.map([](Real r) { return r < 0.0 ? 0.0 : r; });
}

VectorField pressure_gradient(const ScalarField& rho, Real gamma) {
  const auto r = nonnegative_density(rho);
  return grad(r.map([gamma](Real x) { return std::pow(x, gamma); }));
}

VectorField pressure_gradient_factored(const ScalarField& rho, Real gamma) {
  const auto half = nonnegative_density(rho).map([gamma](Real x) { return std::pow(x, 0.5 * gamma); });
  return 2.0 * (half * grad(half));
}

VectorField viscous_divergence(const ScalarField& rho, const VectorField& u, const CoefficientSet& coefficients) {
  const Grid& grid = rho.grid();
  const auto h = evaluate(coefficients.h, rho, "viscosity h");
  TensorField stress = h * sym_grad(u);
  if (!coefficients.g.is_zero()) {
    const auto bulk = evaluate(coefficients.g, rho, "viscosity g") * div(u);
    std::vector<ScalarField> iso(grid.dim() * grid.dim(), ScalarField(grid));
    for (int i = 0; i < grid.dim(); ++i) iso[i * grid.dim() + i] = bulk;
    stress = stress + TensorField(grid, std::move(iso));
  }
  return div(stress);
}

VectorField korteweg_divergence(const ScalarField& rho, const CoefficientSet& coefficients) {
  const auto k = evaluate(coefficients.k, rho, "capillarity k");
  const auto dk = evaluate_derivative(coefficients.k, rho, "capillarity k'");
  const auto grad_rho = grad(rho);
  const auto scalar_part = rho * div(k * grad_rho) - 0.5 * ((rho * dk - k) * norm_squared(grad_rho));
  return grad(scalar_part) - div(k * outer(grad_rho, grad_rho));
}

VectorField capillarity_simple(const ScalarField& rho) { return rho * grad(laplacian(rho)); }

VectorField quantum_correction(const ScalarField& rho, Real epsilon, Real floor) {
  if (epsilon == 0.0) return VectorField(rho.grid());
  require_floor(rho, floor, "quantum correction");
  const auto sqrt_rho = rho.map([](Real r) { return std::sqrt(r); });
  return epsilon * (rho * grad(laplacian(sqrt_rho) / sqrt_rho));
}

TensorField quantum_stress(const ScalarField& rho, Real floor) {
  require_floor(rho, floor, "quantum stress");
  const auto sqrt_rho = rho.map([](Real r) { return std::sqrt(r); });
  const auto g = grad(sqrt_rho);
  return sqrt_rho * hessian(sqrt_rho) - outer(g, g);
}

VectorField drag_terms(const ScalarField& rho, const VectorField& u, Real epsilon) {
  if (epsilon == 0.0) return VectorField(rho.grid());
  const auto weight = rho * norm_squared(u) + ScalarField::constant(rho.grid(), 1.0);
  return epsilon * (weight * u);
}

}  // namespace nsk
