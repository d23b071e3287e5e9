#pragma once

#include "nsk/fields.hpp"

#include <string>

namespace nsk {

/// c * rho^a.
struct PowerLaw {
  Real c = 0.0;
  Real a = 0.0;

  Real operator()(Real rho) const;
  Real derivative(Real rho) const;
  bool is_zero() const { return c == 0.0; }
  /// Singular at vacuum when the exponent is negative.
  bool singular_at_vacuum() const { return c != 0.0 && a < 0.0; }
};

/// Viscosity laws h, g and capillarity law k.
struct CoefficientSet {
  std::string name = "custom";
  PowerLaw h{1.0, 1.0};
  PowerLaw g{0.0, 0.0};
  PowerLaw k{1.0, 0.0};

  /// h = rho, g = 0, k = 1: the target system.
  static CoefficientSet standard();
  /// h = rho, g = 0, k = 1/rho.
  static CoefficientSet quantum();

  /// g = rho h' - h, decided on the power-law parameters.
  bool bd_compatible() const;
  /// k = h'(rho)^2 / rho, decided on the power-law parameters.
  bool satisfies_relation() const;
  /// Checks h >= 0 and h + 3g >= 0 on a sampling of [rho_min, rho_max].
  void validate_range(Real rho_min, Real rho_max) const;
};

struct PhysicsParams {
  Real gamma = 2.0;
  Real epsilon = 0.0;
  CoefficientSet coefficients = CoefficientSet::standard();

  void validate() const;
};

/// Evaluates a law pointwise; throws NumericalError on vacuum for negative
/// exponents.
ScalarField evaluate(const PowerLaw& law, const ScalarField& rho, const std::string& what);
ScalarField evaluate_derivative(const PowerLaw& law, const ScalarField& rho, const std::string& what);

/// Clamps entries in [-1e-12, 0) to zero; anything more negative is an error.
ScalarField nonnegative_density(const ScalarField& rho);

/// grad(rho^gamma).
VectorField pressure_gradient(const ScalarField& rho, Real gamma);
/// 2 rho^{gamma/2} grad(rho^{gamma/2}), the weak-form factorization.
VectorField pressure_gradient_factored(const ScalarField& rho, Real gamma);

/// div(h(rho) Du + g(rho) div(u) I).
VectorField viscous_divergence(const ScalarField& rho, const VectorField& u, const CoefficientSet& coefficients);

/// grad(rho div(k grad rho) - 1/2 (rho k' - k)|grad rho|^2) - div(k grad rho (x) grad rho).
VectorField korteweg_divergence(const ScalarField& rho, const CoefficientSet& coefficients);

/// rho grad(laplacian rho).
VectorField capillarity_simple(const ScalarField& rho);

/// eps rho grad(laplacian(sqrt rho) / sqrt rho). Requires rho >= floor > 0.
VectorField quantum_correction(const ScalarField& rho, Real epsilon, Real floor);
/// sqrt(rho) hess(sqrt rho) - grad(sqrt rho) (x) grad(sqrt rho); its
/// divergence equals the (unit-epsilon) quantum correction.
TensorField quantum_stress(const ScalarField& rho, Real floor);

/// eps (rho |u|^2 + 1) u.
VectorField drag_terms(const ScalarField& rho, const VectorField& u, Real epsilon);

}  // namespace nsk
