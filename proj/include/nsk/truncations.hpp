#pragma once

#include "nsk/fields.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace nsk {

/// Even C^2 bump: 1 on [-1, 1], 1 - s(|z| - 1) on 1 < |z| < 2 with the
/// quintic smoothstep s(t) = 6t^5 - 15t^4 + 10t^3, and 0 beyond 2.
class BumpProfile {
 public:
  Real value(Real z) const;
  Real derivative(Real z) const;
  Real second_derivative(Real z) const;
  /// Antiderivative from 0: odd, nondecreasing, equal to z on [-1, 1].
  Real antiderivative(Real z) const;

  // Sup norms, closed form for the quintic.
  static constexpr Real kSupValue = 1.0;
  static constexpr Real kSupDerivative = 15.0 / 8.0;
  /// max |s''| = 10 / sqrt(3), attained at t = (3 - sqrt 3) / 6.
  static constexpr Real kSupSecondDerivative = 5.773502691896257;
  /// antiderivative(2) = 2 - integral_0^1 s = 3/2.
  static constexpr Real kSupAntiderivative = 1.5;

  /// ||profile||_{W^{2,inf}} as the sum of the three sup norms.
  static constexpr Real w2inf_norm() { return kSupValue + kSupDerivative + kSupSecondDerivative; }
};

/// Value, gradient and Hessian of a scalar function of y; entries beyond the
/// active dimension are zero.
struct Jet {
  Real value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
};

struct TruncationParams {
  Real delta = 1.0;
  Real lambda = 1.0;
  Real m_cutoff = 1.0;
  BumpProfile profile{};

  /// delta = lambda^alpha with alpha in (1/2, 1).
  static TruncationParams alpha_linked(Real lambda, Real alpha, Real m_cutoff = 1.0);
  void validate() const;
};

/// beta_delta^l(y) = (1/delta) tilde(delta y_l) prod_{k != l} bar(delta y_k),
/// l zero-based, y in R^dim.
Jet beta_l(const Eigen::Vector3d& y, int dim, int l, Real delta, const BumpProfile& profile = {});

/// hat beta_delta(y) = prod_k bar(delta y_k); hessian left zero.
Jet beta_hat(const Eigen::Vector3d& y, int dim, Real delta, const BumpProfile& profile = {});

struct ScalarJet {
  Real value = 0.0;
  Real derivative = 0.0;
};

/// bar beta_lambda(s) = bar(lambda s).
ScalarJet beta_bar(Real s, Real lambda, const BumpProfile& profile = {});

/// Piecewise-linear cutoff: 0 below 1/(2m), ramp to 1 at 1/m, 1 up to m,
/// ramp down to 0 at 2m. Derivative at kinks is the left derivative.
ScalarJet phi_m(Real y, Real m);

// --- lifts to fields --------------------------------------------------------

struct ScalarFieldJet {
  ScalarField value;
  ScalarField derivative;
};

struct VectorArgumentJet {
  ScalarField value;
  VectorField gradient;  // d/dy_k evaluated at u(x)
  TensorField hessian;   // d^2/dy_k dy_m evaluated at u(x)
};

ScalarFieldJet beta_bar(const ScalarField& rho, Real lambda, const BumpProfile& profile = {});
ScalarFieldJet phi_m(const ScalarField& rho, Real m);
VectorArgumentJet beta_l(const VectorField& u, int l, Real delta, const BumpProfile& profile = {});
VectorArgumentJet beta_hat(const VectorField& u, Real delta, const BumpProfile& profile = {});

// --- certified bounds -------------------------------------------------------

/// Profile-relative constants C(K) of the truncation bounds.
struct TruncationConstants {
  Real beta_value;     // ||beta^l||_inf <= C / delta
  Real beta_gradient;  // ||grad beta^l||_inf <= C
  Real beta_hessian;   // ||hess beta^l||_inf <= C delta
  Real hat_gradient;   // ||grad hat beta||_inf <= C delta
  Real hat_radial;     // |y| hat beta(y) <= C / delta
  Real bar_derivative; // ||bar beta_lambda'||_inf <= C lambda
  Real bar_sqrt;       // sqrt|s| bar beta_lambda(s) <= C / sqrt(lambda)

  static TruncationConstants for_dimension(int dim);
};

struct BoundCheck {
  std::string name;
  Real parameter;
  Real measured_sup;
  Real certified;
  bool pass;
};

struct BoundSuiteOptions {
  int dim = 3;
  int samples = 100000;
  int min_exponent = -10;  // parameters 2^0 ... 2^min_exponent
  std::uint64_t seed = 20240601;
};

/// Dense-sampling check of every truncation bound and both pointwise
/// convergences along dyadic parameters.
std::vector<BoundCheck> run_bound_suite(const BoundSuiteOptions& options = {});

}  // namespace nsk
