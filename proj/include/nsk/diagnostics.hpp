#pragma once

#include "nsk/solver.hpp"
#include "nsk/truncations.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nsk {

/// Nonnegative dissipation integrals at one instant, plus the signed cubic
/// drag cross term that enters the BD balance.
struct Dissipation {
  Real sym = 0.0;          // int |T^s|^2 = int rho |Du|^2
  Real antisym = 0.0;      // int |T^a|^2 = int rho |Au|^2
  Real quartic = 0.0;      // eps int rho |u|^4
  Real linear = 0.0;       // eps int |u|^2
  Real laplacian = 0.0;    // int |lap rho|^2
  Real pressure = 0.0;     // int |grad rho^{gamma/2}|^2
  Real bohm = 0.0;         // int rho |hess log rho|^2
  Real cubic_cross = 0.0;  // eps int |u|^2 u . grad rho, either sign

  /// Rate of energy loss: dE/dt = -energy_rate().
  Real energy_rate() const { return sym + quartic + linear; }
  /// Rate of BD-entropy loss: dB/dt = -bd_rate(gamma, eps).
  Real bd_rate(Real gamma, Real epsilon) const;
};

Real energy(const State& state, Real floor = -1.0);
/// Requires rho > 0 everywhere (log rho).
Real bd_entropy(const State& state, Real floor = -1.0);
Dissipation dissipation(const State& state, Real floor = -1.0);

/// T = sqrt(rho) grad u on {rho > floor}, 0 elsewhere; T_ij = sqrt(rho) d_j u_i.
TensorField tensor_T(const State& state, Real floor = -1.0);
/// Largest |lhs - rhs| over (i, j) of the defining identity of T tested
/// against a time-independent phi at one instant.
Real tensor_T_identity_residual(const State& state, const ScalarField& phi, Real floor = -1.0);

struct DiagnosticsRecord {
  Real time = 0.0;
  Real energy = 0.0;
  Real bd = 0.0;  // NaN when the state touches vacuum
  Dissipation dissipation{};
  Real mass = 0.0;
  Point momentum{0.0, 0.0, 0.0};
  Real min_rho = 0.0;
  std::size_t clamp_events = 0;
};

DiagnosticsRecord record(const State& state, Real floor = -1.0);

struct NormRow {
  std::string group;  // ub1, ub4, ub5, ub6, epsbound
  std::string name;
  Real value;
};

/// Every uniform bound evaluated on frames spaced dt apart.
std::vector<NormRow> norm_table(const std::vector<State>& frames, Real dt, Real floor = -1.0);

// --- weak formulations ------------------------------------------------------

/// C^2 time cutoff: 1 up to t_a, quintic ramp to 0 at t_b, 0 beyond.
struct TimeCutoff {
  Real t_a;
  Real t_b;
  Real value(Real t) const;
  Real derivative(Real t) const;
  /// Cutoff supported in [0, 3T/4] with ramp from T/4.
  static TimeCutoff for_horizon(Real end_time);
};

/// Low-order trigonometric tensor-product test function drawn from `seed`.
ScalarField trig_test_function(const Grid& grid, std::uint64_t seed);

/// Composite Simpson weights for count samples (3/8 rule on the tail when
/// the interval count is odd).
std::vector<Real> simpson_weights(std::size_t count, Real dt);

/// |int rho0 phi(0) + iint rho phi_t + m . grad phi| with phi = chi(t) phi_x(x).
Real weak_residual_continuity(const std::vector<State>& frames, Real dt, const TimeCutoff& chi,
                              const ScalarField& phi_x);
/// Momentum component l (zero-based) tested against psi = chi(t) psi_x(x).
Real weak_residual_momentum(const std::vector<State>& frames, Real dt, const TimeCutoff& chi, const ScalarField& psi_x,
                            int l, Real floor = -1.0);

// --- remainders -------------------------------------------------------------

struct RemainderReport {
  Real delta = 0.0;
  Real lambda = 0.0;
  std::array<Real, 6> r{};        // sum over l of ||R_{l,i}||_1
  std::array<Real, 6> r_tilde{};  // sum over l of ||R~_{l,i}||_1
  Real total_r = 0.0;             // sum over l of ||sum_i R_{l,i}||_1
  Real total_r_tilde = 0.0;
  Real total = 0.0;               // sum over l of ||R_l + R~_l||_1
  Real shape = 0.0;               // delta / sqrt(lambda) + lambda / delta + lambda + delta
  Real envelope = 0.0;            // C * shape

  Real sum_of_parts() const;
};

Real remainder_shape(Real delta, Real lambda);

/// Assembles both remainder families; C scales the envelope.
RemainderReport remainder(const State& state, Real delta, Real lambda, Real floor = -1.0, Real envelope_constant = 1.0);

/// ||sqrt(rho) u_i (grad hat beta_delta(u))_k T_kj||_1 (Frobenius magnitude).
Real rbar_remainder(const State& state, Real delta, Real floor = -1.0);

/// Smallest C with values[i] <= C * shapes[i] for every i.
Real fit_envelope(const std::vector<Real>& values, const std::vector<Real>& shapes);

// --- inequality certification -----------------------------------------------

struct InequalityReport {
  std::string name;
  Real initial = 0.0;
  Real final = 0.0;
  Real accumulated = 0.0;  // sum dt * D_n
  Real step_constant = 0.0;
  Real tolerance_per_step = 0.0;
  Real max_excess = 0.0;        // largest F_{n+1} + dt D_n - F_n
  Real total_violation = 0.0;   // sum of the excess above c dt^2
  Real budget = 0.0;
  std::size_t violating_steps = 0;
  bool pass = false;
};

/// Checks F_{n+1} + dt D_n <= F_n + c dt^2 along consecutive records.
InequalityReport check_energy_inequality(const std::vector<DiagnosticsRecord>& records, Real dt, Real step_constant,
                                         Real budget_fraction = 1e-6);
InequalityReport check_bd_inequality(const std::vector<DiagnosticsRecord>& records, Real dt, Real step_constant,
                                     Real gamma, Real epsilon, Real budget_fraction = 1e-6);

/// max_n (F_{n+1} + dt D_n - F_n) / dt^2, the raw step constant of a run.
Real measure_step_constant(const std::vector<DiagnosticsRecord>& records, Real dt,
                           const std::function<Real(const DiagnosticsRecord&)>& functional,
                           const std::function<Real(const DiagnosticsRecord&)>& rate);

/// Step constants c: measure_step_constant on the 1D IMEX run (n = 256, eps = 0.1,
/// a = 0.3, b = 0.5, T = 0.5), rounded up by about 2x.
struct FrozenTolerance {
  static Real energy(Scheme scheme);
  static Real bd(Scheme scheme);
};

}  // namespace nsk
