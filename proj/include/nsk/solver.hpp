#pragma once

#include "nsk/operators.hpp"
#include "nsk/trajectory.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace nsk {

/// Conserved variables (rho, m = rho u) at one instant.
struct State {
  ScalarField rho;
  VectorField m;
  Real time = 0.0;
  PhysicsParams params{};

  const Grid& grid() const { return rho.grid(); }
  /// Throws NumericalError on negative density or non-finite samples.
  void validate() const;
};

/// 1e-10 * max rho, the default vacuum floor for velocity recovery.
Real default_floor(const ScalarField& rho);

/// u = m / rho where rho > floor, 0 elsewhere. floor < 0 selects the default.
VectorField velocity_from(const ScalarField& rho, const VectorField& m, Real floor = -1.0);
VectorField velocity_from(const State& state, Real floor = -1.0);

/// Every term of the right-hand side, signed as it enters d/dt.
struct RhsTerms {
  ScalarField continuity;  // -div m
  VectorField convection;  // -div(rho u (x) u)
  VectorField viscous;     // div(h Du + g div u I)
  VectorField pressure;    // -grad rho^gamma
  VectorField drag;        // -eps (rho |u|^2 + 1) u
  VectorField capillarity; // Korteweg divergence
  VectorField quantum;     // eps rho grad(lap sqrt rho / sqrt rho)

  VectorField momentum() const;
};

struct Rhs {
  ScalarField rho;
  VectorField m;
};

RhsTerms rhs_terms(const State& state, Real floor = -1.0);
/// Sum of the terms, filtered to the 2/3 band.
Rhs rhs(const State& state, Real floor = -1.0);

enum class Scheme { Rk4, Imex };
/// Density at which the implicit linear part of the IMEX scheme is frozen.
enum class ImexLinearization { Mean, Max };

struct SolverConfig {
  Scheme scheme = Scheme::Rk4;
  /// Fixed step; 0 selects the CFL-auto step from the initial state.
  Real dt = 0.0;
  Real cfl = 0.4;
  /// Vacuum floor for velocity recovery and the Bohm term; 0 selects the default.
  Real vacuum_floor = 0.0;
  Real end_time = 0.0;
  /// Frames are kept every `cadence` steps; the step count is rounded up to a multiple of it.
  int cadence = 1;
  bool abort_on_cfl = false;
  ImexLinearization linearization = ImexLinearization::Mean;

  void validate() const;
};

Scheme parse_scheme(std::string_view name);
std::string to_string(Scheme scheme);

/// Largest wavenumber magnitude kept by the 2/3 filter along one axis.
Real max_wavenumber(const Grid& grid);
/// Stability-limited step with unit Courant number: advective and acoustic
/// for both schemes, plus viscous and dispersive limits for RK4.
Real stable_step(const State& state, Scheme scheme, Real floor = -1.0);

/// Carries the step, stage and offending term of a non-finite update.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, std::size_t step, int stage);
  std::size_t step() const { return step_; }
  int stage() const { return stage_; }

 private:
  std::size_t step_;
  int stage_;
};

/// One time step of size dt. Density is clamped at zero; `clamped` receives
/// the largest clamped magnitude.
State step(const State& state, Real dt, const SolverConfig& config, Real* clamped = nullptr,
           std::size_t step_index = 0);

struct RunResult {
  std::vector<State> frames;
  Real dt = 0.0;
  std::size_t steps = 0;
  std::size_t clamp_events = 0;
  Real max_clamp = 0.0;
  std::vector<std::string> warnings;

  /// Spacing of the stored frames, cadence * dt.
  Real frame_dt() const;
  ScalarTrajectory rho_trajectory() const;
  VectorTrajectory momentum_trajectory() const;
};

/// Observer invoked on every accepted step with the new state.
using StepObserver = std::function<void(const State&, std::size_t step)>;

RunResult run(const State& initial, const SolverConfig& config, const StepObserver& observer = {});

struct InitialDataParams {
  int dim = 1;
  int n = 64;
  Real a = 0.0;            // SMOOTH-POSITIVE amplitude
  Real b = 0.0;            // SHEAR amplitude
  Real rho_min = 1e-6;     // NEAR-VACUUM floor
  PhysicsParams physics{};
};

/// Presets SMOOTH-POSITIVE, NEAR-VACUUM and SHEAR, combinable with '+'
/// (one density preset, optionally SHEAR). EQUILIBRIUM gives rho = 1, u = 0.
State initial_data(std::string_view kind, const InitialDataParams& params);

}  // namespace nsk
