#include "nsk/solver.hpp"

#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace nsk {

void State::validate() const {
  if (!(m.grid() == rho.grid())) throw std::invalid_argument("density and momentum live on different grids");
  params.validate();
  require_finite(rho, "density");
  require_finite(m, "momentum");
  if (rho.min() < 0.0) {
    std::ostringstream msg;
    msg << "negative density " << rho.min();
    throw NumericalError(msg.str());
  }
}

Real default_floor(const ScalarField& rho) { return 1e-10 * std::max(rho.max(), 0.0); }

VectorField velocity_from(const ScalarField& rho, const VectorField& m, Real floor) {
  if (floor < 0.0) floor = default_floor(rho);
  const Eigen::ArrayXd& r = rho.values();
  std::vector<ScalarField> out;
  for (int i = 0; i < m.dim(); ++i)
    out.emplace_back(rho.grid(), (r > floor).select(m[i].values() / r, 0.0));
  return {rho.grid(), std::move(out)};
}

VectorField velocity_from(const State& state, Real floor) { return velocity_from(state.rho, state.m, floor); }

VectorField RhsTerms::momentum() const { return convection + viscous + pressure + drag + capillarity + quantum; }

namespace {

Real effective_floor(const ScalarField& rho, Real floor) { return floor > 0.0 ? floor : default_floor(rho); }

bool is_unit_capillarity(const CoefficientSet& c) { return c.k.c == 1.0 && c.k.a == 0.0; }

}  // namespace

RhsTerms rhs_terms(const State& state, Real floor) {
  const auto& p = state.params;
  const Real f = effective_floor(state.rho, floor);
  const auto rho = nonnegative_density(state.rho);
  const auto u = velocity_from(rho, state.m, f);
  return {
      -div(state.m),
      -div(rho * outer(u, u)),
      viscous_divergence(rho, u, p.coefficients),
      -pressure_gradient(rho, p.gamma),
      -drag_terms(rho, u, p.epsilon),
      is_unit_capillarity(p.coefficients) ? capillarity_simple(rho) : korteweg_divergence(rho, p.coefficients),
      quantum_correction(rho, p.epsilon, f),
  };
}

Rhs rhs(const State& state, Real floor) {
  auto t = rhs_terms(state, floor);
  return {dealias(t.continuity), dealias(t.momentum())};
}

void SolverConfig::validate() const {
  if (dt < 0.0) throw std::invalid_argument("dt must be nonnegative (0 selects CFL-auto)");
  if (dt == 0.0 && !(cfl > 0.0 && cfl <= 0.5))
    throw std::invalid_argument("CFL-auto needs a Courant factor in (0, 0.5]");
  if (vacuum_floor < 0.0) throw std::invalid_argument("vacuum floor must be nonnegative");
  if (!(end_time > 0.0)) throw std::invalid_argument("end time must be positive");
  if (cadence < 1) throw std::invalid_argument("output cadence must be at least 1");
}

Scheme parse_scheme(std::string_view name) {
  if (name == "rk4" || name == "RK4" || name == "RK4-explicit") return Scheme::Rk4;
  if (name == "imex" || name == "IMEX" || name == "IMEX-capillarity") return Scheme::Imex;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string to_string(Scheme scheme) { return scheme == Scheme::Rk4 ? "rk4" : "imex"; }

Real max_wavenumber(const Grid& grid) { return 2.0 * std::numbers::pi * std::floor(grid.n() / 3.0); }

Real stable_step(const State& state, Scheme scheme, Real floor) {
  const auto& p = state.params;
  const Real kmax = max_wavenumber(state.grid());
  const auto rho = nonnegative_density(state.rho);
  const auto u = velocity_from(rho, state.m, effective_floor(rho, floor));
  const Real umax = std::sqrt(norm_squared(u).max());
  const Real rmax = rho.max();
  const Real sound = std::sqrt(p.gamma * std::pow(rmax, p.gamma - 1.0));
  Real limit = 1.0 / (kmax * (umax + sound));
  if (scheme == Scheme::Rk4) {
    const Real nu = std::max(0.0, (evaluate(p.coefficients.h, rho, "h") / rho.map([](Real r) {
                                     return std::max(r, 1e-300);
                                   })).max());
    const Real kappa = (rho * evaluate(p.coefficients.k, rho, "k")).max() + 0.5 * p.epsilon;
    if (nu > 0.0) limit = std::min(limit, 1.0 / (nu * kmax * kmax));
    if (kappa > 0.0) limit = std::min(limit, 1.0 / (std::sqrt(kappa) * kmax * kmax));
  }
  return limit;
}

BlowUpError::BlowUpError(const std::string& what, std::size_t step, int stage)
    : NumericalError(what), step_(step), stage_(stage) {}

namespace {

using Packed = std::vector<Eigen::ArrayXd>;

Packed pack(const ScalarField& rho, const VectorField& m) {
  Packed p{rho.values()};
  for (int i = 0; i < m.dim(); ++i) p.push_back(m[i].values());
  return p;
}

State unpack(const Packed& p, const State& like, Real time) {
  const Grid& grid = like.grid();
  std::vector<ScalarField> comps;
  for (std::size_t i = 1; i < p.size(); ++i) comps.emplace_back(grid, p[i]);
  return {ScalarField(grid, p[0]), VectorField(grid, std::move(comps)), time, like.params};
}

// out = base + sum_j c_j * terms_j
Packed combine(const Packed& base, std::initializer_list<std::pair<Real, const Packed*>> terms) {
  Packed out = base;
  for (const auto& [c, t] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * (*t)[i];
  }
  return out;
}

const char* term_name(int i) {
  static const char* names[] = {"convection", "viscous", "pressure", "drag", "capillarity", "quantum"};
  return names[i];
}

Packed evaluate_rhs(const State& s, Real floor, std::size_t step_index, int stage) {
  RhsTerms t = [&] {
    try {
      return rhs_terms(s, floor);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "step " << step_index << " stage " << stage << " (t = " << s.time << "): " << e.what();
      throw BlowUpError(msg.str(), step_index, stage);
    }
  }();
  const VectorField* parts[] = {&t.convection, &t.viscous, &t.pressure, &t.drag, &t.capillarity, &t.quantum};
  auto budget = [](const VectorField& v) {
    Real m = 0.0;
    for (const auto& c : v.components()) m = std::max(m, c.values().abs().maxCoeff());
    return m;
  };
  bool bad = !t.continuity.all_finite();
  for (const auto* p : parts) bad = bad || !p->all_finite();
  if (bad) {
    std::ostringstream msg;
    msg << "non-finite right-hand side at step " << step_index << " stage " << stage << " (t = " << s.time
        << "); term budgets:";
    msg << " continuity=" << t.continuity.values().abs().maxCoeff();
    for (int i = 0; i < 6; ++i) msg << ' ' << term_name(i) << '=' << budget(*parts[i]);
    throw BlowUpError(msg.str(), step_index, stage);
  }
  return pack(dealias(t.continuity), dealias(t.momentum()));
}

// Linear part of the IMEX splitting, frozen per step: continuity coupling,
// capillarity (plus the linearized Bohm term) and viscosity about rho_ref.
struct LinearPart {
  Grid grid;
  Real kappa;    // rho_ref k(rho_ref) + eps / 2
  Real nu;       // h(rho_ref) / rho_ref
  Real nu_bulk;  // g(rho_ref) / rho_ref

  static LinearPart freeze(const State& s, ImexLinearization mode) {
    const auto& c = s.params.coefficients;
    const auto rho = nonnegative_density(s.rho);
    const Real ref = mode == ImexLinearization::Mean ? mean(rho) : rho.max();
    if (!(ref > 0.0)) throw NumericalError("IMEX linearization needs a positive reference density");
    Real kappa = ref * c.k(ref);
    Real nu = c.h(ref) / ref;
    Real bulk = c.g(ref) / ref;
    if (mode == ImexLinearization::Max) {
      const auto pos = rho.map([ref](Real r) { return std::max(r, 1e-12 * ref); });
      kappa = (pos * evaluate(c.k, pos, "k")).max();
      nu = (evaluate(c.h, pos, "h") / pos).max();
      bulk = std::max(0.0, (evaluate(c.g, pos, "g") / pos).max());
    }
    return {s.grid(), kappa + 0.5 * s.params.epsilon, nu, bulk};
  }

  using Modes = std::vector<spectral::Spectrum>;

  Modes to_modes(const Packed& p) const {
    Modes out;
    for (const auto& a : p) out.push_back(spectral::forward(grid, a));
    return out;
  }

  Packed to_values(const Modes& m) const {
    Packed out;
    const auto& t = spectral::tables(grid);
    for (const auto& a : m) out.push_back(spectral::inverse(grid, a * t.band.cast<std::complex<Real>>()));
    return out;
  }

  Packed apply(const Packed& x) const {
    const auto& t = spectral::tables(grid);
    const int d = grid.dim();
    auto m = to_modes(x);
    const std::complex<Real> I(0.0, 1.0);
    spectral::Spectrum q = spectral::Spectrum::Zero(m[0].size());
    for (int a = 0; a < d; ++a) q += t.k[a] * m[a + 1];
    Modes out(d + 1);
    out[0] = -I * q;
    for (int a = 0; a < d; ++a)
      out[a + 1] = -I * kappa * t.k2 * t.k[a] * m[0] - 0.5 * nu * t.k2 * m[a + 1] - (0.5 * nu + nu_bulk) * t.k[a] * q;
    return to_values(out);
  }

  /// Solves (I - a L) x = r mode by mode.
  Packed solve(const Packed& r, Real a) const {
    const auto& t = spectral::tables(grid);
    const int d = grid.dim();
    auto m = to_modes(r);
    const std::complex<Real> I(0.0, 1.0);
    spectral::Spectrum q = spectral::Spectrum::Zero(m[0].size());
    for (int ax = 0; ax < d; ++ax) q += t.k[ax] * m[ax + 1];
    const Eigen::ArrayXd& s2 = t.k2;
    const Eigen::ArrayXd nl = 1.0 + a * (nu + nu_bulk) * s2;
    const Eigen::ArrayXd det = nl + a * a * kappa * s2 * s2;
    const spectral::Spectrum rho = (nl * m[0] - a * I * q) / det;
    const spectral::Spectrum qn = (q - a * I * kappa * s2 * s2 * m[0]) / det;
    const Eigen::ArrayXd transverse = 1.0 + 0.5 * a * nu * s2;
    const Eigen::ArrayXd inv_s2 = (s2 > 0.0).select(1.0 / s2.max(1e-300), 0.0);
    Modes out(d + 1);
    out[0] = rho;
    for (int ax = 0; ax < d; ++ax) {
      const spectral::Spectrum longitudinal_old = t.k[ax] * q * inv_s2;
      const spectral::Spectrum longitudinal_new = t.k[ax] * qn * inv_s2;
      out[ax + 1] = (m[ax + 1] - longitudinal_old) / transverse + longitudinal_new;
    }
    return to_values(out);
  }
};

// ARS(4,4,3): implicit rows with a_ii = 1/2, explicit rows; stiffly accurate.
constexpr Real kA[4][4] = {
    {0.5, 0.0, 0.0, 0.0},
    {1.0 / 6.0, 0.5, 0.0, 0.0},
    {-0.5, 0.5, 0.5, 0.0},
    {1.5, -1.5, 0.5, 0.5},
};
constexpr Real kAhat[4][4] = {
    {0.5, 0.0, 0.0, 0.0},
    {11.0 / 18.0, 1.0 / 18.0, 0.0, 0.0},
    {5.0 / 6.0, -5.0 / 6.0, 0.5, 0.0},
    {0.25, 1.75, 0.75, -1.75},
};
constexpr Real kC[5] = {0.0, 0.5, 2.0 / 3.0, 0.5, 1.0};

Packed rk4(const State& s, Real dt, Real floor, std::size_t idx) {
  const Packed y = pack(s.rho, s.m);
  const Packed k1 = evaluate_rhs(s, floor, idx, 1);
  const Packed k2 = evaluate_rhs(unpack(combine(y, {{0.5 * dt, &k1}}), s, s.time + 0.5 * dt), floor, idx, 2);
  const Packed k3 = evaluate_rhs(unpack(combine(y, {{0.5 * dt, &k2}}), s, s.time + 0.5 * dt), floor, idx, 3);
  const Packed k4 = evaluate_rhs(unpack(combine(y, {{dt, &k3}}), s, s.time + dt), floor, idx, 4);
  return combine(y, {{dt / 6.0, &k1}, {dt / 3.0, &k2}, {dt / 3.0, &k3}, {dt / 6.0, &k4}});
}

Packed imex(const State& s, Real dt, Real floor, ImexLinearization mode, std::size_t idx) {
  const LinearPart lin = LinearPart::freeze(s, mode);
  const Packed y = pack(s.rho, s.m);
  // Stage j (0-based) holds the explicit remainder N_j = F_j - L_j and, for
  // j >= 1, the implicit contribution L_j.
  std::vector<Packed> explicit_part, implicit_part;
  Packed stage = y;
  for (int i = 0; i < 4; ++i) {
    const State st = unpack(stage, s, s.time + kC[i] * dt);
    const Packed f = evaluate_rhs(st, floor, idx, i + 1);
    const Packed l = lin.apply(stage);
    explicit_part.push_back(combine(f, {{-1.0, &l}}));
    implicit_part.push_back(l);
    Packed r = y;
    for (int j = 0; j <= i; ++j) {
      r = combine(r, {{dt * kAhat[i][j], &explicit_part[j]}});
      // Implicit weights refer to stages 2..5 and stage 1 carries a zero column.
      if (j >= 1) r = combine(r, {{dt * kA[i][j - 1], &implicit_part[j]}});
    }
    stage = lin.solve(r, dt * kA[i][i]);
    for (const auto& c : stage)
      if (!c.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite implicit solve at step " << idx << " stage " << i + 2;
        throw BlowUpError(msg.str(), idx, i + 2);
      }
  }
  return stage;
}

}  // namespace

State step(const State& state, Real dt, const SolverConfig& config, Real* clamped, std::size_t step_index) {
  const Real floor = config.vacuum_floor;
  Packed next = config.scheme == Scheme::Rk4 ? rk4(state, dt, floor, step_index)
                                             : imex(state, dt, floor, config.linearization, step_index);
  for (const auto& c : next)
    if (!c.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite state after step " << step_index;
      throw BlowUpError(msg.str(), step_index, 0);
    }
  const Real low = next[0].minCoeff();
  const Real clamp = low < 0.0 ? -low : 0.0;
  if (clamp > 0.0) {
    if (clamp > 1e-3 * next[0].maxCoeff()) {
      std::ostringstream msg;
      msg << "density collapsed to " << low << " at step " << step_index;
      throw BlowUpError(msg.str(), step_index, 0);
    }
    next[0] = next[0].max(0.0);
  }
  if (clamped) *clamped = clamp;
  return unpack(next, state, state.time + dt);
}

Real RunResult::frame_dt() const {
  if (frames.size() < 2) return dt;
  return frames[1].time - frames[0].time;
}

ScalarTrajectory RunResult::rho_trajectory() const {
  ScalarTrajectory t{frames.front().time, frame_dt(), {}};
  for (const auto& f : frames) t.frames.push_back(f.rho);
  return t;
}

VectorTrajectory RunResult::momentum_trajectory() const {
  VectorTrajectory t{frames.front().time, frame_dt(), {}};
  for (const auto& f : frames) t.frames.push_back(f.m);
  return t;
}

RunResult run(const State& initial, const SolverConfig& config, const StepObserver& observer) {
  config.validate();
  initial.validate();
  if (initial.params.epsilon > 0.0 && initial.rho.min() <= 0.0)
    throw std::invalid_argument("epsilon > 0 requires a strictly positive initial density (Bohm term)");
  RunResult out;
  Real dt = config.dt;
  if (dt == 0.0) dt = config.cfl * stable_step(initial, config.scheme, config.vacuum_floor);
  // Round up to a whole number of output intervals so the final state is always stored.
  const auto cadence = static_cast<std::size_t>(config.cadence);
  auto steps = static_cast<std::size_t>(std::ceil(config.end_time / dt - 1e-9));
  steps = (steps + cadence - 1) / cadence * cadence;
  dt = config.end_time / static_cast<Real>(steps);
  out.dt = dt;
  out.steps = steps;
  out.frames.push_back(initial);
  State s = initial;
  bool warned = false;
  for (std::size_t n = 0; n < steps; ++n) {
    if (config.dt > 0.0) {
      const Real limit = stable_step(s, config.scheme, config.vacuum_floor);
      if (dt > limit) {
        std::ostringstream msg;
        msg << "CFL violation at step " << n << ": dt = " << dt << " exceeds the stability estimate " << limit;
        if (config.abort_on_cfl) throw BlowUpError(msg.str(), n, 0);
        if (!warned) out.warnings.push_back(msg.str());
        warned = true;
      }
    }
    Real clamp = 0.0;
    s = step(s, dt, config, &clamp, n);
    s.time = initial.time + static_cast<Real>(n + 1) * dt;
    if (clamp > 0.0) {
      ++out.clamp_events;
      out.max_clamp = std::max(out.max_clamp, clamp);
    }
    if (observer) observer(s, n + 1);
    if ((n + 1) % cadence == 0) out.frames.push_back(s);
  }
  return out;
}

namespace {

std::vector<std::string> split_kind(std::string_view kind) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : kind) {
    if (c == '+') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

State initial_data(std::string_view kind, const InitialDataParams& p) {
  const Grid grid(p.dim, p.n);
  p.physics.validate();
  ScalarField rho = ScalarField::constant(grid, 1.0);
  VectorField u(grid);
  bool have_density = false;
  for (const auto& part : split_kind(kind)) {
    if (part == "SMOOTH-POSITIVE" || part == "NEAR-VACUUM") {
      if (have_density) throw std::invalid_argument("initial data combines two density presets");
      have_density = true;
      if (part == "SMOOTH-POSITIVE") {
        if (!(std::abs(p.a) < 1.0)) throw std::invalid_argument("SMOOTH-POSITIVE needs |a| < 1");
        rho = ScalarField::from_function(grid, [&](const Point& x) { return 1.0 + p.a * std::cos(2.0 * std::numbers::pi * x[0]); });
      } else {
        if (!(p.rho_min >= 1e-6)) throw std::invalid_argument("NEAR-VACUUM needs rho_min >= 1e-6");
        rho = ScalarField::from_function(grid, [&](const Point& x) { return p.rho_min + std::pow(std::sin(std::numbers::pi * x[0]), 4); });
      }
    } else if (part == "SHEAR") {
      const int axis = p.dim >= 2 ? 1 : 0;
      std::vector<ScalarField> c(p.dim, ScalarField(grid));
      c[0] = ScalarField::from_function(grid, [&](const Point& x) { return p.b * std::sin(2.0 * std::numbers::pi * x[axis]); });
      u = VectorField(grid, std::move(c));
    } else if (part != "EQUILIBRIUM") {
      throw std::invalid_argument("unknown initial-data preset '" + part + "'");
    }
  }
  State s{rho, rho * u, 0.0, p.physics};
  s.validate();
  return s;
}

}  // namespace nsk
