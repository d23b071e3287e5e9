#include "nsk/mollify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nsk {

MollifierKernel::MollifierKernel(Real r, int dim, BumpProfile profile) : r_(r), dim_(dim), profile_(profile) {
  if (!(r > 0.0)) throw std::invalid_argument("mollifier radius must be positive");
  if (dim < 1 || dim > 3) throw std::invalid_argument("mollifier dimension must be 1, 2 or 3");
}

Real MollifierKernel::half_width() const { return r_ / std::sqrt(1.0 + dim_); }

Real MollifierKernel::profile_1d(Real z) const { return profile_.value(2.0 * std::sqrt(1.0 + dim_) * z); }

std::vector<Real> MollifierKernel::weights(Real step) const {
  const int half = static_cast<int>(std::floor(half_width() / step));
  std::vector<Real> w(2 * half + 1);
  Real total = 0.0;
  for (int j = -half; j <= half; ++j) {
    // Evaluate on |j| so the sampled weights are symmetric bit for bit.
    w[j + half] = profile_1d(std::abs(j) * step / r_);
    total += w[j + half];
  }
  for (auto& v : w) v /= total;
  return w;
}

void MollifierKernel::require_resolved(Real dt, Real h) const {
  const Real min_r = min_radius(dt, h);
  if (r_ < min_r * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "mollifier radius " << r_ << " is unresolved; minimum admissible radius is " << min_r;
    throw std::invalid_argument(msg.str());
  }
}

InteriorRange interior_frames(std::size_t frame_count, Real dt, Real r) {
  const auto skip = static_cast<std::size_t>(std::ceil(r / dt - 1e-9));
  if (frame_count < 2 * skip + 1) throw std::invalid_argument("trajectory too short for mollifier radius");
  return {skip, frame_count - 1 - skip};
}

namespace {

// Periodic 1D convolution along `axis` with symmetric weights.
Eigen::ArrayXd convolve_axis(const Grid& grid, const Eigen::ArrayXd& v, int axis, const std::vector<Real>& w) {
  const int half = static_cast<int>(w.size() / 2);
  const int n = grid.n();
  const Index stride = grid.stride(axis);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(v.size());
  for (Index p = 0; p < v.size(); ++p) {
    const int i = static_cast<int>((p / stride) % n);
    const Index base = p - i * stride;
    Real acc = 0.0;
    for (int j = -half; j <= half; ++j) acc += w[j + half] * v[base + ((i - j + n) % n) * stride];
    out[p] = acc;
  }
  return out;
}

Eigen::ArrayXd mollify_frame(const std::vector<const Eigen::ArrayXd*>& frames, std::size_t n, const Grid& grid,
                             const std::vector<Real>& wt, const std::vector<Real>& wx) {
  const int half_t = static_cast<int>(wt.size() / 2);
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(grid.size());
  for (int s = -half_t; s <= half_t; ++s) acc += wt[s + half_t] * *frames[n - s];
  for (int a = 0; a < grid.dim(); ++a) acc = convolve_axis(grid, acc, a, wx);
  return acc;
}

// Offsets of the spatial stencil [-J, J]^d with their product weights.
struct Stencil {
  std::vector<std::array<int, 3>> offsets;
  std::vector<Real> weights;
};

Stencil make_stencil(int dim, const std::vector<Real>& wx) {
  const int half = static_cast<int>(wx.size() / 2);
  Stencil s;
  const int span1 = 2 * half + 1;
  const int count = dim == 1 ? span1 : dim == 2 ? span1 * span1 : span1 * span1 * span1;
  for (int c = 0; c < count; ++c) {
    std::array<int, 3> o{0, 0, 0};
    int rest = c;
    Real w = 1.0;
    for (int a = 0; a < dim; ++a) {
      o[a] = rest % span1 - half;
      rest /= span1;
      w *= wx[o[a] + half];
    }
    if (w == 0.0) continue;
    s.offsets.push_back(o);
    s.weights.push_back(w);
  }
  return s;
}

Index shifted_index(const Grid& grid, const std::array<int, 3>& idx, const std::array<int, 3>& off) {
  const int n = grid.n();
  Index flat = 0;
  for (int a = 0; a < grid.dim(); ++a) flat += static_cast<Index>(((idx[a] - off[a]) % n + n) % n) * grid.stride(a);
  return flat;
}

// D_n(x) = sum_{s,y} w(s,y) [c(n-s, x-y) - c(n, x)] f(n-s, x-y); the bracket
// is formed before weighting so a constant coefficient gives exact zeros.
Eigen::ArrayXd difference_mollify(const std::vector<const Eigen::ArrayXd*>& coef,
                                  const std::vector<const Eigen::ArrayXd*>& f, std::size_t n, const Grid& grid,
                                  const std::vector<Real>& wt, const Stencil& stencil) {
  const int half_t = static_cast<int>(wt.size() / 2);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(grid.size());
  const Eigen::ArrayXd& here = *coef[n];
  for (Index p = 0; p < grid.size(); ++p) {
    const auto idx = grid.multi_index(p);
    Real acc = 0.0;
    for (int s = -half_t; s <= half_t; ++s) {
      const Real ws = wt[s + half_t];
      if (ws == 0.0) continue;
      const Eigen::ArrayXd& cs = *coef[n - s];
      const Eigen::ArrayXd& fs = *f[n - s];
      Real inner = 0.0;
      for (std::size_t k = 0; k < stencil.offsets.size(); ++k) {
        const Index q = shifted_index(grid, idx, stencil.offsets[k]);
        inner += stencil.weights[k] * ((cs[q] - here[p]) * fs[q]);
      }
      acc += ws * inner;
    }
    out[p] = acc;
  }
  return out;
}

template <class T>
void check_pair(const Trajectory<T>& a, const ScalarTrajectory& b, const MollifierKernel& kernel) {
  a.validate();
  b.validate();
  if (a.size() != b.size() || std::abs(a.dt - b.dt) > 1e-14 * a.dt)
    throw std::invalid_argument("commutator arguments must share the time grid");
  if (!(a.frames.front().grid() == b.frames.front().grid()))
    throw std::invalid_argument("commutator arguments must share the spatial grid");
  if (kernel.dim() != b.frames.front().grid().dim()) throw std::invalid_argument("kernel dimension mismatch");
  kernel.require_resolved(a.dt, b.frames.front().grid().spacing());
}

std::vector<const Eigen::ArrayXd*> values_of(const ScalarTrajectory& t) {
  std::vector<const Eigen::ArrayXd*> out;
  for (const auto& f : t.frames) out.push_back(&f.values());
  return out;
}

std::vector<const Eigen::ArrayXd*> component_of(const VectorTrajectory& t, int i) {
  std::vector<const Eigen::ArrayXd*> out;
  for (const auto& f : t.frames) out.push_back(&f[i].values());
  return out;
}

}  // namespace

ScalarTrajectory mollify(const ScalarTrajectory& f, const MollifierKernel& kernel) {
  f.validate();
  const Grid& grid = f.frames.front().grid();
  kernel.require_resolved(f.dt, grid.spacing());
  const auto range = interior_frames(f.size(), f.dt, kernel.radius());
  const auto wt = kernel.weights(f.dt);
  const auto wx = kernel.weights(grid.spacing());
  const auto frames = values_of(f);
  ScalarTrajectory out{f.time(range.first), f.dt, {}};
  for (std::size_t n = range.first; n <= range.last; ++n) out.frames.emplace_back(grid, mollify_frame(frames, n, grid, wt, wx));
  return out;
}

VectorTrajectory mollify(const VectorTrajectory& f, const MollifierKernel& kernel) {
  f.validate();
  const Grid& grid = f.frames.front().grid();
  std::vector<ScalarTrajectory> parts;
  for (int i = 0; i < grid.dim(); ++i) {
    ScalarTrajectory c{f.t0, f.dt, {}};
    for (const auto& frame : f.frames) c.frames.push_back(frame[i]);
    parts.push_back(mollify(c, kernel));
  }
  VectorTrajectory out{parts.front().t0, f.dt, {}};
  for (std::size_t n = 0; n < parts.front().size(); ++n) {
    std::vector<ScalarField> comps;
    for (auto& p : parts) comps.push_back(p.frames[n]);
    out.frames.emplace_back(grid, std::move(comps));
  }
  return out;
}

std::vector<ScalarField> commutator_div_field(const VectorTrajectory& b, const ScalarTrajectory& f,
                                              const MollifierKernel& kernel) {
  check_pair(b, f, kernel);
  const Grid& grid = f.frames.front().grid();
  const auto range = interior_frames(f.size(), f.dt, kernel.radius());
  const auto wt = kernel.weights(f.dt);
  const auto stencil = make_stencil(grid.dim(), kernel.weights(grid.spacing()));
  const auto fv = values_of(f);
  std::vector<ScalarField> out;
  for (std::size_t n = range.first; n <= range.last; ++n) {
    std::vector<ScalarField> d;
    for (int i = 0; i < grid.dim(); ++i)
      d.emplace_back(grid, difference_mollify(component_of(b, i), fv, n, grid, wt, stencil));
    out.push_back(div(VectorField(grid, std::move(d))));
  }
  return out;
}

std::vector<ScalarField> commutator_dt_field(const ScalarTrajectory& g, const ScalarTrajectory& f,
                                             const MollifierKernel& kernel) {
  check_pair(g, f, kernel);
  const Grid& grid = f.frames.front().grid();
  const auto range = interior_frames(f.size(), f.dt, kernel.radius());
  const auto wt = kernel.weights(f.dt);
  const int half_t = static_cast<int>(wt.size() / 2);
  if (range.first < static_cast<std::size_t>(half_t) + 1)
    throw std::invalid_argument("time step too coarse for the centered difference inside the mollifier window");
  const auto stencil = make_stencil(grid.dim(), kernel.weights(grid.spacing()));
  const auto gv = values_of(g);
  const auto fv = values_of(f);
  std::vector<Eigen::ArrayXd> d;
  for (std::size_t n = range.first - 1; n <= range.last + 1; ++n)
    d.push_back(difference_mollify(gv, fv, n, grid, wt, stencil));
  std::vector<ScalarField> out;
  for (std::size_t k = 1; k + 1 < d.size(); ++k) out.emplace_back(grid, (d[k + 1] - d[k - 1]) / (2.0 * f.dt));
  return out;
}

Real space_time_lp(const std::vector<ScalarField>& frames, Real dt, Real p) {
  if (frames.empty()) return 0.0;
  if (std::isinf(p)) {
    Real m = 0.0;
    for (const auto& f : frames) m = std::max(m, f.values().abs().maxCoeff());
    return m;
  }
  Real acc = 0.0;
  for (const auto& f : frames) acc += dt * integrate(f.map([p](Real v) { return std::pow(std::abs(v), p); }));
  return std::pow(acc, 1.0 / p);
}

Real commutator_div(const VectorTrajectory& b, const ScalarTrajectory& f, const MollifierKernel& kernel, Real p3) {
  return space_time_lp(commutator_div_field(b, f, kernel), f.dt, p3);
}

Real commutator_dt(const ScalarTrajectory& g, const ScalarTrajectory& f, const MollifierKernel& kernel, Real p3) {
  return space_time_lp(commutator_dt_field(g, f, kernel), f.dt, p3);
}

namespace {

CommutatorCorpus build_corpus(int dim, int n, Real end_time, int steps, bool constant) {
  if (steps < 2) throw std::invalid_argument("corpus needs at least two steps");
  const Grid grid(dim, n);
  const Real dt = end_time / steps;
  CommutatorCorpus c{{0.0, dt, {}}, {0.0, dt, {}}, {0.0, dt, {}}};
  for (int k = 0; k <= steps; ++k) {
    const Real t = k * dt;
    const Real w = constant ? 0.0 : 1.0;
    std::vector<ScalarField> comps;
    for (int i = 0; i < dim; ++i)
      comps.push_back(ScalarField::from_function(grid, [&](const Point& x) {
        const Real extra = dim > 1 ? 0.3 * std::cos(2.0 * std::numbers::pi * x[dim - 1]) : 0.0;
        return 1.0 + w * (0.5 * std::sin(2.0 * std::numbers::pi * (x[0] - t) + i) + extra);
      }));
    c.b.frames.emplace_back(grid, std::move(comps));
    c.f.frames.push_back(ScalarField::from_function(grid, [&](const Point& x) {
      const Real extra = dim > 1 ? 0.5 * std::sin(2.0 * std::numbers::pi * (x[1] - t)) : 0.0;
      return 2.0 + w * (std::cos(2.0 * std::numbers::pi * (x[0] + 0.5 * t)) + extra);
    }));
    c.g.frames.push_back(ScalarField::from_function(grid, [&](const Point& x) {
      return 1.5 + w * std::sin(2.0 * std::numbers::pi * (x[0] + t));
    }));
  }
  return c;
}

}  // namespace

CommutatorCorpus smooth_corpus(int dim, int n, Real end_time, int steps) {
  return build_corpus(dim, n, end_time, steps, false);
}

CommutatorCorpus constant_corpus(int dim, int n, Real end_time, int steps) {
  return build_corpus(dim, n, end_time, steps, true);
}

std::vector<CommutatorRow> commutator_sweep(const CommutatorCorpus& corpus, int halvings, Real r0, Real p3) {
  const Grid& grid = corpus.f.frames.front().grid();
  if (r0 <= 0.0) r0 = std::ldexp(MollifierKernel::min_radius(corpus.f.dt, grid.spacing()), halvings);
  std::vector<CommutatorRow> rows;
  for (int k = 0; k <= halvings; ++k) {
    const MollifierKernel kernel(std::ldexp(r0, -k), grid.dim());
    rows.push_back({kernel.radius(), commutator_div(corpus.b, corpus.f, kernel, p3),
                    commutator_dt(corpus.g, corpus.f, kernel, p3)});
  }
  return rows;
}

}  // namespace nsk
