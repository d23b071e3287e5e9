#include "nsk/fields.hpp"

#include "spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nsk {

using spectral::Spectrum;

Index Grid::default_point_budget(int dim) { return dim == 3 ? Index{32} * 32 * 32 : Index{1} << 22; }

Grid::Grid(int dim, int n, Index point_budget) : dim_(dim), n_(n) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (n < 8 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid points per axis must be a power of two >= 8, got " + std::to_string(n));
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= n;
  if (point_budget < 0) point_budget = default_point_budget(dim);
  if (size_ > point_budget)
    throw std::invalid_argument("grid " + std::to_string(n) + "^" + std::to_string(dim) +
                                " exceeds the point budget " + std::to_string(point_budget));
  Index s = 1;
  for (int a = dim - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= n;
  }
}

std::array<int, 3> Grid::multi_index(Index flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) idx[a] = static_cast<int>((flat / strides_[a]) % n_);
  return idx;
}

Point Grid::coordinate(Index flat) const {
  const auto idx = multi_index(flat);
  return {idx[0] * spacing(), dim_ > 1 ? idx[1] * spacing() : 0.0, dim_ > 2 ? idx[2] * spacing() : 0.0};
}

// --- ScalarField ---------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, Eigen::ArrayXd values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
}

ScalarField ScalarField::constant(const Grid& grid, Real c) {
  return {grid, Eigen::ArrayXd::Constant(grid.size(), c)};
}

ScalarField ScalarField::from_function(const Grid& grid, const std::function<Real(const Point&)>& f) {
  Eigen::ArrayXd v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = f(grid.coordinate(i));
  return {grid, std::move(v)};
}

namespace {

void check_same(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  check_same(a.grid(), b.grid());
  return {a.grid(), a.values() + b.values()};
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  check_same(a.grid(), b.grid());
  return {a.grid(), a.values() - b.values()};
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  check_same(a.grid(), b.grid());
  return {a.grid(), a.values() * b.values()};
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  check_same(a.grid(), b.grid());
  return {a.grid(), a.values() / b.values()};
}
ScalarField operator*(Real s, const ScalarField& a) { return {a.grid(), s * a.values()}; }
ScalarField operator-(const ScalarField& a) { return {a.grid(), -a.values()}; }

// --- VectorField ---------------------------------------------------------

VectorField::VectorField(const Grid& grid, std::vector<ScalarField> components)
    : grid_(grid), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != grid.dim())
    throw std::invalid_argument("vector field needs one component per dimension");
  for (const auto& c : components_) check_same(grid_, c.grid());
}

VectorField::VectorField(const Grid& grid) : grid_(grid), components_(grid.dim(), ScalarField(grid)) {}

VectorField VectorField::constant(const Grid& grid, const Point& c) {
  std::vector<ScalarField> comps;
  for (int i = 0; i < grid.dim(); ++i) comps.push_back(ScalarField::constant(grid, c[i]));
  return {grid, std::move(comps)};
}

bool VectorField::all_finite() const {
  for (const auto& c : components_)
    if (!c.all_finite()) return false;
  return true;
}

namespace {

template <class Op>
VectorField zip(const VectorField& a, const VectorField& b, Op op) {
  check_same(a.grid(), b.grid());
  std::vector<ScalarField> out;
  for (int i = 0; i < a.dim(); ++i) out.push_back(op(a[i], b[i]));
  return {a.grid(), std::move(out)};
}

template <class Op>
VectorField each(const VectorField& a, Op op) {
  std::vector<ScalarField> out;
  for (int i = 0; i < a.dim(); ++i) out.push_back(op(a[i]));
  return {a.grid(), std::move(out)};
}

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
  return zip(a, b, [](const auto& x, const auto& y) { return x + y; });
}
VectorField operator-(const VectorField& a, const VectorField& b) {
  return zip(a, b, [](const auto& x, const auto& y) { return x - y; });
}
VectorField operator*(Real s, const VectorField& a) {
  return each(a, [s](const auto& x) { return s * x; });
}
VectorField operator*(const ScalarField& s, const VectorField& a) {
  return each(a, [&s](const auto& x) { return s * x; });
}
VectorField operator-(const VectorField& a) {
  return each(a, [](const auto& x) { return -x; });
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  check_same(a.grid(), b.grid());
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(a.grid().size());
  for (int i = 0; i < a.dim(); ++i) acc += a[i].values() * b[i].values();
  return {a.grid(), std::move(acc)};
}

ScalarField norm_squared(const VectorField& a) { return dot(a, a); }

// --- TensorField ---------------------------------------------------------

TensorField::TensorField(const Grid& grid, std::vector<ScalarField> components)
    : grid_(grid), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != grid.dim() * grid.dim())
    throw std::invalid_argument("tensor field needs dim*dim components");
}

TensorField::TensorField(const Grid& grid)
    : grid_(grid), components_(grid.dim() * grid.dim(), ScalarField(grid)) {}

bool TensorField::all_finite() const {
  for (const auto& c : components_)
    if (!c.all_finite()) return false;
  return true;
}

TensorField TensorField::transpose() const {
  std::vector<ScalarField> out;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) out.push_back((*this)(j, i));
  return {grid_, std::move(out)};
}

TensorField TensorField::symmetric_part() const {
  std::vector<ScalarField> out;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) out.push_back(0.5 * ((*this)(i, j) + (*this)(j, i)));
  return {grid_, std::move(out)};
}

TensorField TensorField::antisymmetric_part() const {
  std::vector<ScalarField> out;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) out.push_back(0.5 * ((*this)(i, j) - (*this)(j, i)));
  return {grid_, std::move(out)};
}

ScalarField TensorField::trace() const {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(grid_.size());
  for (int i = 0; i < dim(); ++i) acc += (*this)(i, i).values();
  return {grid_, std::move(acc)};
}

namespace {

template <class Op>
TensorField zip(const TensorField& a, const TensorField& b, Op op) {
  check_same(a.grid(), b.grid());
  std::vector<ScalarField> out;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) out.push_back(op(a(i, j), b(i, j)));
  return {a.grid(), std::move(out)};
}

template <class Op>
TensorField each(const TensorField& a, Op op) {
  std::vector<ScalarField> out;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) out.push_back(op(a(i, j)));
  return {a.grid(), std::move(out)};
}

}  // namespace

TensorField operator+(const TensorField& a, const TensorField& b) {
  return zip(a, b, [](const auto& x, const auto& y) { return x + y; });
}
TensorField operator-(const TensorField& a, const TensorField& b) {
  return zip(a, b, [](const auto& x, const auto& y) { return x - y; });
}
TensorField operator*(Real s, const TensorField& a) {
  return each(a, [s](const auto& x) { return s * x; });
}
TensorField operator*(const ScalarField& s, const TensorField& a) {
  return each(a, [&s](const auto& x) { return s * x; });
}

TensorField outer(const VectorField& a, const VectorField& b) {
  check_same(a.grid(), b.grid());
  std::vector<ScalarField> out;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) out.push_back(a[i] * b[j]);
  return {a.grid(), std::move(out)};
}

ScalarField contract(const TensorField& a, const TensorField& b) {
  check_same(a.grid(), b.grid());
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(a.grid().size());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) acc += a(i, j).values() * b(i, j).values();
  return {a.grid(), std::move(acc)};
}

VectorField apply(const TensorField& a, const VectorField& v) {
  check_same(a.grid(), v.grid());
  std::vector<ScalarField> out;
  for (int i = 0; i < a.dim(); ++i) {
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(a.grid().size());
    for (int j = 0; j < a.dim(); ++j) acc += a(i, j).values() * v[j].values();
    out.emplace_back(a.grid(), std::move(acc));
  }
  return {a.grid(), std::move(out)};
}

// --- spectral calculus ---------------------------------------------------

void require_finite(const ScalarField& f, const std::string& what) {
  if (f.all_finite()) return;
  Index bad = 0;
  while (bad < f.size() && std::isfinite(f[bad])) ++bad;
  std::ostringstream msg;
  msg << "non-finite value in field '" << what << "' at flat index " << bad;
  throw NumericalError(msg.str());
}

void require_finite(const VectorField& f, const std::string& what) {
  for (int i = 0; i < f.dim(); ++i) require_finite(f[i], what + "[" + std::to_string(i) + "]");
}

ScalarField partial(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim()) throw std::invalid_argument("derivative axis out of range");
  const auto& t = spectral::tables(f.grid());
  Spectrum modes = spectral::forward(f.grid(), f.values());
  modes *= std::complex<Real>(0.0, 1.0) * t.k[axis].cast<std::complex<Real>>();
  return {f.grid(), spectral::inverse(f.grid(), modes)};
}

VectorField grad(const ScalarField& f) {
  require_finite(f, "grad input");
  const auto& t = spectral::tables(f.grid());
  const Spectrum modes = spectral::forward(f.grid(), f.values());
  std::vector<ScalarField> out;
  for (int a = 0; a < f.grid().dim(); ++a) {
    Spectrum d = modes * std::complex<Real>(0.0, 1.0) * t.k[a].cast<std::complex<Real>>();
    out.emplace_back(f.grid(), spectral::inverse(f.grid(), d));
  }
  return {f.grid(), std::move(out)};
}

ScalarField div(const VectorField& v) {
  require_finite(v, "div input");
  const Grid& g = v.grid();
  const auto& t = spectral::tables(g);
  Spectrum acc = Spectrum::Zero(g.size());
  for (int a = 0; a < g.dim(); ++a)
    acc += spectral::forward(g, v[a].values()) * std::complex<Real>(0.0, 1.0) * t.k[a].cast<std::complex<Real>>();
  acc[0] = 0.0;
  return {g, spectral::inverse(g, acc)};
}

ScalarField laplacian(const ScalarField& f) {
  require_finite(f, "laplacian input");
  const auto& t = spectral::tables(f.grid());
  Spectrum modes = spectral::forward(f.grid(), f.values());
  modes *= (-t.k2).cast<std::complex<Real>>();
  return {f.grid(), spectral::inverse(f.grid(), modes)};
}

TensorField hessian(const ScalarField& f) {
  require_finite(f, "hessian input");
  const Grid& g = f.grid();
  const auto& t = spectral::tables(g);
  const Spectrum modes = spectral::forward(g, f.values());
  std::vector<ScalarField> out(g.dim() * g.dim(), ScalarField(g));
  for (int i = 0; i < g.dim(); ++i)
    for (int j = i; j < g.dim(); ++j) {
      Spectrum d = modes * (-(t.k[i] * t.k[j])).cast<std::complex<Real>>();
      ScalarField hij(g, spectral::inverse(g, d));
      out[i * g.dim() + j] = hij;
      out[j * g.dim() + i] = std::move(hij);
    }
  return {g, std::move(out)};
}

TensorField gradient_tensor(const VectorField& u) {
  require_finite(u, "gradient input");
  const Grid& g = u.grid();
  std::vector<ScalarField> out(g.dim() * g.dim(), ScalarField(g));
  for (int i = 0; i < g.dim(); ++i) {
    const auto gi = grad(u[i]);
    for (int j = 0; j < g.dim(); ++j) out[i * g.dim() + j] = gi[j];
  }
  return {g, std::move(out)};
}

TensorField sym_grad(const VectorField& u) { return gradient_tensor(u).symmetric_part(); }
TensorField antisym_grad(const VectorField& u) { return gradient_tensor(u).antisymmetric_part(); }

VectorField div(const TensorField& c) {
  const Grid& g = c.grid();
  std::vector<ScalarField> out;
  for (int i = 0; i < g.dim(); ++i) {
    std::vector<ScalarField> row;
    for (int j = 0; j < g.dim(); ++j) row.push_back(c(i, j));
    out.push_back(div(VectorField(g, std::move(row))));
  }
  return {g, std::move(out)};
}

ScalarField dealias(const ScalarField& f) {
  const auto& t = spectral::tables(f.grid());
  Spectrum modes = spectral::forward(f.grid(), f.values());
  modes *= t.band.cast<std::complex<Real>>();
  return {f.grid(), spectral::inverse(f.grid(), modes)};
}

VectorField dealias(const VectorField& v) {
  std::vector<ScalarField> out;
  for (int i = 0; i < v.dim(); ++i) out.push_back(dealias(v[i]));
  return {v.grid(), std::move(out)};
}

ScalarField dealiased_product(const ScalarField& f, const ScalarField& g) {
  return dealias(dealias(f) * dealias(g));
}

ScalarField spectral_shift(const ScalarField& f, const Point& shift) {
  const Grid& g = f.grid();
  const auto& t = spectral::tables(g);
  Spectrum modes = spectral::forward(g, f.values());
  Eigen::ArrayXd phase = Eigen::ArrayXd::Zero(g.size());
  for (int a = 0; a < g.dim(); ++a) phase -= t.k[a] * shift[a];
  modes *= phase.unaryExpr([](Real p) { return std::polar(1.0, p); });
  return {g, spectral::inverse(g, modes)};
}

Real integrate(const ScalarField& f) { return f.values().sum() / static_cast<Real>(f.grid().size()); }

Real mean(const ScalarField& f) { return integrate(f); }

namespace {

Real lp_of_magnitude(const Grid& g, const Eigen::ArrayXd& magnitude, Real p) {
  if (std::isinf(p)) return magnitude.maxCoeff();
  if (p <= 0) throw std::invalid_argument("lp_norm needs p > 0");
  return std::pow(magnitude.pow(p).sum() / static_cast<Real>(g.size()), 1.0 / p);
}

}  // namespace

Real lp_norm(const ScalarField& f, Real p) { return lp_of_magnitude(f.grid(), f.values().abs(), p); }

Real lp_norm(const VectorField& v, Real p) { return lp_of_magnitude(v.grid(), norm_squared(v).values().sqrt(), p); }

Real lp_norm(const TensorField& c, Real p) { return lp_of_magnitude(c.grid(), contract(c, c).values().sqrt(), p); }

Real parseval_norm_squared(const ScalarField& f) {
  const Spectrum modes = spectral::forward(f.grid(), f.values());
  const auto n = static_cast<Real>(f.grid().size());
  return modes.abs2().sum() / (n * n);
}

Real space_time_norm(std::span<const Real> spatial_norms, Real dt, Real q) {
  if (spatial_norms.empty()) return 0.0;
  if (std::isinf(q)) {
    Real m = 0.0;
    for (Real v : spatial_norms) m = std::max(m, std::abs(v));
    return m;
  }
  const std::size_t last = spatial_norms.size() - 1;
  Real acc = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    const Real w = (last > 0 && (i == 0 || i == last)) ? 0.5 * dt : dt;
    acc += w * std::pow(std::abs(spatial_norms[i]), q);
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace nsk
