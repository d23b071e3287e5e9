#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsk {

using Real = double;
using Index = Eigen::Index;
using Point = std::array<Real, 3>;

/// Raised when a field carries NaN/Inf or an operator is fed values outside
/// its domain (negative density, vacuum under a singular coefficient, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discrete periodic torus [0,1)^dim with n points per axis.
///
/// Samples are stored row-major: the last axis varies fastest, so the flat
/// index of (i0, i1, i2) is (i0 * n + i1) * n + i2.
class Grid {
 public:
  /// Largest total point count accepted when no explicit budget is given.
  static Index default_point_budget(int dim);

  Grid(int dim, int n, Index point_budget = -1);

  int dim() const { return dim_; }
  int n() const { return n_; }
  Real spacing() const { return 1.0 / n_; }
  Index size() const { return size_; }
  Index stride(int axis) const { return strides_[axis]; }

  std::array<int, 3> multi_index(Index flat) const;
  Point coordinate(Index flat) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.dim_ == b.dim_ && a.n_ == b.n_; }

 private:
  int dim_;
  int n_;
  Index size_;
  std::array<Index, 3> strides_{0, 0, 0};
};

/// Real samples on a grid.
class ScalarField {
 public:
  ScalarField(const Grid& grid, Eigen::ArrayXd values);
  explicit ScalarField(const Grid& grid) : ScalarField(grid, Eigen::ArrayXd::Zero(grid.size())) {}

  static ScalarField constant(const Grid& grid, Real c);
  static ScalarField from_function(const Grid& grid, const std::function<Real(const Point&)>& f);

  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  Real operator[](Index i) const { return values_[i]; }
  Index size() const { return values_.size(); }

  bool all_finite() const { return values_.allFinite(); }
  Real min() const { return values_.minCoeff(); }
  Real max() const { return values_.maxCoeff(); }

  template <class F>
  ScalarField map(F&& f) const {
    return {grid_, values_.unaryExpr(std::forward<F>(f))};
  }

 private:
  Grid grid_;
  Eigen::ArrayXd values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator*(Real s, const ScalarField& a);
ScalarField operator-(const ScalarField& a);

/// dim scalar components.
class VectorField {
 public:
  VectorField(const Grid& grid, std::vector<ScalarField> components);
  explicit VectorField(const Grid& grid);

  static VectorField constant(const Grid& grid, const Point& c);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  const ScalarField& operator[](int i) const { return components_[i]; }
  const std::vector<ScalarField>& components() const { return components_; }
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<ScalarField> components_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(Real s, const VectorField& a);
VectorField operator*(const ScalarField& s, const VectorField& a);
VectorField operator-(const VectorField& a);

ScalarField dot(const VectorField& a, const VectorField& b);
ScalarField norm_squared(const VectorField& a);

/// dim x dim scalar components, (i, j) addressed.
class TensorField {
 public:
  TensorField(const Grid& grid, std::vector<ScalarField> components);
  explicit TensorField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  const ScalarField& operator()(int i, int j) const { return components_[i * dim() + j]; }
  bool all_finite() const;

  TensorField transpose() const;
  TensorField symmetric_part() const;
  TensorField antisymmetric_part() const;
  ScalarField trace() const;

 private:
  Grid grid_;
  std::vector<ScalarField> components_;
};

TensorField operator+(const TensorField& a, const TensorField& b);
TensorField operator-(const TensorField& a, const TensorField& b);
TensorField operator*(Real s, const TensorField& a);
TensorField operator*(const ScalarField& s, const TensorField& a);

TensorField outer(const VectorField& a, const VectorField& b);
/// Pointwise A : B = sum_ij A_ij B_ij.
ScalarField contract(const TensorField& a, const TensorField& b);
/// Pointwise (A v)_i = sum_j A_ij v_j.
VectorField apply(const TensorField& a, const VectorField& v);

// --- spectral calculus --------------------------------------------------

/// Throws NumericalError naming `what` if the field holds NaN/Inf.
void require_finite(const ScalarField& f, const std::string& what);
void require_finite(const VectorField& f, const std::string& what);

ScalarField partial(const ScalarField& f, int axis);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
/// H_ij = d_i d_j f.
TensorField hessian(const ScalarField& f);
/// G_ij = d_j u_i.
TensorField gradient_tensor(const VectorField& u);
/// Du = (G + G^T) / 2.
TensorField sym_grad(const VectorField& u);
/// Au = (G - G^T) / 2.
TensorField antisym_grad(const VectorField& u);
/// (div C)_i = sum_j d_j C_ij.
VectorField div(const TensorField& c);

/// Zeroes every mode with |wavenumber index| > n/3 along any axis.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);
/// 2/3-rule product: truncate inputs, multiply, truncate the result.
ScalarField dealiased_product(const ScalarField& f, const ScalarField& g);

/// Rigid translation by an arbitrary (not grid-aligned) shift, exact for
/// band-limited data.
ScalarField spectral_shift(const ScalarField& f, const Point& shift);

/// Riemann sum times spacing^dim.
Real integrate(const ScalarField& f);
Real mean(const ScalarField& f);
/// Discrete L^p norm; p = infinity returns max |f|.
Real lp_norm(const ScalarField& f, Real p);
/// L^p norm of the pointwise Euclidean (Frobenius) magnitude.
Real lp_norm(const VectorField& v, Real p);
Real lp_norm(const TensorField& c, Real p);
/// Sum of |f_k|^2 over Fourier modes, scaled to equal the squared L2 norm.
Real parseval_norm_squared(const ScalarField& f);

/// Mixed L^q_t(L^p_x) norm of a uniformly sampled trajectory of spatial
/// norms. Time integral uses trapezoidal weights; q = infinity gives the sup.
Real space_time_norm(std::span<const Real> spatial_norms, Real dt, Real q);

}  // namespace nsk
