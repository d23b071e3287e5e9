#pragma once

#include "nsk/fields.hpp"

#include <cmath>
#include <random>

namespace nsk::test {

inline constexpr Real kPi = 3.14159265358979323846;

/// Random trigonometric polynomial with modes |j| <= max_mode on every axis.
inline ScalarField random_band_limited(const Grid& grid, std::mt19937_64& rng, int max_mode = 3, Real amplitude = 1.0) {
  std::uniform_real_distribution<Real> coef(-1.0, 1.0);
  const int d = grid.dim();
  std::vector<std::array<int, 3>> modes;
  std::vector<Real> a, phase;
  for (int k = 0; k < 6; ++k) {
    std::array<int, 3> j{0, 0, 0};
    std::uniform_int_distribution<int> pick(-max_mode, max_mode);
    for (int i = 0; i < d; ++i) j[i] = pick(rng);
    modes.push_back(j);
    a.push_back(amplitude * coef(rng) / 6.0);
    phase.push_back(kPi * coef(rng));
  }
  return ScalarField::from_function(grid, [&](const Point& x) {
    Real s = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k)
      s += a[k] * std::cos(2.0 * kPi * (modes[k][0] * x[0] + modes[k][1] * x[1] + modes[k][2] * x[2]) + phase[k]);
    return s;
  });
}

/// 1 + 0.5 * random band-limited field normalized to sup 1: min >= 0.5.
inline ScalarField random_positive(const Grid& grid, std::mt19937_64& rng, int max_mode = 3) {
  const ScalarField f = random_band_limited(grid, rng, max_mode);
  const Real sup = std::max(f.values().abs().maxCoeff(), 1e-300);
  return ScalarField(grid, 1.0 + 0.5 * f.values() / sup);
}

inline Real rel_l2(const ScalarField& got, const ScalarField& want) {
  const Real den = std::sqrt(want.values().square().sum());
  const Real num = std::sqrt((got.values() - want.values()).square().sum());
  return den == 0.0 ? num : num / den;
}

inline Real rel_l2(const VectorField& got, const VectorField& want) {
  Real num = 0.0, den = 0.0;
  for (int i = 0; i < got.dim(); ++i) {
    num += (got[i].values() - want[i].values()).square().sum();
    den += want[i].values().square().sum();
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline Real max_abs(const ScalarField& f) { return f.values().abs().maxCoeff(); }

inline Real max_abs(const VectorField& v) {
  Real m = 0.0;
  for (int i = 0; i < v.dim(); ++i) m = std::max(m, max_abs(v[i]));
  return m;
}

}  // namespace nsk::test
