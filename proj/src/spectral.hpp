#pragma once

#include "nsk/fields.hpp"

#include <memory>

namespace nsk::spectral {

using Spectrum = Eigen::ArrayXcd;

/// Per-grid wavenumber tables. Built once per (dim, n) and shared.
struct Tables {
  /// 2 pi * signed mode index along each axis, Nyquist zeroed.
  std::array<Eigen::ArrayXd, 3> k;
  /// |k|^2 with the same Nyquist convention.
  Eigen::ArrayXd k2;
  /// 1 inside the 2/3 band on every axis, else 0.
  Eigen::ArrayXd band;
};

const Tables& tables(const Grid& grid);

Spectrum forward(const Grid& grid, const Eigen::ArrayXd& values);
Eigen::ArrayXd inverse(const Grid& grid, const Spectrum& modes);

}  // namespace nsk::spectral
