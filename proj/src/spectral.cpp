#include "spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <map>
#include <mutex>
#include <numbers>

namespace nsk::spectral {

namespace {

std::shared_ptr<const Tables> build_tables(const Grid& grid) {
  auto t = std::make_shared<Tables>();
  const int n = grid.n();
  const Index size = grid.size();
  const int cutoff = n / 3;
  for (int a = 0; a < 3; ++a) t->k[a] = Eigen::ArrayXd::Zero(size);
  t->k2 = Eigen::ArrayXd::Zero(size);
  t->band = Eigen::ArrayXd::Ones(size);
  for (Index flat = 0; flat < size; ++flat) {
    const auto idx = grid.multi_index(flat);
    for (int a = 0; a < grid.dim(); ++a) {
      const int j = idx[a] <= n / 2 ? idx[a] : idx[a] - n;
      const Real k = (j == n / 2) ? 0.0 : 2.0 * std::numbers::pi * j;
      t->k[a][flat] = k;
      t->k2[flat] += k * k;
      if (std::abs(j) > cutoff) t->band[flat] = 0.0;
    }
  }
  return t;
}

// Eigen's FFT object caches twiddles per length and is not safe to share.
Eigen::FFT<Real>& fft() {
  thread_local Eigen::FFT<Real> engine;
  return engine;
}

// In-place 1D transforms along `axis` of a row-major complex block.
void transform_axis(const Grid& grid, Spectrum& data, int axis, bool inverse_dir) {
  const int n = grid.n();
  const Index stride = grid.stride(axis);
  const Index size = grid.size();
  std::vector<std::complex<Real>> in(n), out(n);
  auto& engine = fft();
  // Lines along `axis` start at every flat index whose axis coordinate is 0.
  for (Index base = 0; base < size; ++base) {
    if ((base / stride) % n != 0) continue;
    for (int j = 0; j < n; ++j) in[j] = data[base + j * stride];
    if (inverse_dir)
      engine.inv(out, in);
    else
      engine.fwd(out, in);
    for (int j = 0; j < n; ++j) data[base + j * stride] = out[j];
  }
}

}  // namespace

const Tables& tables(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const Tables>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{grid.dim(), grid.n()}];
  if (!slot) slot = build_tables(grid);
  return *slot;
}

Spectrum forward(const Grid& grid, const Eigen::ArrayXd& values) {
  if (grid.dim() == 1) {
    std::vector<Real> in(values.data(), values.data() + values.size());
    std::vector<std::complex<Real>> out;
    fft().fwd(out, in);
    return Eigen::Map<Spectrum>(out.data(), static_cast<Index>(out.size()));
  }
  Spectrum data = values.cast<std::complex<Real>>();
  for (int a = 0; a < grid.dim(); ++a) transform_axis(grid, data, a, false);
  return data;
}

Eigen::ArrayXd inverse(const Grid& grid, const Spectrum& modes) {
  if (grid.dim() == 1) {
    std::vector<std::complex<Real>> in(modes.data(), modes.data() + modes.size());
    std::vector<Real> out;
    fft().inv(out, in);
    return Eigen::Map<Eigen::ArrayXd>(out.data(), static_cast<Index>(out.size()));
  }
  Spectrum data = modes;
  for (int a = 0; a < grid.dim(); ++a) transform_axis(grid, data, a, true);
  return data.real();
}

}  // namespace nsk::spectral
