#pragma once

#include "nsk/fields.hpp"

#include <stdexcept>
#include <vector>

namespace nsk {

/// Frames sampled on a uniform time grid t0, t0 + dt, ...
template <class Frame>
struct Trajectory {
  Real t0 = 0.0;
  Real dt = 0.0;
  std::vector<Frame> frames;

  Real time(std::size_t i) const { return t0 + static_cast<Real>(i) * dt; }
  std::size_t size() const { return frames.size(); }
  Real end_time() const { return frames.empty() ? t0 : time(frames.size() - 1); }

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory needs a positive time step");
    if (frames.empty()) throw std::invalid_argument("trajectory is empty");
    for (const auto& f : frames)
      if (!(f.grid() == frames.front().grid())) throw std::invalid_argument("trajectory frames must share one grid");
  }
};

using ScalarTrajectory = Trajectory<ScalarField>;
using VectorTrajectory = Trajectory<VectorField>;

}  // namespace nsk
