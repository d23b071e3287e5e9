#pragma once

#include "nsk/trajectory.hpp"
#include "nsk/truncations.hpp"

#include <vector>

namespace nsk {

/// Space-time mollifier Psi_r(t, x) = r^-(1+d) Psi(t/r, x/r).
///
/// Psi is the tensor product of the bump profile rescaled so that its
/// support cube fits inside the unit ball of R^{1+d}. The sampled weights
/// are renormalized to unit discrete mass along each direction.
class MollifierKernel {
 public:
  MollifierKernel(Real r, int dim, BumpProfile profile = {});

  Real radius() const { return r_; }
  int dim() const { return dim_; }
  /// Half-width of the support along each axis, r / sqrt(1 + d).
  Real half_width() const;

  /// Unnormalized 1D profile at z = offset / r.
  Real profile_1d(Real z) const;

  /// Normalized weights for offsets -J..J of spacing `step`.
  std::vector<Real> weights(Real step) const;

  /// Smallest admissible r for a trajectory with time step dt and grid spacing h.
  static Real min_radius(Real dt, Real h) { return std::max(2.0 * dt, 2.0 * h); }
  /// Throws with the minimum admissible radius if the kernel is unresolved.
  void require_resolved(Real dt, Real h) const;

 private:
  Real r_;
  int dim_;
  BumpProfile profile_;
};

/// Mollified trajectory on the frames with t - t0 >= r and t_end - t >= r.
ScalarTrajectory mollify(const ScalarTrajectory& f, const MollifierKernel& kernel);
VectorTrajectory mollify(const VectorTrajectory& f, const MollifierKernel& kernel);

/// Frame indices at which mollified quantities and commutators are reported.
struct InteriorRange {
  std::size_t first;
  std::size_t last;  // inclusive
};
InteriorRange interior_frames(std::size_t frame_count, Real dt, Real r);

/// L^{p3}_{t,x} norm of div (B f)_r - div (B f_r) over the interior frames.
Real commutator_div(const VectorTrajectory& b, const ScalarTrajectory& f, const MollifierKernel& kernel, Real p3);

/// L^{p3}_{t,x} norm of d_t (g f)_r - d_t (g f_r) over the interior frames;
/// d_t is the centered second-order difference.
Real commutator_dt(const ScalarTrajectory& g, const ScalarTrajectory& f, const MollifierKernel& kernel, Real p3);

/// The commutator fields themselves, one per interior frame.
std::vector<ScalarField> commutator_div_field(const VectorTrajectory& b, const ScalarTrajectory& f,
                                              const MollifierKernel& kernel);
std::vector<ScalarField> commutator_dt_field(const ScalarTrajectory& g, const ScalarTrajectory& f,
                                             const MollifierKernel& kernel);

/// Space-time L^p norm (rectangle rule) of a frame sequence.
Real space_time_lp(const std::vector<ScalarField>& frames, Real dt, Real p);

/// Smooth travelling-wave arguments for the commutator sweeps.
struct CommutatorCorpus {
  VectorTrajectory b;
  ScalarTrajectory f;
  ScalarTrajectory g;
};

/// 1D, n = 256, t in [0, 0.6] with dt = 0.6 / 307 unless overridden.
CommutatorCorpus smooth_corpus(int dim = 1, int n = 256, Real end_time = 0.6, int steps = 307);
/// Constant-argument corpus on the same grids (B, f, g all constant).
CommutatorCorpus constant_corpus(int dim = 1, int n = 256, Real end_time = 0.6, int steps = 307);

struct CommutatorRow {
  Real radius;
  Real div_norm;
  Real dt_norm;
};

/// Both commutator norms at r0, r0/2, ..., r0/2^halvings. r0 <= 0 selects
/// 2^halvings times the minimum admissible radius of the corpus.
std::vector<CommutatorRow> commutator_sweep(const CommutatorCorpus& corpus, int halvings = 4, Real r0 = 0.0,
                                            Real p3 = 2.0);

}  // namespace nsk
