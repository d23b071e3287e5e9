#include "nsk/mollify.hpp"
#include "support.hpp"

#include "doctest.h"

#include <numeric>
#include <random>

using namespace nsk;
using test::kPi;

namespace {

ScalarTrajectory wave(const Grid& g, int steps, Real dt, Real offset = 0.0) {
  ScalarTrajectory tr{0.0, dt, {}};
  for (int k = 0; k <= steps; ++k) {
    const Real t = k * dt;
    tr.frames.push_back(ScalarField::from_function(g, [&](const Point& x) {
      return offset + std::sin(2 * kPi * (x[0] - 0.3 * t)) + 0.5 * std::cos(2 * kPi * (x[g.dim() - 1] + t));
    }));
  }
  return tr;
}

ScalarTrajectory constant_trajectory(const Grid& g, int steps, Real dt, Real c) {
  return {0.0, dt, std::vector<ScalarField>(steps + 1, ScalarField::constant(g, c))};
}

}  // namespace

TEST_CASE("kernel weights have unit mass and symmetric support") {
  const MollifierKernel k(0.1, 2);
  CHECK(k.half_width() == doctest::Approx(0.1 / std::sqrt(3.0)));
  const auto w = k.weights(1.0 / 256);
  CHECK(w.size() % 2 == 1);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == w[w.size() - 1 - i]);
  CHECK_THROWS_WITH(k.require_resolved(0.1, 1.0 / 8), doctest::Contains("0.25"));
  CHECK_NOTHROW(k.require_resolved(0.01, 1.0 / 256));
}

TEST_CASE("mollifying a space-time constant returns the constant") {
  const Grid g(2, 32);
  const auto c = constant_trajectory(g, 40, 0.01, 2.5);
  const auto m = mollify(c, MollifierKernel(0.08, 2));
  CHECK(m.size() > 0);
  for (const auto& f : m.frames) CHECK((f.values() - 2.5).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("mollification is linear and converges along dyadic radii") {
  const Grid g(1, 256);
  const Real dt = 1.0 / 512;
  const auto f = wave(g, 256, dt);
  const auto h = wave(g, 256, dt, 1.0);
  Real prev = INFINITY;
  for (int k = 0; k < 4; ++k) {
    const MollifierKernel kernel(0.128 / (1 << k), 1);
    const auto mf = mollify(f, kernel);
    const auto range = interior_frames(f.size(), dt, kernel.radius());
    REQUIRE(mf.size() == range.last - range.first + 1);
    Real err = 0.0;
    for (std::size_t i = 0; i < mf.size(); ++i)
      err = std::max(err, lp_norm(mf.frames[i] - f.frames[range.first + i], 2.0));
    CHECK(err < prev);
    prev = err;

    ScalarTrajectory comb{f.t0, dt, {}};
    for (std::size_t i = 0; i < f.size(); ++i) comb.frames.push_back(2.0 * f.frames[i] - 3.0 * h.frames[i]);
    const auto mc = mollify(comb, kernel), mh = mollify(h, kernel);
    for (std::size_t i = 0; i < mc.size(); ++i)
      CHECK((mc.frames[i].values() - (2.0 * mf.frames[i].values() - 3.0 * mh.frames[i].values())).abs().maxCoeff() <=
            1e-12);
  }
}

TEST_CASE("even fields stay even") {
  const Grid g(2, 64);
  const Real dt = 0.01;
  ScalarTrajectory f{0.0, dt, {}};
  for (int k = 0; k <= 30; ++k)
    f.frames.push_back(ScalarField::from_function(g, [k](const Point& x) {
      return std::cos(2 * kPi * x[0]) * (1.0 + 0.1 * k) + std::cos(4 * kPi * x[1]) + std::cos(2 * kPi * (x[0] + x[1]));
    }));
  const auto m = mollify(f, MollifierKernel(0.06, 2));
  for (const auto& fr : m.frames)
    for (Index p = 0; p < g.size(); ++p) {
      const auto mi = g.multi_index(p);
      const Index q = ((g.n() - mi[0]) % g.n()) * g.n() + (g.n() - mi[1]) % g.n();
      CHECK(std::abs(fr[p] - fr[q]) <= 1e-12);
    }
}

TEST_CASE("commutators vanish exactly on constant coefficients") {
  const auto c = constant_corpus(1, 64, 0.2, 40);
  const MollifierKernel k(0.04, 1);
  CHECK(commutator_div(c.b, c.f, k, 2.0) == 0.0);
  CHECK(commutator_dt(c.g, c.f, k, 2.0) == 0.0);

  const auto s = smooth_corpus(1, 64, 0.2, 40);
  for (const auto& fr : commutator_div_field(c.b, s.f, k)) CHECK(test::max_abs(fr) == 0.0);
  for (const auto& fr : commutator_dt_field(c.g, s.f, k)) CHECK(test::max_abs(fr) == 0.0);
}

TEST_CASE("constant f leaves the coefficient's own mollification error") {
  const auto s = smooth_corpus(1, 64, 0.2, 40);
  const auto c = constant_corpus(1, 64, 0.2, 40);
  const Real f0 = c.f.frames.front()[0];
  const MollifierKernel k(0.04, 1);
  const auto field = commutator_div_field(s.b, c.f, k);
  const auto mb = mollify(s.b, k);
  const auto range = interior_frames(s.b.size(), s.b.dt, k.radius());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto want = f0 * div(mb.frames[i] - s.b.frames[range.first + i]);
    CHECK(test::rel_l2(field[i], want) <= 1e-10);
  }
}

TEST_CASE("commutator norms shrink along dyadic radii on the smooth corpus") {
  const auto s = smooth_corpus(1, 128, 0.6, 154);
  const auto rows = commutator_sweep(s, 3);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].radius == doctest::Approx(rows[i - 1].radius / 2));
    CHECK(rows[i].div_norm < rows[i - 1].div_norm);
    CHECK(rows[i].dt_norm < rows[i - 1].dt_norm);
  }
}

TEST_CASE("trajectory guards") {
  const auto s = smooth_corpus(1, 64, 0.2, 40);
  CHECK_THROWS(commutator_div(s.b, s.f, MollifierKernel(0.5, 1), 2.0));
  CHECK_THROWS(MollifierKernel(0.001, 1).require_resolved(s.f.dt, 1.0 / 64));
}
