#include <doctest.h>

#include <cmath>

#include "scatopt/design_loop.hpp"
#include "scatopt/targets.hpp"
#include "test_util.hpp"

using namespace scatopt;

namespace {

struct Setup {
  SimulationDomain dom;
  SourceSpec src;
  TargetSpec targets;
  DensityFilter filter;

  Setup()
      : dom(build_domain(tu::small_config())),
        src{dom.source_i, dom.source_j, {1.0, 0.0}},
        targets(rainbow_target(dom, src, 9000.0, 12000.0, 2, -30.0, 30.0,
                               LobeShape{})),
        filter(dom, 3.0 * dom.h) {}
};

LoopConfig quick_loop(int iters) {
  LoopConfig lc;
  lc.max_iters = iters;
  lc.beta_init = 4.0;
  lc.beta_period = 3;
  lc.threads = 1;
  return lc;
}

}  // namespace

TEST_CASE("zero iterations returns the initial design unchanged") {
  Setup s;
  DesignResult r = run_design(s.dom, s.filter, s.src, s.targets, quick_loop(0));
  CHECK(r.history.empty());
  for (int c : s.dom.design_cells) CHECK(r.xi.xi[c] == 0.5);
}

TEST_CASE("history is recorded, finite, and the objective improves") {
  Setup s;
  DesignResult r = run_design(s.dom, s.filter, s.src, s.targets, quick_loop(6));
  REQUIRE(r.history.size() == 6);
  for (size_t k = 0; k < r.history.size(); ++k) {
    CHECK(r.history[k].iter == static_cast<int>(k) + 1);
    CHECK(std::isfinite(r.history[k].phi));
    CHECK(std::isfinite(r.history[k].max_gradient));
    CHECK(r.history[k].phi >= 0.0);
    CHECK(r.history[k].beta >= 4.0);
  }
  CHECK(r.objective.phi <= r.history.front().phi);
  // Iterates satisfy box bounds; physical field is in [0,1].
  CHECK(r.xi.xi.minCoeff() >= 0.0);
  CHECK(r.xi.xi.maxCoeff() <= 1.0);
  CHECK(r.xi_physical.xi.minCoeff() >= 0.0);
  CHECK(r.xi_physical.xi.maxCoeff() <= 1.0);
}

TEST_CASE("beta continuation advances on the configured period") {
  Setup s;
  LoopConfig lc = quick_loop(7);
  lc.beta_period = 3;
  DesignResult r = run_design(s.dom, s.filter, s.src, s.targets, lc);
  CHECK(r.history[0].beta == 4.0);
  CHECK(r.history[2].beta == 4.0);
  CHECK(r.history[3].beta == 8.0);
  CHECK(r.history[6].beta == 16.0);
}

TEST_CASE("identical configurations give bit-identical runs") {
  Setup s;
  DesignResult a = run_design(s.dom, s.filter, s.src, s.targets, quick_loop(5));
  DesignResult b = run_design(s.dom, s.filter, s.src, s.targets, quick_loop(5));
  REQUIRE(a.history.size() == b.history.size());
  for (size_t k = 0; k < a.history.size(); ++k) {
    CHECK(a.history[k].phi == b.history[k].phi);
    CHECK(a.history[k].max_gradient == b.history[k].max_gradient);
  }
  CHECK((a.xi.xi - b.xi.xi).norm() == 0.0);
  CHECK(a.objective.phi == b.objective.phi);
}

TEST_CASE("checkpoint save/load round trip is exact") {
  Setup s;
  Checkpoint ck;
  ck.next_iter = 4;
  ck.beta = 8.0;
  ck.beta_iters = 2;
  ck.phi_scale = 1.0 / 3.7e-9;
  ck.xi = DensityField::uniform(s.dom, 0.5);
  for (int c : s.dom.design_cells) ck.xi.xi[c] = tu::urand();
  const int n = static_cast<int>(s.dom.design_cells.size());
  ck.mma.iter = 3;
  ck.mma.low = Eigen::VectorXd::Random(n);
  ck.mma.upp = Eigen::VectorXd::Random(n);
  ck.mma.xold1 = Eigen::VectorXd::Random(n);
  ck.mma.xold2 = Eigen::VectorXd::Random(n);

  const std::string prefix = tu::temp_path("loop_ck");
  save_checkpoint(ck, prefix);
  Checkpoint got = load_checkpoint(prefix);
  CHECK(got.next_iter == ck.next_iter);
  CHECK(got.beta == ck.beta);
  CHECK(got.beta_iters == ck.beta_iters);
  CHECK(got.phi_scale == ck.phi_scale);
  CHECK((got.xi.xi - ck.xi.xi).norm() == 0.0);
  CHECK(got.mma.iter == ck.mma.iter);
  CHECK((got.mma.low - ck.mma.low).norm() == 0.0);
  CHECK((got.mma.upp - ck.mma.upp).norm() == 0.0);
  CHECK((got.mma.xold1 - ck.mma.xold1).norm() == 0.0);
  CHECK((got.mma.xold2 - ck.mma.xold2).norm() == 0.0);
}

TEST_CASE("resume from a checkpoint reproduces the uninterrupted run bit-exactly") {
  Setup s;
  LoopConfig full = quick_loop(6);

  LoopConfig with_ck = full;
  with_ck.checkpoint_every = 3;
  with_ck.checkpoint_prefix = tu::temp_path("loop_resume");
  DesignResult straight =
      run_design(s.dom, s.filter, s.src, s.targets, with_ck);

  Checkpoint ck = load_checkpoint(tu::temp_path("loop_resume") + "_3");
  CHECK(ck.next_iter == 4);
  DesignResult resumed =
      run_design(s.dom, s.filter, s.src, s.targets, full, &ck);

  REQUIRE(resumed.history.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(resumed.history[k].phi == straight.history[k + 3].phi);
    CHECK(resumed.history[k].max_gradient ==
          straight.history[k + 3].max_gradient);
    CHECK(resumed.history[k].beta == straight.history[k + 3].beta);
  }
  CHECK((resumed.xi.xi - straight.xi.xi).norm() == 0.0);
  CHECK(resumed.objective.phi == straight.objective.phi);
}

TEST_CASE("volume constraint is respected") {
  Setup s;
  LoopConfig lc = quick_loop(6);
  lc.volume_fraction = 0.3;
  DesignResult r = run_design(s.dom, s.filter, s.src, s.targets, lc);
  double mean = 0.0;
  for (int c : s.dom.design_cells) mean += r.xi.xi[c];
  mean /= static_cast<double>(s.dom.design_cells.size());
  CHECK(mean <= 0.3 + 0.02);  // MMA keeps near-feasibility via elastic terms
}

TEST_CASE("invalid loop configurations are rejected") {
  Setup s;
  LoopConfig bad = quick_loop(3);
  bad.beta_mult = 1.0;
  CHECK_THROWS_AS(run_design(s.dom, s.filter, s.src, s.targets, bad),
                  ConfigError);
  bad = quick_loop(3);
  bad.tol_dx = 0.0;
  CHECK_THROWS_AS(run_design(s.dom, s.filter, s.src, s.targets, bad),
                  ConfigError);
}
