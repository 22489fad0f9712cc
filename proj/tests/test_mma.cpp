#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "scatopt/mma.hpp"

using namespace scatopt;

namespace {

// Svanberg's five-variable cantilever weight-minimization benchmark:
// minimize 0.0624 (x1+...+x5) subject to
// 61/x1^3 + 37/x2^3 + 19/x3^3 + 7/x4^3 + 1/x5^3 <= 1, 1 <= x <= 10.
// Known optimum weight: 1.340.
struct Cantilever {
  double objective(const Eigen::VectorXd& x) const { return 0.0624 * x.sum(); }
  Eigen::VectorXd obj_grad(const Eigen::VectorXd& x) const {
    return Eigen::VectorXd::Constant(5, 0.0624);
  }
  double constraint(const Eigen::VectorXd& x) const {
    const double c[5] = {61, 37, 19, 7, 1};
    double g = -1.0;
    for (int k = 0; k < 5; ++k) g += c[k] / std::pow(x[k], 3);
    return g;
  }
  Eigen::VectorXd con_grad(const Eigen::VectorXd& x) const {
    const double c[5] = {61, 37, 19, 7, 1};
    Eigen::VectorXd g(5);
    for (int k = 0; k < 5; ++k) g[k] = -3.0 * c[k] / std::pow(x[k], 4);
    return g;
  }
};

}  // namespace

TEST_CASE("zero gradient leaves the iterate unchanged") {
  const int n = 7;
  MMA mma(n, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.37);
  Eigen::VectorXd xnew =
      mma.update(x, Eigen::VectorXd::Zero(n), {}, {}, Eigen::VectorXd::Zero(n),
                 Eigen::VectorXd::Ones(n));
  CHECK((xnew - x).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("five-variable cantilever converges to the published optimum 1.340") {
  Cantilever prob;
  MMAOptions opts;
  opts.move_limit = 1.0;  // classic benchmark runs without extra move limits
  MMA mma(5, 1, opts);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(5, 5.0);
  const Eigen::VectorXd xmin = Eigen::VectorXd::Constant(5, 1.0);
  const Eigen::VectorXd xmax = Eigen::VectorXd::Constant(5, 10.0);
  for (int iter = 0; iter < 60; ++iter) {
    Eigen::VectorXd fval(1);
    fval[0] = prob.constraint(x);
    Eigen::MatrixXd dfdx(1, 5);
    dfdx.row(0) = prob.con_grad(x).transpose();
    x = mma.update(x, prob.obj_grad(x), fval, dfdx, xmin, xmax);
  }
  CHECK(prob.objective(x) == doctest::Approx(1.340).epsilon(1e-2 / 1.34));
  CHECK(prob.constraint(x) < 1e-4);
}

TEST_CASE("strictly positive gradient moves every variable down, bounded by the move limit") {
  const int n = 5;
  MMAOptions opts;
  opts.move_limit = 0.2;
  MMA mma(n, 0, opts);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.6);
  Eigen::VectorXd g = Eigen::VectorXd::Constant(n, 3.0);
  Eigen::VectorXd xnew = mma.update(x, g, {}, {}, Eigen::VectorXd::Zero(n),
                                    Eigen::VectorXd::Ones(n));
  for (int k = 0; k < n; ++k) {
    CHECK(xnew[k] < x[k]);
    CHECK(x[k] - xnew[k] <= opts.move_limit + 1e-12);
    CHECK(xnew[k] >= 0.0);
  }
}

TEST_CASE("iterates always satisfy the box bounds exactly") {
  const int n = 12;
  MMA mma(n, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.5);
  const Eigen::VectorXd xmin = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd xmax = Eigen::VectorXd::Ones(n);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int iter = 0; iter < 30; ++iter) {
    Eigen::VectorXd g(n);
    for (int k = 0; k < n; ++k) g[k] = d(gen);
    x = mma.update(x, g, {}, {}, xmin, xmax);
    CHECK(x.minCoeff() >= 0.0);
    CHECK(x.maxCoeff() <= 1.0);
  }
}

TEST_CASE("asymptotes stay finite and bracket the iterate") {
  const int n = 4;
  MMA mma(n, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.5);
  const Eigen::VectorXd xmin = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd xmax = Eigen::VectorXd::Ones(n);
  for (int iter = 0; iter < 10; ++iter) {
    Eigen::VectorXd g = Eigen::VectorXd::Constant(n, iter % 2 ? 1.0 : -1.0);
    x = mma.update(x, g, {}, {}, xmin, xmax);
    const MMAState& s = mma.state();
    for (int k = 0; k < n; ++k) {
      CHECK(std::isfinite(s.low[k]));
      CHECK(std::isfinite(s.upp[k]));
      CHECK(s.low[k] < x[k]);
      CHECK(s.upp[k] > x[k]);
    }
  }
}

TEST_CASE("non-finite gradients are rejected") {
  MMA mma(3, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.5);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
  g[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mma.update(x, g, {}, {}, Eigen::VectorXd::Zero(3),
                             Eigen::VectorXd::Ones(3)),
                  NumericalError);
}

TEST_CASE("state restore reproduces the update exactly") {
  const int n = 6;
  MMA a(n, 0), b(n, 0);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.5);
  const Eigen::VectorXd xmin = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd xmax = Eigen::VectorXd::Ones(n);
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  Eigen::VectorXd xa = x;
  std::vector<Eigen::VectorXd> grads;
  for (int iter = 0; iter < 5; ++iter) {
    Eigen::VectorXd g(n);
    for (int k = 0; k < n; ++k) g[k] = d(gen);
    grads.push_back(g);
    xa = a.update(xa, g, {}, {}, xmin, xmax);
  }
  // Replay the first three updates on b, snapshot, replay the rest twice.
  Eigen::VectorXd xb = x;
  for (int iter = 0; iter < 3; ++iter) {
    xb = b.update(xb, grads[iter], {}, {}, xmin, xmax);
  }
  const MMAState snap = b.state();
  const Eigen::VectorXd xb_snap = xb;
  for (int iter = 3; iter < 5; ++iter) {
    xb = b.update(xb, grads[iter], {}, {}, xmin, xmax);
  }
  CHECK((xb - xa).norm() == 0.0);

  b.restore(snap);
  Eigen::VectorXd xc = xb_snap;
  for (int iter = 3; iter < 5; ++iter) {
    xc = b.update(xc, grads[iter], {}, {}, xmin, xmax);
  }
  CHECK((xc - xa).norm() == 0.0);
}
