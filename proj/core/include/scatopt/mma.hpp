#pragma once

#include <Eigen/Dense>

#include "scatopt/errors.hpp"

namespace scatopt {

struct MMAOptions {
  double move_limit = 0.2;
  double asym_init = 0.5;    // initial asymptote distance, in (xmax-xmin)
  double asym_grow = 1.2;    // monotone progress widens the asymptotes
  double asym_shrink = 0.7;  // oscillation tightens them
  double albefa = 0.1;
  double raa0 = 1e-5;
  double constraint_penalty = 1000.0;  // c_i of the elastic variables
  double epsimin = 1e-7;
};

struct MMAState {
  int iter = 0;
  Eigen::VectorXd low, upp, xold1, xold2;
};

/// Method of Moving Asymptotes. The separable convex subproblem is solved in
/// closed form per variable when there are no constraints and by a
/// primal-dual interior-point iteration otherwise.
class MMA {
 public:
  MMA(int n_vars, int n_constraints, MMAOptions opts = {});

  /// One design update. `fval`/`dfdx` hold the constraint values g_i(x) <= 0
  /// and their gradients (m x n); pass empty for an unconstrained problem.
  Eigen::VectorXd update(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& df0dx,
                         const Eigen::VectorXd& fval,
                         const Eigen::MatrixXd& dfdx,
                         const Eigen::VectorXd& xmin,
                         const Eigen::VectorXd& xmax);

  int num_vars() const { return n_; }
  int num_constraints() const { return m_; }
  const MMAState& state() const { return state_; }
  void restore(const MMAState& s);
  const MMAOptions& options() const { return opts_; }

 private:
  Eigen::VectorXd solve_subproblem(const Eigen::VectorXd& alfa,
                                   const Eigen::VectorXd& beta,
                                   const Eigen::VectorXd& p0,
                                   const Eigen::VectorXd& q0,
                                   const Eigen::MatrixXd& P,
                                   const Eigen::MatrixXd& Q,
                                   const Eigen::VectorXd& b) const;

  int n_, m_;
  MMAOptions opts_;
  MMAState state_;
};

}  // namespace scatopt
