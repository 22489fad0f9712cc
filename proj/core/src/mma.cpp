#include "scatopt/mma.hpp"

#include <algorithm>
#include <cmath>

namespace scatopt {

namespace {
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd cwise_max(const VectorXd& v, double s) {
  return v.cwiseMax(VectorXd::Constant(v.size(), s));
}
}  // namespace

MMA::MMA(int n_vars, int n_constraints, MMAOptions opts)
    : n_(n_vars), m_(n_constraints), opts_(opts) {
  if (n_vars <= 0) throw ConfigError("mma: need at least one variable");
  if (n_constraints < 0) throw ConfigError("mma: negative constraint count");
  state_.low = VectorXd::Zero(n_);
  state_.upp = VectorXd::Zero(n_);
  state_.xold1 = VectorXd::Zero(n_);
  state_.xold2 = VectorXd::Zero(n_);
}

void MMA::restore(const MMAState& s) {
  if (s.low.size() != n_ || s.upp.size() != n_ || s.xold1.size() != n_ ||
      s.xold2.size() != n_) {
    throw ConfigError("mma: state size mismatch on restore");
  }
  state_ = s;
}

VectorXd MMA::update(const VectorXd& x, const VectorXd& df0dx,
                     const VectorXd& fval, const MatrixXd& dfdx,
                     const VectorXd& xmin, const VectorXd& xmax) {
  if (x.size() != n_ || df0dx.size() != n_ || xmin.size() != n_ ||
      xmax.size() != n_) {
    throw ConfigError("mma: vector size mismatch");
  }
  if (fval.size() != m_ || dfdx.rows() != m_ ||
      (m_ > 0 && dfdx.cols() != n_)) {
    throw ConfigError("mma: constraint size mismatch");
  }
  if (!df0dx.allFinite() || (m_ > 0 && !dfdx.allFinite())) {
    throw NumericalError("mma: non-finite gradient");
  }

  const VectorXd xrange = cwise_max(xmax - xmin, 1e-5);
  VectorXd& low = state_.low;
  VectorXd& upp = state_.upp;

  if (state_.iter < 2) {
    low = x - opts_.asym_init * xrange;
    upp = x + opts_.asym_init * xrange;
  } else {
    for (int j = 0; j < n_; ++j) {
      const double osc =
          (x[j] - state_.xold1[j]) * (state_.xold1[j] - state_.xold2[j]);
      double factor = 1.0;
      if (osc > 0) factor = opts_.asym_grow;
      else if (osc < 0) factor = opts_.asym_shrink;
      low[j] = x[j] - factor * (state_.xold1[j] - low[j]);
      upp[j] = x[j] + factor * (upp[j] - state_.xold1[j]);
      low[j] = std::max(low[j], x[j] - 10.0 * xrange[j]);
      low[j] = std::min(low[j], x[j] - 0.01 * xrange[j]);
      upp[j] = std::min(upp[j], x[j] + 10.0 * xrange[j]);
      upp[j] = std::max(upp[j], x[j] + 0.01 * xrange[j]);
    }
  }

  VectorXd alfa(n_), beta(n_);
  for (int j = 0; j < n_; ++j) {
    alfa[j] = std::max({xmin[j], low[j] + opts_.albefa * (x[j] - low[j]),
                        x[j] - opts_.move_limit * xrange[j]});
    beta[j] = std::min({xmax[j], upp[j] - opts_.albefa * (upp[j] - x[j]),
                        x[j] + opts_.move_limit * xrange[j]});
    if (alfa[j] > beta[j]) alfa[j] = beta[j] = 0.5 * (alfa[j] + beta[j]);
  }

  VectorXd p0(n_), q0(n_);
  MatrixXd P(m_, n_), Q(m_, n_);
  for (int j = 0; j < n_; ++j) {
    const double ux = upp[j] - x[j], xl = x[j] - low[j];
    const double gp = std::max(df0dx[j], 0.0), gm = std::max(-df0dx[j], 0.0);
    p0[j] = ux * ux * (1.001 * gp + 0.001 * gm + opts_.raa0 / xrange[j]);
    q0[j] = xl * xl * (0.001 * gp + 1.001 * gm + opts_.raa0 / xrange[j]);
    for (int i = 0; i < m_; ++i) {
      P(i, j) = ux * ux * std::max(dfdx(i, j), 0.0);
      Q(i, j) = xl * xl * std::max(-dfdx(i, j), 0.0);
    }
  }
  VectorXd b(m_);
  for (int i = 0; i < m_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n_; ++j) {
      acc += P(i, j) / (upp[j] - x[j]) + Q(i, j) / (x[j] - low[j]);
    }
    b[i] = acc - fval[i];
  }

  VectorXd xnew;
  if (m_ == 0) {
    xnew.resize(n_);
    for (int j = 0; j < n_; ++j) {
      const double sp = std::sqrt(p0[j]), sq = std::sqrt(q0[j]);
      double xo = (low[j] * sp + upp[j] * sq) / (sp + sq);
      xnew[j] = std::clamp(xo, alfa[j], beta[j]);
    }
  } else {
    xnew = solve_subproblem(alfa, beta, p0, q0, P, Q, b);
  }

  state_.xold2 = state_.xold1;
  state_.xold1 = x;
  ++state_.iter;
  return xnew;
}

// Primal-dual interior-point iteration on the subproblem KKT system, with
// elastic variables y (penalty c, d = 1) and a0 = 1, a_i = 0.
VectorXd MMA::solve_subproblem(const VectorXd& alfa, const VectorXd& beta,
                               const VectorXd& p0, const VectorXd& q0,
                               const MatrixXd& P, const MatrixXd& Q,
                               const VectorXd& b) const {
  const int n = n_, m = m_;
  const VectorXd& low = state_.low;
  const VectorXd& upp = state_.upp;
  const VectorXd c = VectorXd::Constant(m, opts_.constraint_penalty);
  const VectorXd d = VectorXd::Ones(m);
  const double a0 = 1.0;
  const VectorXd a = VectorXd::Zero(m);

  double epsi = 1.0;
  VectorXd x = 0.5 * (alfa + beta);
  VectorXd y = VectorXd::Ones(m);
  double z = 1.0;
  VectorXd lam = VectorXd::Ones(m);
  VectorXd xsi = cwise_max((x - alfa).cwiseInverse(), 1.0);
  VectorXd eta = cwise_max((beta - x).cwiseInverse(), 1.0);
  VectorXd mu = cwise_max(0.5 * c, 1.0);
  double zet = 1.0;
  VectorXd s = VectorXd::Ones(m);

  auto residual = [&](const VectorXd& x_, const VectorXd& y_, double z_,
                      const VectorXd& lam_, const VectorXd& xsi_,
                      const VectorXd& eta_, const VectorXd& mu_, double zet_,
                      const VectorXd& s_, double eps, double* rmax) {
    const VectorXd ux1 = upp - x_, xl1 = x_ - low;
    const VectorXd plam = p0 + P.transpose() * lam_;
    const VectorXd qlam = q0 + Q.transpose() * lam_;
    const VectorXd gvec = P * ux1.cwiseInverse() + Q * xl1.cwiseInverse();

    VectorXd rex = plam.cwiseQuotient(ux1.cwiseAbs2()) -
                   qlam.cwiseQuotient(xl1.cwiseAbs2()) - xsi_ + eta_;
    VectorXd rey = c + d.cwiseProduct(y_) - mu_ - lam_;
    double rez = a0 - zet_ - a.dot(lam_);
    VectorXd relam = gvec - a * z_ - y_ + s_ - b;
    VectorXd rexsi =
        xsi_.cwiseProduct(x_ - alfa) - VectorXd::Constant(n, eps);
    VectorXd reeta =
        eta_.cwiseProduct(beta - x_) - VectorXd::Constant(n, eps);
    VectorXd remu = mu_.cwiseProduct(y_) - VectorXd::Constant(m, eps);
    double rezet = zet_ * z_ - eps;
    VectorXd res = lam_.cwiseProduct(s_) - VectorXd::Constant(m, eps);

    double sq = rex.squaredNorm() + rey.squaredNorm() + rez * rez +
                relam.squaredNorm() + rexsi.squaredNorm() +
                reeta.squaredNorm() + remu.squaredNorm() + rezet * rezet +
                res.squaredNorm();
    double mx = std::max({rex.lpNorm<Eigen::Infinity>(),
                          rexsi.lpNorm<Eigen::Infinity>(),
                          reeta.lpNorm<Eigen::Infinity>(), std::abs(rez),
                          std::abs(rezet)});
    if (m > 0) {
      mx = std::max({mx, rey.lpNorm<Eigen::Infinity>(),
                     relam.lpNorm<Eigen::Infinity>(),
                     remu.lpNorm<Eigen::Infinity>(),
                     res.lpNorm<Eigen::Infinity>()});
    }
    if (rmax) *rmax = mx;
    return std::sqrt(sq);
  };

  while (epsi > opts_.epsimin) {
    double resmax = 0.0;
    double resnorm = residual(x, y, z, lam, xsi, eta, mu, zet, s, epsi, &resmax);
    for (int it = 0; it < 200 && resmax > 0.9 * epsi; ++it) {
      const VectorXd ux1 = upp - x, xl1 = x - low;
      const VectorXd ux2 = ux1.cwiseAbs2(), xl2 = xl1.cwiseAbs2();
      const VectorXd ux3 = ux2.cwiseProduct(ux1), xl3 = xl2.cwiseProduct(xl1);
      const VectorXd plam = p0 + P.transpose() * lam;
      const VectorXd qlam = q0 + Q.transpose() * lam;
      const VectorXd gvec = P * ux1.cwiseInverse() + Q * xl1.cwiseInverse();
      MatrixXd GG(m, n);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
          GG(i, j) = P(i, j) / ux2[j] - Q(i, j) / xl2[j];
        }
      }
      const VectorXd delx = plam.cwiseQuotient(ux2) - qlam.cwiseQuotient(xl2) -
                            (x - alfa).cwiseInverse() * epsi +
                            (beta - x).cwiseInverse() * epsi;
      const VectorXd dely =
          c + d.cwiseProduct(y) - lam - y.cwiseInverse() * epsi;
      const double delz = a0 - a.dot(lam) - epsi / z;
      const VectorXd dellam = gvec - a * z - y - b + lam.cwiseInverse() * epsi;
      const VectorXd diagx = 2.0 * (plam.cwiseQuotient(ux3) +
                                    qlam.cwiseQuotient(xl3)) +
                             xsi.cwiseQuotient(x - alfa) +
                             eta.cwiseQuotient(beta - x);
      const VectorXd diagy = d + mu.cwiseQuotient(y);
      const VectorXd diaglam = s.cwiseQuotient(lam);
      const VectorXd diaglamyi = diaglam + diagy.cwiseInverse();

      VectorXd dlam(m), dx(n);
      double dz;
      {
        // m is small: reduce to an (m+1)x(m+1) dense system.
        MatrixXd AA = diaglamyi.asDiagonal();
        AA += GG * diagx.cwiseInverse().asDiagonal() * GG.transpose();
        MatrixXd Abig(m + 1, m + 1);
        Abig.topLeftCorner(m, m) = AA;
        Abig.topRightCorner(m, 1) = a;
        Abig.bottomLeftCorner(1, m) = a.transpose();
        Abig(m, m) = -zet / z;
        VectorXd bb(m + 1);
        bb.head(m) = dellam + dely.cwiseQuotient(diagy) -
                     GG * delx.cwiseQuotient(diagx);
        bb[m] = delz;
        const VectorXd sol = Abig.fullPivLu().solve(bb);
        dlam = sol.head(m);
        dz = sol[m];
        dx = -delx.cwiseQuotient(diagx) -
             (GG.transpose() * dlam).cwiseQuotient(diagx);
      }
      const VectorXd dy = -dely.cwiseQuotient(diagy) + dlam.cwiseQuotient(diagy);
      const VectorXd dxsi = -xsi + (x - alfa).cwiseInverse() * epsi -
                            xsi.cwiseProduct(dx).cwiseQuotient(x - alfa);
      const VectorXd deta = -eta + (beta - x).cwiseInverse() * epsi +
                            eta.cwiseProduct(dx).cwiseQuotient(beta - x);
      const VectorXd dmu =
          -mu + y.cwiseInverse() * epsi - mu.cwiseProduct(dy).cwiseQuotient(y);
      const double dzet = -zet + epsi / z - zet * dz / z;
      const VectorXd ds = -s + lam.cwiseInverse() * epsi -
                          s.cwiseProduct(dlam).cwiseQuotient(lam);

      double stmax = 1.0;
      auto limit = [&stmax](double dv, double v) {
        if (v > 0) stmax = std::max(stmax, -1.01 * dv / v);
      };
      for (int i = 0; i < m; ++i) {
        limit(dy[i], y[i]);
        limit(dlam[i], lam[i]);
        limit(dmu[i], mu[i]);
        limit(ds[i], s[i]);
      }
      limit(dz, z);
      limit(dzet, zet);
      for (int j = 0; j < n; ++j) {
        limit(dxsi[j], xsi[j]);
        limit(deta[j], eta[j]);
        limit(-dx[j], x[j] - alfa[j]);
        limit(dx[j], beta[j] - x[j]);
      }
      double steg = 1.0 / stmax;

      const VectorXd xo = x, yo = y, lamo = lam, xsio = xsi, etao = eta,
                     muo = mu, so = s;
      const double zo = z, zeto = zet;
      double newnorm = 2.0 * resnorm;
      for (int half = 0; half < 50 && newnorm > resnorm; ++half) {
        x = xo + steg * dx;
        y = yo + steg * dy;
        z = zo + steg * dz;
        lam = lamo + steg * dlam;
        xsi = xsio + steg * dxsi;
        eta = etao + steg * deta;
        mu = muo + steg * dmu;
        zet = zeto + steg * dzet;
        s = so + steg * ds;
        newnorm = residual(x, y, z, lam, xsi, eta, mu, zet, s, epsi, &resmax);
        steg *= 0.5;
      }
      resnorm = newnorm;
    }
    epsi *= 0.1;
  }
  return x;
}

}  // namespace scatopt
