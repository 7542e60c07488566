#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wavelqr/riccati.hpp"

namespace wavelqr {

namespace {

using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

constexpr Real kEps = std::numeric_limits<Real>::epsilon();

Mat symmetrize(const Mat& M) { return Real(0.5) * (M + M.transpose()); }

Real max_abs(const Mat& M) { return M.size() == 0 ? Real(0) : M.cwiseAbs().maxCoeff(); }

// Osborne balancing: powers of two d_i so that D^-1 F D has comparable row and
// column off-diagonal norms.
Vec balance(const Mat& F) {
  const Eigen::Index d = F.rows();
  Vec scale = Vec::Ones(d);
  Mat A = F;
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < d; ++i) {
      Real c = 0, r = 0;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0 || r == 0) continue;
      Real f = 1;
      const Real s = c + r;
      while (c < r / 2) { c *= 2; r /= 2; f *= 2; }
      while (c >= r * 2) { c /= 2; r *= 2; f /= 2; }
      if ((c + r) < Real(0.95) * s) {
        changed = true;
        scale(i) *= f;
        A.col(i) *= f;
        A.row(i) /= f;
      }
    }
  }
  return scale;
}

Mat lyapunov(const Mat& A, const Mat& C) {
  const Eigen::Index d = A.rows();
  Eigen::ComplexSchur<Mat> schur(A);
  const CMat& T = schur.matrixT();
  const CMat& U = schur.matrixU();
  const CMat Ct = U.adjoint() * C.template cast<std::complex<Real>>() * U;

  // T^H Y + Y T = -Ct, solved column by column; T^H is lower triangular.
  CMat Y = CMat::Zero(d, d);
  const CMat TH = T.adjoint();
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> rhs = -Ct.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= T(k, j) * Y.col(k);
    CMat L = TH;
    L.diagonal().array() += T(j, j);
    for (Eigen::Index i = 0; i < d; ++i) {
      std::complex<Real> s = rhs(i);
      for (Eigen::Index k = 0; k < i; ++k) s -= L(i, k) * Y(k, j);
      if (std::abs(L(i, i)) == 0)
        throw AreError(AreError::Kind::ImaginaryAxis, "Lyapunov operator is singular");
      Y(i, j) = s / L(i, i);
    }
  }
  return symmetrize((U * Y * U.adjoint()).real());
}

Real spectral_abscissa(const Mat& A) {
  Eigen::ComplexEigenSolver<Mat> es(A, false);
  Real m = -std::numeric_limits<Real>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) m = std::max(m, es.eigenvalues()(i).real());
  return m;
}

Mat are_residual(const Mat& F, const Mat& S, const Mat& Q, const Mat& P) {
  return F.transpose() * P + P * F - P * S * P + Q;
}

// Stable-subspace solution; returns false when eigenvalues crowd the imaginary axis.
bool hamiltonian_solve(const Mat& F, const Mat& S, const Mat& Q, Mat& P) {
  const Eigen::Index d = F.rows();
  Mat H(2 * d, 2 * d);
  H << F, -S, -Q, -F.transpose();
  Eigen::ComplexEigenSolver<Mat> es(H, true);
  if (es.info() != Eigen::Success) throw AreError(AreError::Kind::NotConverged, "Hamiltonian eigensolve failed");

  const Real axis_tol = Real(1e4) * kEps * std::max(Real(1), max_abs(H));
  std::vector<Eigen::Index> stable;
  for (Eigen::Index i = 0; i < 2 * d; ++i) {
    const Real re = es.eigenvalues()(i).real();
    if (std::abs(re) <= axis_tol) return false;
    if (re < 0) stable.push_back(i);
  }
  if (Eigen::Index(stable.size()) != d) return false;

  CMat X(2 * d, d);
  for (Eigen::Index k = 0; k < d; ++k) X.col(k) = es.eigenvectors().col(stable[k]);
  const CMat X1 = X.topRows(d);
  const CMat X2 = X.bottomRows(d);
  Eigen::JacobiSVD<CMat> svd(X1);
  const Real smax = svd.singularValues()(0);
  const Real smin = svd.singularValues()(d - 1);
  if (!(smin > Real(1e6) * kEps * smax))
    throw AreError(AreError::Kind::IllConditioned, "stable subspace basis X1 is ill-conditioned");
  P = symmetrize(X1.transpose().partialPivLu().solve(X2.transpose()).transpose().real());
  return true;
}

// Newton-Kleinman from P0 (whose gain must stabilize F). Returns iterations used.
int newton_kleinman(const Mat& F, const Mat& G, const Mat& Rinv, const Mat& Q, Mat& P, int max_iter,
                    bool require_convergence) {
  const Mat S = G * Rinv * G.transpose();
  Real best = max_abs(are_residual(F, S, Q, P));
  int it = 0;
  for (; it < max_iter; ++it) {
    const Mat K = Rinv * G.transpose() * P;
    const Mat Acl = F - G * K;
    if (!(spectral_abscissa(Acl) < 0)) {
      if (require_convergence)
        throw AreError(AreError::Kind::ImaginaryAxis, "Newton-Kleinman lost closed-loop stability");
      break;
    }
    const Mat Pn = lyapunov(Acl, Q + P * S * P);
    const Real res = max_abs(are_residual(F, S, Q, Pn));
    const Real step = max_abs(Pn - P);
    if (!require_convergence && !(res < best)) break;
    P = Pn;
    best = std::min(best, res);
    if (step <= Real(16) * kEps * std::max(Real(1), max_abs(P))) {
      ++it;
      return it;
    }
  }
  if (require_convergence && it == max_iter)
    throw AreError(AreError::Kind::NotConverged, "Newton-Kleinman did not converge");
  return it;
}

}  // namespace

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  if (A.rows() != A.cols() || C.rows() != A.rows() || C.cols() != A.cols())
    throw AreError(AreError::Kind::BadInput, "solve_lyapunov: dimension mismatch");
  return lyapunov(A.cast<Real>(), C.cast<Real>()).cast<double>();
}

AreSolution are_oracle(const Eigen::MatrixXd& F_in, const Eigen::MatrixXd& G_in, const Eigen::MatrixXd& Q_in,
                       const Eigen::MatrixXd& R_in) {
  const Eigen::Index d = F_in.rows();
  const Eigen::Index m = G_in.cols();
  if (F_in.cols() != d || G_in.rows() != d || Q_in.rows() != d || Q_in.cols() != d || R_in.rows() != m ||
      R_in.cols() != m || d == 0)
    throw AreError(AreError::Kind::BadInput, "are_oracle: dimension mismatch");
  if (!F_in.allFinite() || !G_in.allFinite() || !Q_in.allFinite() || !R_in.allFinite())
    throw AreError(AreError::Kind::BadInput, "are_oracle: non-finite input");

  const Mat R = symmetrize(R_in.cast<Real>());
  Eigen::LLT<Mat> Rllt(R);
  if (Rllt.info() != Eigen::Success) throw AreError(AreError::Kind::BadInput, "are_oracle: R must be positive definite");
  const Mat Rinv = Rllt.solve(Mat::Identity(m, m));

  // x = D x~: F~ = D^-1 F D, G~ = D^-1 G, Q~ = D Q D, P = D^-1 P~ D^-1.
  const Vec D = balance(F_in.cast<Real>());
  const Mat Dm = D.asDiagonal();
  const Mat Dinv = D.cwiseInverse().asDiagonal();
  const Mat F = Dinv * F_in.cast<Real>() * Dm;
  const Mat G = Dinv * G_in.cast<Real>();
  const Mat Q = symmetrize(Dm * Q_in.cast<Real>() * Dm);
  const Mat S = G * Rinv * G.transpose();

  AreSolution out;
  Mat P;
  if (hamiltonian_solve(F, S, Q, P)) {
    out.newton_iterations = newton_kleinman(F, G, Rinv, Q, P, 8, false);
  } else {
    // Regularized start: Q + eps I pushes the Hamiltonian spectrum off the axis.
    const Real eps = Real(1e-6) * std::max(Real(1), max_abs(Q));
    Mat P0;
    if (!hamiltonian_solve(F, S, Q + eps * Mat::Identity(d, d), P0))
      throw AreError(AreError::Kind::ImaginaryAxis, "Hamiltonian has eigenvalues on the imaginary axis");
    P = P0;
    out.used_fallback = true;
    out.newton_iterations = newton_kleinman(F, G, Rinv, Q, P, 200, true);
  }

  const Mat P_orig = symmetrize(Dinv * P * Dinv);
  out.P = P_orig.cast<double>();
  const Mat So = G_in.cast<Real>() * Rinv * G_in.cast<Real>().transpose();
  const Real res = max_abs(are_residual(F_in.cast<Real>(), So, Q_in.cast<Real>(), P_orig));
  out.residual = double(res);
  // Defective axis eigenvalues split by O(sqrt(eps)) and can slip past the axis
  // test, so the result itself is checked.
  if (!(spectral_abscissa(F_in.cast<Real>() - So * P_orig) < 0))
    throw AreError(AreError::Kind::ImaginaryAxis, "no stabilizing solution: closed loop is not Hurwitz");
  const Real scale = Real(1) + max_abs(Q_in.cast<Real>()) + max_abs(P_orig) * (max_abs(F_in.cast<Real>()) + max_abs(So) * max_abs(P_orig));
  if (!(res <= Real(1e-10) * scale))
    throw AreError(AreError::Kind::NotConverged, "ARE residual too large after refinement");
  return out;
}

}  // namespace wavelqr
