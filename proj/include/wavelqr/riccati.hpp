#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "wavelqr/model.hpp"

namespace wavelqr {

/// Relative tolerance on the four modal ARE residuals.
inline constexpr double kResidualTol = 1e-10;
/// Tolerance on the smallest eigenvalue of P.
inline constexpr double kPsdTol = 1e-12;

/// Per-mode Riccati matrix P^{n,n} together with its residual diagnostics.
struct ModalRiccati {
  int n = 0;
  ModalWeight weight;  // the Q^{n,n} this solves for
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  std::array<double, 4> residuals{};  // r11, r12, r21, r22
  double residual_max = 0.0;          // relative, see residual_scale()

  double P11() const { return P(0, 0); }
  double P12() const { return P(0, 1); }
  double P21() const { return P(1, 0); }
  double P22() const { return P(1, 1); }
};

/// Row gain K^(n) = -R^{-1} G^T P^{n,n}; u_n = K^(n) a_n in the per-mode frame.
struct ModalGain {
  int n = 0;
  Eigen::RowVector2d K = Eigen::RowVector2d::Zero();
};

/// Positive-root closed forms for P12, P22 and P11. Throws ConfigError on a
/// non-PSD weight or an invalid mode.
ModalRiccati solve_closed_form(const WaveConfig& cfg, const ModalWeight& w);

enum class RootSign { Plus, Minus };

/// The printed quadratic-formula roots with an explicit sign choice, evaluated
/// verbatim (no cancellation-free rewriting). May return NaN entries when the
/// chosen branch leaves the second discriminant negative.
Eigen::Matrix2d solve_with_roots(const WaveConfig& cfg, const ModalWeight& w, RootSign p12_sign,
                                 RootSign p22_sign);

/// Left-hand sides of the four modal Riccati equations (11, 12, 21, 22 order).
/// P need not be symmetric; P(0,1) and P(1,0) are used where each appears.
std::array<double, 4> residuals(const WaveConfig& cfg, const ModalWeight& w, const Eigen::Matrix2d& P);

/// 1 + max|Q| + max|P|^2, the scale residuals are judged against.
double residual_scale(const ModalWeight& w, const Eigen::Matrix2d& P);

ModalGain modal_gain(const WaveConfig& cfg, const ModalRiccati& sol);

/// Smallest eigenvalue of the symmetric part; NaN if any entry is not finite.
double min_eigenvalue(const Eigen::Matrix2d& P);
bool is_psd(const Eigen::Matrix2d& P, double tol = kPsdTol);

/// Solves every mode in [first_mode, cutoff] of the family.
std::vector<ModalRiccati> solve_family(const WaveConfig& cfg, const WeightFamily& family, int N);
std::vector<ModalGain> gains_of(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols);

// ---------------------------------------------------------------------------
// Independent ARE oracle

class AreError : public NumericalError {
 public:
  enum class Kind { ImaginaryAxis, IllConditioned, NotConverged, BadInput };
  AreError(Kind kind, const std::string& what) : NumericalError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct AreSolution {
  Eigen::MatrixXd P;
  double residual = 0.0;  // max-abs of F^T P + P F - P G R^-1 G^T P + Q
  int newton_iterations = 0;
  bool used_fallback = false;  // Newton-Kleinman started from a regularized gain
};

/// Stabilizing solution of F^T P + P F - P G R^{-1} G^T P + Q = 0.
///
/// Works in extended precision on a diagonally balanced copy of the problem.
/// The stable invariant subspace of the Hamiltonian [[F, -G R^-1 G^T], [-Q, -F^T]]
/// gives P = X2 X1^{-1}; Newton-Kleinman then polishes it. When Hamiltonian
/// eigenvalues sit too close to the imaginary axis the subspace step is skipped
/// and Newton-Kleinman starts from the gain of a regularized problem (Q + eps I).
AreSolution are_oracle(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G, const Eigen::MatrixXd& Q,
                       const Eigen::MatrixXd& R);

/// Solves A^T X + X A + C = 0 via complex Schur form (Bartels-Stewart).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// ARE of the truncated system sharing one scalar control, in the coordinates
/// b_n = integral(z phi_n) where the field criterion is sum_n b_n^T Q^{n,n} b_n + R u^2:
///   A = blockdiag(F_n),  B = stack(proj_weight_n G_true_n),  Q = blockdiag(Q^{n,n}).
/// Modes with Q^{n,n} = 0 are unobservable and decoupled from the rest, so the
/// minimal-cost solution is zero on them; the ARE is solved on the active modes only.
struct CoupledAre {
  std::vector<int> modes;
  Eigen::MatrixXd P_big;
  Eigen::RowVectorXd K_big;   // -R^-1 B^T P_big
  Eigen::MatrixXd P_diag;     // blockdiag of closed-form P^{n,n}
  Eigen::RowVectorXd K_diag;  // field-basis gains field_sign_n K^(n)
  double P_deviation = 0.0;   // Frobenius norm of P_big - P_diag
  double K_deviation = 0.0;   // Euclidean norm of K_big - K_diag
};

CoupledAre coupled_truncated_are(const WaveConfig& cfg, const WeightFamily& family, int N);

}  // namespace wavelqr
