#include "wavelqr/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wavelqr {

namespace {

using std::numbers::pi;

double max_abs(const ModalWeight& w) {
  return std::max({std::abs(w.Q11), std::abs(w.Q12), std::abs(w.Q22)});
}

// (-b + sqrt(b^2 + c)) / d written as c / (d (b + sqrt(b^2 + c))) so that the
// small-c branch keeps full relative accuracy. Requires b >= 0, c >= 0.
double positive_root(double b, double c, double d) {
  if (c == 0.0) return 0.0;
  return c / (d * (b + std::sqrt(b * b + c)));
}

}  // namespace

ModalRiccati solve_closed_form(const WaveConfig& cfg, const ModalWeight& w) {
  ModeIndex mode(w.n, cfg.boundary());
  if (!w.is_psd()) throw ConfigError("modal weight for mode " + std::to_string(w.n) + " is not PSD");

  const double k2 = double(mode) * double(mode) * pi * pi;
  const double g = cfg.gamma_sq();
  const double a = cfg.alpha();

  double p12 = 0.0;
  double p22 = 0.0;
  double p11 = 0.0;
  if (cfg.boundary() == Boundary::Dirichlet) {
    // P12 = (-1 + sqrt(1 + g Q11 / k2)) / g
    p12 = positive_root(1.0, g * w.Q11 / k2, g);
    // P22 = (-a + sqrt(a^2 + k2 g (Q22 + 2 P12))) / (k2 g)
    p22 = positive_root(a, k2 * g * (w.Q22 + 2.0 * p12), k2 * g);
    p11 = a * p12 + k2 * (1.0 + g * p12) * p22 - w.Q12;
  } else {
    // P12 = (-k2 + sqrt(k2^2 + g Q11)) / g
    p12 = positive_root(k2, g * w.Q11, g);
    // P22 = (-a + sqrt(a^2 + g (Q22 + 2 P12))) / g
    p22 = positive_root(a, g * (w.Q22 + 2.0 * p12), g);
    p11 = a * p12 + (k2 + g * p12) * p22 - w.Q12;
  }

  ModalRiccati sol;
  sol.n = mode;
  sol.weight = w;
  sol.P << p11, p12, p12, p22;
  sol.residuals = residuals(cfg, w, sol.P);
  const double scale = residual_scale(w, sol.P);
  for (double r : sol.residuals) sol.residual_max = std::max(sol.residual_max, std::abs(r) / scale);
  return sol;
}

Eigen::Matrix2d solve_with_roots(const WaveConfig& cfg, const ModalWeight& w, RootSign p12_sign,
                                 RootSign p22_sign) {
  ModeIndex mode(w.n, cfg.boundary());
  const double k2 = double(mode) * double(mode) * pi * pi;
  const double g = cfg.gamma_sq();
  const double a = cfg.alpha();
  const double s12 = p12_sign == RootSign::Plus ? 1.0 : -1.0;
  const double s22 = p22_sign == RootSign::Plus ? 1.0 : -1.0;

  double p12, p22, p11;
  if (cfg.boundary() == Boundary::Dirichlet) {
    p12 = (-1.0 + s12 * std::sqrt(1.0 + g * w.Q11 / k2)) / g;
    p22 = (-a + s22 * std::sqrt(a * a + k2 * g * (w.Q22 + 2.0 * p12))) / (k2 * g);
    p11 = a * p12 + k2 * (1.0 + g * p12) * p22 - w.Q12;
  } else {
    p12 = (-k2 + s12 * std::sqrt(k2 * k2 + g * w.Q11)) / g;
    p22 = (-a + s22 * std::sqrt(a * a + g * (w.Q22 + 2.0 * p12))) / g;
    p11 = a * p12 + (k2 + g * p12) * p22 - w.Q12;
  }
  Eigen::Matrix2d P;
  P << p11, p12, p12, p22;
  return P;
}

std::array<double, 4> residuals(const WaveConfig& cfg, const ModalWeight& w, const Eigen::Matrix2d& P) {
  const double n = w.n;
  const double k2 = n * n * pi * pi;
  const double g = cfg.gamma_sq();
  const double a = cfg.alpha();
  // Coefficient of the quadratic P G R^-1 G^T P terms.
  const double c = cfg.boundary() == Boundary::Dirichlet ? k2 * g : g;
  const double p11 = P(0, 0), p12 = P(0, 1), p21 = P(1, 0), p22 = P(1, 1);
  return {
      -2.0 * k2 * p12 + w.Q11 - c * p12 * p12,
      p11 - a * p12 - k2 * p22 + w.Q12 - c * p12 * p22,
      p11 - a * p21 - k2 * p22 + w.Q12 - c * p22 * p21,
      2.0 * p12 - 2.0 * a * p22 + w.Q22 - c * p22 * p22,
  };
}

double residual_scale(const ModalWeight& w, const Eigen::Matrix2d& P) {
  const double p = P.cwiseAbs().maxCoeff();
  return 1.0 + max_abs(w) + p * p;
}

ModalGain modal_gain(const WaveConfig& cfg, const ModalRiccati& sol) {
  const ModalSystem sys = modal_matrices(cfg, ModeIndex(sol.n, cfg.boundary()));
  const double g2 = sys.G(1);  // G = [0, g2]
  ModalGain gain;
  gain.n = sol.n;
  gain.K << -g2 / cfg.R() * sol.P(1, 0), -g2 / cfg.R() * sol.P(1, 1);
  return gain;
}

double min_eigenvalue(const Eigen::Matrix2d& P) {
  if (!P.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  const double a = P(0, 0), d = P(1, 1), b = 0.5 * (P(0, 1) + P(1, 0));
  // Smaller root of the symmetric 2x2 characteristic polynomial.
  const double mean = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  const double lo = mean - rad;
  // Recover precision when the two eigenvalues differ in magnitude: lo = det / hi.
  const double hi = mean + rad;
  if (hi > 0.0 && std::abs(lo) < 1e-8 * hi) return (a * d - b * b) / hi;
  return lo;
}

bool is_psd(const Eigen::Matrix2d& P, double tol) {
  const double m = min_eigenvalue(P);
  return !std::isnan(m) && m >= -tol;
}

std::vector<ModalRiccati> solve_family(const WaveConfig& cfg, const WeightFamily& family, int N) {
  std::vector<ModalRiccati> sols;
  for (int n = first_mode(cfg.boundary()); n <= N; ++n)
    sols.push_back(solve_closed_form(cfg, weight_of(family, ModeIndex(n, cfg.boundary()), cfg.boundary())));
  return sols;
}

std::vector<ModalGain> gains_of(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols) {
  std::vector<ModalGain> gains;
  gains.reserve(sols.size());
  for (const auto& s : sols) gains.push_back(modal_gain(cfg, s));
  return gains;
}

CoupledAre coupled_truncated_are(const WaveConfig& cfg, const WeightFamily& family, int N) {
  const Boundary b = cfg.boundary();
  CoupledAre out;
  for (int n = first_mode(b); n <= N; ++n) out.modes.push_back(n);
  const Eigen::Index d = 2 * Eigen::Index(out.modes.size());

  Eigen::MatrixXd B(d, 1);
  out.P_diag = Eigen::MatrixXd::Zero(d, d);
  out.K_diag = Eigen::RowVectorXd::Zero(d);
  std::vector<Eigen::Index> active;
  std::vector<ModalWeight> weights;
  for (Eigen::Index i = 0; i < Eigen::Index(out.modes.size()); ++i) {
    const ModeIndex n(out.modes[i], b);
    const TrueModalInput in = true_modal_input(cfg, n);
    B.block(2 * i, 0, 2, 1) = in.proj_weight * in.G_true;
    const ModalWeight w = weight_of(family, n, b);
    weights.push_back(w);
    const ModalRiccati sol = solve_closed_form(cfg, w);
    out.P_diag.block(2 * i, 2 * i, 2, 2) = sol.P;
    out.K_diag.segment(2 * i, 2) = in.field_sign * modal_gain(cfg, sol).K;
    if (!w.is_zero()) active.push_back(i);
  }

  out.P_big = Eigen::MatrixXd::Zero(d, d);
  if (!active.empty()) {
    const Eigen::Index da = 2 * Eigen::Index(active.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(da, da);
    Eigen::MatrixXd Ba(da, 1);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(da, da);
    for (Eigen::Index k = 0; k < Eigen::Index(active.size()); ++k) {
      const Eigen::Index i = active[k];
      A.block(2 * k, 2 * k, 2, 2) = modal_matrices(cfg, ModeIndex(out.modes[i], b)).F;
      Ba.block(2 * k, 0, 2, 1) = B.block(2 * i, 0, 2, 1);
      Q.block(2 * k, 2 * k, 2, 2) = weights[i].matrix();
    }
    Eigen::MatrixXd R(1, 1);
    R(0, 0) = cfg.R();
    const Eigen::MatrixXd Pa = are_oracle(A, Ba, Q, R).P;
    for (Eigen::Index k = 0; k < Eigen::Index(active.size()); ++k)
      for (Eigen::Index l = 0; l < Eigen::Index(active.size()); ++l)
        out.P_big.block(2 * active[k], 2 * active[l], 2, 2) = Pa.block(2 * k, 2 * l, 2, 2);
  }
  out.K_big = -(B.transpose() * out.P_big) / cfg.R();
  out.P_deviation = (out.P_big - out.P_diag).norm();
  out.K_deviation = (out.K_big - out.K_diag).norm();
  return out;
}

}  // namespace wavelqr
