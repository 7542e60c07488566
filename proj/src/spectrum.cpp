#include "wavelqr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace wavelqr {

using std::numbers::pi;

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Marginal: return "marginal";
    case Stability::Unstable: return "unstable";
  }
  return "unknown";
}

Stability classify(double max_real_part) {
  if (std::abs(max_real_part) <= kMarginalTol) return Stability::Marginal;
  return max_real_part < 0.0 ? Stability::Stable : Stability::Unstable;
}

namespace {

// Roots of s^2 - trace s + det, ordered as documented for open_loop_eigs.
std::pair<Complex, Complex> quadratic_roots(double trace, double det) {
  const double disc = trace * trace - 4.0 * det;
  if (disc < 0.0) {
    const double re = 0.5 * trace, im = 0.5 * std::sqrt(-disc);
    return {{re, im}, {re, -im}};
  }
  const double sq = std::sqrt(disc);
  // Avoid cancellation: one root from the formula, the other via Vieta.
  const double big = 0.5 * (trace + (trace >= 0.0 ? sq : -sq));
  const double small = big != 0.0 ? det / big : 0.0;
  return {Complex(std::max(big, small)), Complex(std::min(big, small))};
}

std::pair<Complex, Complex> ordered(Complex a, Complex b) {
  if (a.imag() != b.imag()) return a.imag() > b.imag() ? std::pair{a, b} : std::pair{b, a};
  return a.real() >= b.real() ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

std::pair<Complex, Complex> open_loop_eigs(const WaveConfig& cfg, ModeIndex n) {
  ModeIndex m(n.value(), cfg.boundary());
  const double k2 = double(m) * double(m) * pi * pi;
  return quadratic_roots(-cfg.alpha(), k2);
}

Eigen::Matrix2d closed_loop_matrix(const WaveConfig& cfg, const ModalRiccati& sol) {
  const ModalSystem sys = modal_matrices(cfg, ModeIndex(sol.n, cfg.boundary()));
  return sys.F + sys.G * modal_gain(cfg, sol).K;
}

ModePair closed_loop_eigs(const WaveConfig& cfg, const ModalRiccati& sol) {
  const Eigen::Matrix2d A = closed_loop_matrix(cfg, sol);
  Eigen::EigenSolver<Eigen::Matrix2d> es(A, true);
  if (es.info() != Eigen::Success) throw NumericalError("closed-loop eigensolve failed");

  ModePair mp;
  mp.n = sol.n;
  std::tie(mp.lambda_plus, mp.lambda_minus) = open_loop_eigs(cfg, ModeIndex(sol.n, cfg.boundary()));
  mp.discriminant = A.trace() * A.trace() - 4.0 * A.determinant();

  const Complex e0 = es.eigenvalues()(0), e1 = es.eigenvalues()(1);
  const auto [mp_plus, mp_minus] = ordered(e0, e1);
  mp.mu_plus = mp_plus;
  mp.mu_minus = mp_minus;
  const Eigen::Index ip = (mp_plus == e0) ? 0 : 1;

  auto eigvec = [&](Complex mu, Eigen::Index idx) -> Eigen::Vector2cd {
    if (mu != Complex(0.0)) return {1.0 / mu, Complex(1.0)};
    Eigen::Vector2cd v = es.eigenvectors().col(idx);
    return v / v.norm();
  };
  mp.v_plus = eigvec(mp.mu_plus, ip);
  mp.v_minus = eigvec(mp.mu_minus, 1 - ip);
  mp.stability = classify(std::max(mp.mu_plus.real(), mp.mu_minus.real()));
  return mp;
}

std::pair<Complex, Complex> closed_loop_formula(const WaveConfig& cfg, const ModalRiccati& sol, EigFormula which) {
  const double n = sol.n;
  const double k2 = n * n * pi * pi;
  const double g = cfg.gamma_sq();
  const bool dirichlet = cfg.boundary() == Boundary::Dirichlet;
  const double damp = cfg.alpha() + (dirichlet ? k2 * g : g) * sol.P22();
  const double p21_coeff = (dirichlet && which == EigFormula::Corrected) ? k2 * g : g;
  const double stiff = k2 + p21_coeff * sol.P21();
  // mu = -damp/2 +- sqrt(damp^2 - 4 stiff)/2
  const Complex root = std::sqrt(Complex(damp * damp - 4.0 * stiff));
  return ordered(Complex(-0.5 * damp) + 0.5 * root, Complex(-0.5 * damp) - 0.5 * root);
}

Eigen::MatrixXd coupled_closed_loop(const WaveConfig& cfg, const std::vector<ModalGain>& gains, int N) {
  const Boundary b = cfg.boundary();
  const int n0 = first_mode(b);
  const int count = std::max(0, N - n0 + 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * count, 2 * count);

  std::vector<Eigen::Vector2d> input(count);
  for (int i = 0; i < count; ++i) {
    const ModeIndex n(n0 + i, b);
    A.block<2, 2>(2 * i, 2 * i) = modal_matrices(cfg, n).F;
    input[i] = true_modal_input(cfg, n).G_true;
  }
  for (const auto& g : gains) {
    if (g.n < n0 || g.n > N) continue;
    const int m = g.n - n0;
    const TrueModalInput in = true_modal_input(cfg, ModeIndex(g.n, b));
    const Eigen::RowVector2d readout = in.proj_weight * in.field_sign * g.K;
    for (int k = 0; k < count; ++k) A.block<2, 2>(2 * k, 2 * m) += input[k] * readout;
  }
  return A;
}

CoupledSpectrum coupled_spectrum(const WaveConfig& cfg, const std::vector<ModalGain>& gains, int N) {
  const Eigen::MatrixXd A = coupled_closed_loop(cfg, gains, N);
  CoupledSpectrum out;
  if (A.rows() == 0) return out;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("coupled eigensolve failed");
  out.abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    out.eigenvalues.push_back(es.eigenvalues()(i));
    out.abscissa = std::max(out.abscissa, es.eigenvalues()(i).real());
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const Complex& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](Complex p, Complex q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace wavelqr
