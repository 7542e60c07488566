#pragma once

#include <complex>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wavelqr/model.hpp"
#include "wavelqr/riccati.hpp"

namespace wavelqr {

enum class Stability { Stable, Marginal, Unstable };

std::string_view to_string(Stability s);

/// Marginal iff the largest real part lies within this band around zero.
inline constexpr double kMarginalTol = 1e-12;

Stability classify(double max_real_part);

using Complex = std::complex<double>;

/// Roots of lambda^2 + alpha lambda + n^2 pi^2 = 0; `first` has the larger
/// imaginary part (or the larger real part when both are real).
std::pair<Complex, Complex> open_loop_eigs(const WaveConfig& cfg, ModeIndex n);

struct ModePair {
  int n = 0;
  Complex lambda_plus, lambda_minus;
  Complex mu_plus, mu_minus;
  Eigen::Vector2cd v_plus, v_minus;  // [1/mu, 1] when mu != 0, else the raw unit eigenvector
  double discriminant = 0.0;         // trace^2 - 4 det of F + G K
  Stability stability = Stability::Stable;
};

/// Eigenstructure of F + G K^(n), eigen-decomposed numerically.
ModePair closed_loop_eigs(const WaveConfig& cfg, const ModalRiccati& sol);

Eigen::Matrix2d closed_loop_matrix(const WaveConfig& cfg, const ModalRiccati& sol);

/// The quadratic-formula closed-loop eigenvalues. Corrected uses the P21
/// coefficient produced by G K (n^2 pi^2 gamma^2 for Dirichlet); AsPrinted keeps
/// gamma^2 P21 under the radical for both boundary types. Neumann variants agree.
enum class EigFormula { Corrected, AsPrinted };
std::pair<Complex, Complex> closed_loop_formula(const WaveConfig& cfg, const ModalRiccati& sol, EigFormula which);

/// Dense closed loop of the truncation driven by one scalar u = integral(K z):
/// block (k, m) = delta_km F_k + G_true_k proj_weight_m field_sign_m K^(m).
/// Modes run from first_mode to N; gains for modes missing from `gains` are zero.
Eigen::MatrixXd coupled_closed_loop(const WaveConfig& cfg, const std::vector<ModalGain>& gains, int N);

struct CoupledSpectrum {
  std::vector<Complex> eigenvalues;  // sorted by (real, imag)
  double abscissa = 0.0;
};

CoupledSpectrum coupled_spectrum(const WaveConfig& cfg, const std::vector<ModalGain>& gains, int N);

/// Largest distance between two equally sized eigenvalue multisets under a greedy
/// nearest match.
double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b);

}  // namespace wavelqr
