#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavelqr/model.hpp"
#include "wavelqr/riccati.hpp"

namespace wavelqr {

/// `points` uniformly spaced samples of [0, 1], endpoints included.
std::vector<double> uniform_grid(int points);

/// Two-point 2x2 kernel sampled on grid_x1 x grid_x2 (row-major in x1).
struct KernelField {
  Boundary boundary = Boundary::Dirichlet;
  int N_used = 0;
  std::vector<double> x1, x2;
  std::vector<Eigen::Matrix2d> values;

  const Eigen::Matrix2d& at(std::size_t i, std::size_t j) const { return values[i * x2.size() + j]; }
};

/// Row-vector gain K(x) sampled on a grid.
struct GainProfile {
  Boundary boundary = Boundary::Dirichlet;
  int N_used = 0;
  std::vector<double> x;
  std::vector<Eigen::RowVector2d> values;

  /// Linear interpolation between samples.
  Eigen::RowVector2d operator()(double x) const;
};

/// sum_n P^{n,n} phi_n(x1) phi_n(x2)
KernelField assemble_P(const std::vector<ModalRiccati>& sols, Boundary b, const std::vector<double>& grid);

/// Gain kernel from the boundary trace of P: sum_n field_sign_n K^(n) phi_n(x).
/// Dirichlet coefficients are -R^-1 beta n pi [P21, P22]; Neumann coefficients
/// are -R^-1 beta (-1)^n [P21, P22].
GainProfile assemble_K(const std::vector<ModalRiccati>& sols, const WaveConfig& cfg, const std::vector<double>& grid);

struct QField {
  KernelField field;
  bool absolutely_summable = true;
  std::optional<std::string> warning;
};

QField assemble_Q(const WeightFamily& family, int N, const std::vector<double>& grid, Boundary b);

/// The four Riccati-PDE equations, each as LHS - RHS on the grid (row-major in x1).
struct ResidualFields {
  std::vector<double> x1, x2;
  std::array<std::vector<double>, 4> r;  // 11, 12, 21, 22

  double max_abs() const;
};

/// Riccati-PDE residual of the truncated diagonal series, using term-wise
/// analytic derivatives and boundary traces. The diagonal Fourier coefficients
/// vanish when `sols` solve the modal AREs; what remains is the cross-frequency
/// part of the boundary product terms.
ResidualFields pde_residual(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols, const WeightFamily& family,
                            const std::vector<double>& grid);

/// The cross-frequency terms -gamma^2 sum_{m != n} tau_m tau_n (.)^m (.)^n phi_m(x1) phi_n(x2)
/// that pde_residual should reduce to; tau_n is the boundary trace factor
/// (n pi for Dirichlet, (-1)^n for Neumann).
ResidualFields pde_cross_terms(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols,
                               const std::vector<double>& grid);

/// Coefficients c_n of f = sum c_mn phi_m(x1) phi_n(x2) on the diagonal m = n,
/// by composite Simpson double quadrature. Requires an odd number of samples.
std::vector<double> diagonal_coefficients(std::span<const double> field, const std::vector<double>& grid, Boundary b,
                                          const std::vector<int>& modes);

/// Least-squares slope of log a_n against log n.
double decay_fit(std::span<const int> ns, std::span<const double> values);
double decay_fit(std::span<const double> values, int n_lo);

enum class Verdict { Convergent, Divergent };
std::string_view to_string(Verdict v);

struct SeriesVerdict {
  std::string series;              // "Q", "K", "P11"
  double threshold = 0.0;          // r must exceed this
  Verdict theory = Verdict::Divergent;
  double fitted_exponent = 0.0;    // of the coefficient magnitudes
  Verdict fitted = Verdict::Divergent;
  std::vector<double> cauchy_gaps; // sup-grid difference between consecutive N_list partial sums
  bool cauchy_decreasing = false;
};

struct ConvergenceReport {
  Boundary boundary = Boundary::Dirichlet;
  double r = 0.0;
  std::vector<int> N_list;
  std::vector<SeriesVerdict> series;  // Q, K, P11

  const SeriesVerdict& get(std::string_view name) const;
};

struct ConvergenceOptions {
  int fit_lo = 50;
  int fit_hi = 500;
  int grid_points = 101;
};

/// Requires a power-law family. Fitted verdicts use the absolute-summability
/// test exponent < -1 on the coefficient magnitudes.
ConvergenceReport convergence_report(const WaveConfig& cfg, const WeightFamily& family, std::vector<int> N_list,
                                     const ConvergenceOptions& opts = {});

/// Threshold on r above which the named series converges: Q 1, K 2, P11 4 or 6.
double theoretical_threshold(std::string_view series, Boundary b);

}  // namespace wavelqr
