#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavelqr/kernels.hpp"
#include "wavelqr/model.hpp"
#include "wavelqr/riccati.hpp"

namespace wavelqr {

/// Coefficients a_n of z = sum_n a_n phi_n(x) in the plain sin/cos basis;
/// a[k] belongs to mode first + k.
struct ModalState {
  Boundary boundary = Boundary::Dirichlet;
  double t = 0.0;
  int first = 1;
  std::vector<Eigen::Vector2d> a;

  int last_mode() const { return first + int(a.size()) - 1; }
  /// Zero for modes outside the stored range.
  Eigen::Vector2d mode(int n) const;
  Eigen::VectorXd stacked() const;
};

/// Samples of z = (z1, z2) = (w - w*, w_t - w*_t) on a grid.
struct FieldState {
  double t = 0.0;
  std::vector<double> x, z1, z2;
};

struct SimResult {
  std::string scheme;
  double dt = 0.0;
  int size = 0;  // number of modes, or grid intervals M
  std::vector<double> times;
  std::vector<ModalState> modal;  // modal schemes
  std::vector<FieldState> field;  // finite differences
  std::vector<double> u;          // control at each recorded time
  std::vector<double> cost;       // accumulated criterion at each recorded time
  std::vector<double> energy;     // 1/2 int z2^2 + z1_x^2, finite differences only
  std::vector<double> mode_costs; // per-mode accumulated cost, decoupled scheme only
};

using ScalarFn = std::function<double(double)>;

/// a_n = integral(z phi_n) / integral(phi_n^2) by composite Simpson on `panels` (even) intervals.
ModalState project_initial(const ScalarFn& z1, const ScalarFn& z2, int N, Boundary b, int panels = 2048);

/// Same projection from grid samples (trapezoid rule on the sample grid).
ModalState project_samples(const FieldState& f, int N, Boundary b);

FieldState reconstruct_field(const ModalState& s, const std::vector<double>& x);

/// Open-loop evolution of every mode under exp(F_n t), sampled every dt.
SimResult target_solution(const WaveConfig& cfg, const ModalState& init, double T, double dt);

/// Each mode advanced independently by exp((F_n + G_n K^(n)) dt), with running
/// cost sum_n a_n^T Q^{n,n} a_n + R (K^(n) a_n)^2 in the per-mode LQR frame,
/// accumulated by composite Simpson in time. The step count is rounded up to
/// an even number so that T is hit exactly. States are recorded every
/// `record_every` steps and at T; the cost integral always uses every step.
SimResult simulate_decoupled(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols, const ModalState& state0,
                             double T, double dt, int record_every = 1);

/// The 2(N - first + 1) dimensional truncation with one shared control
/// u = sum_m proj_weight_m field_sign_m K^(m) a_m, propagated by the exponential
/// of the assembled closed loop. Cost is the field criterion
/// sum_n proj_weight_n^2 a_n^T Q^{n,n} a_n + R u^2.
SimResult simulate_coupled_modal(const WaveConfig& cfg, const WeightFamily& family, const std::vector<ModalGain>& gains,
                                 const ModalState& state0, int N, double T, double dt);

struct FdOptions {
  int M = 400;
  double cfl = 0.9;
  double T = 5.0;
  int record_every = 0;  // 0: only initial and final states
  int cost_modes = 0;    // modes of the Q kernel used in the running cost
};

/// Leapfrog / second-order central differences for z_tt = z_xx - alpha z_t with
/// u = trapezoid integral of K(x) z(x, t). Dirichlet sets z1(0) = beta u; Neumann
/// uses the ghost node z1(1 + h) = z1(1 - h) + 2 h beta u. z2 is the centered
/// difference of z1, which makes u^k implicit through z^{k+1}; the linear
/// dependence is solved exactly each step.
SimResult simulate_fd(const WaveConfig& cfg, const WeightFamily& family, const GainProfile& gain, const ScalarFn& z1_0,
                      const ScalarFn& z2_0, const FdOptions& opts);

/// Optimal cost from a_0: per-mode frame sum_n a_n^T P a_n, and the field frame
/// sum_n kappa_n a_n^T P a_n = integral integral z0^T P(x1, x2) z0 with kappa_n = proj_weight_n^2.
struct PredictedCost {
  double modal_frame = 0.0;
  double field_frame = 0.0;
};

PredictedCost predicted_cost(const ModalState& state0, const std::vector<ModalRiccati>& sols);

/// Horizon T with exp(2 abscissa T) = tol, for abscissa < 0.
double infinite_horizon_T(double abscissa, double tol = 1e-8);

/// Relative L2 distance of (z1, z2) fields on a shared grid: ||a - b|| / ||b||.
double relative_l2(const FieldState& a, const FieldState& b);

/// Matrix exponential of A t (Pade scaling and squaring).
Eigen::MatrixXd expm(const Eigen::MatrixXd& A, double t);

}  // namespace wavelqr
