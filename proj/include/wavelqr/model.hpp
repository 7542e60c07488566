#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

#include "wavelqr/errors.hpp"

namespace wavelqr {

enum class Boundary { Dirichlet, Neumann };

std::string_view to_string(Boundary b);
Boundary boundary_from_string(std::string_view s);

/// Lowest admissible mode: sin nπx starts at n = 1, cos nπx at n = 0.
constexpr int first_mode(Boundary b) { return b == Boundary::Dirichlet ? 1 : 0; }

/// Damped wave equation w_tt = w_xx - alpha w_t on [0,1], actuated through
/// w(0,t) = beta u (Dirichlet) or w_x(1,t) = beta u (Neumann), with control
/// weight R in the quadratic criterion.
class WaveConfig {
 public:
  /// Throws ConfigError unless R > 0, alpha >= 0 and beta != 0.
  WaveConfig(Boundary boundary, double alpha, double beta, double R);

  Boundary boundary() const { return boundary_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double R() const { return R_; }
  /// beta^2 / R
  double gamma_sq() const { return gamma_sq_; }

  WaveConfig with_boundary(Boundary b) const { return {b, alpha_, beta_, R_}; }

 private:
  Boundary boundary_;
  double alpha_;
  double beta_;
  double R_;
  double gamma_sq_;
};

class ModeIndex {
 public:
  /// Rejects n < 0, and n = 0 for Dirichlet.
  ModeIndex(int n, Boundary b);

  int value() const { return n_; }
  operator int() const { return n_; }  // NOLINT

 private:
  int n_;
};

/// The symmetric 2x2 state-cost block attached to one spatial mode.
struct ModalWeight {
  int n = 0;
  double Q11 = 0.0;
  double Q12 = 0.0;
  double Q22 = 0.0;

  Eigen::Matrix2d matrix() const;
  bool is_zero() const { return Q11 == 0.0 && Q12 == 0.0 && Q22 == 0.0; }
  bool is_psd(double tol = 0.0) const;
  bool is_positive_definite() const;
};

struct PowerLaw {
  double q = 1.0;
  double r = 5.0;
};

struct ExplicitList {
  std::map<int, ModalWeight> entries;
};

/// Weight families are truncated at `cutoff`: modes above it carry Q = 0.
class WeightFamily {
 public:
  static WeightFamily power_law(double q, double r, int cutoff);
  static WeightFamily explicit_list(std::map<int, ModalWeight> entries, int cutoff);

  int cutoff() const { return cutoff_; }
  bool is_power_law() const { return std::holds_alternative<PowerLaw>(family_); }
  /// Throws std::logic_error for explicit lists.
  const PowerLaw& power() const;
  const std::variant<PowerLaw, ExplicitList>& family() const { return family_; }

  WeightFamily with_cutoff(int cutoff) const;

 private:
  WeightFamily(std::variant<PowerLaw, ExplicitList> f, int cutoff);

  std::variant<PowerLaw, ExplicitList> family_;
  int cutoff_ = 0;
};

/// Q11 = Q22 = q / n^r, Q12 = 0 for n >= 1; the Neumann mean mode n = 0 gets q.
ModalWeight weight_of(const WeightFamily& family, ModeIndex n, Boundary b);

/// Per-mode LQR data (F, G) as it enters the modal Riccati equations.
struct ModalSystem {
  Eigen::Matrix2d F;
  Eigen::Vector2d G;
};

ModalSystem modal_matrices(const WaveConfig& cfg, ModeIndex n);

/// Input direction of the boundary control in the plain sin/cos coefficient
/// coordinates a_n = (1/proj_weight) * integral(z phi_n), obtained by integrating
/// z_1'' against phi_n by parts.
///
/// A feedback u = integral(K z) with K(x) = sum_n field_sign_n K^(n) phi_n(x)
/// reads back u = sum_n proj_weight_n field_sign_n K^(n) a_n, so the diagonal
/// closed-loop block is F_n + proj_weight_n G_true_n field_sign_n K^(n), which
/// equals F_n + G_n K^(n). field_sign is (-1)^n for Neumann, 1 for Dirichlet.
struct TrueModalInput {
  Eigen::Vector2d G_true;
  double proj_weight = 1.0;
  double field_sign = 1.0;
};

TrueModalInput true_modal_input(const WaveConfig& cfg, ModeIndex n);

/// phi_n(x): sin(n pi x) or cos(n pi x).
double basis(Boundary b, int n, double x);
/// phi_n'(x)
double basis_dx(Boundary b, int n, double x);
/// integral_0^1 phi_n(x)^2 dx: 1/2, or 1 for the Neumann mean mode.
double basis_norm_sq(Boundary b, int n);

}  // namespace wavelqr
