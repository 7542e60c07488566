#include "wavelqr/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavelqr {

using std::numbers::pi;

std::string_view to_string(Boundary b) {
  return b == Boundary::Dirichlet ? "dirichlet" : "neumann";
}

Boundary boundary_from_string(std::string_view s) {
  if (s == "dirichlet") return Boundary::Dirichlet;
  if (s == "neumann") return Boundary::Neumann;
  throw ConfigError("unknown boundary type '" + std::string(s) + "'");
}

WaveConfig::WaveConfig(Boundary boundary, double alpha, double beta, double R)
    : boundary_(boundary), alpha_(alpha), beta_(beta), R_(R), gamma_sq_(beta * beta / R) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(R))
    throw ConfigError("wave config: non-finite parameter");
  if (!(R > 0.0)) throw ConfigError("wave config: R must be positive");
  if (alpha < 0.0) throw ConfigError("wave config: alpha must be nonnegative");
  if (beta == 0.0) throw ConfigError("wave config: beta = 0 leaves every mode uncontrollable");
}

ModeIndex::ModeIndex(int n, Boundary b) : n_(n) {
  if (n < first_mode(b))
    throw ConfigError("mode index " + std::to_string(n) + " invalid for " +
                      std::string(to_string(b)) + " boundary");
}

Eigen::Matrix2d ModalWeight::matrix() const {
  Eigen::Matrix2d Q;
  Q << Q11, Q12, Q12, Q22;
  return Q;
}

bool ModalWeight::is_psd(double tol) const {
  return Q11 >= -tol && Q22 >= -tol && Q11 * Q22 - Q12 * Q12 >= -tol;
}

bool ModalWeight::is_positive_definite() const {
  return Q11 > 0.0 && Q11 * Q22 - Q12 * Q12 > 0.0;
}

WeightFamily::WeightFamily(std::variant<PowerLaw, ExplicitList> f, int cutoff)
    : family_(std::move(f)), cutoff_(cutoff) {
  if (cutoff < 0) throw ConfigError("weight family: cutoff must be nonnegative");
}

WeightFamily WeightFamily::power_law(double q, double r, int cutoff) {
  if (!(q > 0.0) || !std::isfinite(q)) throw ConfigError("power-law weights: q must be positive");
  if (!std::isfinite(r)) throw ConfigError("power-law weights: r must be finite");
  return WeightFamily(PowerLaw{q, r}, cutoff);
}

WeightFamily WeightFamily::explicit_list(std::map<int, ModalWeight> entries, int cutoff) {
  for (auto& [n, w] : entries) {
    if (n < 0) throw ConfigError("weight list: negative mode index");
    if (!w.is_psd()) throw ConfigError("weight list: entry for mode " + std::to_string(n) + " is not PSD");
    w.n = n;
  }
  return WeightFamily(ExplicitList{std::move(entries)}, cutoff);
}

const PowerLaw& WeightFamily::power() const {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) return *p;
  throw std::logic_error("weight family is not a power law");
}

WeightFamily WeightFamily::with_cutoff(int cutoff) const { return WeightFamily(family_, cutoff); }

ModalWeight weight_of(const WeightFamily& family, ModeIndex n, Boundary b) {
  ModeIndex checked(n.value(), b);
  ModalWeight w{checked.value()};
  if (checked.value() > family.cutoff()) return w;

  if (const auto* p = std::get_if<PowerLaw>(&family.family())) {
    const double v = checked.value() == 0 ? p->q : p->q / std::pow(double(checked.value()), p->r);
    w.Q11 = v;
    w.Q22 = v;
    return w;
  }
  const auto& list = std::get<ExplicitList>(family.family()).entries;
  if (auto it = list.find(checked.value()); it != list.end()) w = it->second;
  return w;
}

ModalSystem modal_matrices(const WaveConfig& cfg, ModeIndex n) {
  ModeIndex checked(n.value(), cfg.boundary());
  const double k = checked.value() * pi;
  ModalSystem sys;
  sys.F << 0.0, 1.0, -k * k, -cfg.alpha();
  const double g = cfg.boundary() == Boundary::Dirichlet ? k * cfg.beta() : cfg.beta();
  sys.G << 0.0, g;
  return sys;
}

TrueModalInput true_modal_input(const WaveConfig& cfg, ModeIndex n) {
  ModeIndex checked(n.value(), cfg.boundary());
  const int m = checked.value();
  TrueModalInput in;
  if (cfg.boundary() == Boundary::Dirichlet) {
    // 2 * int z1'' sin(m pi x) = 2 m pi z1(0) - (m pi)^2 a_m
    in.G_true << 0.0, 2.0 * m * pi * cfg.beta();
    in.proj_weight = 0.5;
    in.field_sign = 1.0;
  } else if (m == 0) {
    in.G_true << 0.0, cfg.beta();
    in.proj_weight = 1.0;
    in.field_sign = 1.0;
  } else {
    // 2 * int z1'' cos(m pi x) = 2 (-1)^m z1'(1) - (m pi)^2 a_m
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    in.G_true << 0.0, 2.0 * sign * cfg.beta();
    in.proj_weight = 0.5;
    in.field_sign = sign;
  }
  return in;
}

double basis(Boundary b, int n, double x) {
  return b == Boundary::Dirichlet ? std::sin(n * pi * x) : std::cos(n * pi * x);
}

double basis_dx(Boundary b, int n, double x) {
  const double k = n * pi;
  return b == Boundary::Dirichlet ? k * std::cos(k * x) : -k * std::sin(k * x);
}

double basis_norm_sq(Boundary b, int n) {
  return (b == Boundary::Neumann && n == 0) ? 1.0 : 0.5;
}

}  // namespace wavelqr
