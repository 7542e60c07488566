#include "wavelqr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace wavelqr {

namespace {

using std::numbers::pi;

// phi[k][i] = phi_{modes[k]}(grid[i])
std::vector<std::vector<double>> basis_table(Boundary b, const std::vector<int>& modes, const std::vector<double>& grid) {
  std::vector<std::vector<double>> t(modes.size(), std::vector<double>(grid.size()));
  for (std::size_t k = 0; k < modes.size(); ++k)
    for (std::size_t i = 0; i < grid.size(); ++i) t[k][i] = basis(b, modes[k], grid[i]);
  return t;
}

// Derivative at x = 0 for sine modes, value at x = 1 for cosine modes: the
// factor each mode contributes to the boundary traces in the gain relation.
double trace_factor(Boundary b, int n) {
  return b == Boundary::Dirichlet ? basis_dx(b, n, 0.0) : basis(b, n, 1.0);
}

std::vector<int> modes_of(const std::vector<ModalRiccati>& sols) {
  std::vector<int> modes;
  std::set<int> seen;
  for (const auto& s : sols) {
    if (!seen.insert(s.n).second) throw ConfigError("duplicate mode " + std::to_string(s.n) + " in solution set");
    modes.push_back(s.n);
  }
  return modes;
}

std::vector<double> simpson_weights(std::size_t points) {
  if (points < 3 || points % 2 == 0) throw std::invalid_argument("Simpson quadrature needs an odd number (>= 3) of samples");
  const double h = 1.0 / double(points - 1);
  std::vector<double> w(points);
  for (std::size_t i = 0; i < points; ++i) w[i] = (i == 0 || i + 1 == points) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  for (double& v : w) v *= h / 3.0;
  return w;
}

}  // namespace

std::vector<double> uniform_grid(int points) {
  if (points < 2) throw ConfigError("grid needs at least two points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = double(i) / double(points - 1);
  g.back() = 1.0;
  return g;
}

Eigen::RowVector2d GainProfile::operator()(double xq) const {
  if (x.empty()) return Eigen::RowVector2d::Zero();
  if (xq <= x.front()) return values.front();
  if (xq >= x.back()) return values.back();
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t j = std::size_t(it - x.begin());
  const double t = (xq - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - t) * values[j - 1] + t * values[j];
}

KernelField assemble_P(const std::vector<ModalRiccati>& sols, Boundary b, const std::vector<double>& grid) {
  const std::vector<int> modes = modes_of(sols);
  const auto phi = basis_table(b, modes, grid);
  KernelField f;
  f.boundary = b;
  f.N_used = modes.empty() ? 0 : *std::max_element(modes.begin(), modes.end());
  f.x1 = grid;
  f.x2 = grid;
  f.values.assign(grid.size() * grid.size(), Eigen::Matrix2d::Zero());
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
      for (std::size_t k = 0; k < modes.size(); ++k) acc += sols[k].P * (phi[k][i] * phi[k][j]);
      f.values[i * grid.size() + j] = acc;
    }
  return f;
}

GainProfile assemble_K(const std::vector<ModalRiccati>& sols, const WaveConfig& cfg, const std::vector<double>& grid) {
  const Boundary b = cfg.boundary();
  const std::vector<int> modes = modes_of(sols);
  GainProfile g;
  g.boundary = b;
  g.N_used = modes.empty() ? 0 : *std::max_element(modes.begin(), modes.end());
  g.x = grid;
  g.values.assign(grid.size(), Eigen::RowVector2d::Zero());
  for (const auto& s : sols) {
    const double sign = true_modal_input(cfg, ModeIndex(s.n, b)).field_sign;
    const Eigen::RowVector2d coeff = sign * modal_gain(cfg, s).K;
    for (std::size_t i = 0; i < grid.size(); ++i) g.values[i] += coeff * basis(b, s.n, grid[i]);
  }
  return g;
}

QField assemble_Q(const WeightFamily& family, int N, const std::vector<double>& grid, Boundary b) {
  QField out;
  std::vector<ModalRiccati> pseudo;  // reuse the P assembly with Q blocks in place of P
  const int top = std::min(N, family.cutoff());
  for (int n = first_mode(b); n <= top; ++n) {
    const ModalWeight w = weight_of(family, ModeIndex(n, b), b);
    ModalRiccati s;
    s.n = n;
    s.P = w.matrix();
    pseudo.push_back(s);
  }
  out.field = assemble_P(pseudo, b, grid);
  if (family.is_power_law() && family.power().r <= 1.0) {
    out.absolutely_summable = false;
    out.warning = "series not absolutely summable (power-law exponent r <= 1)";
  }
  return out;
}

double ResidualFields::max_abs() const {
  double m = 0.0;
  for (const auto& f : r)
    for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

ResidualFields pde_residual(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols, const WeightFamily& family,
                            const std::vector<double>& grid) {
  const Boundary b = cfg.boundary();
  const std::vector<int> modes = modes_of(sols);
  for (int n = first_mode(b); n <= family.cutoff(); ++n)
    if (std::find(modes.begin(), modes.end(), n) == modes.end() &&
        !weight_of(family, ModeIndex(n, b), b).is_zero())
      throw ConfigError("weight family is active on mode " + std::to_string(n) + " but no solution was supplied");

  const double g = cfg.gamma_sq();
  const double a = cfg.alpha();
  const std::size_t G = grid.size();
  const std::size_t M = modes.size();
  const auto phi = basis_table(b, modes, grid);

  // Diagonal (same-frequency) coefficients of the linear terms of each equation.
  std::vector<std::array<double, 4>> lin(M);
  std::vector<double> t12(G, 0.0), t21(G, 0.0), t22(G, 0.0);  // boundary traces
  for (std::size_t k = 0; k < M; ++k) {
    const auto& s = sols[k];
    const ModalWeight w = weight_of(family, ModeIndex(s.n, b), b);
    const double k2 = double(s.n) * double(s.n) * pi * pi;
    lin[k] = {
        -k2 * (s.P21() + s.P12()) + w.Q11,
        s.P11() - a * s.P12() - k2 * s.P22() + w.Q12,
        s.P11() - a * s.P21() - k2 * s.P22() + w.Q12,
        s.P12() + s.P21() - 2.0 * a * s.P22() + w.Q22,
    };
    const double tau = trace_factor(b, s.n);
    for (std::size_t i = 0; i < G; ++i) {
      t12[i] += tau * s.P12() * phi[k][i];
      t21[i] += tau * s.P21() * phi[k][i];
      t22[i] += tau * s.P22() * phi[k][i];
    }
  }

  ResidualFields out;
  out.x1 = grid;
  out.x2 = grid;
  for (auto& f : out.r) f.assign(G * G, 0.0);
  for (std::size_t i = 0; i < G; ++i)
    for (std::size_t j = 0; j < G; ++j) {
      std::array<double, 4> acc{};
      for (std::size_t k = 0; k < M; ++k) {
        const double pp = phi[k][i] * phi[k][j];
        for (int e = 0; e < 4; ++e) acc[e] += lin[k][e] * pp;
      }
      const std::size_t idx = i * G + j;
      out.r[0][idx] = acc[0] - g * t12[i] * t21[j];
      out.r[1][idx] = acc[1] - g * t12[i] * t22[j];
      out.r[2][idx] = acc[2] - g * t22[i] * t21[j];
      out.r[3][idx] = acc[3] - g * t22[i] * t22[j];
    }
  return out;
}

ResidualFields pde_cross_terms(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols,
                               const std::vector<double>& grid) {
  const Boundary b = cfg.boundary();
  const std::vector<int> modes = modes_of(sols);
  const double g = cfg.gamma_sq();
  const std::size_t G = grid.size();
  const auto phi = basis_table(b, modes, grid);

  // Component pairs (first factor at x1, second at x2) for equations 11, 12, 21, 22.
  auto comp = [](const ModalRiccati& s, int which) {
    return which == 0 ? s.P12() : which == 1 ? s.P21() : s.P22();
  };
  constexpr std::array<std::array<int, 2>, 4> pairs{{{0, 1}, {0, 2}, {2, 1}, {2, 2}}};

  ResidualFields out;
  out.x1 = grid;
  out.x2 = grid;
  for (auto& f : out.r) f.assign(G * G, 0.0);
  for (int e = 0; e < 4; ++e) {
    // u_m(x1) v_n(x2) summed over m != n as (sum_m u_m)(sum_n v_n) - sum_n u_n v_n.
    std::vector<std::vector<double>> u(sols.size(), std::vector<double>(G)), v = u;
    std::vector<double> U(G, 0.0), V(G, 0.0);
    for (std::size_t k = 0; k < sols.size(); ++k) {
      const double tau = trace_factor(b, sols[k].n);
      for (std::size_t i = 0; i < G; ++i) {
        u[k][i] = tau * comp(sols[k], pairs[e][0]) * phi[k][i];
        v[k][i] = tau * comp(sols[k], pairs[e][1]) * phi[k][i];
        U[i] += u[k][i];
        V[i] += v[k][i];
      }
    }
    for (std::size_t i = 0; i < G; ++i)
      for (std::size_t j = 0; j < G; ++j) {
        double diag = 0.0;
        for (std::size_t k = 0; k < sols.size(); ++k) diag += u[k][i] * v[k][j];
        out.r[e][i * G + j] = -g * (U[i] * V[j] - diag);
      }
  }
  return out;
}

std::vector<double> diagonal_coefficients(std::span<const double> field, const std::vector<double>& grid, Boundary b,
                                          const std::vector<int>& modes) {
  const std::size_t G = grid.size();
  if (field.size() != G * G) throw std::invalid_argument("diagonal_coefficients: field/grid size mismatch");
  const std::vector<double> w = simpson_weights(G);
  std::vector<double> out;
  out.reserve(modes.size());
  for (int n : modes) {
    std::vector<double> wp(G);
    for (std::size_t i = 0; i < G; ++i) wp[i] = w[i] * basis(b, n, grid[i]);
    double acc = 0.0;
    for (std::size_t i = 0; i < G; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < G; ++j) row += field[i * G + j] * wp[j];
      acc += wp[i] * row;
    }
    const double norm = basis_norm_sq(b, n);
    out.push_back(acc / (norm * norm));
  }
  return out;
}

double decay_fit(std::span<const int> ns, std::span<const double> values) {
  if (ns.size() != values.size() || ns.size() < 2) throw std::invalid_argument("decay_fit: need at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(values[i] > 0.0) || ns[i] <= 0)
      throw std::invalid_argument("decay_fit: entries must be positive on the fit window");
    const double x = std::log(double(ns[i])), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double decay_fit(std::span<const double> values, int n_lo) {
  std::vector<int> ns(values.size());
  for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = n_lo + int(i);
  return decay_fit(ns, values);
}

std::string_view to_string(Verdict v) { return v == Verdict::Convergent ? "convergent" : "divergent"; }

const SeriesVerdict& ConvergenceReport::get(std::string_view name) const {
  for (const auto& s : series)
    if (s.series == name) return s;
  throw std::out_of_range("no series named " + std::string(name));
}

double theoretical_threshold(std::string_view series, Boundary b) {
  if (series == "Q") return 1.0;
  if (series == "K") return 2.0;
  if (series == "P11") return b == Boundary::Dirichlet ? 4.0 : 6.0;
  throw std::invalid_argument("unknown series " + std::string(series));
}

ConvergenceReport convergence_report(const WaveConfig& cfg, const WeightFamily& family, std::vector<int> N_list,
                                     const ConvergenceOptions& opts) {
  if (!family.is_power_law()) throw ConfigError("convergence report requires a power-law weight family");
  if (opts.fit_lo < 1 || opts.fit_hi <= opts.fit_lo) throw ConfigError("convergence report: bad fit window");
  std::sort(N_list.begin(), N_list.end());
  const Boundary b = cfg.boundary();
  const int top = std::max(opts.fit_hi, N_list.empty() ? 0 : N_list.back());
  const WeightFamily untruncated = family.with_cutoff(top);
  const std::vector<ModalRiccati> sols = solve_family(cfg, untruncated, top);
  const int n0 = first_mode(b);

  ConvergenceReport rep;
  rep.boundary = b;
  rep.r = family.power().r;
  rep.N_list = N_list;

  // Coefficient magnitudes, indexed by n - n0.
  std::vector<double> cq, ck, cp;
  for (const auto& s : sols) {
    cq.push_back(weight_of(untruncated, ModeIndex(s.n, b), b).Q11);
    ck.push_back(modal_gain(cfg, s).K.cwiseAbs().maxCoeff());
    cp.push_back(std::abs(s.P11()));
  }

  const std::vector<double> grid = uniform_grid(opts.grid_points);
  const std::size_t G = grid.size();
  const auto phi_all = [&] {
    std::vector<int> modes;
    for (int n = n0; n <= top; ++n) modes.push_back(n);
    return basis_table(b, modes, grid);
  }();

  auto gaps_2d = [&](const std::vector<double>& coeff) {
    std::vector<double> gaps;
    for (std::size_t l = 1; l < N_list.size(); ++l) {
      double worst = 0.0;
      for (std::size_t i = 0; i < G; ++i)
        for (std::size_t j = 0; j < G; ++j) {
          double d = 0.0;
          for (int n = std::max(N_list[l - 1] + 1, n0); n <= N_list[l]; ++n)
            d += coeff[n - n0] * phi_all[n - n0][i] * phi_all[n - n0][j];
          worst = std::max(worst, std::abs(d));
        }
      gaps.push_back(worst);
    }
    return gaps;
  };
  auto gaps_k = [&] {
    std::vector<double> gaps;
    for (std::size_t l = 1; l < N_list.size(); ++l) {
      double worst = 0.0;
      for (std::size_t i = 0; i < G; ++i) {
        Eigen::RowVector2d d = Eigen::RowVector2d::Zero();
        for (int n = std::max(N_list[l - 1] + 1, n0); n <= N_list[l]; ++n) {
          const double sign = true_modal_input(cfg, ModeIndex(n, b)).field_sign;
          d += sign * modal_gain(cfg, sols[n - n0]).K * phi_all[n - n0][i];
        }
        worst = std::max(worst, d.cwiseAbs().maxCoeff());
      }
      gaps.push_back(worst);
    }
    return gaps;
  };

  auto make = [&](std::string name, const std::vector<double>& coeff, std::vector<double> gaps) {
    SeriesVerdict v;
    v.series = std::move(name);
    v.threshold = theoretical_threshold(v.series, b);
    v.theory = rep.r > v.threshold ? Verdict::Convergent : Verdict::Divergent;
    std::span<const double> window(coeff.data() + (opts.fit_lo - n0), std::size_t(opts.fit_hi - opts.fit_lo + 1));
    v.fitted_exponent = decay_fit(window, opts.fit_lo);
    v.fitted = v.fitted_exponent < -1.0 ? Verdict::Convergent : Verdict::Divergent;
    v.cauchy_gaps = std::move(gaps);
    v.cauchy_decreasing = !v.cauchy_gaps.empty();
    for (std::size_t i = 1; i < v.cauchy_gaps.size(); ++i)
      if (!(v.cauchy_gaps[i] < v.cauchy_gaps[i - 1])) v.cauchy_decreasing = false;
    return v;
  };

  // Q's n = 0 term and truncation do not affect the fit window.
  rep.series.push_back(make("Q", cq, gaps_2d(cq)));
  rep.series.push_back(make("K", ck, gaps_k()));
  rep.series.push_back(make("P11", cp, gaps_2d(cp)));
  return rep;
}

}  // namespace wavelqr
