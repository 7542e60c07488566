#include "wavelqr/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#include "CLI11.hpp"
#include "wavelqr/io.hpp"
#include "wavelqr/kernels.hpp"
#include "wavelqr/riccati.hpp"
#include "wavelqr/sim.hpp"
#include "wavelqr/spectrum.hpp"

namespace wavelqr::cli {

namespace {

using nlohmann::json;
using std::numbers::pi;
namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json verdict_json(const SeriesVerdict& v) {
  return {{"series", v.series},
          {"threshold_r", v.threshold},
          {"theory", to_string(v.theory)},
          {"fitted_exponent", v.fitted_exponent},
          {"fitted", to_string(v.fitted)},
          {"agrees_with_theory", v.theory == v.fitted},
          {"cauchy_gaps", v.cauchy_gaps},
          {"cauchy_decreasing", v.cauchy_decreasing}};
}

json report_json(const ConvergenceReport& rep) {
  json series = json::array();
  for (const auto& s : rep.series) series.push_back(verdict_json(s));
  return {{"boundary", to_string(rep.boundary)}, {"r", rep.r}, {"N_list", rep.N_list}, {"series", series}};
}

ModalState initial_state(const RunConfig& rc, int N) {
  ModalState s;
  s.boundary = rc.wave.boundary();
  s.first = first_mode(s.boundary);
  s.a.assign(std::max(0, N - s.first + 1), Eigen::Vector2d::Zero());
  for (const auto& m : rc.sim.initial)
    if (m.n <= N) s.a[m.n - s.first] += Eigen::Vector2d(m.z1, m.z2);
  return s;
}

// 1/2 integral(z2^2 + z1_x^2) for a modal state.
double modal_energy(const ModalState& s) {
  double e = 0.0;
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const int n = s.first + int(k);
    e += 0.5 * basis_norm_sq(s.boundary, n) * (s.a[k](1) * s.a[k](1) + n * n * pi * pi * s.a[k](0) * s.a[k](0));
  }
  return e;
}

void write_json(const fs::path& path, const json& j) { write_text(path, dump_json(j)); }

}  // namespace

bool VerifyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || !c.hard; });
}

json VerifyReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) {
    json j = {{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"hard", c.hard}};
    if (!c.note.empty()) j["note"] = c.note;
    cs.push_back(j);
  }
  return {{"pass", pass()}, {"checks", cs}, {"warnings", warnings}};
}

VerifyReport verify(const RunConfig& rc, const CommandOptions& opts) {
  const WaveConfig& cfg = rc.wave;
  const Boundary b = cfg.boundary();
  std::vector<ModalRiccati> sols = solve_family(cfg, rc.family, rc.N);
  if (opts.perturb_p12)
    for (auto& s : sols) {
      s.P(0, 1) += *opts.perturb_p12;
      s.P(1, 0) += *opts.perturb_p12;
    }

  VerifyReport rep;
  auto add = [&](std::string name, double measured, double tol, bool hard = true, std::string note = {}) {
    rep.checks.push_back({std::move(name), measured <= tol, measured, tol, hard, std::move(note)});
  };

  double res = 0.0, min_eig = kInf, oracle = 0.0, gain = 0.0, tracedet = 0.0;
  int skipped = 0;
  bool stability_ok = true;
  double printed_gap = 0.0;
  for (const auto& s : sols) {
    const ModeIndex n(s.n, b);
    const auto r = residuals(cfg, s.weight, s.P);
    for (double v : r) res = std::max(res, std::abs(v) / residual_scale(s.weight, s.P));
    min_eig = std::min(min_eig, min_eigenvalue(s.P));
    if (std::isnan(min_eigenvalue(s.P))) min_eig = -kInf;

    const ModalSystem sys = modal_matrices(cfg, n);
    const Eigen::RowVector2d expect = -(sys.G.transpose() * s.P) / cfg.R();
    gain = std::max(gain, (modal_gain(cfg, s).K - expect).cwiseAbs().maxCoeff() / std::max(1.0, expect.cwiseAbs().maxCoeff()));

    const bool axis_mode = cfg.alpha() == 0.0 || (b == Boundary::Neumann && s.n == 0);
    if (s.weight.is_zero() && axis_mode) {
      ++skipped;  // marginal: no stabilizing solution exists, P = 0 is accepted
    } else {
      try {
        Eigen::MatrixXd R(1, 1);
        R(0, 0) = cfg.R();
        const Eigen::MatrixXd Po = are_oracle(sys.F, sys.G, s.weight.matrix(), R).P;
        const double scale = std::max(Po.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        oracle = std::max(oracle, (Po - s.P).cwiseAbs().maxCoeff() / scale);
      } catch (const NumericalError&) {
        oracle = kInf;
      }
    }

    const ModePair mp = closed_loop_eigs(cfg, s);
    const double k2 = double(s.n) * s.n * pi * pi, g = cfg.gamma_sq();
    const bool dir = b == Boundary::Dirichlet;
    const double tr = -(cfg.alpha() + (dir ? k2 * g : g) * s.P22());
    const double det = dir ? k2 * (1.0 + g * s.P21()) : k2 + g * s.P21();
    tracedet = std::max({tracedet, rel((mp.mu_plus + mp.mu_minus).real(), tr), rel((mp.mu_plus * mp.mu_minus).real(), det)});
    // Damping alone cannot move the Neumann rigid mode (n = 0) off the origin.
    const bool rigid = b == Boundary::Neumann && s.n == 0;
    const bool expect_stable = s.weight.is_positive_definite() || (cfg.alpha() > 0.0 && !rigid);
    const bool expect_marginal = s.weight.is_zero() && (cfg.alpha() == 0.0 || rigid);
    if (expect_stable && mp.stability != Stability::Stable) stability_ok = false;
    if (expect_marginal && mp.stability != Stability::Marginal) stability_ok = false;

    const auto corrected = closed_loop_formula(cfg, s, EigFormula::Corrected);
    const auto printed = closed_loop_formula(cfg, s, EigFormula::AsPrinted);
    printed_gap = std::max(printed_gap, std::abs(corrected.first - printed.first));
  }

  add("modal_are_residual", res, kResidualTol);
  add("psd", std::max(0.0, -min_eig), kPsdTol);
  add("oracle_agreement", oracle, 1e-8, true,
      skipped ? std::to_string(skipped) + " marginal mode(s) with Q = 0 and an undamped open-loop eigenvalue skipped" : "");
  add("gain_identity", gain, 1e-12);
  add("closed_loop_trace_det", tracedet, 1e-10);
  add("closed_loop_stability", stability_ok ? 0.0 : 1.0, 0.0);

  const std::vector<double> grid = uniform_grid(rc.grid);
  const ResidualFields field = pde_residual(cfg, sols, rc.family, grid);
  const ResidualFields cross = pde_cross_terms(cfg, sols, grid);
  double struct_gap = 0.0, cross_max = cross.max_abs();
  for (int e = 0; e < 4; ++e)
    for (std::size_t i = 0; i < field.r[e].size(); ++i)
      struct_gap = std::max(struct_gap, std::abs(field.r[e][i] - cross.r[e][i]));
  add("pde_residual_structure", struct_gap / (1.0 + cross_max), 1e-8);

  std::vector<int> modes;
  for (const auto& s : sols) modes.push_back(s.n);
  double diag = 0.0;
  for (int e = 0; e < 4; ++e)
    for (double c : diagonal_coefficients(field.r[e], grid, b, modes)) diag = std::max(diag, std::abs(c));
  add("pde_diagonal_coefficients", diag / (1.0 + cross_max), 1e-8, true,
      "exact for trigonometric products when the grid has more than 4N intervals");

  // Symmetry P(a, b) = P(b, a)^T at seeded random pairs, summing the series directly.
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double sym = 0.0, pmax = 0.0;
  for (const auto& s : sols) pmax = std::max(pmax, s.P.cwiseAbs().maxCoeff());
  for (int k = 0; k < 100; ++k) {
    const double x1 = unit(rng), x2 = unit(rng);
    Eigen::Matrix2d ab = Eigen::Matrix2d::Zero(), ba = Eigen::Matrix2d::Zero();
    for (const auto& s : sols) {
      ab += s.P * basis(b, s.n, x1) * basis(b, s.n, x2);
      ba += s.P * basis(b, s.n, x2) * basis(b, s.n, x1);
    }
    sym = std::max(sym, (ab - ba.transpose()).cwiseAbs().maxCoeff());
  }
  add("kernel_symmetry", sym / (1.0 + pmax * double(sols.size())), 1e-14);

  const KernelField P = assemble_P(sols, b, grid);
  const std::size_t G = grid.size();
  if (b == Boundary::Dirichlet) {
    double edge = 0.0;
    for (std::size_t i = 0; i < G; ++i)
      for (std::size_t j : {std::size_t(0), G - 1}) {
        edge = std::max(edge, P.at(i, j).cwiseAbs().maxCoeff());
        edge = std::max(edge, P.at(j, i).cwiseAbs().maxCoeff());
      }
    add("kernel_dirichlet_boundary", edge / (1.0 + pmax * double(sols.size())), 1e-12);
  } else {
    // Second-order one-sided slope at x1 = 0 and x1 = 1 along every x2 sample;
    // its truncation error is bounded by h^2/3 max|P'''|.
    const double h = grid[1] - grid[0];
    double slope = 0.0, bound = 0.0;
    for (const auto& s : sols) bound += std::pow(s.n * pi, 3) * s.P.cwiseAbs().maxCoeff();
    for (std::size_t j = 0; j < G; ++j) {
      const Eigen::Matrix2d d0 = (-3.0 * P.at(0, j) + 4.0 * P.at(1, j) - P.at(2, j)) / (2.0 * h);
      const Eigen::Matrix2d d1 = (3.0 * P.at(G - 1, j) - 4.0 * P.at(G - 2, j) + P.at(G - 3, j)) / (2.0 * h);
      slope = std::max({slope, d0.cwiseAbs().maxCoeff(), d1.cwiseAbs().maxCoeff()});
    }
    add("kernel_neumann_slope", slope, h * h / 3.0 * bound + 1e-12);
  }

  const QField q = assemble_Q(rc.family, rc.N, {0.0, 0.5, 1.0}, b);
  if (q.warning) rep.warnings.push_back("Q series: " + *q.warning);
  if (b == Boundary::Dirichlet && printed_gap > 1e-8)
    rep.warnings.push_back("closed-loop eigenvalue formula with gamma^2 P21 under the radical differs from eig(F + G K) by up to " +
                           format_double(printed_gap) + "; eig(F + G K) is used");
  return rep;
}

int cmd_synth(const RunConfig& rc, const fs::path& out, std::ostream& log) {
  const auto sols = solve_family(rc.wave, rc.family, rc.N);
  CsvWriter csv(out / "synth.csv", {"n", "P11", "P12", "P22", "K1", "K2", "ReMu", "ImMu", "residual_max"});
  for (const auto& s : sols) {
    const ModalGain g = modal_gain(rc.wave, s);
    const ModePair mp = closed_loop_eigs(rc.wave, s);
    csv << s.n << s.P11() << s.P12() << s.P22() << g.K(0) << g.K(1) << mp.mu_plus.real() << mp.mu_plus.imag()
        << s.residual_max;
    csv.end_row();
  }
  log << "synth: " << sols.size() << " modes -> " << (out / "synth.csv").string() << "\n";
  return kOk;
}

int cmd_verify(const RunConfig& rc, const fs::path& out, const CommandOptions& opts, std::ostream& log) {
  const VerifyReport rep = verify(rc, opts);
  write_json(out / "verify.json", rep.to_json());
  for (const auto& c : rep.checks)
    log << (c.pass ? "PASS " : (c.hard ? "FAIL " : "WARN ")) << c.name << " measured=" << format_double(c.measured)
        << " tol=" << format_double(c.tolerance) << "\n";
  for (const auto& w : rep.warnings) log << "warning: " << w << "\n";
  return rep.pass() ? kOk : kVerifyFailed;
}

int cmd_spectrum(const RunConfig& rc, const fs::path& out, std::ostream& log) {
  const WaveConfig& cfg = rc.wave;
  const auto sols = solve_family(cfg, rc.family, rc.N);
  CsvWriter csv(out / "spectrum.csv", {"n", "ReLambdaPlus", "ImLambdaPlus", "ReLambdaMinus", "ImLambdaMinus",
                                       "ReMuPlus", "ImMuPlus", "ReMuMinus", "ImMuMinus", "class"});
  double gap = 0.0, per_mode_max = -kInf;
  for (const auto& s : sols) {
    const ModePair mp = closed_loop_eigs(cfg, s);
    csv << s.n << mp.lambda_plus.real() << mp.lambda_plus.imag() << mp.lambda_minus.real() << mp.lambda_minus.imag()
        << mp.mu_plus.real() << mp.mu_plus.imag() << mp.mu_minus.real() << mp.mu_minus.imag()
        << std::string(to_string(mp.stability));
    csv.end_row();
    if (s.n <= rc.coupled_N) per_mode_max = std::max(per_mode_max, mp.mu_plus.real());
    gap = std::max(gap, std::abs(closed_loop_formula(cfg, s, EigFormula::Corrected).first -
                                 closed_loop_formula(cfg, s, EigFormula::AsPrinted).first));
  }

  const int Nc = std::min(rc.N, rc.coupled_N);
  const auto coupled_sols = solve_family(cfg, rc.family, Nc);
  const CoupledSpectrum cs = coupled_spectrum(cfg, gains_of(cfg, coupled_sols), Nc);
  json eig = json::array();
  for (const auto& e : cs.eigenvalues) eig.push_back(complex_json(e));
  json summary = {{"boundary", to_string(cfg.boundary())},
                  {"modes", sols.size()},
                  {"printed_formula_max_gap", gap},
                  {"coupled",
                   {{"N", Nc},
                    {"abscissa", cs.eigenvalues.empty() ? 0.0 : cs.abscissa},
                    {"per_mode_max_re_mu", sols.empty() ? 0.0 : per_mode_max},
                    {"eigenvalues", eig}}}};
  try {
    const CoupledAre ca = coupled_truncated_are(cfg, rc.family, Nc);
    summary["coupled_are"] = {{"N", Nc}, {"P_deviation", ca.P_deviation}, {"K_deviation", ca.K_deviation}};
  } catch (const NumericalError& e) {
    summary["coupled_are"] = {{"N", Nc}, {"error", e.what()}};
  }
  write_json(out / "spectrum.json", summary);
  log << "spectrum: " << sols.size() << " modes, coupled abscissa " << format_double(cs.abscissa) << "\n";
  return kOk;
}

int cmd_kernels(const RunConfig& rc, const fs::path& out, std::ostream& log) {
  const WaveConfig& cfg = rc.wave;
  const auto sols = solve_family(cfg, rc.family, rc.N);
  const std::vector<double> grid = uniform_grid(rc.grid);
  const std::size_t G = grid.size();

  auto dump_field = [&](const fs::path& path, const KernelField& f, const std::array<std::string, 4>& names) {
    CsvWriter csv(path, {"x1", "x2", names[0], names[1], names[2], names[3]});
    for (std::size_t i = 0; i < G; ++i)
      for (std::size_t j = 0; j < G; ++j) {
        const auto& m = f.at(i, j);
        csv << grid[i] << grid[j] << m(0, 0) << m(0, 1) << m(1, 0) << m(1, 1);
        csv.end_row();
      }
  };
  const KernelField P = assemble_P(sols, cfg.boundary(), grid);
  dump_field(out / "kernel_P.csv", P, {"P11", "P12", "P21", "P22"});
  const QField Q = assemble_Q(rc.family, rc.N, grid, cfg.boundary());
  dump_field(out / "kernel_Q.csv", Q.field, {"Q11", "Q12", "Q21", "Q22"});

  const GainProfile K = assemble_K(sols, cfg, grid);
  {
    CsvWriter csv(out / "gain_K.csv", {"x", "K1", "K2"});
    for (std::size_t i = 0; i < G; ++i) {
      csv << grid[i] << K.values[i](0) << K.values[i](1);
      csv.end_row();
    }
  }
  const ResidualFields R = pde_residual(cfg, sols, rc.family, grid);
  {
    CsvWriter csv(out / "pde_residual.csv", {"x1", "x2", "r11", "r12", "r21", "r22"});
    for (std::size_t i = 0; i < G; ++i)
      for (std::size_t j = 0; j < G; ++j) {
        const std::size_t k = i * G + j;
        csv << grid[i] << grid[j] << R.r[0][k] << R.r[1][k] << R.r[2][k] << R.r[3][k];
        csv.end_row();
      }
  }
  json summary = {{"boundary", to_string(cfg.boundary())},
                  {"N", rc.N},
                  {"grid", rc.grid},
                  {"pde_residual_max", R.max_abs()},
                  {"Q_absolutely_summable", Q.absolutely_summable}};
  if (Q.warning) summary["warnings"] = json::array({*Q.warning});
  write_json(out / "kernels.json", summary);
  log << "kernels: " << G << "x" << G << " grid written\n";
  return kOk;
}

int cmd_simulate(const RunConfig& rc, const fs::path& out, std::ostream& log) {
  const WaveConfig& cfg = rc.wave;
  const Boundary b = cfg.boundary();
  const auto sols = solve_family(cfg, rc.family, rc.N);
  const auto gains = gains_of(cfg, sols);
  const ModalState s0 = initial_state(rc, rc.N);
  const double T = rc.sim.T;

  const SimResult dec = simulate_decoupled(cfg, sols, s0, T, rc.sim.dt);
  const SimResult cpl = simulate_coupled_modal(cfg, rc.family, gains, s0, rc.N, T, rc.sim.dt);

  const std::vector<double> fd_grid = uniform_grid(rc.sim.M + 1);
  const GainProfile K = assemble_K(sols, cfg, fd_grid);
  auto field_fn = [&](int comp) {
    return [&, comp](double x) {
      double v = 0.0;
      for (std::size_t k = 0; k < s0.a.size(); ++k) v += s0.a[k](comp) * basis(b, s0.first + int(k), x);
      return v;
    };
  };
  FdOptions fo;
  fo.M = rc.sim.M;
  fo.cfl = rc.sim.cfl;
  fo.T = T;
  fo.cost_modes = rc.N;
  const SimResult fd = simulate_fd(cfg, rc.family, K, field_fn(0), field_fn(1), fo);

  auto dump_modal = [&](const fs::path& path, const SimResult& r) {
    std::vector<std::string> header{"t", "u", "cost"};
    const ModalState& first = r.modal.front();
    for (std::size_t k = 0; k < first.a.size(); ++k) {
      const std::string n = std::to_string(first.first + int(k));
      header.push_back("a" + n + "_1");
      header.push_back("a" + n + "_2");
    }
    CsvWriter csv(path, header);
    const std::size_t stride = std::max<std::size_t>(1, r.times.size() / 1000);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      if (i % stride && i + 1 != r.times.size()) continue;
      csv << r.times[i] << r.u[i] << r.cost[i];
      for (const auto& a : r.modal[i].a) csv << a(0) << a(1);
      csv.end_row();
    }
  };
  dump_modal(out / "sim_decoupled.csv", dec);
  dump_modal(out / "sim_coupled.csv", cpl);
  {
    CsvWriter csv(out / "sim_fd_field.csv", {"t", "x", "z1", "z2"});
    for (const auto& f : fd.field)
      for (std::size_t j = 0; j < f.x.size(); ++j) {
        csv << f.t << f.x[j] << f.z1[j] << f.z2[j];
        csv.end_row();
      }
  }

  const PredictedCost pc = predicted_cost(s0, sols);
  const FieldState coupled_T = reconstruct_field(cpl.modal.back(), fd_grid);
  json summary = {
      {"boundary", to_string(b)},
      {"T", T},
      {"decoupled",
       {{"cost", dec.cost.back()},
        {"predicted_cost_modal_frame", pc.modal_frame},
        {"ratio", pc.modal_frame > 0 ? dec.cost.back() / pc.modal_frame : 0.0},
        {"initial_energy", modal_energy(dec.modal.front())},
        {"terminal_energy", modal_energy(dec.modal.back())}}},
      {"coupled",
       {{"cost", cpl.cost.back()},
        {"predicted_cost_field_frame", pc.field_frame},
        {"initial_energy", modal_energy(cpl.modal.front())},
        {"terminal_energy", modal_energy(cpl.modal.back())}}},
      {"fd",
       {{"M", fd.size},
        {"dt", fd.dt},
        {"cost", fd.cost.back()},
        {"initial_energy", fd.energy.front()},
        {"terminal_energy", fd.energy.back()},
        {"relative_l2_vs_coupled_at_T", relative_l2(fd.field.back(), coupled_T)},
        {"relative_l2_projected_vs_coupled_at_T",
         relative_l2(reconstruct_field(project_samples(fd.field.back(), rc.N, b), fd_grid), coupled_T)}}}};
  write_json(out / "simulate.json", summary);
  log << "simulate: decoupled cost " << format_double(dec.cost.back()) << ", predicted "
      << format_double(pc.modal_frame) << "\n";
  return kOk;
}

int cmd_converge(const RunConfig& rc, const fs::path& out, std::ostream& log) {
  ConvergenceOptions co;
  co.fit_lo = rc.fit_lo;
  co.fit_hi = rc.fit_hi;
  const ConvergenceReport rep = convergence_report(rc.wave, rc.family, rc.N_list, co);
  write_json(out / "converge.json", report_json(rep));
  for (const auto& s : rep.series)
    log << s.series << ": theory " << to_string(s.theory) << ", fitted exponent " << format_double(s.fitted_exponent)
        << " (" << to_string(s.fitted) << ")\n";
  return kOk;
}

int cmd_compare_boundary(const RunConfig& rc, const fs::path& out, std::ostream& log) {
  if (!rc.family.is_power_law()) throw ConfigError("compare-boundary requires a power-law weight family");
  ConvergenceOptions co;
  co.fit_lo = rc.fit_lo;
  co.fit_hi = rc.fit_hi;
  const WaveConfig dir = rc.wave.with_boundary(Boundary::Dirichlet);
  const WaveConfig neu = rc.wave.with_boundary(Boundary::Neumann);
  const ConvergenceReport rd = convergence_report(dir, rc.family, rc.N_list, co);
  const ConvergenceReport rn = convergence_report(neu, rc.family, rc.N_list, co);

  const auto sd = solve_family(dir, rc.family, rc.N);
  const auto sn = solve_family(neu, rc.family, rc.N);
  CsvWriter csv(out / "damping.csv", {"n", "dirichlet_abs_re_mu", "neumann_abs_re_mu"});
  json damping = json::array();
  for (int n = 0; n <= rc.N; ++n) {
    const double d = n >= 1 ? std::abs(closed_loop_eigs(dir, sd[n - 1]).mu_plus.real()) : std::nan("");
    const double m = std::abs(closed_loop_eigs(neu, sn[n]).mu_plus.real());
    csv << n << d << m;
    csv.end_row();
  }
  json summary = {{"r", rc.family.power().r},
                  {"q", rc.family.power().q},
                  {"dirichlet", report_json(rd)},
                  {"neumann", report_json(rn)}};
  write_json(out / "compare.json", summary);
  log << "compare-boundary: P11 dirichlet " << to_string(rd.get("P11").fitted) << ", neumann "
      << to_string(rn.get("P11").fitted) << "\n";
  return kOk;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"synth",    "verify",   "spectrum",        "kernels",
                                              "simulate", "converge", "compare-boundary"};
  return names;
}

int run(const std::string& command, const RunConfig& rc, const fs::path& out, const CommandOptions& opts,
        std::ostream& log) {
  try {
    fs::create_directories(out);
    if (command == "synth") return cmd_synth(rc, out, log);
    if (command == "verify") return cmd_verify(rc, out, opts, log);
    if (command == "spectrum") return cmd_spectrum(rc, out, log);
    if (command == "kernels") return cmd_kernels(rc, out, log);
    if (command == "simulate") return cmd_simulate(rc, out, log);
    if (command == "converge") return cmd_converge(rc, out, log);
    if (command == "compare-boundary") return cmd_compare_boundary(rc, out, log);
    log << "error: unknown command '" << command << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    log << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"LQR boundary control synthesis and verification for the 1D wave equation"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  double perturb = 0.0;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    if (name == "verify")
      sub->add_option("--perturb-p12", perturb, "test hook: corrupt P12 of every mode before checking")
          ->group("");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  CommandOptions opts;
  if (command == "verify" && app.get_subcommands().front()->count("--perturb-p12")) opts.perturb_p12 = perturb;

  RunConfig rc;
  try {
    rc = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return run(command, rc, out_dir, opts, std::cerr);
}

}  // namespace wavelqr::cli
