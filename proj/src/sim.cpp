#include "wavelqr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "wavelqr/spectrum.hpp"

namespace wavelqr {

namespace {

int even_steps(double T, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(T >= 0.0)) throw ConfigError("horizon must be nonnegative");
  int steps = int(std::ceil(T / dt - 1e-9));
  if (steps % 2) ++steps;
  return std::max(steps, 2);
}

ModalState zero_like(Boundary b, int N) {
  ModalState s;
  s.boundary = b;
  s.first = first_mode(b);
  s.a.assign(std::max(0, N - s.first + 1), Eigen::Vector2d::Zero());
  return s;
}

ModalState unstack(const Eigen::VectorXd& v, Boundary b, int first, double t) {
  ModalState s;
  s.boundary = b;
  s.first = first;
  s.t = t;
  s.a.resize(v.size() / 2);
  for (std::size_t k = 0; k < s.a.size(); ++k) s.a[k] = v.segment<2>(2 * k);
  return s;
}

// Running composite Simpson over samples spaced h: after an even number of
// panels the value is the Simpson sum, after an odd number it adds a trapezoid
// over the last panel. The value never decreases, so accumulated costs of
// nonnegative integrands stay monotone.
class SimpsonAccumulator {
 public:
  explicit SimpsonAccumulator(double h) : h_(h) {}

  void add(double f) {
    if (count_ >= 2 && count_ % 2 == 0) even_ += h_ / 3.0 * (f2_ + 4.0 * f1_ + f);
    f2_ = f1_;
    f1_ = f;
    ++count_;
    const double v = (count_ - 1) % 2 == 0 ? even_ : even_ + 0.5 * h_ * (f2_ + f1_);
    value_ = std::max(value_, v);
  }
  double value() const { return value_; }

 private:
  double h_;
  long count_ = 0;
  double f1_ = 0.0, f2_ = 0.0, even_ = 0.0, value_ = 0.0;
};

std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
  std::vector<double> c;
  c.reserve(f.size());
  SimpsonAccumulator acc(h);
  for (double v : f) {
    acc.add(v);
    c.push_back(acc.value());
  }
  return c;
}

}  // namespace

Eigen::Vector2d ModalState::mode(int n) const {
  const int k = n - first;
  if (k < 0 || k >= int(a.size())) return Eigen::Vector2d::Zero();
  return a[k];
}

Eigen::VectorXd ModalState::stacked() const {
  Eigen::VectorXd v(2 * a.size());
  for (std::size_t k = 0; k < a.size(); ++k) v.segment<2>(2 * k) = a[k];
  return v;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& A, double t) {
  const Eigen::MatrixXd At = A * t;
  return At.exp();
}

ModalState project_initial(const ScalarFn& z1, const ScalarFn& z2, int N, Boundary b, int panels) {
  if (panels < 2 || panels % 2) throw ConfigError("project_initial: panels must be even");
  ModalState s = zero_like(b, N);
  const double h = 1.0 / panels;
  std::vector<double> x(panels + 1), f1(panels + 1), f2(panels + 1), w(panels + 1);
  for (int i = 0; i <= panels; ++i) {
    x[i] = i * h;
    f1[i] = z1(x[i]);
    f2[i] = z2(x[i]);
    w[i] = (i == 0 || i == panels) ? h / 3.0 : (i % 2 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
  }
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const int n = s.first + int(k);
    double c1 = 0.0, c2 = 0.0;
    for (int i = 0; i <= panels; ++i) {
      const double p = w[i] * basis(b, n, x[i]);
      c1 += p * f1[i];
      c2 += p * f2[i];
    }
    s.a[k] = Eigen::Vector2d(c1, c2) / basis_norm_sq(b, n);
  }
  return s;
}

ModalState project_samples(const FieldState& f, int N, Boundary b) {
  ModalState s = zero_like(b, N);
  s.t = f.t;
  const std::size_t G = f.x.size();
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const int n = s.first + int(k);
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i + 1 < G; ++i) {
      const double h = f.x[i + 1] - f.x[i];
      const double p0 = basis(b, n, f.x[i]), p1 = basis(b, n, f.x[i + 1]);
      c1 += 0.5 * h * (p0 * f.z1[i] + p1 * f.z1[i + 1]);
      c2 += 0.5 * h * (p0 * f.z2[i] + p1 * f.z2[i + 1]);
    }
    s.a[k] = Eigen::Vector2d(c1, c2) / basis_norm_sq(b, n);
  }
  return s;
}

FieldState reconstruct_field(const ModalState& s, const std::vector<double>& x) {
  FieldState f;
  f.t = s.t;
  f.x = x;
  f.z1.assign(x.size(), 0.0);
  f.z2.assign(x.size(), 0.0);
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const int n = s.first + int(k);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = basis(s.boundary, n, x[i]);
      f.z1[i] += s.a[k](0) * p;
      f.z2[i] += s.a[k](1) * p;
    }
  }
  return f;
}

SimResult target_solution(const WaveConfig& cfg, const ModalState& init, double T, double dt) {
  const Boundary b = cfg.boundary();
  const int steps = even_steps(T, dt);
  const double h = T / steps;
  SimResult res;
  res.scheme = "open-loop-modal";
  res.dt = h;
  res.size = int(init.a.size());

  std::vector<Eigen::Matrix2d> step(init.a.size());
  for (std::size_t k = 0; k < init.a.size(); ++k)
    step[k] = expm(modal_matrices(cfg, ModeIndex(init.first + int(k), b)).F, h);

  ModalState cur = init;
  cur.boundary = b;
  for (int i = 0; i <= steps; ++i) {
    cur.t = i * h;
    res.times.push_back(cur.t);
    res.modal.push_back(cur);
    res.u.push_back(0.0);
    res.cost.push_back(0.0);
    for (std::size_t k = 0; k < cur.a.size(); ++k) cur.a[k] = step[k] * cur.a[k];
  }
  return res;
}

SimResult simulate_decoupled(const WaveConfig& cfg, const std::vector<ModalRiccati>& sols, const ModalState& state0,
                             double T, double dt, int record_every) {
  const Boundary b = cfg.boundary();
  const int steps = even_steps(T, dt);
  const double h = T / steps;
  const int every = std::max(1, record_every);

  struct Mode {
    int n;
    Eigen::Matrix2d step;
    Eigen::RowVector2d K;
    Eigen::RowVector2d readout;  // contribution to the shared field control
    Eigen::Matrix2d Q;
    Eigen::Vector2d a;
    SimpsonAccumulator cost;
  };
  std::vector<Mode> modes;
  for (const auto& s : sols) {
    const ModeIndex n(s.n, b);
    const ModalGain g = modal_gain(cfg, s);
    const TrueModalInput in = true_modal_input(cfg, n);
    modes.push_back({s.n, expm(closed_loop_matrix(cfg, s), h), g.K, in.proj_weight * in.field_sign * g.K,
                     s.weight.matrix(), state0.mode(s.n), SimpsonAccumulator(h)});
  }

  SimResult res;
  res.scheme = "decoupled-modal";
  res.dt = h;
  res.size = int(modes.size());
  SimpsonAccumulator total(h);
  for (int i = 0; i <= steps; ++i) {
    double run = 0.0, u = 0.0;
    for (auto& m : modes) {
      const double un = m.K * m.a;
      const double r = m.a.dot(m.Q * m.a) + cfg.R() * un * un;
      m.cost.add(r);
      run += r;
      u += m.readout * m.a;
    }
    total.add(run);
    if (i % every == 0 || i == steps) {
      ModalState st;
      st.boundary = b;
      st.t = i * h;
      st.first = sols.empty() ? first_mode(b) : sols.front().n;
      for (const auto& m : modes) st.a.push_back(m.a);
      res.times.push_back(st.t);
      res.modal.push_back(std::move(st));
      res.u.push_back(u);
      res.cost.push_back(total.value());
    }
    for (auto& m : modes) m.a = m.step * m.a;
  }
  for (const auto& m : modes) res.mode_costs.push_back(m.cost.value());
  return res;
}

SimResult simulate_coupled_modal(const WaveConfig& cfg, const WeightFamily& family, const std::vector<ModalGain>& gains,
                                 const ModalState& state0, int N, double T, double dt) {
  const Boundary b = cfg.boundary();
  const int steps = even_steps(T, dt);
  const double h = T / steps;
  const int n0 = first_mode(b);
  const int count = std::max(0, N - n0 + 1);

  const Eigen::MatrixXd A = coupled_closed_loop(cfg, gains, N);
  const Eigen::MatrixXd step = count > 0 ? expm(A, h) : Eigen::MatrixXd();
  Eigen::RowVectorXd readout = Eigen::RowVectorXd::Zero(2 * count);
  for (const auto& g : gains) {
    if (g.n < n0 || g.n > N) continue;
    const TrueModalInput in = true_modal_input(cfg, ModeIndex(g.n, b));
    readout.segment<2>(2 * (g.n - n0)) = in.proj_weight * in.field_sign * g.K;
  }
  Eigen::MatrixXd Qw = Eigen::MatrixXd::Zero(2 * count, 2 * count);
  for (int k = 0; k < count; ++k) {
    const ModeIndex n(n0 + k, b);
    const double w = true_modal_input(cfg, n).proj_weight;
    Qw.block<2, 2>(2 * k, 2 * k) = w * w * weight_of(family, n, b).matrix();
  }

  Eigen::VectorXd a(2 * count);
  for (int k = 0; k < count; ++k) a.segment<2>(2 * k) = state0.mode(n0 + k);

  SimResult res;
  res.scheme = "coupled-modal";
  res.dt = h;
  res.size = count;
  std::vector<double> running(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double u = count > 0 ? double(readout * a) : 0.0;
    running[i] = a.dot(Qw * a) + cfg.R() * u * u;
    res.times.push_back(i * h);
    res.modal.push_back(unstack(a, b, n0, i * h));
    res.u.push_back(u);
    if (count > 0) a = step * a;
  }
  res.cost = cumulative_simpson(running, h);
  return res;
}

SimResult simulate_fd(const WaveConfig& cfg, const WeightFamily& family, const GainProfile& gain, const ScalarFn& z1_0,
                      const ScalarFn& z2_0, const FdOptions& opts) {
  if (opts.M < 32) throw ConfigError("simulate_fd: M must be at least 32");
  if (!(opts.cfl > 0.0 && opts.cfl <= 1.0)) throw ConfigError("simulate_fd: CFL number must lie in (0, 1]");
  if (!(opts.T > 0.0)) throw ConfigError("simulate_fd: horizon must be positive");

  const Boundary b = cfg.boundary();
  const bool dirichlet = b == Boundary::Dirichlet;
  const int M = opts.M;
  const double h = 1.0 / M;
  const int steps = int(std::ceil(opts.T / (opts.cfl * h) - 1e-9));
  const double dt = opts.T / steps;
  const double beta = cfg.beta();
  const double alpha = cfg.alpha();

  std::vector<double> x(M + 1), tw(M + 1, h), K1(M + 1), K2(M + 1);
  tw.front() = tw.back() = 0.5 * h;
  for (int j = 0; j <= M; ++j) {
    x[j] = j * h;
    const Eigen::RowVector2d k = gain(x[j]);
    K1[j] = k(0);
    K2[j] = k(1);
  }

  // Running-cost kernel Q = sum_n Q^{n,n} phi_n(x1) phi_n(x2), evaluated through
  // the separable form: double trapezoid of z^T Q z equals sum_n b_n^T Q^{n,n} b_n
  // with b_n = trapezoid integral of z phi_n.
  struct CostMode {
    Eigen::Matrix2d Q;
    std::vector<double> wphi;
  };
  std::vector<CostMode> cost_modes;
  for (int n = first_mode(b); n <= opts.cost_modes; ++n) {
    const ModalWeight w = weight_of(family, ModeIndex(n, b), b);
    if (w.is_zero()) continue;
    CostMode cm{w.matrix(), std::vector<double>(M + 1)};
    for (int j = 0; j <= M; ++j) cm.wphi[j] = tw[j] * basis(b, n, x[j]);
    cost_modes.push_back(std::move(cm));
  }

  auto control = [&](const std::vector<double>& z1, const std::vector<double>& z2) {
    double u = 0.0;
    for (int j = 0; j <= M; ++j) u += tw[j] * (K1[j] * z1[j] + K2[j] * z2[j]);
    return u;
  };
  auto running_cost = [&](const std::vector<double>& z1, const std::vector<double>& z2, double u) {
    double c = cfg.R() * u * u;
    for (const auto& cm : cost_modes) {
      Eigen::Vector2d bn = Eigen::Vector2d::Zero();
      for (int j = 0; j <= M; ++j) bn += cm.wphi[j] * Eigen::Vector2d(z1[j], z2[j]);
      c += bn.dot(cm.Q * bn);
    }
    return c;
  };
  auto energy = [&](const std::vector<double>& z1, const std::vector<double>& z2) {
    double e = 0.0;
    for (int j = 0; j <= M; ++j) e += 0.5 * tw[j] * z2[j] * z2[j];
    for (int j = 0; j < M; ++j) {
      const double dz = (z1[j + 1] - z1[j]) / h;
      e += 0.5 * h * dz * dz;
    }
    return e;
  };
  // Second difference with the boundary control entering as `ub`.
  auto laplacian = [&](const std::vector<double>& z, double ub, std::vector<double>& out) {
    const double ih2 = 1.0 / (h * h);
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 1; j < M; ++j) out[j] = (z[j - 1] - 2.0 * z[j] + z[j + 1]) * ih2;
    if (dirichlet) {
      out[1] = (beta * ub - 2.0 * z[1] + z[2]) * ih2;
    } else {
      out[0] = (2.0 * z[1] - 2.0 * z[0]) * ih2;
      out[M] = (2.0 * z[M - 1] - 2.0 * z[M] + 2.0 * h * beta * ub) * ih2;
    }
  };

  SimResult res;
  res.scheme = "fd-leapfrog";
  res.dt = dt;
  res.size = M;
  auto record = [&](double t, const std::vector<double>& z1, const std::vector<double>& z2, double u, double cost) {
    res.times.push_back(t);
    res.field.push_back(FieldState{t, x, z1, z2});
    res.u.push_back(u);
    res.cost.push_back(cost);
    res.energy.push_back(energy(z1, z2));
  };

  std::vector<double> zprev(M + 1), zcur(M + 1), znext(M + 1), vel(M + 1), lap(M + 1);
  for (int j = 0; j <= M; ++j) {
    zprev[j] = z1_0(x[j]);
    vel[j] = z2_0(x[j]);
  }
  if (dirichlet) vel.back() = 0.0;
  double u_prev = control(zprev, vel);
  double cost = 0.0;
  double run_prev = running_cost(zprev, vel, u_prev);
  record(0.0, zprev, vel, u_prev, cost);

  // First step by Taylor expansion.
  laplacian(zprev, u_prev, lap);
  for (int j = 0; j <= M; ++j) zcur[j] = zprev[j] + dt * vel[j] + 0.5 * dt * dt * (lap[j] - alpha * vel[j]);
  if (dirichlet) zcur.back() = 0.0;

  const double c = 1.0 / (1.0 + 0.5 * alpha * dt);
  const double back = 1.0 - 0.5 * alpha * dt;
  // Response of z^{k+1} to a unit boundary control at step k.
  const int e_node = dirichlet ? 1 : M;
  const double e_val = dirichlet ? c * dt * dt * beta / (h * h) : c * dt * dt * 2.0 * beta / h;
  const double inv2dt = 1.0 / (2.0 * dt);
  const int every = opts.record_every > 0 ? opts.record_every : steps;

  for (int k = 1; k <= steps; ++k) {
    laplacian(zcur, 0.0, lap);
    for (int j = 0; j <= M; ++j) znext[j] = c * (2.0 * zcur[j] - back * zprev[j] + dt * dt * lap[j]);
    if (dirichlet) znext.front() = znext.back() = 0.0;

    // u^k = known + u^k * (coefficient through z1^k(0) and z2^k at e_node).
    double known = 0.0;
    for (int j = 0; j <= M; ++j) {
      if (dirichlet && j == 0) continue;
      known += tw[j] * (K1[j] * zcur[j] + K2[j] * (znext[j] - zprev[j]) * inv2dt);
    }
    double self = tw[e_node] * K2[e_node] * e_val * inv2dt;
    if (dirichlet) self += tw[0] * K1[0] * beta;
    if (std::abs(1.0 - self) < 1e-12) throw NumericalError("simulate_fd: singular implicit control update");
    const double u = known / (1.0 - self);

    znext[e_node] += u * e_val;
    if (dirichlet) zcur.front() = beta * u;
    for (int j = 0; j <= M; ++j) vel[j] = (znext[j] - zprev[j]) * inv2dt;
    if (dirichlet) {
      vel.front() = beta * (u - u_prev) / dt;
      vel.back() = 0.0;
    }

    const double run = running_cost(zcur, vel, u);
    cost += 0.5 * dt * (run_prev + run);
    run_prev = run;
    u_prev = u;
    if (!std::isfinite(u) || !std::isfinite(zcur[M / 2]))
      throw NumericalError("simulate_fd: non-finite state at step " + std::to_string(k));
    if (k % every == 0 || k == steps) record(k * dt, zcur, vel, u, cost);

    std::swap(zprev, zcur);
    std::swap(zcur, znext);
  }
  return res;
}

PredictedCost predicted_cost(const ModalState& state0, const std::vector<ModalRiccati>& sols) {
  PredictedCost pc;
  for (const auto& s : sols) {
    const Eigen::Vector2d a = state0.mode(s.n);
    const double q = a.dot(s.P * a);
    const double w = basis_norm_sq(state0.boundary, s.n);
    pc.modal_frame += q;
    pc.field_frame += w * w * q;
  }
  return pc;
}

double infinite_horizon_T(double abscissa, double tol) {
  if (!(abscissa < 0.0)) throw NumericalError("infinite-horizon cost needs a strictly stable closed loop");
  return std::log(tol) / (2.0 * abscissa);
}

double relative_l2(const FieldState& a, const FieldState& b) {
  if (a.x.size() != b.x.size()) throw std::invalid_argument("relative_l2: grid mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < b.x.size(); ++i) {
    const double h = b.x[i + 1] - b.x[i];
    for (std::size_t j : {i, i + 1}) {
      const double d1 = a.z1[j] - b.z1[j], d2 = a.z2[j] - b.z2[j];
      num += 0.5 * h * (d1 * d1 + d2 * d2);
      den += 0.5 * h * (b.z1[j] * b.z1[j] + b.z2[j] * b.z2[j]);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace wavelqr
