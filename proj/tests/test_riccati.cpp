#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "wavelqr/kernels.hpp"
#include "wavelqr/riccati.hpp"

using namespace wavelqr;
using oracle::pi;

namespace {

ModalWeight identity_weight(int n) { return {n, 1.0, 0.0, 1.0}; }

Eigen::MatrixXd oracle_P(const WaveConfig& cfg, const ModalWeight& w) {
  const ModalSystem s = modal_matrices(cfg, ModeIndex(w.n, cfg.boundary()));
  Eigen::MatrixXd R(1, 1);
  R(0, 0) = cfg.R();
  return are_oracle(s.F, s.G, w.matrix(), R).P;
}

}  // namespace

// Values computed independently with a dense Hamiltonian ARE solver.
TEST(ClosedForm, DirichletFirstModeFrozen) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.0, 1.0, 1.0);
  const ModalRiccati s = solve_closed_form(cfg, identity_weight(1));
  EXPECT_NEAR(s.P11(), 3.45606112, 1e-8);
  EXPECT_NEAR(s.P12(), 0.04943851, 1e-8);
  EXPECT_NEAR(s.P21(), 0.04943851, 1e-8);
  EXPECT_NEAR(s.P22(), 0.33367577, 1e-8);
  const ModalGain g = modal_gain(cfg, s);
  EXPECT_NEAR(g.K(0), -0.15531566, 1e-8);
  EXPECT_NEAR(g.K(1), -1.04827335, 1e-8);
  EXPECT_LE(s.residual_max, kResidualTol);
}

TEST(ClosedForm, NeumannZeroModeExact) {
  const WaveConfig cfg(Boundary::Neumann, 0.0, 1.0, 1.0);
  const ModalRiccati s = solve_closed_form(cfg, identity_weight(0));
  EXPECT_NEAR(s.P12(), 1.0, 1e-15);
  EXPECT_NEAR(s.P22(), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(s.P11(), std::sqrt(3.0), 1e-15);
  for (double r : s.residuals) EXPECT_NEAR(r, 0.0, 1e-15);
}

TEST(ClosedForm, ZeroWeightUndampedGivesZero) {
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann}) {
    const WaveConfig cfg(b, 0.0, 1.0, 1.0);
    const ModalRiccati s = solve_closed_form(cfg, ModalWeight{2});
    EXPECT_EQ(s.P, Eigen::Matrix2d::Zero());
    EXPECT_EQ(modal_gain(cfg, s).K, Eigen::RowVector2d::Zero());
  }
}

TEST(ClosedForm, ResidualsSmallAcrossParameters) {
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann})
    for (double alpha : {0.0, 0.7})
      for (double beta : {0.5, -2.0})
        for (double R : {0.3, 4.0}) {
          const WaveConfig cfg(b, alpha, beta, R);
          for (int n = first_mode(b); n <= 300; n += 7) {
            const ModalWeight w{n, 3.0 / std::pow(std::max(n, 1), 4.5), 0.1 / std::pow(std::max(n, 1), 5.0),
                                2.0 / std::pow(std::max(n, 1), 4.5)};
            const ModalRiccati s = solve_closed_form(cfg, w);
            EXPECT_LE(s.residual_max, kResidualTol) << to_string(b) << " n=" << n;
            EXPECT_TRUE(is_psd(s.P));
          }
        }
}

TEST(ClosedForm, RejectsIndefiniteWeight) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.0, 1.0, 1.0);
  EXPECT_THROW(solve_closed_form(cfg, ModalWeight{1, 1.0, 2.0, 1.0}), ConfigError);
}

TEST(RootChoice, OtherRootsAreNotStabilizingSolutions) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.0, 1.0, 1.0);
  const ModalWeight w = identity_weight(1);
  const Eigen::Matrix2d plus = solve_with_roots(cfg, w, RootSign::Plus, RootSign::Plus);
  EXPECT_LE((plus - solve_closed_form(cfg, w).P).cwiseAbs().maxCoeff(), 1e-12);
  for (auto [s12, s22] : {std::pair{RootSign::Minus, RootSign::Plus}, std::pair{RootSign::Plus, RootSign::Minus},
                          std::pair{RootSign::Minus, RootSign::Minus}}) {
    const Eigen::Matrix2d P = solve_with_roots(cfg, w, s12, s22);
    const bool nan = !P.allFinite();
    EXPECT_TRUE(nan || !is_psd(P)) << "roots " << int(s12) << int(s22);
  }
}

TEST(Oracle, ScalarAre) {
  Eigen::MatrixXd F(1, 1), G(1, 1), Q(1, 1), R(1, 1);
  F << 1.0;
  G << 2.0;
  Q << 3.0;
  R << 0.5;
  const AreSolution s = are_oracle(F, G, Q, R);
  EXPECT_NEAR(s.P(0, 0), oracle::scalar_are(1.0, 2.0, 3.0, 0.5), 1e-13);
}

TEST(Oracle, ThreeStateResidual) {
  Eigen::MatrixXd F(3, 3), G(3, 1), Q = Eigen::MatrixXd::Identity(3, 3), R(1, 1);
  F << 0, 1, 0, 0, 0, 1, -1, -2, 0.5;
  G << 0, 0, 1;
  R << 2.0;
  const AreSolution s = are_oracle(F, G, Q, R);
  const Eigen::MatrixXd res = F.transpose() * s.P + s.P * F - s.P * G * R.inverse() * G.transpose() * s.P + Q;
  EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.P).eigenvalues().minCoeff(), 0.0);
  const Eigen::MatrixXd Acl = F - G * R.inverse() * G.transpose() * s.P;
  EXPECT_LT(Eigen::EigenSolver<Eigen::MatrixXd>(Acl).eigenvalues().real().maxCoeff(), 0.0);
}

TEST(Oracle, RejectsUnstabilizableProblem) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.0, 1.0, 1.0);
  const ModalSystem s = modal_matrices(cfg, ModeIndex(1, Boundary::Dirichlet));
  Eigen::MatrixXd R(1, 1);
  R << 1.0;
  EXPECT_THROW(are_oracle(s.F, Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), R), AreError);
}

TEST(Oracle, AgreesWithClosedForm) {
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann})
    for (double alpha : {0.0, 1.0}) {
      const WaveConfig cfg(b, alpha, 2.0, 0.5);
      for (int n : {first_mode(b), 1, 3, 17, 120}) {
        const ModalWeight w{n, 10.0 / std::pow(n + 1.0, 2.5), 0.0, 10.0 / std::pow(n + 1.0, 2.5)};
        const ModalRiccati s = solve_closed_form(cfg, w);
        const Eigen::MatrixXd Po = oracle_P(cfg, w);
        EXPECT_LE((Po - s.P).cwiseAbs().maxCoeff(), 1e-8 * Po.cwiseAbs().maxCoeff()) << to_string(b) << " n=" << n;
      }
    }
}

TEST(Lyapunov, SolvesContinuousEquation) {
  Eigen::MatrixXd A(2, 2), C(2, 2);
  A << -1, 2, -3, -0.5;
  C << 2, 0.3, 0.3, 1;
  const Eigen::MatrixXd X = solve_lyapunov(A, C);
  EXPECT_LE((A.transpose() * X + X * A + C).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Family, SolvesEveryModeUpToN) {
  const WaveConfig d(Boundary::Dirichlet, 0.0, 1.0, 1.0);
  const auto fam = WeightFamily::power_law(1.0, 5.0, 64);
  const auto sd = solve_family(d, fam, 64);
  ASSERT_EQ(sd.size(), 64u);
  EXPECT_EQ(sd.front().n, 1);
  const auto sn = solve_family(d.with_boundary(Boundary::Neumann), fam, 64);
  ASSERT_EQ(sn.size(), 65u);
  EXPECT_EQ(sn.front().n, 0);
  EXPECT_TRUE(solve_family(d, fam, 0).empty());
}

// Coefficient decay rates of the closed forms. For Neumann P12 the true rate is
// n^-(r+2): P12 ~ gamma^2 q / (2 n^(r+4) pi^4) * n^2 pi^2 / gamma^2.
TEST(Asymptotics, FittedExponents) {
  struct Case {
    Boundary b;
    double r;
    double p12, p22, p11;
  };
  for (const Case c : {Case{Boundary::Dirichlet, 5.0, -7.0, -3.5, -1.5}, Case{Boundary::Neumann, 7.0, -9.0, -3.5, -1.5}}) {
    const WaveConfig cfg(c.b, 0.0, 1.0, 1.0);
    const auto sols = solve_family(cfg, WeightFamily::power_law(1.0, c.r, 500), 500);
    std::vector<int> ns;
    std::vector<double> p11, p12, p22;
    for (const auto& s : sols)
      if (s.n >= 50) {
        ns.push_back(s.n);
        p11.push_back(std::abs(s.P11()));
        p12.push_back(std::abs(s.P12()));
        p22.push_back(std::abs(s.P22()));
      }
    EXPECT_NEAR(decay_fit(ns, p12), c.p12, 0.1) << to_string(c.b);
    EXPECT_NEAR(decay_fit(ns, p22), c.p22, 0.1) << to_string(c.b);
    EXPECT_NEAR(decay_fit(ns, p11), c.p11, 0.1) << to_string(c.b);
  }
}

TEST(CoupledAre, SingleActiveModeReducesToClosedForm) {
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann}) {
    const WaveConfig cfg(b, 0.0, 1.0, 1.0);
    const auto fam = WeightFamily::explicit_list({{2, ModalWeight{2, 1.0, 0.0, 1.0}}}, 6);
    const CoupledAre ca = coupled_truncated_are(cfg, fam, 6);
    EXPECT_LE(ca.P_deviation, 1e-9) << to_string(b);
    EXPECT_LE(ca.K_deviation, 1e-9) << to_string(b);
  }
}

TEST(CoupledAre, SharedControlCouplesModes) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.0, 1.0, 1.0);
  const CoupledAre ca = coupled_truncated_are(cfg, WeightFamily::power_law(1.0, 5.0, 4), 4);
  EXPECT_EQ(ca.modes.size(), 4u);
  EXPECT_GT(ca.P_deviation, 1e-6);
  const Eigen::MatrixXd sym = ca.P_big - ca.P_big.transpose();
  EXPECT_LE(sym.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(AreOracleExamples, ScalarIntegratorAndZeroWeight) {
  Eigen::MatrixXd F(1, 1), G(1, 1), Q(1, 1), R(1, 1);
  F << 0.0;
  G << 1.0;
  Q << 1.0;
  R << 1.0;
  EXPECT_NEAR(are_oracle(F, G, Q, R).P(0, 0), 1.0, 1e-12);
  F << -2.0;
  Q << 0.0;
  EXPECT_NEAR(are_oracle(F, G, Q, R).P(0, 0), 0.0, 1e-12);
}

TEST(ModalGainExamples, NeumannRigidMode) {
  const WaveConfig cfg(Boundary::Neumann, 0.0, 1.0, 1.0);
  const ModalRiccati s = solve_closed_form(cfg, ModalWeight{0, 1.0, 0.0, 1.0});
  const ModalGain g = modal_gain(cfg, s);
  EXPECT_NEAR(g.K(0), -1.0, 1e-14);
  EXPECT_NEAR(g.K(1), -std::sqrt(3.0), 1e-14);
}

TEST(CoupledAre, AllZeroWeightsGiveZeroSolution) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.5, 1.0, 1.0);
  const CoupledAre ca = coupled_truncated_are(cfg, WeightFamily::explicit_list({}, 4), 4);
  EXPECT_TRUE(ca.P_big.size() == 0 || ca.P_big.cwiseAbs().maxCoeff() == 0.0);
  EXPECT_EQ(ca.P_deviation, 0.0);
}

TEST(CoupledAre, DirichletPowerLawRegression) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.0, 1.0, 1.0);
  const CoupledAre ca = coupled_truncated_are(cfg, WeightFamily::power_law(1.0, 5.0, 4), 4);
  EXPECT_NEAR(ca.P_deviation, 0.63376342960563614, 1e-9);
  EXPECT_NEAR(ca.K_deviation, 0.74862828615200228, 1e-9);
}
