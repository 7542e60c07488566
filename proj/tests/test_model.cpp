#include <cmath>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "wavelqr/model.hpp"

using namespace wavelqr;
using oracle::pi;

TEST(WaveConfig, RejectsInvalidParameters) {
  EXPECT_THROW(WaveConfig(Boundary::Dirichlet, 0.0, 1.0, 0.0), ConfigError);
  EXPECT_THROW(WaveConfig(Boundary::Dirichlet, 0.0, 1.0, -1.0), ConfigError);
  EXPECT_THROW(WaveConfig(Boundary::Dirichlet, -0.1, 1.0, 1.0), ConfigError);
  EXPECT_THROW(WaveConfig(Boundary::Neumann, 0.0, 0.0, 1.0), ConfigError);
  EXPECT_THROW(WaveConfig(Boundary::Neumann, NAN, 1.0, 1.0), ConfigError);
  EXPECT_NO_THROW(WaveConfig(Boundary::Neumann, 0.0, -2.0, 1.0));
}

TEST(WaveConfig, GammaSquared) {
  const WaveConfig cfg(Boundary::Dirichlet, 0.3, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(cfg.gamma_sq(), 8.0);
  EXPECT_EQ(cfg.with_boundary(Boundary::Neumann).boundary(), Boundary::Neumann);
  EXPECT_DOUBLE_EQ(cfg.with_boundary(Boundary::Neumann).alpha(), 0.3);
}

TEST(Boundary, StringRoundTrip) {
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann}) EXPECT_EQ(boundary_from_string(to_string(b)), b);
  EXPECT_THROW(boundary_from_string("robin"), ConfigError);
}

TEST(ModeIndex, RangeDependsOnBoundary) {
  EXPECT_THROW(ModeIndex(0, Boundary::Dirichlet), ConfigError);
  EXPECT_NO_THROW(ModeIndex(0, Boundary::Neumann));
  EXPECT_THROW(ModeIndex(-1, Boundary::Neumann), ConfigError);
}

TEST(WeightFamily, PowerLawValues) {
  const auto fam = WeightFamily::power_law(2.0, 3.0, 10);
  const ModalWeight w = weight_of(fam, ModeIndex(2, Boundary::Dirichlet), Boundary::Dirichlet);
  EXPECT_DOUBLE_EQ(w.Q11, 0.25);
  EXPECT_DOUBLE_EQ(w.Q22, 0.25);
  EXPECT_DOUBLE_EQ(w.Q12, 0.0);
  EXPECT_TRUE(weight_of(fam, ModeIndex(11, Boundary::Dirichlet), Boundary::Dirichlet).is_zero());
  const ModalWeight w0 = weight_of(fam, ModeIndex(0, Boundary::Neumann), Boundary::Neumann);
  EXPECT_DOUBLE_EQ(w0.Q11, 2.0);
  EXPECT_DOUBLE_EQ(w0.Q22, 2.0);
}

TEST(WeightFamily, ExplicitListAndValidation) {
  ModalWeight w{3, 1.0, 0.5, 2.0};
  const auto fam = WeightFamily::explicit_list({{3, w}}, 5);
  EXPECT_DOUBLE_EQ(weight_of(fam, ModeIndex(3, Boundary::Dirichlet), Boundary::Dirichlet).Q12, 0.5);
  EXPECT_TRUE(weight_of(fam, ModeIndex(2, Boundary::Dirichlet), Boundary::Dirichlet).is_zero());
  EXPECT_THROW(WeightFamily::explicit_list({{1, ModalWeight{1, 1.0, 2.0, 1.0}}}, 5), ConfigError);
  EXPECT_THROW(WeightFamily::power_law(-1.0, 3.0, 5), ConfigError);
}

TEST(ModalMatrices, Structure) {
  const WaveConfig d(Boundary::Dirichlet, 0.5, 2.0, 1.0);
  const ModalSystem s = modal_matrices(d, ModeIndex(3, Boundary::Dirichlet));
  EXPECT_DOUBLE_EQ(s.F(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.F(1, 0), -9.0 * pi * pi);
  EXPECT_DOUBLE_EQ(s.F(1, 1), -0.5);
  EXPECT_DOUBLE_EQ(s.G(1), 3.0 * pi * 2.0);
  const ModalSystem n = modal_matrices(d.with_boundary(Boundary::Neumann), ModeIndex(3, Boundary::Neumann));
  EXPECT_DOUBLE_EQ(n.G(1), 2.0);
}

// Integrate z_xx phi_n by quadrature for a field that carries the boundary input,
// and compare with -n^2 pi^2 a_n + G_true u from the modal input model.
TEST(TrueModalInput, MatchesQuadratureOfBoundaryTerm) {
  const double beta = 1.7, u = 0.3;
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann}) {
    const WaveConfig cfg(b, 0.0, beta, 1.0);
    // Dirichlet: z(0) = beta u, z(1) = 0. Neumann: z_x(0) = 0, z_x(1) = beta u.
    auto z = [&](double x) {
      return b == Boundary::Dirichlet ? beta * u * (1 - x) * (1 - x) * (1 + x) + 0.2 * std::sin(3 * pi * x) * x
                                      : beta * u * x * x / 2.0 + 0.4 * std::cos(2 * pi * x) + x * x * x * (1 - x) * (1 - x);
    };
    auto zxx = [&](double x) {
      const double h = 1e-3;
      return (z(x + h) - 2 * z(x) + z(x - h)) / (h * h);
    };
    for (int n = first_mode(b); n <= 6; ++n) {
      auto phi = [&](double x) { return b == Boundary::Dirichlet ? std::sin(n * pi * x) : std::cos(n * pi * x); };
      const double norm = n == 0 ? 1.0 : 0.5;
      const double an = oracle::simpson([&](double x) { return z(x) * phi(x); }, 0, 1) / norm;
      const double lhs = oracle::simpson([&](double x) { return zxx(x) * phi(x); }, 0, 1) / norm;
      const TrueModalInput tm = true_modal_input(cfg, ModeIndex(n, b));
      EXPECT_NEAR(lhs, -n * n * pi * pi * an + tm.G_true(1) * u, 1e-4) << to_string(b) << " n=" << n;
      EXPECT_DOUBLE_EQ(tm.proj_weight, norm);
      EXPECT_DOUBLE_EQ(basis_norm_sq(b, n), norm);
    }
  }
}

TEST(TrueModalInput, ReconcilesWithModelInput) {
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann}) {
    const WaveConfig cfg(b, 0.1, 1.3, 0.7);
    for (int n = first_mode(b); n <= 5; ++n) {
      const TrueModalInput tm = true_modal_input(cfg, ModeIndex(n, b));
      const ModalSystem s = modal_matrices(cfg, ModeIndex(n, b));
      EXPECT_NEAR(tm.proj_weight * tm.G_true(1) * tm.field_sign, s.G(1), 1e-14);
    }
  }
}

TEST(Basis, Derivatives) {
  for (Boundary b : {Boundary::Dirichlet, Boundary::Neumann})
    for (int n = first_mode(b); n <= 4; ++n)
      for (double x : {0.1, 0.37, 0.9}) {
        const double h = 1e-6;
        EXPECT_NEAR(basis_dx(b, n, x), (basis(b, n, x + h) - basis(b, n, x - h)) / (2 * h), 1e-6);
      }
}
