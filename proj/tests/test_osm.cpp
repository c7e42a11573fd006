#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace osmprobe;
using namespace osmprobe::testing;

namespace {

DenseMatrix scalar(int n, double s) { return s * DenseMatrix::Identity(n, n); }

} // namespace

TEST(Osm, ExactTransmissionConvergesInOneIteration) {
  auto s = laplace_setup(20);
  OsmOptions o;
  o.tol = 1e-10;
  const auto r = run_osm(s.problem, s.problem.dense(2), s.problem.dense(1), random_vector(20, 5), o);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
}

TEST(Osm, ZeroDataZeroGuessStaysZero) {
  auto s = laplace_setup(10, with_forcing(PdeCoefficients::laplace(), [](double, double) { return 0.0; }));
  const Vector out = adi_step(s.problem, scalar(10, 5.0), scalar(10, 5.0), Vector::Zero(10));
  EXPECT_EQ(out.norm(), 0.0);
}

TEST(Osm, SineModeContractsByClosedFormFactor) {
  const int n_h = 30;
  auto s = laplace_setup(n_h);
  const DenseMatrix v = sine_basis(n_h);
  const double p = 17.0;
  for (int k : {1, 4, 30}) {
    const Vector x = v.col(k - 1);
    const double mu_k = x.dot(s.problem.dense(1) * x);
    const double factor = std::pow((p - mu_k) / (p + mu_k), 2);
    const Vector y = iteration_operator_apply(s.problem, scalar(n_h, p), scalar(n_h, p), x);
    EXPECT_LT((y - factor * x).norm(), 1e-10) << "k " << k;
  }
}

TEST(Osm, IterationOperatorIsLinear) {
  auto s = laplace_setup(15);
  const DenseMatrix t1 = scalar(15, 8.0), t2 = scalar(15, 30.0);
  const Vector a = random_vector(15, 1), b = random_vector(15, 2);
  const Vector lhs = iteration_operator_apply(s.problem, t1, t2, 2.0 * a - 0.5 * b);
  const Vector rhs = 2.0 * iteration_operator_apply(s.problem, t1, t2, a) - 0.5 * iteration_operator_apply(s.problem, t1, t2, b);
  EXPECT_LT((lhs - rhs).norm(), 1e-12 * lhs.norm());
}

TEST(Osm, IterationOperatorMatchesDenseMatrix) {
  auto s = laplace_setup(12);
  const DenseMatrix t1 = scalar(12, 4.0), t2 = scalar(12, 40.0);
  const DenseMatrix m = iteration_matrix(s.problem.dense(1), s.problem.dense(2), t1, t2);
  const Vector x = random_vector(12, 9);
  EXPECT_LT((iteration_operator_apply(s.problem, t1, t2, x) - m * x).norm(), 1e-12);
}

TEST(Osm, PowerIterationAgreesWithDenseEigenvalues) {
  auto s = laplace_setup(20);
  const DenseMatrix t1 = scalar(20, 6.0), t2 = scalar(20, 70.0);
  const auto est = spectral_radius([&](const Vector& x) { return iteration_operator_apply(s.problem, t1, t2, x); }, 20,
                                   1e-10, 5000);
  EXPECT_LT(rel(est.rho, iteration_spectral_radius(s.problem, t1, t2)), 1e-6);
}

TEST(Osm, ObservedRateMatchesSpectralRadius) {
  auto s = laplace_setup(50);
  ProbeConfig cfg;
  cfg.seeds = sine_probes(50, default_frequencies(50));
  cfg.family = TransmissionFamily::robin_double();
  const auto session = run_algorithm1(s.problem, cfg);
  OsmOptions o;
  o.tol = 1e-13;
  const auto r = run_osm(s.problem, session.tm1, session.tm2, random_vector(50, 3), o);
  const double rho = iteration_spectral_radius(s.problem, session.tm1, session.tm2);
  EXPECT_LT(rel(r.report.rho_estimate, rho), 0.1);
}

TEST(Osm, RecoveredFieldMatchesMonolithicSolve) {
  const auto mesh = build_strip_mesh(-1.0, 1.0, InterfaceGeometry::sine_curve(0.4, 6, 49), 20, 50);
  const auto sys = assemble_blocks(mesh, curved_advection_coefficients());
  const auto prob = neumann_data(sys);
  const auto mono = solve_monolithic(sys);
  const Vector field = recover_interior(sys, prob, mono.interface);
  EXPECT_LT((field - mono.field).norm(), 1e-10 * mono.field.norm());
}

TEST(Osm, ResidualAndErrorStoppingAgree) {
  auto s = laplace_setup(30);
  const DenseMatrix t1 = scalar(30, 10.0), t2 = scalar(30, 60.0);
  OsmOptions e;
  e.tol = 1e-8;
  OsmOptions r = e;
  r.mode = StopMode::Residual;
  const Vector g = random_vector(30, 4);
  const auto a = run_osm(s.problem, t1, t2, g, e);
  const auto b = run_osm(s.problem, t1, t2, g, r);
  EXPECT_TRUE(a.report.converged);
  EXPECT_TRUE(b.report.converged);
  EXPECT_LE(std::abs(a.report.iterations - b.report.iterations), 2);
}

TEST(Osm, RobinSubdomainSweepMatchesDenseSweep) {
  const auto mesh = build_strip_mesh(-1.0, 1.0, InterfaceGeometry::sine_curve(0.4, 6, 40), 15, 41);
  const auto sys = assemble_blocks(mesh, curved_advection_coefficients());
  const auto prob = neumann_data(sys);
  const DenseMatrix t1 = scalar(40, 50.0), t2 = scalar(40, 5.0);
  const AdiSweep dense(prob, t1, t2, 400);
  const AdiSweep robin(prob, t1, t2, 0);
  ASSERT_TRUE(dense.dense());
  ASSERT_FALSE(robin.dense());
  Vector a = random_vector(40, 8), b = a;
  for (int it = 0; it < 5; ++it) {
    a = dense.step(a, prob.mu());
    b = robin.step(b, prob.mu());
  }
  EXPECT_LT((a - b).norm(), 1e-9 * a.norm());
}

TEST(Osm, SecondOrderRobinPathMatchesDense) {
  auto s = laplace_setup(25);
  const double h = interface_spacing(25);
  const auto fam = TransmissionFamily::second_order_shared();
  const Vector p = (Vector(2) << 4.0, 0.02).finished();
  const DenseMatrix t = realize(fam, p, 1, 25, h);
  OsmOptions o;
  o.tol = 1e-10;
  const auto a = run_osm(s.problem, t, t, random_vector(25, 1), o);
  o.dense_guard = 0;
  const auto b = run_osm(s.problem, t, t, random_vector(25, 1), o);
  EXPECT_EQ(a.report.iterations, b.report.iterations);
  EXPECT_LT((a.lambda - b.lambda).norm(), 1e-9 * a.lambda.norm());
}

TEST(Osm, DivergenceIsFlagged) {
  auto s = laplace_setup(10);
  const auto r = run_osm(s.problem, scalar(10, -1.0), scalar(10, -1.0), random_vector(10, 2));
  EXPECT_TRUE(r.report.diverged);
  EXPECT_FALSE(r.report.converged);
}

TEST(Osm, HistoryStartsWithInitialError) {
  auto s = laplace_setup(10, with_forcing(PdeCoefficients::laplace(), [](double, double) { return 1.0; }));
  OsmOptions o;
  o.max_it = 3;
  o.tol = 1e-300;
  const auto r = run_osm(s.problem, scalar(10, 10.0), scalar(10, 10.0), Vector::Zero(10), o);
  ASSERT_EQ(r.report.error_history.size(), 4u);
  EXPECT_NEAR(r.report.error_history[0], 1.0, 1e-12);
  EXPECT_EQ(r.report.iterations, 3);
  EXPECT_FALSE(r.report.converged);
}

TEST(Osm, BadInputsThrow) {
  auto s = laplace_setup(10);
  EXPECT_THROW(run_osm(s.problem, scalar(9, 1.0), scalar(10, 1.0), Vector::Zero(10)), InvalidArgument);
  EXPECT_THROW(run_osm(s.problem, scalar(10, 1.0), scalar(10, 1.0), Vector::Zero(9)), InvalidArgument);
}
