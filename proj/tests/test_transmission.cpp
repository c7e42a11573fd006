#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace osmprobe;
using namespace osmprobe::testing;

namespace {

Vector params(std::initializer_list<double> v) {
  Vector p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) {
    p[i++] = x;
  }
  return p;
}

std::array<Symbol, 2> laplace_symbols() {
  return {[](double k) { return k; }, [](double k) { return k; }};
}

} // namespace

TEST(Transmission, PhysicsRescaledCollapsesToScalarForPlainLaplace) {
  const auto fam = TransmissionFamily::physics_rescaled({}, {});
  for (double s : {0.5, 3.0, 57.0}) {
    const DenseMatrix m = realize(fam, params({s}), 1, 10, 1.0 / 11);
    EXPECT_LT((m - s * DenseMatrix::Identity(10, 10)).norm(), 1e-12 * s);
  }
}

TEST(Transmission, PhysicsRescaledUsesOtherSideConstants) {
  const SideConstants c1{1.0, 0.0, 0.0, 0.0};
  const SideConstants c2{100.0, -10.0, 0.0, 0.0};
  const auto fam = TransmissionFamily::physics_rescaled(c1, c2);
  // f_2(2) computed directly: 100 sqrt(4 + 100/40000) + 5
  const double f2 = 100.0 * std::sqrt(4.0 + 100.0 / 40000.0) + 5.0;
  EXPECT_NEAR(scalar_value(fam, params({2.0}), 1), f2, 1e-9);
  EXPECT_NEAR(scalar_value(fam, params({2.0}), 2), 2.0, 1e-12);
}

TEST(Transmission, RescaleInverse) {
  const SideConstants c{3.0, 1.5, -0.5, 2.0};
  for (double s : {0.0, 0.1, 4.0, 80.0}) {
    EXPECT_NEAR(c.rescale_inverse(c.rescale(s)), s, 1e-9 * std::max(1.0, s));
  }
}

TEST(Transmission, SecondOrderWithZeroQIsScalar) {
  const int n = 12;
  const double h = 1.0 / 13;
  const DenseMatrix a = realize(TransmissionFamily::second_order_shared(), params({2.5, 0.0}), 1, n, h);
  EXPECT_LT((a - 2.5 * DenseMatrix::Identity(n, n)).norm(), 1e-14);
}

TEST(Transmission, LinearInParameters) {
  const int n = 9;
  const double h = 0.1;
  for (const auto& fam : {TransmissionFamily::robin_single(), TransmissionFamily::robin_double(),
                          TransmissionFamily::second_order_shared(), TransmissionFamily::second_order_double()}) {
    const Vector p = random_vector(fam.param_count(), 3).cwiseAbs();
    const Vector q = random_vector(fam.param_count(), 4).cwiseAbs();
    for (int side = 1; side <= 2; ++side) {
      const DenseMatrix lhs = realize(fam, 2.0 * p + 3.0 * q, side, n, h);
      const DenseMatrix rhs = 2.0 * realize(fam, p, side, n, h) + 3.0 * realize(fam, q, side, n, h);
      EXPECT_LT((lhs - rhs).norm(), 1e-12 * lhs.norm()) << to_string(fam.kind);
    }
  }
}

TEST(Transmission, RescaleIsIncreasing) {
  const SideConstants c{100.0, -10.0, 0.0, 0.0};
  double prev = c.rescale(0.0);
  for (int i = 1; i <= 200; ++i) {
    const double s = 0.05 * i * i;
    const double v = c.rescale(s);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Transmission, TridiagonalEigenvaluesMatchClosedForm) {
  const int n = 20;
  const double h = 1.0 / (n + 1);
  const DenseMatrix hm = tridiagonal_h(n, h);
  const DenseMatrix v = sine_basis(n);
  for (int k = 1; k <= n; ++k) {
    const double expected = 4.0 / (h * h) * std::pow(std::sin(k * std::numbers::pi * h / 2.0), 2);
    EXPECT_LT((hm * v.col(k - 1) - expected * v.col(k - 1)).norm(), 1e-9 * expected);
  }
}

TEST(Transmission, InvalidParametersRejected) {
  EXPECT_THROW(realize(TransmissionFamily::robin_double(), params({1.0}), 1, 5, 0.2), InvalidArgument);
  EXPECT_THROW(realize(TransmissionFamily::robin_single(), params({-1.0}), 1, 5, 0.2), InvalidArgument);
  EXPECT_THROW(realize(TransmissionFamily::robin_single(), params({1.0}), 3, 5, 0.2), InvalidArgument);
}

TEST(Transmission, FamilyNamesRoundTrip) {
  for (auto k : {FamilyKind::ScalarIdentitySingle, FamilyKind::ScalarIdentityDouble, FamilyKind::SecondOrder,
                 FamilyKind::SecondOrderDouble, FamilyKind::PhysicsRescaled}) {
    EXPECT_EQ(family_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(family_from_string("dirichlet").has_value());
}

TEST(Fourier, SingleRobinNearGeometricMeanOfBand) {
  for (int n_h : {50, 100, 400}) {
    const double k_min = std::numbers::pi, k_max = std::numbers::pi * (n_h + 1);
    const auto r = fourier_estimate(laplace_symbols(), TransmissionFamily::robin_single(), k_min, k_max, 400);
    const double expected = std::numbers::pi * std::sqrt(static_cast<double>(n_h));
    EXPECT_LT(rel(r.params[0], expected), 0.02) << "n_h " << n_h;
  }
}

TEST(Fourier, DoubleNeverWorseThanSingle) {
  for (double k_max : {30.0, 300.0, 3000.0}) {
    const auto single = fourier_estimate(laplace_symbols(), TransmissionFamily::robin_single(), 3.0, k_max);
    const auto dbl = fourier_estimate(laplace_symbols(), TransmissionFamily::robin_double(), 3.0, k_max, 200,
                                      Vector::Constant(2, single.params[0]));
    EXPECT_LE(dbl.value, single.value + 1e-12) << "k_max " << k_max;
  }
}

TEST(Fourier, NarrowerBandGivesSmallerFactor) {
  const double k_max = 300.0;
  double prev = 0.0;
  for (double k_min : {8.0, 4.0, 2.0, 1.0}) {
    const auto r = fourier_estimate(laplace_symbols(), TransmissionFamily::robin_single(), k_min, k_max);
    EXPECT_GT(r.value, prev);
    prev = r.value;
  }
}

TEST(Fourier, SecondOrderBeatsRobin) {
  const auto robin = fourier_estimate(laplace_symbols(), TransmissionFamily::robin_single(), 3.0, 300.0);
  const auto so = fourier_estimate(laplace_symbols(), TransmissionFamily::second_order_shared(), 3.0, 300.0);
  EXPECT_LT(so.value, robin.value);
}

TEST(Fourier, BadBandRejected) {
  EXPECT_THROW(fourier_estimate(laplace_symbols(), TransmissionFamily::robin_single(), 5.0, 1.0), InvalidArgument);
}

TEST(Fourier, SmallerKMinGivesSmallerParameter) {
  const double k_max = 100.0 * std::numbers::pi;
  double prev = std::numeric_limits<double>::infinity();
  for (double k_min : {std::numbers::pi, std::numbers::pi / 2.0, std::numbers::pi / 4.96}) {
    const auto r = fourier_estimate(laplace_symbols(), TransmissionFamily::robin_single(), k_min, k_max);
    EXPECT_LT(r.params[0], prev);
    prev = r.params[0];
  }
}
