#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace osmprobe;
using namespace osmprobe::testing;

namespace {

double entry(const SparseMatrix& a, int r, int c) { return a.coeff(r, c); }

} // namespace

TEST(Assembly, LaplaceInteriorRowsAreFivePointStencil) {
  // 4x4 cells per side region: nx = 4 per side, ny = 4 -> square cells h = 1/4
  const auto mesh = build_strip_mesh(-1.0, 1.0, InterfaceGeometry::straight(3), 4, 4);
  const auto g = assemble_global(mesh, PdeCoefficients::laplace());
  const double h = mesh.interface_h();
  // hand-coded 5-point stencil on the free nodes
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    const int r = g.free_index[n];
    if (r < 0) {
      continue;
    }
    const int i = static_cast<int>(n) % 9, j = static_cast<int>(n) / 9;
    EXPECT_NEAR(entry(g.a, r, r) * h, 4.0, 1e-12);
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const int c = g.free_index[mesh.node_id(i + di, j + dj)];
      if (c >= 0) {
        EXPECT_NEAR(entry(g.a, r, c) * h, -1.0, 1e-12);
      }
    }
    // diagonal neighbours vanish
    for (auto [di, dj] : {std::pair{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}) {
      const int c = g.free_index[mesh.node_id(i + di, j + dj)];
      if (c >= 0) {
        EXPECT_NEAR(entry(g.a, r, c), 0.0, 1e-12);
      }
    }
  }
}

TEST(Assembly, ReactionAddsNonnegativeDiagonalAndKeepsSymmetry) {
  const auto mesh = build_strip_mesh(-1.0, 1.0, InterfaceGeometry::straight(7), 5, 8);
  SideCoefficients react;
  react.eta = [](double, double) { return 1.0; };
  const auto lap = monolithic_matrix(assemble_blocks(mesh, PdeCoefficients::laplace()));
  const auto rea = monolithic_matrix(assemble_blocks(mesh, PdeCoefficients::uniform(react)));
  const DenseMatrix d = DenseMatrix(rea) - DenseMatrix(lap);
  EXPECT_LT((d - DenseMatrix(d.diagonal().asDiagonal())).norm(), 1e-12);
  EXPECT_GE(d.diagonal().minCoeff(), 0.0);
  EXPECT_LT((DenseMatrix(rea) - DenseMatrix(rea).transpose()).norm(), 1e-12 * DenseMatrix(rea).norm());
}

TEST(Assembly, BlockTransposeForSymmetricProblems) {
  const auto sys = assemble_blocks(build_strip_mesh(-1.0, 1.0, InterfaceGeometry::sine_curve(0.2, 2, 9), 4, 10),
                                   PdeCoefficients::laplace());
  for (int s = 1; s <= 2; ++s) {
    EXPECT_LT((DenseMatrix(sys.on(s).a_gi) - DenseMatrix(sys.on(s).a_ig).transpose()).norm(), 1e-12);
  }
}

TEST(Assembly, BenchmarkCoefficientsAssembleAndDiffusionScales) {
  const auto mesh = build_strip_mesh(-1.0, 1.0, InterfaceGeometry::sine_curve(0.4, 6, 19), 6, 20);
  const auto sys = assemble_blocks(mesh, curved_advection_coefficients());
  EXPECT_TRUE(DenseMatrix(sys.on(2).a_ii).allFinite());
  EXPECT_TRUE(sys.on(1).f_i.allFinite());
  // diffusion-only version of side 2 against plain Laplace: ratio 100 entrywise
  PdeCoefficients diff = PdeCoefficients::laplace();
  diff.side[1].nu = [](double, double) { return 100.0; };
  const auto a = assemble_blocks(mesh, diff);
  const auto b = assemble_blocks(mesh, PdeCoefficients::laplace());
  EXPECT_LT((DenseMatrix(a.on(2).a_ii) - 100.0 * DenseMatrix(b.on(2).a_ii)).norm(),
            1e-10 * DenseMatrix(a.on(2).a_ii).norm());
  // advection makes the full matrix nonsymmetric
  const DenseMatrix full(monolithic_matrix(sys));
  EXPECT_GT((full - full.transpose()).norm(), 1e-3);
}

TEST(Assembly, ErrorsOnBadCoefficients) {
  const auto mesh = build_strip_mesh(-1.0, 1.0, InterfaceGeometry::straight(5), 3, 6);
  SideCoefficients bad;
  bad.nu = [](double, double) { return 0.0; };
  EXPECT_THROW(assemble_blocks(mesh, PdeCoefficients::uniform(bad)), InvalidArgument);
  SideCoefficients neg;
  neg.eta = [](double, double) { return -1.0; };
  EXPECT_THROW(assemble_blocks(mesh, PdeCoefficients::uniform(neg)), InvalidArgument);
}

TEST(Assembly, MonolithicFromBlocksMatchesGlobalAssembly) {
  const auto mesh = build_strip_mesh(-1.0, 1.0, InterfaceGeometry::sine_curve(0.3, 4, 29), 8, 30);
  const auto coeffs = curved_advection_coefficients();
  const auto sys = assemble_blocks(mesh, coeffs);
  const auto from_blocks = solve_monolithic(sys);
  const auto g = assemble_global(mesh, coeffs);
  const Vector u = factorize(g.a).solve(g.f);
  Vector field = Vector::Zero(static_cast<Eigen::Index>(mesh.nodes.size()));
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    if (g.free_index[n] >= 0) {
      field[static_cast<Eigen::Index>(n)] = u[g.free_index[n]];
    }
  }
  EXPECT_LT((field - from_blocks.field).norm(), 1e-12 * field.norm());
}

TEST(Assembly, GalerkinSymmetryWithoutAdvection) {
  SideCoefficients c;
  c.nu = [](double x, double y) { return 1.0 + x * x + y; };
  c.eta = [](double x, double) { return 2.0 + x; };
  const auto a = DenseMatrix(monolithic_matrix(
      assemble_blocks(build_strip_mesh(-1.0, 1.0, InterfaceGeometry::sine_curve(0.3, 2, 15), 6, 16),
                      PdeCoefficients::uniform(c))));
  EXPECT_LT((a - a.transpose()).norm(), 1e-13 * a.norm());
}

TEST(NeumannVariant, FactorizesWithDirichletOuterBoundary) {
  const auto mesh = laplace_mesh(9);
  EXPECT_NO_THROW(assemble_neumann_variant(mesh, PdeCoefficients::laplace(), 2));
}

TEST(NeumannVariant, RoundTripThroughSchur) {
  for (double eta : {0.0, 1e6}) {
    SideCoefficients c;
    c.eta = [eta](double, double) { return eta; };
    const auto mesh = laplace_mesh(9);
    auto sub = std::make_shared<const SubdomainOperator>(assemble_neumann_variant(mesh, PdeCoefficients::uniform(c), 1));
    const SchurOperator sigma(sub, std::make_shared<SolveCounter>());
    const Vector x = random_vector(9, 11);
    const Vector y = sigma.apply(x);
    EXPECT_LT((sigma.apply_inverse(y) - x).norm() / x.norm(), 1e-10) << "eta " << eta;
    if (eta > 0.0) {
      // large reaction: Sigma grows, its inverse shrinks
      EXPECT_LT(sigma.materialize().inverse().cwiseAbs().maxCoeff(), 1e-2);
    }
  }
}

TEST(NeumannVariant, SingularNeumannIsDistinct) {
  // a pure-Neumann-like operator: zero interior/interface coupling and zero interface block
  SideBlocks b;
  b.a_ii = sparse_identity(2);
  b.a_ig = SparseMatrix(2, 2);
  b.a_gi = SparseMatrix(2, 2);
  b.a_gg = SparseMatrix(2, 2);
  b.f_i = Vector::Zero(2);
  b.f_g = Vector::Zero(2);
  b.interior_nodes = {0, 1};
  BlockSystem sys;
  sys.side = {b, b};
  sys.interface_nodes = {2, 3};
  EXPECT_THROW(SubdomainOperator(sys, 1), SingularNeumannOperator);
}

TEST(Assembly, TripletDump) {
  std::ostringstream os;
  write_triplets(os, from_triplets(2, 2, {{0, 0, 2.0}, {1, 0, -1.5}}));
  EXPECT_EQ(os.str(), "0 0 2\n1 0 -1.5\n");
}
