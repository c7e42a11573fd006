#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mesh.hpp"
#include "sparse.hpp"

namespace osmprobe {

using ScalarField = std::function<double(double x, double y)>;
using VectorField = std::function<std::array<double, 2>(double x, double y)>;

/// Coefficients of -div(nu grad u) + a . grad u + eta u = f on one subdomain.
struct SideCoefficients {
  ScalarField nu = [](double, double) { return 1.0; };
  VectorField a = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  ScalarField eta = [](double, double) { return 0.0; };
  ScalarField f = [](double, double) { return 0.0; };
};

struct PdeCoefficients {
  std::array<SideCoefficients, 2> side;

  const SideCoefficients& on(int subdomain) const { return side.at(static_cast<std::size_t>(subdomain - 1)); }

  static PdeCoefficients uniform(SideCoefficients c) { return {{c, c}}; }
  static PdeCoefficients laplace() { return uniform({}); }
};

/// Per-subdomain blocks of the interface-split system.
///
///   [ A1_II    0      A1_IG       ] [u1]   [f1     ]
///   [ 0        A2_II  A2_IG       ] [u2] = [f2     ]
///   [ A1_GI    A2_GI  A1_GG+A2_GG ] [uG]   [fG1+fG2]
struct SideBlocks {
  SparseMatrix a_ii;
  SparseMatrix a_ig;
  SparseMatrix a_gi;
  SparseMatrix a_gg;
  Vector f_i;
  Vector f_g;
  /// Mesh node of each interior unknown.
  std::vector<int> interior_nodes;
};

struct BlockSystem {
  std::array<SideBlocks, 2> side;
  /// Mesh node of each interface unknown, in interface order.
  std::vector<int> interface_nodes;
  std::size_t node_count = 0;
  /// Every assembled entry is multiplied by this factor (1 / interface spacing).
  double scale = 1.0;

  const SideBlocks& on(int s) const { return side.at(static_cast<std::size_t>(s - 1)); }
  int interface_size() const { return static_cast<int>(interface_nodes.size()); }
  SparseMatrix a_gg() const { return side[0].a_gg + side[1].a_gg; }
  Vector f_g() const { return side[0].f_g + side[1].f_g; }
};

namespace detail {

struct ElementMatrix {
  std::array<std::array<double, 3>, 3> k{};
  std::array<double, 3> load{};
};

/// P1 element: centroid values of nu and a are exact for the constant gradients of
/// linear elements when the coefficient is affine; reaction is mass-lumped at the centroid.
inline ElementMatrix element_matrix(const std::array<Point, 3>& p, const SideCoefficients& c, int cell) {
  const double area = signed_area(p[0], p[1], p[2]);
  const double cx = (p[0].x + p[1].x + p[2].x) / 3.0;
  const double cy = (p[0].y + p[1].y + p[2].y) / 3.0;
  const double nu = c.nu(cx, cy);
  if (!(nu > 0.0)) {
    throw InvalidArgument("assemble: non-positive nu = " + std::to_string(nu) + " in cell " +
                          std::to_string(cell));
  }
  const double eta = c.eta(cx, cy);
  if (!(eta >= 0.0)) {
    throw InvalidArgument("assemble: negative eta = " + std::to_string(eta) + " in cell " + std::to_string(cell));
  }
  const auto a = c.a(cx, cy);
  const double f = c.f(cx, cy);

  // grad(phi_k) = (b_k, c_k) / (2 area)
  std::array<double, 3> gx{}, gy{};
  for (int k = 0; k < 3; ++k) {
    const Point& q1 = p[(k + 1) % 3];
    const Point& q2 = p[(k + 2) % 3];
    gx[k] = (q1.y - q2.y) / (2.0 * area);
    gy[k] = (q2.x - q1.x) / (2.0 * area);
  }
  ElementMatrix e;
  for (int r = 0; r < 3; ++r) {
    for (int s = 0; s < 3; ++s) {
      e.k[r][s] = area * (nu * (gx[r] * gx[s] + gy[r] * gy[s]) + (a[0] * gx[s] + a[1] * gy[s]) / 3.0);
    }
    e.k[r][r] += area * eta / 3.0;
    e.load[r] = area * f / 3.0;
  }
  return e;
}

} // namespace detail

/// Galerkin P1 assembly split into the interface block system. Homogeneous Dirichlet
/// nodes are eliminated. All entries are divided by the interface spacing h so that
/// the Schur complements approximate the Dirichlet-to-Neumann maps with an identity
/// interface mass.
inline BlockSystem assemble_blocks(const StructuredMesh& mesh, const PdeCoefficients& coeffs) {
  BlockSystem sys;
  sys.node_count = mesh.nodes.size();
  sys.interface_nodes = mesh.interface_order;
  sys.scale = 1.0 / mesh.interface_h();

  // local index of each node within its class (-1 for Dirichlet)
  std::vector<int> local(mesh.nodes.size(), -1);
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    if (mesh.node_class[n] == NodeClass::Interior1) {
      local[n] = static_cast<int>(sys.side[0].interior_nodes.size());
      sys.side[0].interior_nodes.push_back(static_cast<int>(n));
    } else if (mesh.node_class[n] == NodeClass::Interior2) {
      local[n] = static_cast<int>(sys.side[1].interior_nodes.size());
      sys.side[1].interior_nodes.push_back(static_cast<int>(n));
    }
  }
  for (std::size_t k = 0; k < mesh.interface_order.size(); ++k) {
    local[mesh.interface_order[k]] = static_cast<int>(k);
  }
  const int ng = mesh.interface_size();
  for (int s = 0; s < 2; ++s) {
    if (sys.side[s].interior_nodes.empty()) {
      throw InvalidArgument("assemble: subdomain " + std::to_string(s + 1) + " has no interior nodes");
    }
  }

  std::array<std::vector<Triplet>, 2> tii, tig, tgi, tgg;
  std::array<Vector, 2> fi, fg;
  for (int s = 0; s < 2; ++s) {
    fi[s] = Vector::Zero(static_cast<Eigen::Index>(sys.side[s].interior_nodes.size()));
    fg[s] = Vector::Zero(ng);
  }

  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& tri = mesh.cells[c];
    const int sub = mesh.cell_subdomain[c];
    const int s = sub - 1;
    const std::array<Point, 3> p{mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
    const auto e = detail::element_matrix(p, coeffs.on(sub), static_cast<int>(c));
    for (int r = 0; r < 3; ++r) {
      const NodeClass cr = mesh.node_class[tri[r]];
      if (cr == NodeClass::DirichletBoundary) {
        continue;
      }
      const bool r_gamma = cr == NodeClass::Interface;
      const int lr = local[tri[r]];
      (r_gamma ? fg[s] : fi[s])[lr] += sys.scale * e.load[r];
      for (int q = 0; q < 3; ++q) {
        const NodeClass cq = mesh.node_class[tri[q]];
        if (cq == NodeClass::DirichletBoundary) {
          continue;
        }
        const bool q_gamma = cq == NodeClass::Interface;
        const int lq = local[tri[q]];
        const double v = sys.scale * e.k[r][q];
        if (!r_gamma && !q_gamma) {
          tii[s].emplace_back(lr, lq, v);
        } else if (!r_gamma) {
          tig[s].emplace_back(lr, lq, v);
        } else if (!q_gamma) {
          tgi[s].emplace_back(lr, lq, v);
        } else {
          tgg[s].emplace_back(lr, lq, v);
        }
      }
    }
  }

  for (int s = 0; s < 2; ++s) {
    auto& b = sys.side[s];
    const int ni = static_cast<int>(b.interior_nodes.size());
    b.a_ii = from_triplets(ni, ni, tii[s]);
    b.a_ig = from_triplets(ni, ng, tig[s]);
    b.a_gi = from_triplets(ng, ni, tgi[s]);
    b.a_gg = from_triplets(ng, ng, tgg[s]);
    b.f_i = fi[s];
    b.f_g = fg[s];
  }
  return sys;
}

/// Unknown ordering of the monolithic system: interior 1, interior 2, interface.
inline SparseMatrix monolithic_matrix(const BlockSystem& sys) {
  const int n1 = static_cast<int>(sys.side[0].interior_nodes.size());
  const int n2 = static_cast<int>(sys.side[1].interior_nodes.size());
  const int ng = sys.interface_size();
  std::vector<Triplet> t;
  auto put = [&t](const SparseMatrix& m, int r0, int c0) {
    for (int r = 0; r < m.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
        t.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()), it.value());
      }
    }
  };
  put(sys.side[0].a_ii, 0, 0);
  put(sys.side[0].a_ig, 0, n1 + n2);
  put(sys.side[0].a_gi, n1 + n2, 0);
  put(sys.side[1].a_ii, n1, n1);
  put(sys.side[1].a_ig, n1, n1 + n2);
  put(sys.side[1].a_gi, n1 + n2, n1);
  put(sys.side[0].a_gg, n1 + n2, n1 + n2);
  put(sys.side[1].a_gg, n1 + n2, n1 + n2);
  const int n = n1 + n2 + ng;
  return from_triplets(n, n, t);
}

inline Vector monolithic_rhs(const BlockSystem& sys) {
  const auto n1 = sys.side[0].f_i.size();
  const auto n2 = sys.side[1].f_i.size();
  Vector b(n1 + n2 + sys.interface_size());
  b << sys.side[0].f_i, sys.side[1].f_i, sys.f_g();
  return b;
}

/// Monolithic direct solve, returned as a nodal field (zero on Dirichlet nodes).
struct MonolithicSolution {
  Vector field;
  Vector interface;
};

inline MonolithicSolution solve_monolithic(const BlockSystem& sys) {
  const Factorization lu(monolithic_matrix(sys));
  const Vector u = lu.solve(monolithic_rhs(sys));
  const auto n1 = static_cast<Eigen::Index>(sys.side[0].interior_nodes.size());
  const auto n2 = static_cast<Eigen::Index>(sys.side[1].interior_nodes.size());
  MonolithicSolution out;
  out.field = Vector::Zero(static_cast<Eigen::Index>(sys.node_count));
  for (Eigen::Index k = 0; k < n1; ++k) {
    out.field[sys.side[0].interior_nodes[k]] = u[k];
  }
  for (Eigen::Index k = 0; k < n2; ++k) {
    out.field[sys.side[1].interior_nodes[k]] = u[n1 + k];
  }
  out.interface = u.tail(sys.interface_size());
  for (int k = 0; k < sys.interface_size(); ++k) {
    out.field[sys.interface_nodes[k]] = out.interface[k];
  }
  return out;
}

/// Whole-mesh assembly over free nodes in mesh-node order, without interface splitting.
/// Returns the matrix and the map node -> free index (-1 for Dirichlet nodes).
struct GlobalSystem {
  SparseMatrix a;
  Vector f;
  std::vector<int> free_index;
};

inline GlobalSystem assemble_global(const StructuredMesh& mesh, const PdeCoefficients& coeffs) {
  GlobalSystem g;
  g.free_index.assign(mesh.nodes.size(), -1);
  int n = 0;
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k) {
    if (mesh.node_class[k] != NodeClass::DirichletBoundary) {
      g.free_index[k] = n++;
    }
  }
  const double scale = 1.0 / mesh.interface_h();
  std::vector<Triplet> t;
  g.f = Vector::Zero(n);
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& tri = mesh.cells[c];
    const std::array<Point, 3> p{mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
    const auto e = detail::element_matrix(p, coeffs.on(mesh.cell_subdomain[c]), static_cast<int>(c));
    for (int r = 0; r < 3; ++r) {
      const int gr = g.free_index[tri[r]];
      if (gr < 0) {
        continue;
      }
      g.f[gr] += scale * e.load[r];
      for (int q = 0; q < 3; ++q) {
        const int gq = g.free_index[tri[q]];
        if (gq >= 0) {
          t.emplace_back(gr, gq, scale * e.k[r][q]);
        }
      }
    }
  }
  g.a = from_triplets(n, n, t);
  return g;
}

/// One subdomain's blocks with factorizations of A_II and of the Neumann variant
/// [A_II A_IG; A_GI A_GG^i], whose interface rows carry only this side's contribution.
class SubdomainOperator {
public:
  SubdomainOperator(const BlockSystem& sys, int side) : side_(side), blocks_(sys.on(side)) {
    if (side != 1 && side != 2) {
      throw InvalidArgument("SubdomainOperator: side must be 1 or 2");
    }
    interior_ = std::make_shared<Factorization>(blocks_.a_ii);
    try {
      neumann_ = std::make_shared<Factorization>(neumann_matrix(blocks_.a_gg));
    } catch (const SingularMatrix& e) {
      throw SingularNeumannOperator("Neumann operator of subdomain " + std::to_string(side) +
                                    " is singular: " + e.what());
    }
  }

  int side() const { return side_; }
  const SideBlocks& blocks() const { return blocks_; }
  int interior_size() const { return static_cast<int>(blocks_.a_ii.rows()); }
  int interface_size() const { return static_cast<int>(blocks_.a_gg.rows()); }
  const Factorization& interior() const { return *interior_; }
  const Factorization& neumann() const { return *neumann_; }

  /// [A_II A_IG; A_GI A_GG^i + extra], used for Neumann (extra = 0) and Robin solves.
  SparseMatrix neumann_matrix(const SparseMatrix& interface_block) const {
    const int ni = interior_size();
    const int ng = interface_size();
    std::vector<Triplet> t;
    auto put = [&t](const SparseMatrix& m, int r0, int c0) {
      for (int r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
          t.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()), it.value());
        }
      }
    };
    put(blocks_.a_ii, 0, 0);
    put(blocks_.a_ig, 0, ni);
    put(blocks_.a_gi, ni, 0);
    put(interface_block, ni, ni);
    return from_triplets(ni + ng, ni + ng, t);
  }

private:
  int side_;
  SideBlocks blocks_;
  std::shared_ptr<const Factorization> interior_;
  std::shared_ptr<const Factorization> neumann_;
};

inline SubdomainOperator assemble_neumann_variant(const StructuredMesh& mesh, const PdeCoefficients& coeffs,
                                                  int side) {
  return SubdomainOperator(assemble_blocks(mesh, coeffs), side);
}

} // namespace osmprobe
