#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace osmprobe {

enum class InterfaceKind { Straight, SineCurve, Custom };

/// Shape of the interface between the two subdomains, described as x = g(t) for
/// t in [0,1] (the interface runs bottom to top, y = t).
struct InterfaceGeometry {
  InterfaceKind kind = InterfaceKind::Straight;
  double r = 0.0;
  int k_hat = 1;
  /// Number of interface nodes N_h.
  int samples = 3;
  /// Used by InterfaceKind::Custom.
  std::function<double(double)> custom;

  static InterfaceGeometry straight(int n_h) { return {InterfaceKind::Straight, 0.0, 1, n_h, {}}; }
  static InterfaceGeometry sine_curve(double r, int k_hat, int n_h) {
    return {InterfaceKind::SineCurve, r, k_hat, n_h, {}};
  }

  double x_at(double t) const {
    switch (kind) {
    case InterfaceKind::Straight:
      return 0.0;
    case InterfaceKind::SineCurve:
      return r * std::sin(k_hat * std::numbers::pi * t);
    case InterfaceKind::Custom:
      return custom(t);
    }
    return 0.0;
  }
};

enum class NodeClass { Interior1, Interior2, Interface, DirichletBoundary, NeumannBoundary };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Conforming triangulation of the two subdomains on a (2*nx+1) x (ny+1) index grid.
/// Column nx is the interface; cells left of it belong to subdomain 1.
struct StructuredMesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> cells;
  /// 1 or 2 per cell.
  std::vector<int> cell_subdomain;
  std::vector<NodeClass> node_class;
  /// Interface nodes, bottom to top (excludes the two end points on the outer boundary).
  std::vector<int> interface_order;
  /// Whole interface polyline including its end points on the outer boundary.
  std::vector<int> interface_polyline;
  /// Parameter value t_j of each interface node (same order as interface_order).
  std::vector<double> interface_param;
  int nx_per_side = 0;
  int ny = 0;

  int node_id(int i, int j) const { return j * (2 * nx_per_side + 1) + i; }
  int interface_size() const { return static_cast<int>(interface_order.size()); }
  /// Interface spacing in the curve parameter.
  double interface_h() const { return 1.0 / ny; }
};

inline double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

/// Meshes Omega_1 = (x_left, gamma) and Omega_2 = (gamma, x_right) over y in (0,1).
///
/// Each horizontal grid line is stretched linearly between the outer boundary and
/// the interface, so r = 0 reproduces the straight-interface mesh exactly. Every
/// rectangle is split along its (i,j)-(i+1,j+1) diagonal; on uniform straight meshes
/// the P1 Laplace stiffness then equals the 5-point stencil.
inline StructuredMesh build_strip_mesh(double x_left, double x_right, const InterfaceGeometry& geometry,
                                       int nx_per_side, int ny) {
  if (geometry.samples < 3) {
    throw InvalidArgument("build_strip_mesh: need at least 3 interface nodes, got " +
                          std::to_string(geometry.samples));
  }
  if (nx_per_side < 2) {
    throw InvalidArgument("build_strip_mesh: nx_per_side must be >= 2");
  }
  if (ny != geometry.samples + 1) {
    throw InvalidArgument("build_strip_mesh: ny = " + std::to_string(ny) + " intervals but " +
                          std::to_string(geometry.samples) + " interface nodes (expected ny = N_h + 1)");
  }
  if (!(x_left < 0.0 && 0.0 < x_right)) {
    throw InvalidArgument("build_strip_mesh: need x_left < 0 < x_right");
  }
  if (geometry.kind == InterfaceKind::Custom && !geometry.custom) {
    throw InvalidArgument("build_strip_mesh: custom geometry without a curve");
  }

  StructuredMesh mesh;
  mesh.nx_per_side = nx_per_side;
  mesh.ny = ny;
  const int nx_total = 2 * nx_per_side;
  mesh.nodes.resize(static_cast<std::size_t>((nx_total + 1) * (ny + 1)));
  mesh.node_class.resize(mesh.nodes.size());

  for (int j = 0; j <= ny; ++j) {
    const double y = static_cast<double>(j) / ny;
    const double xi = geometry.x_at(y);
    if (!(x_left < xi && xi < x_right)) {
      throw GeometryError("build_strip_mesh: interface amplitude too large, gamma(" + std::to_string(y) +
                          ") = " + std::to_string(xi) + " leaves (" + std::to_string(x_left) + ", " +
                          std::to_string(x_right) + ")");
    }
    for (int i = 0; i <= nx_total; ++i) {
      double x;
      if (i <= nx_per_side) {
        const double t = static_cast<double>(i) / nx_per_side;
        x = i == nx_per_side ? xi : x_left + t * (xi - x_left);
      } else {
        const double t = static_cast<double>(i - nx_per_side) / nx_per_side;
        x = i == nx_total ? x_right : xi + t * (x_right - xi);
      }
      const int id = mesh.node_id(i, j);
      mesh.nodes[id] = {x, y};
      NodeClass c;
      if (j == 0 || j == ny || i == 0 || i == nx_total) {
        c = NodeClass::DirichletBoundary;
      } else if (i < nx_per_side) {
        c = NodeClass::Interior1;
      } else if (i > nx_per_side) {
        c = NodeClass::Interior2;
      } else {
        c = NodeClass::Interface;
      }
      mesh.node_class[id] = c;
    }
  }

  for (int j = 0; j <= ny; ++j) {
    const int id = mesh.node_id(nx_per_side, j);
    mesh.interface_polyline.push_back(id);
    if (j > 0 && j < ny) {
      mesh.interface_order.push_back(id);
      mesh.interface_param.push_back(static_cast<double>(j) / ny);
    }
  }

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx_total; ++i) {
      const int a = mesh.node_id(i, j);
      const int b = mesh.node_id(i + 1, j);
      const int c = mesh.node_id(i + 1, j + 1);
      const int d = mesh.node_id(i, j + 1);
      const int sub = i < nx_per_side ? 1 : 2;
      for (const auto& tri : {std::array<int, 3>{a, b, c}, std::array<int, 3>{a, c, d}}) {
        const double area = signed_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
        if (!(area > 0.0)) {
          throw GeometryError("build_strip_mesh: degenerate cell " + std::to_string(mesh.cells.size()) +
                              " at grid (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") has area " + std::to_string(area));
        }
        mesh.cells.push_back(tri);
        mesh.cell_subdomain.push_back(sub);
      }
    }
  }
  return mesh;
}

/// Interface length |Gamma|: the interface nodes (end points included) are joined by a
/// natural cubic spline x(y), whose length is integrated with 4-point Gauss-Legendre
/// per segment. Exact for straight interfaces; O(h^4) for smooth curves, where the
/// plain polyline is only O(h^2).
inline double interface_arclength(const StructuredMesh& mesh) {
  const std::size_t n = mesh.interface_polyline.size();
  if (n < 2) {
    throw InvalidArgument("interface_arclength: fewer than 2 interface nodes");
  }
  std::vector<double> y(n), x(n);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = mesh.nodes[mesh.interface_polyline[k]].y;
    x[k] = mesh.nodes[mesh.interface_polyline[k]].x;
  }
  // second derivatives m_k of the spline, m_0 = m_(n-1) = 0 (Thomas algorithm)
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double h0 = y[k] - y[k - 1], h1 = y[k + 1] - y[k];
      const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
      const double r = (x[k + 1] - x[k]) / h1 - (x[k] - x[k - 1]) / h0;
      const double den = b - a * c[k - 1];
      c[k] = cc / den;
      d[k] = (r - a * d[k - 1]) / den;
    }
    for (std::size_t k = n - 2; k >= 1; --k) {
      m[k] = d[k] - c[k] * m[k + 1];
    }
  }
  static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526};
  static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = y[k + 1] - y[k];
    for (int q = 0; q < 4; ++q) {
      const double s = 0.5 * (gx[q] + 1.0); // position in [0, 1] along the segment
      const double dx = (x[k + 1] - x[k]) / h - h * ((1.0 - s) * (1.0 - s) * 3.0 - 1.0) * m[k] / 6.0 +
                        h * (3.0 * s * s - 1.0) * m[k + 1] / 6.0;
      len += 0.5 * h * gw[q] * std::sqrt(1.0 + dx * dx);
    }
  }
  return len;
}

inline const char* to_string(NodeClass c) {
  switch (c) {
  case NodeClass::Interior1:
    return "interior1";
  case NodeClass::Interior2:
    return "interior2";
  case NodeClass::Interface:
    return "interface";
  case NodeClass::DirichletBoundary:
    return "dirichlet";
  case NodeClass::NeumannBoundary:
    return "neumann";
  }
  return "?";
}

/// Debug listing: "index x y tag" per node, then "cell index n0 n1 n2 subdomain" per cell.
inline void write_mesh(std::ostream& os, const StructuredMesh& mesh) {
  char buf[128];
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %s\n", n, mesh.nodes[n].x, mesh.nodes[n].y,
                  to_string(mesh.node_class[n]));
    os << buf;
  }
  for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& t = mesh.cells[c];
    os << "cell " << c << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << mesh.cell_subdomain[c] << '\n';
  }
}

} // namespace osmprobe
