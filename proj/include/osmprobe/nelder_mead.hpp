#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "sparse.hpp"

namespace osmprobe {

struct NelderMeadOptions {
  /// Edge length of the initial simplex along each unit direction.
  double scale = 0.5;
  /// Stop once every vertex lies within this distance of the best one.
  double tol = 1e-8;
  int max_eval = 4000;
  /// Restart once from the best vertex with a fresh simplex.
  bool restart = true;
};

struct NelderMeadResult {
  Vector point;
  double value = 0.0;
  int evaluations = 0;
};

namespace detail {

struct Vertex {
  Vector x;
  double f;
};

inline double finite_or_inf(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

inline void run_simplex(const std::function<double(const Vector&)>& objective, Vertex& best,
                        const NelderMeadOptions& opt, int& evals) {
  constexpr double reflect = 1.0;
  constexpr double expand = 2.0;
  constexpr double contract = 0.5;
  constexpr double shrink = 0.5;

  const auto dim = best.x.size();
  auto eval = [&](const Vector& x) {
    ++evals;
    return finite_or_inf(objective(x));
  };

  std::vector<Vertex> s;
  s.reserve(dim + 1);
  s.push_back(best);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Vector x = best.x;
    x[i] += opt.scale;
    s.push_back({x, eval(x)});
  }
  if (std::all_of(s.begin(), s.end(), [](const Vertex& v) { return std::isinf(v.f); })) {
    throw NumericalFailure("nelder_mead: objective is non-finite at every simplex vertex");
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  while (evals < opt.max_eval) {
    std::stable_sort(s.begin(), s.end(), by_value);
    double diameter = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      diameter = std::max(diameter, (s[i].x - s[0].x).norm());
    }
    if (diameter < opt.tol) {
      break;
    }

    Vector centroid = Vector::Zero(dim);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      centroid += s[i].x;
    }
    centroid /= static_cast<double>(dim);
    Vertex& worst = s.back();

    const Vector xr = centroid + reflect * (centroid - worst.x);
    const double fr = eval(xr);
    if (fr < s.front().f) {
      const Vector xe = centroid + expand * (xr - centroid);
      const double fe = eval(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < s[s.size() - 2].f) {
      worst = {xr, fr};
      continue;
    }
    // Outside contraction when the reflected point beats the worst, inside otherwise.
    const bool outside = fr < worst.f;
    const Vector xc = outside ? Vector(centroid + contract * (xr - centroid))
                              : Vector(centroid + contract * (worst.x - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : worst.f)) {
      worst = {xc, fc};
      continue;
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
      s[i].x = s[0].x + shrink * (s[i].x - s[0].x);
      s[i].f = eval(s[i].x);
    }
  }
  best = *std::min_element(s.begin(), s.end(), by_value);
}

} // namespace detail

/// Unconstrained Nelder-Mead minimization (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5). Non-finite objective values are treated as +inf.
inline NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective,
                                    const Vector& x0, const NelderMeadOptions& opt = {}) {
  if (x0.size() < 1) {
    throw InvalidArgument("nelder_mead: empty start point");
  }
  int evals = 1;
  detail::Vertex best{x0, detail::finite_or_inf(objective(x0))};
  detail::run_simplex(objective, best, opt, evals);
  if (opt.restart) {
    detail::run_simplex(objective, best, opt, evals);
  }
  if (!std::isfinite(best.f)) {
    throw NumericalFailure("nelder_mead: no finite objective value found");
  }
  return {best.x, best.f, evals};
}

} // namespace osmprobe
