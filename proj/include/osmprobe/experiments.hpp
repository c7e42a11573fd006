#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "osm.hpp"
#include "probing.hpp"

namespace osmprobe {

/// Configuration problem, reported with the 1-based line of the offending key.
class ConfigError : public Error {
public:
  ConfigError(int line, const std::string& msg)
      : Error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

enum class ProblemPreset { LaplaceStrip, CurvedAdvection, Custom };
enum class InitialGuess { Zero, Random };
enum class RescalePoint { Midpoint, Mean };

/// Fully expanded experiment description. Every field has a preset default.
struct ExperimentConfig {
  ProblemPreset problem = ProblemPreset::LaplaceStrip;
  int n_interface = 50;
  int nx_per_side = 51;
  double x_left = -1.0;
  double x_right = 1.0;
  double amplitude = 0.0;
  int wavenumber = 6;
  // custom problem: constant coefficients per side
  std::array<double, 2> nu{1.0, 1.0};
  std::array<std::array<double, 2>, 2> a{};
  std::array<double, 2> eta{0.0, 0.0};
  double forcing = 1.0;

  TransmissionFamily family = TransmissionFamily::robin_double();
  RescalePoint rescale_point = RescalePoint::Midpoint;
  std::string probes = "sines_3";
  std::vector<double> frequencies;
  int power_iterations = 0;
  bool dedupe = true;
  bool fourier_start = true;

  double fourier_k_min = std::numbers::pi;
  /// <= 0 means pi / h.
  double fourier_k_max = 0.0;
  int fourier_samples = 200;

  double tol = 1e-8;
  int max_it = 200;
  InitialGuess initial_guess = InitialGuess::Random;
  unsigned seed = 1;

  std::array<double, 2> sweep_min{0.3, 0.3};
  std::array<double, 2> sweep_max{3000.0, 3000.0};
  int sweep_n = 30;

  /// "probe", "fourier", "exact" or "params".
  std::string transmission = "probe";
  std::vector<double> params;
};

namespace detail {

inline int line_of(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) {
    return 0;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

inline int line_of_offset(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline nlohmann::json preset_defaults(const std::string& preset) {
  if (preset == "laplace_strip") {
    return {{"n_interface", 50}, {"x_left", -1.0}, {"x_right", 1.0}, {"family", "robin_double"},
            {"probes", "sines_3"}, {"power_iterations", 0}};
  }
  if (preset == "curved_advection") {
    return {{"n_interface", 100}, {"nx_per_side", 40}, {"x_left", -1.0}, {"x_right", 1.0},
            {"amplitude", 0.4},   {"wavenumber", 6},   {"family", "physics_rescaled"},
            {"probes", "sines_lo_hi_pm"}, {"power_iterations", 1}};
  }
  if (preset == "custom") {
    return {{"n_interface", 50}, {"family", "robin_double"}, {"probes", "sines_3"}};
  }
  return nullptr;
}

} // namespace detail

/// Parses a flat JSON config: the preset's defaults are expanded first, then the
/// user's keys override them, then everything is validated.
inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json user;
  try {
    user = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(detail::line_of_offset(text, e.byte), std::string("malformed JSON: ") + e.what());
  }
  if (!user.is_object()) {
    throw ConfigError(1, "top level must be a JSON object");
  }
  const std::string preset = user.value("problem", std::string("laplace_strip"));
  nlohmann::json merged = detail::preset_defaults(preset);
  if (merged.is_null()) {
    throw ConfigError(detail::line_of(text, "problem"),
                      "unknown problem '" + preset + "' (laplace_strip | curved_advection | custom)");
  }
  for (auto it = user.begin(); it != user.end(); ++it) {
    merged[it.key()] = it.value();
  }

  ExperimentConfig c;
  c.problem = preset == "laplace_strip"      ? ProblemPreset::LaplaceStrip
              : preset == "curved_advection" ? ProblemPreset::CurvedAdvection
                                             : ProblemPreset::Custom;

  auto fail = [&](const std::string& key, const std::string& msg) { throw ConfigError(detail::line_of(text, key), msg); };
  auto num = [&](const std::string& key, double& out) {
    if (!merged.contains(key)) {
      return;
    }
    if (!merged[key].is_number()) {
      fail(key, "'" + key + "' must be a number");
    }
    out = merged[key].get<double>();
  };
  auto integer = [&](const std::string& key, int& out) {
    if (!merged.contains(key)) {
      return;
    }
    if (!merged[key].is_number_integer()) {
      fail(key, "'" + key + "' must be an integer");
    }
    out = merged[key].get<int>();
  };
  auto str = [&](const std::string& key, std::string& out) {
    if (!merged.contains(key)) {
      return;
    }
    if (!merged[key].is_string()) {
      fail(key, "'" + key + "' must be a string");
    }
    out = merged[key].get<std::string>();
  };
  auto boolean = [&](const std::string& key, bool& out) {
    if (!merged.contains(key)) {
      return;
    }
    if (!merged[key].is_boolean()) {
      fail(key, "'" + key + "' must be true or false");
    }
    out = merged[key].get<bool>();
  };
  auto list = [&](const std::string& key, std::vector<double>& out) {
    if (!merged.contains(key)) {
      return;
    }
    if (!merged[key].is_array()) {
      fail(key, "'" + key + "' must be an array of numbers");
    }
    out.clear();
    for (const auto& v : merged[key]) {
      if (!v.is_number()) {
        fail(key, "'" + key + "' must be an array of numbers");
      }
      out.push_back(v.get<double>());
    }
  };

  static const std::vector<std::string> known = {
      "problem", "n_interface", "nx_per_side", "x_left", "x_right", "amplitude", "wavenumber", "nu1", "nu2",
      "a1_x", "a1_y", "a2_x", "a2_y", "eta1", "eta2", "forcing", "family", "rescale_point", "probes",
      "frequencies", "power_iterations", "dedupe", "probe_start", "fourier_k_min", "fourier_k_max",
      "fourier_samples", "tol", "max_it", "initial_guess", "seed", "sweep_p1_min", "sweep_p1_max",
      "sweep_p2_min", "sweep_p2_max", "sweep_n", "transmission", "params"};
  for (auto it = merged.begin(); it != merged.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      fail(it.key(), "unknown key '" + it.key() + "'");
    }
  }

  integer("n_interface", c.n_interface);
  c.nx_per_side = c.problem == ProblemPreset::LaplaceStrip ? c.n_interface + 1 : 40;
  integer("nx_per_side", c.nx_per_side);
  num("x_left", c.x_left);
  num("x_right", c.x_right);
  num("amplitude", c.amplitude);
  integer("wavenumber", c.wavenumber);
  num("nu1", c.nu[0]);
  num("nu2", c.nu[1]);
  num("a1_x", c.a[0][0]);
  num("a1_y", c.a[0][1]);
  num("a2_x", c.a[1][0]);
  num("a2_y", c.a[1][1]);
  num("eta1", c.eta[0]);
  num("eta2", c.eta[1]);
  num("forcing", c.forcing);

  std::string family = to_string(c.family.kind);
  str("family", family);
  const auto kind = family_from_string(family);
  if (!kind) {
    fail("family", "unknown family '" + family +
                       "' (robin_single | robin_double | second_order | second_order_double | physics_rescaled)");
  }
  c.family.kind = *kind;

  std::string rescale = "midpoint";
  str("rescale_point", rescale);
  if (rescale != "midpoint" && rescale != "mean") {
    fail("rescale_point", "rescale_point must be 'midpoint' or 'mean'");
  }
  c.rescale_point = rescale == "mean" ? RescalePoint::Mean : RescalePoint::Midpoint;

  str("probes", c.probes);
  list("frequencies", c.frequencies);
  integer("power_iterations", c.power_iterations);
  // "sines_lo_hi_pm(N)" carries its iteration count inline
  if (c.probes.rfind("sines_lo_hi_pm(", 0) == 0 && c.probes.back() == ')') {
    try {
      c.power_iterations = std::stoi(c.probes.substr(15, c.probes.size() - 16));
    } catch (const std::exception&) {
      fail("probes", "malformed probe preset '" + c.probes + "'");
    }
    c.probes = "sines_lo_hi_pm";
  }
  if (c.probes != "sines_3" && c.probes != "sines_k2" && c.probes != "sines_lo_hi_pm" && c.probes != "custom") {
    fail("probes", "unknown probe preset '" + c.probes + "' (sines_3 | sines_k2 | sines_lo_hi_pm | custom)");
  }
  if (c.probes == "custom" && c.frequencies.empty()) {
    fail(merged.contains("frequencies") ? "frequencies" : "probes", "custom probes need a non-empty 'frequencies' list");
  }
  if (c.power_iterations < 0) {
    fail("power_iterations", "power_iterations must be >= 0");
  }
  boolean("dedupe", c.dedupe);
  std::string start = "fourier";
  str("probe_start", start);
  if (start != "fourier" && start != "rayleigh") {
    fail("probe_start", "probe_start must be 'fourier' or 'rayleigh'");
  }
  c.fourier_start = start == "fourier";

  num("fourier_k_min", c.fourier_k_min);
  num("fourier_k_max", c.fourier_k_max);
  integer("fourier_samples", c.fourier_samples);
  num("tol", c.tol);
  integer("max_it", c.max_it);
  std::string guess = "random";
  str("initial_guess", guess);
  if (guess != "zero" && guess != "random") {
    fail("initial_guess", "initial_guess must be 'zero' or 'random'");
  }
  c.initial_guess = guess == "zero" ? InitialGuess::Zero : InitialGuess::Random;
  int seed = static_cast<int>(c.seed);
  integer("seed", seed);
  c.seed = static_cast<unsigned>(seed);

  num("sweep_p1_min", c.sweep_min[0]);
  num("sweep_p1_max", c.sweep_max[0]);
  num("sweep_p2_min", c.sweep_min[1]);
  num("sweep_p2_max", c.sweep_max[1]);
  integer("sweep_n", c.sweep_n);
  str("transmission", c.transmission);
  if (c.transmission != "probe" && c.transmission != "fourier" && c.transmission != "exact" &&
      c.transmission != "params") {
    fail("transmission", "transmission must be probe | fourier | exact | params");
  }
  list("params", c.params);
  if (c.transmission == "params" && static_cast<int>(c.params.size()) != c.family.param_count()) {
    fail(merged.contains("params") ? "params" : "transmission",
         "family " + family + " needs " + std::to_string(c.family.param_count()) + " params");
  }

  if (c.n_interface < 3) {
    fail("n_interface", "n_interface must be >= 3");
  }
  if (c.nx_per_side < 2) {
    fail("nx_per_side", "nx_per_side must be >= 2");
  }
  if (!(c.x_left < 0.0 && 0.0 < c.x_right)) {
    fail("x_left", "need x_left < 0 < x_right");
  }
  if (!(c.tol > 0.0)) {
    fail("tol", "tol must be positive");
  }
  if (c.max_it < 1) {
    fail("max_it", "max_it must be >= 1");
  }
  if (c.sweep_n < 1) {
    fail("sweep_n", "sweep_n must be >= 1");
  }
  for (int p = 0; p < 2; ++p) {
    if (!(c.sweep_min[p] > 0.0 && c.sweep_min[p] <= c.sweep_max[p])) {
      fail(p == 0 ? "sweep_p1_min" : "sweep_p2_min", "sweep ranges must be positive and ordered");
    }
  }
  if (c.fourier_samples < 2) {
    fail("fourier_samples", "fourier_samples must be >= 2");
  }
  for (int s = 0; s < 2; ++s) {
    if (!(c.nu[s] > 0.0)) {
      fail(s == 0 ? "nu1" : "nu2", "diffusivity must be positive");
    }
    if (!(c.eta[s] >= 0.0)) {
      fail(s == 0 ? "eta1" : "eta2", "reaction must be non-negative");
    }
  }
  return c;
}

/// Coefficients of the curved-interface advection-diffusion benchmark.
inline PdeCoefficients curved_advection_coefficients() {
  PdeCoefficients c;
  c.side[0].nu = [](double, double) { return 1.0; };
  c.side[0].a = [](double x, double y) { return std::array<double, 2>{10.0 * (y + x * x), 0.0}; };
  c.side[0].eta = [](double x, double y) { return 0.1 * (x * x + y * y); };
  c.side[0].f = [](double x, double y) { return x * x + y * y; };
  c.side[1].nu = [](double, double) { return 100.0; };
  c.side[1].a = [](double x, double) { return std::array<double, 2>{10.0 * (1.0 - x), x}; };
  c.side[1].eta = [](double, double) { return 0.0; };
  c.side[1].f = [](double x, double y) { return x * x + y * y; };
  return c;
}

/// Per-side constants for the physics rescaling, from the coefficient fields at the
/// interface midpoint or averaged over the interface nodes.
inline std::array<SideConstants, 2> side_constants(const StructuredMesh& mesh, const PdeCoefficients& coeffs,
                                                   RescalePoint where) {
  std::vector<Point> pts;
  if (where == RescalePoint::Midpoint) {
    const auto& poly = mesh.interface_polyline;
    pts.push_back(mesh.nodes[poly[poly.size() / 2]]);
  } else {
    for (int n : mesh.interface_order) {
      pts.push_back(mesh.nodes[n]);
    }
  }
  std::array<SideConstants, 2> out{};
  for (int s = 0; s < 2; ++s) {
    const auto& c = coeffs.side[s];
    SideConstants k{0.0, 0.0, 0.0, 0.0};
    for (const auto& p : pts) {
      const auto a = c.a(p.x, p.y);
      k.nu += c.nu(p.x, p.y);
      k.a1 += a[0];
      k.a2 += a[1];
      k.eta += c.eta(p.x, p.y);
    }
    const double n = static_cast<double>(pts.size());
    out[s] = {k.nu / n, k.a1 / n, k.a2 / n, k.eta / n};
  }
  return out;
}

/// Assembled problem with its interface operators.
struct Problem {
  StructuredMesh mesh;
  PdeCoefficients coeffs;
  BlockSystem system;
  std::shared_ptr<SolveCounter> counter;
  InterfaceProblem interface;
  MonolithicSolution reference;
  std::array<SideConstants, 2> constants;

  int n_h() const { return interface.dim(); }
  double h() const { return mesh.interface_h(); }
};

inline Problem build_problem(const ExperimentConfig& c) {
  InterfaceGeometry geometry = InterfaceGeometry::straight(c.n_interface);
  PdeCoefficients coeffs = PdeCoefficients::laplace();
  switch (c.problem) {
  case ProblemPreset::LaplaceStrip:
    break;
  case ProblemPreset::CurvedAdvection:
    geometry = InterfaceGeometry::sine_curve(c.amplitude, c.wavenumber, c.n_interface);
    coeffs = curved_advection_coefficients();
    break;
  case ProblemPreset::Custom:
    if (c.amplitude != 0.0) {
      geometry = InterfaceGeometry::sine_curve(c.amplitude, c.wavenumber, c.n_interface);
    }
    for (int s = 0; s < 2; ++s) {
      const double nu = c.nu[s], eta = c.eta[s], f = c.forcing;
      const auto a = c.a[s];
      coeffs.side[s].nu = [nu](double, double) { return nu; };
      coeffs.side[s].a = [a](double, double) { return a; };
      coeffs.side[s].eta = [eta](double, double) { return eta; };
      coeffs.side[s].f = [f](double, double) { return f; };
    }
    break;
  }
  if (c.problem == ProblemPreset::LaplaceStrip) {
    coeffs.side[0].f = coeffs.side[1].f = [](double x, double y) { return 1.0 + x * x + y; };
  }
  StructuredMesh mesh = build_strip_mesh(c.x_left, c.x_right, geometry, c.nx_per_side, c.n_interface + 1);
  BlockSystem system = assemble_blocks(mesh, coeffs);
  auto counter = std::make_shared<SolveCounter>();
  InterfaceProblem iface = neumann_data(system, counter);
  MonolithicSolution reference = solve_monolithic(system);
  const auto constants = side_constants(mesh, coeffs, c.rescale_point);
  return Problem{std::move(mesh), std::move(coeffs), std::move(system), counter,
                 std::move(iface), std::move(reference), constants};
}

inline TransmissionFamily problem_family(const ExperimentConfig& c, const Problem& p) {
  TransmissionFamily f = c.family;
  f.constants = p.constants;
  return f;
}

/// Fourier symbols sigma_i(k) = f_i(k) of the per-side constant-coefficient problems.
inline std::array<Symbol, 2> fourier_symbols(const Problem& p) {
  const auto k1 = p.constants[0], k2 = p.constants[1];
  return {[k1](double k) { return k1.rescale(k); }, [k2](double k) { return k2.rescale(k); }};
}

inline double fourier_k_max(const ExperimentConfig& c, const Problem& p) {
  return c.fourier_k_max > 0.0 ? c.fourier_k_max : std::numbers::pi / p.h();
}

inline FourierResult run_fourier(const ExperimentConfig& c, const Problem& p) {
  return fourier_estimate(fourier_symbols(p), problem_family(c, p), c.fourier_k_min, fourier_k_max(c, p),
                          c.fourier_samples);
}

inline std::vector<double> preset_frequencies(const ExperimentConfig& c) {
  const int n = c.n_interface;
  if (c.probes == "sines_k2") {
    return even_mode_frequencies(n);
  }
  if (c.probes == "sines_lo_hi_pm") {
    return {1.0, static_cast<double>(n)};
  }
  if (c.probes == "custom") {
    return c.frequencies;
  }
  return default_frequencies(n);
}

/// Probing run for the configured probe preset (power_iterations < 0 keeps the config's N).
inline ProbeSession run_probe(const ExperimentConfig& c, const Problem& p, const std::string& probes,
                              int power_iterations) {
  ExperimentConfig local = c;
  local.probes = probes;
  ProbeConfig pc;
  pc.seeds = sine_probes(p.n_h(), preset_frequencies(local));
  pc.power_iterations = power_iterations;
  pc.family = problem_family(c, p);
  pc.dedupe = c.dedupe;
  if (c.fourier_start && !pc.family.second_order()) {
    pc.start = run_fourier(c, p).params;
  }
  return run_algorithm1(p.interface, pc);
}

inline ProbeSession run_probe(const ExperimentConfig& c, const Problem& p) {
  return run_probe(c, p, c.probes, c.probes == "sines_lo_hi_pm" ? std::max(c.power_iterations, 1) : c.power_iterations);
}

inline Vector initial_guess(const ExperimentConfig& c, const Problem& p) {
  if (c.initial_guess == InitialGuess::Zero) {
    return Vector::Zero(p.n_h());
  }
  std::mt19937 rng(c.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(p.n_h());
  for (int i = 0; i < p.n_h(); ++i) {
    v[i] = dist(rng);
  }
  const double scale = p.reference.interface.norm();
  return v * (scale > 0.0 ? scale / v.norm() : 1.0 / v.norm());
}

struct Evaluation {
  Vector params;
  double rho = 0.0;
  IterationReport report;
  Vector lambda;
};

inline Evaluation evaluate(const ExperimentConfig& c, const Problem& p, const DenseMatrix& tm1, const DenseMatrix& tm2) {
  Evaluation e;
  e.rho = iteration_spectral_radius(p.interface, tm1, tm2);
  OsmOptions o;
  o.tol = c.tol;
  o.max_it = c.max_it;
  o.reference = p.reference.interface;
  auto r = run_osm(p.interface, tm1, tm2, initial_guess(c, p), o);
  e.report = r.report;
  e.lambda = r.lambda;
  return e;
}

inline Evaluation evaluate(const ExperimentConfig& c, const Problem& p, const Vector& params) {
  const auto fam = problem_family(c, p);
  auto e = evaluate(c, p, realize(fam, params, 1, p.n_h(), p.h()), realize(fam, params, 2, p.n_h(), p.h()));
  e.params = params;
  return e;
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt_double(double v) {
  if (!std::isfinite(v)) {
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline nlohmann::json params_json(const TransmissionFamily& f, const Vector& params) {
  nlohmann::json j = nlohmann::json::object();
  const auto names = f.param_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    j[names[i]] = params[static_cast<Eigen::Index>(i)];
  }
  return j;
}

inline nlohmann::json report_json(const IterationReport& r) {
  nlohmann::json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["diverged"] = r.diverged;
  j["rho_estimate"] = r.rho_estimate;
  j["solve_count_delta"] = r.solve_count_delta;
  j["error_history"] = r.error_history;
  return j;
}

/// Session report: family, params, objective, solve counts, probe count, trace.
inline nlohmann::json session_json(const ProbeSession& s) {
  nlohmann::json j;
  j["family"] = to_string(s.family.kind);
  j["params"] = params_json(s.family, s.params);
  j["start"] = params_json(s.family, s.start);
  j["objective"] = s.objective;
  j["solve_count"] = s.solve_count();
  j["solves"] = {{"step1", s.solves_step1}, {"step2", s.solves_step2}, {"step3", s.solves_step3}};
  j["probe_count"] = s.vectors.size();
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : s.trace) {
    nlohmann::json e;
    e["params"] = std::vector<double>(t.params.data(), t.params.data() + t.params.size());
    if (t.zero_denominator) {
      e["objective"] = nullptr;
      e["flag"] = "zero_denominator";
    } else {
      e["objective"] = t.objective;
    }
    trace.push_back(e);
  }
  j["trace"] = trace;
  return j;
}

struct SweepResult {
  std::vector<std::array<double, 3>> rows;
  std::array<double, 3> best{0.0, 0.0, std::numeric_limits<double>::infinity()};
};

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  }
  return g;
}

/// rho(T) over an n x n log-spaced grid of the family's two parameters (n points of
/// the single parameter for one-parameter families). Rows are computed in parallel
/// and emitted in grid order.
inline SweepResult sweep(const ExperimentConfig& c, const Problem& p, int threads = 1) {
  const auto fam = problem_family(c, p);
  if (fam.param_count() > 2) {
    throw InvalidArgument("sweep: family " + std::string(to_string(fam.kind)) + " has more than two parameters");
  }
  const bool two = fam.param_count() == 2;
  const auto g1 = log_grid(c.sweep_min[0], c.sweep_max[0], c.sweep_n);
  const auto g2 = two ? log_grid(c.sweep_min[1], c.sweep_max[1], c.sweep_n) : std::vector<double>{0.0};
  // materialize once before the workers share the problem
  (void)p.interface.dense(1);

  SweepResult out;
  out.rows.resize(g1.size() * g2.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const double a = g1[idx / g2.size()];
      const double b = g2[idx % g2.size()];
      Vector prm(fam.param_count());
      if (two) {
        prm << a, b;
      } else {
        prm << a;
      }
      const double rho = iteration_spectral_radius(p.interface, realize(fam, prm, 1, p.n_h(), p.h()),
                                                   realize(fam, prm, 2, p.n_h(), p.h()));
      out.rows[idx] = {a, b, rho};
    }
  };
  const std::size_t total = out.rows.size();
  const auto nt = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back(work, total * t / nt, total * (t + 1) / nt);
  }
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& r : out.rows) {
    if (r[2] < out.best[2]) {
      out.best = r;
    }
  }
  return out;
}

inline void write_sweep_csv(std::ostream& os, const TransmissionFamily& fam, const SweepResult& s) {
  const auto names = fam.param_names();
  const bool two = names.size() == 2;
  os << names[0] << " [1/L]," << (two ? names[1] + " [" + (fam.second_order() ? "L" : "1/L") + "]," : "")
     << "rho [-]\r\n";
  for (const auto& r : s.rows) {
    os << fmt_double(r[0]) << ',';
    if (two) {
      os << fmt_double(r[1]) << ',';
    }
    os << fmt_double(r[2]) << "\r\n";
  }
}

inline void write_history_csv(std::ostream& os, const IterationReport& r) {
  os << "iteration [-],relative_error [-]\r\n";
  for (std::size_t i = 0; i < r.error_history.size(); ++i) {
    os << i << ',' << fmt_double(r.error_history[i]) << "\r\n";
  }
}

inline void write_field_csv(std::ostream& os, const StructuredMesh& mesh, const Vector& field) {
  os << "x [L],y [L],u [-]\r\n";
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    os << fmt_double(mesh.nodes[n].x) << ',' << fmt_double(mesh.nodes[n].y) << ','
       << fmt_double(field[static_cast<Eigen::Index>(n)]) << "\r\n";
  }
}

struct CompareRow {
  std::string method;
  Vector params;
  double rho = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string error;
};

/// Fourier baseline, probing with the plain sine preset, and probing with power-method
/// enrichment, evaluated on the same problem.
inline std::vector<CompareRow> compare(const ExperimentConfig& c, const Problem& p) {
  std::vector<CompareRow> rows;
  const int n_pm = std::max(c.power_iterations, 1);
  const std::string pm_name = "probe_pm(" + std::to_string(n_pm) + ")";
  const std::string sine_preset = c.probes == "sines_lo_hi_pm" ? "sines_3" : c.probes;
  for (const std::string method : {std::string("fourier"), std::string("probe_sines"), pm_name}) {
    CompareRow row;
    row.method = method;
    try {
      if (method == "fourier") {
        row.params = run_fourier(c, p).params;
      } else if (method == "probe_sines") {
        row.params = run_probe(c, p, sine_preset, 0).params;
      } else {
        // enrich the configured seeds; untagged middle frequencies pass through
        row.params = run_probe(c, p, c.probes, n_pm).params;
      }
      const auto e = evaluate(c, p, row.params);
      row.rho = e.rho;
      row.iterations = e.report.iterations;
      row.converged = e.report.converged;
    } catch (const Error& err) {
      row.error = err.what();
    }
    rows.push_back(row);
  }
  return rows;
}

inline void write_compare_csv(std::ostream& os, const TransmissionFamily& fam, const std::vector<CompareRow>& rows) {
  const auto names = fam.param_names();
  os << "method";
  for (const auto& n : names) {
    os << ',' << n << " [-]";
  }
  os << ",rho [-],iterations [-],converged,error\r\n";
  for (const auto& r : rows) {
    os << r.method;
    for (std::size_t i = 0; i < names.size(); ++i) {
      os << ',' << (r.params.size() > static_cast<Eigen::Index>(i) ? fmt_double(r.params[static_cast<Eigen::Index>(i)]) : "");
    }
    os << ',' << (r.error.empty() ? fmt_double(r.rho) : "") << ',' << (r.error.empty() ? std::to_string(r.iterations) : "")
       << ',' << (r.error.empty() ? (r.converged ? "true" : "false") : "false") << ',';
    if (!r.error.empty()) {
      std::string e = r.error;
      std::string q;
      for (char ch : e) {
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      }
      os << '"' << q << '"';
    }
    os << "\r\n";
  }
}

} // namespace osmprobe
