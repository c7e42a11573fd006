// Command-line front end: probe, sweep, solve, compare.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <osmprobe/osmprobe.hpp>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string out;
  std::string field;
  double tol = 0.0;
  int max_it = 0;
  int threads = 1;
};

osmprobe::ExperimentConfig load(const Options& o) {
  std::ifstream in(o.config);
  if (!in) {
    throw osmprobe::ConfigError(0, "cannot open '" + o.config + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  auto c = osmprobe::parse_config(ss.str());
  if (o.tol > 0.0) {
    c.tol = o.tol;
  }
  if (o.max_it > 0) {
    c.max_it = o.max_it;
  }
  return c;
}

/// Writes to --out when given, stdout otherwise.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw osmprobe::ConfigError(0, "cannot write '" + path + "'");
  }
  write(f);
}

int cmd_probe(const Options& o) {
  const auto c = load(o);
  const auto p = osmprobe::build_problem(c);
  const auto session = osmprobe::run_probe(c, p);
  const auto eval = osmprobe::evaluate(c, p, session.tm1, session.tm2);
  auto j = osmprobe::session_json(session);
  j["rho"] = eval.rho;
  j["osm"] = osmprobe::report_json(eval.report);
  emit(o.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto c = load(o);
  const auto p = osmprobe::build_problem(c);
  const auto s = osmprobe::sweep(c, p, o.threads);
  const auto fam = osmprobe::problem_family(c, p);
  emit(o.out, [&](std::ostream& os) { osmprobe::write_sweep_csv(os, fam, s); });
  std::cerr << "grid minimum: " << fam.param_names()[0] << '=' << osmprobe::fmt_double(s.best[0]);
  if (fam.param_count() == 2) {
    std::cerr << ' ' << fam.param_names()[1] << '=' << osmprobe::fmt_double(s.best[1]);
  }
  std::cerr << " rho=" << osmprobe::fmt_double(s.best[2]) << '\n';
  return 0;
}

int cmd_solve(const Options& o) {
  const auto c = load(o);
  const auto p = osmprobe::build_problem(c);
  const auto fam = osmprobe::problem_family(c, p);
  osmprobe::Evaluation e;
  nlohmann::json j;
  j["transmission"] = c.transmission;
  if (c.transmission == "exact") {
    e = osmprobe::evaluate(c, p, p.interface.dense(2), p.interface.dense(1));
  } else {
    osmprobe::Vector params;
    if (c.transmission == "params") {
      params = Eigen::Map<const osmprobe::Vector>(c.params.data(), static_cast<Eigen::Index>(c.params.size()));
    } else if (c.transmission == "fourier") {
      params = osmprobe::run_fourier(c, p).params;
    } else {
      params = osmprobe::run_probe(c, p).params;
    }
    e = osmprobe::evaluate(c, p, params);
    j["params"] = osmprobe::params_json(fam, params);
  }
  const auto field = osmprobe::recover_interior(p.system, p.interface, e.lambda);
  j["rho"] = e.rho;
  j["osm"] = osmprobe::report_json(e.report);
  j["field_error"] = (field - p.reference.field).norm() / std::max(p.reference.field.norm(), 1e-300);
  std::cout << j.dump(2) << '\n';
  emit(o.out, [&](std::ostream& os) { osmprobe::write_history_csv(os, e.report); });
  if (!o.field.empty()) {
    emit(o.field, [&](std::ostream& os) { osmprobe::write_field_csv(os, p.mesh, field); });
  }
  if (!e.report.converged) {
    std::cerr << (e.report.diverged ? "OSM diverged" : "OSM did not converge") << " after " << e.report.iterations
              << " iterations\n";
    return kExitNumerical;
  }
  return 0;
}

int cmd_compare(const Options& o) {
  const auto c = load(o);
  const auto p = osmprobe::build_problem(c);
  const auto rows = osmprobe::compare(c, p);
  emit(o.out, [&](std::ostream& os) { osmprobe::write_compare_csv(os, osmprobe::problem_family(c, p), rows); });
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      std::cerr << r.method << ": " << r.error << '\n';
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probing-based optimized transmission conditions for two-subdomain Schwarz methods"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment config")->required();
    sub->add_option("--out", o.out, "output file (stdout when omitted)");
    sub->add_option("--tol", o.tol, "OSM error tolerance (overrides config)");
    sub->add_option("--max-it", o.max_it, "OSM iteration limit (overrides config)");
    sub->add_option("--threads", o.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  };
  auto* probe = app.add_subcommand("probe", "run the probing algorithm and report the session as JSON");
  auto* sweep = app.add_subcommand("sweep", "CSV of rho(T) over a log-spaced parameter grid");
  auto* solve = app.add_subcommand("solve", "run the OSM iteration and dump its error history");
  auto* compare = app.add_subcommand("compare", "CSV comparing Fourier and probing parameters");
  for (auto* s : {probe, sweep, solve, compare}) {
    add_common(s);
  }
  solve->add_option("--field", o.field, "write the recovered solution field as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*probe) {
      return cmd_probe(o);
    }
    if (*sweep) {
      return cmd_sweep(o);
    }
    if (*solve) {
      return cmd_solve(o);
    }
    return cmd_compare(o);
  } catch (const osmprobe::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const osmprobe::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const osmprobe::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
