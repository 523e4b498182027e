#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "psdflow/errors.hpp"
#include "psdflow/flow/asymptotics.hpp"
#include "psdflow/flow/evolution.hpp"
#include "psdflow/io.hpp"
#include "psdflow/pencil/verify.hpp"
#include "psdflow/simulate/trials.hpp"
#include "psdflow/spectral/density.hpp"
#include "psdflow/spectral/edges.hpp"
#include "psdflow/spectral/lowrank.hpp"

namespace psdflow::cli {

namespace {

using io::format_double;
using json = nlohmann::json;

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double mu_for(const Options& o, double lambda) {
  if (o.mu_rule == "inverse-lambda") return 1.0 / lambda;
  return o.mu;
}

ModelParams params_at(const Options& o, double lambda) { return {o.phi, o.psi, lambda, mu_for(o, lambda)}; }
ModelParams params_of(const Options& o) { return params_at(o, o.lambda); }

std::vector<double> lambdas(const Options& o) {
  return o.lambda_grid.empty() ? std::vector<double>{o.lambda} : parse_grid(o.lambda_grid);
}

std::vector<double> times_of(const Options& o) {
  if (!o.times.empty()) return parse_grid(o.times);
  if (!(o.tmax > 0.0)) return {0.0};
  std::vector<double> t(21);
  for (int i = 0; i <= 20; ++i) t[static_cast<std::size_t>(i)] = o.tmax * i / 20.0;
  return t;
}

// Numeric cells become numbers, everything else stays text.
json csv_to_json(const std::string& csv) {
  const auto table = io::parse_csv(csv);
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      try {
        row[table.header[i]] = io::parse_double(r[i]);
      } catch (const ValidationError&) {
        row[table.header[i]] = r[i];
      }
    }
    rows.push_back(row);
  }
  return rows;
}

class Emitter {
 public:
  Emitter(const Options& o, std::ostream& out) : o_(o), out_(out) {
    if (!o.out.empty()) std::filesystem::create_directories(o.out);
  }

  void file(const std::string& name, const std::string& text) const {
    if (!o_.out.empty()) io::write_text(std::filesystem::path(o_.out) / name, text);
  }

  /// Primary output: written to `name` and printed in the requested format.
  void table(const std::string& name, const std::string& csv) const {
    file(name, csv);
    if (o_.format == "json") {
      out_ << csv_to_json(csv).dump(2) << "\n";
    } else {
      out_ << csv;
    }
  }

  void document(const std::string& name, const json& j) const {
    file(name, j.dump(2) + "\n");
    out_ << j.dump(2) << "\n";
  }

  void scalar(const std::string& name, const std::string& key, double v) const {
    json j;
    j[key] = v;
    file(name, j.dump(2) + "\n");
    if (o_.format == "json") {
      out_ << j.dump(2) << "\n";
    } else {
      out_ << format_double(v) << "\n";
    }
  }

 private:
  const Options& o_;
  std::ostream& out_;
};

simulate::SimConfig sim_config(const Options& o) {
  if (o.n < 1) throw ValidationError("--n must be >= 1");
  simulate::SimConfig cfg;
  cfg.n = o.n;
  cfg.d = o.d_set ? o.d : std::max(1, static_cast<int>(std::lround(o.phi * o.n)));
  cfg.m = o.m_set ? o.m : std::max(1, static_cast<int>(std::lround(o.psi * o.n)));
  cfg.lambda = o.lambda;
  cfg.mu = mu_for(o, o.lambda);
  cfg.dt = o.dt;
  cfg.t_max = o.tmax;
  cfg.record_times = times_of(o);
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.integrator = simulate::parse_integrator(o.integrator);
  cfg.goe_diagonal = o.goe;
  cfg.validate();
  return cfg;
}

// Theory ratios follow the simulated sizes; explicit ratios must match them.
Options matched_ratios(Options o) {
  const auto cfg = sim_config(o);
  auto check = [&](bool explicit_ratio, double ratio, int size, const char* name) {
    if (explicit_ratio && std::abs(ratio * o.n - size) > 0.5) {
      throw ValidationError(std::string("--") + name + " " + format_double(ratio) + " does not match size " +
                            std::to_string(size) + " at n = " + std::to_string(o.n));
    }
  };
  check(o.phi_set, o.phi, cfg.d, "phi");
  check(o.psi_set, o.psi, cfg.m, "psi");
  o.phi = static_cast<double>(cfg.d) / o.n;
  o.psi = static_cast<double>(cfg.m) / o.n;
  return o;
}

void cmd_density(const Options& o, const Emitter& emit) {
  const std::vector<double> phis = o.phi_list.empty() ? std::vector<double>{o.phi} : parse_grid(o.phi_list);
  std::vector<ModelParams> all;
  for (double phi : phis) all.emplace_back(phi, o.psi, o.lambda, mu_for(o, o.lambda));
  io::CsvWriter summary({"phi", "bulk", "lo", "hi", "upper_edge", "mass_P", "mass_Q"});
  for (const auto& p : all) {
    const std::string suffix = phis.size() > 1 ? "_phi" + format_double(p.phi()) : "";
    const auto grid = spectral::GridSpec::around_support(p, o.points);
    const auto rho_p = spectral::density(spectral::TransformKind::P, p, grid);
    const auto rho_q = spectral::density(spectral::TransformKind::Q, p, grid);
    emit.file("density_P" + suffix + ".csv", spectral::density_csv(rho_p));
    emit.file("density_Q" + suffix + ".csv", spectral::density_csv(rho_q));
    const auto edges = spectral::edge_report(p);
    emit.file("edges" + suffix + ".json", spectral::edge_report_json(edges) + "\n");
    const auto support = spectral::support_intervals(p);
    for (std::size_t b = 0; b < support.size(); ++b) {
      summary.add_row({format_double(p.phi()), std::to_string(b + 1), format_double(support[b].lo),
                       format_double(support[b].hi), format_double(edges.upper_edge), format_double(rho_p.mass),
                       format_double(rho_q.mass)});
    }
  }
  emit.table("support.csv", summary.str());
}

void cmd_evolve(const Options& o, const Emitter& emit) {
  const auto times = times_of(o);
  emit.table("evolve.csv", flow::curve_csv(flow::mse_curve(params_of(o), times)));
}

void cmd_asymptote(const Options& o, const Emitter& emit) {
  io::CsvWriter csv({"lambda", "mu", "alpha", "q_inf", "p_inf", "mse_inf", "regime"});
  for (double lambda : lambdas(o)) {
    const auto p = params_at(o, lambda);
    const auto s = flow::asymptotics(p);
    csv.add_row({format_double(lambda), format_double(p.mu()), format_double(s.alpha), format_double(s.q_inf),
                 format_double(s.p_inf), format_double(s.mse_inf), flow::regime_name(s.regime)});
  }
  emit.table("asymptote.csv", csv.str());
}

void cmd_phase(const Options& o, const Emitter& emit) {
  const MuRule rule = o.mu_rule == "inverse-lambda" ? inverse_lambda_rule() : constant_mu_rule(o.mu);
  emit.scalar("phase.json", "lambda_c", spectral::critical_lambda(o.phi, o.psi, rule));
}

void cmd_lowrank(const Options& o, const Emitter& emit) {
  emit.scalar("lowrank.json", "Q1", spectral::lowrank_Q1(o.lambda).physical);
}

void cmd_simulate(const Options& o, const Emitter& emit) {
  const auto report = simulate::run_trials(sim_config(o));
  emit.file("trials.csv", simulate::trials_csv(report.trials));
  emit.table("aggregate.csv", simulate::aggregate_csv(report.aggregate));
}

struct Comparison {
  io::CsvWriter csv{{"x", "theory", "sim_mean", "sim_stderr", "abs_dev", "dev_in_stderr"}};
  double max_abs_dev = 0.0;
  double max_dev_sigma = 0.0;
  bool pass = true;

  void add(double x, double theory, double mean, double se, double tolerance) {
    const double dev = std::abs(mean - theory);
    const double sigma = se > 0.0 ? dev / se : (dev > 0.0 ? INFINITY : 0.0);
    csv.add_row({format_double(x), format_double(theory), format_double(mean), format_double(se),
                 format_double(dev), format_double(sigma)});
    max_abs_dev = std::max(max_abs_dev, dev);
    max_dev_sigma = std::max(max_dev_sigma, sigma);
    pass = pass && dev <= std::max(tolerance, 3.0 * se);
  }
};

void cmd_compare(const Options& raw, const Emitter& emit) {
  const Options o = matched_ratios(raw);
  Comparison cmp;
  if (o.target == "q" || o.target == "mse") {
    const auto report = simulate::run_trials(sim_config(o));
    std::vector<double> times;
    for (const auto& row : report.aggregate) times.push_back(row.t);
    const auto theory = o.target == "q" ? flow::evolve_q(params_of(o), times) : flow::mse_curve(params_of(o), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto& a = report.aggregate[k];
      if (o.target == "q") {
        cmp.add(times[k], theory.q[k], a.q_mean, a.q_stderr, o.tolerance);
      } else {
        cmp.add(times[k], theory.mse[k], a.mse_mean, a.mse_stderr, o.tolerance);
      }
    }
  } else if (o.target == "mse_inf") {
    for (double lambda : lambdas(o)) {
      Options at = o;
      at.lambda = lambda;
      at.integrator = "closed_form";
      at.times = format_double(o.tmax);
      const auto report = simulate::run_trials(sim_config(at));
      const auto theory = flow::asymptotics(params_at(o, lambda));
      cmp.add(lambda, theory.mse_inf, report.aggregate.back().mse_mean, report.aggregate.back().mse_stderr,
              o.tolerance);
    }
  } else {
    throw ValidationError("--target must be q, mse or mse_inf");
  }
  emit.file("compare.csv", cmp.csv.str());
  json j;
  j["target"] = o.target;
  j["max_abs_dev"] = cmp.max_abs_dev;
  j["max_dev_in_stderr_units"] = cmp.max_dev_sigma;
  j["pass"] = cmp.pass;
  emit.document("compare_summary.json", j);
}

void cmd_pencil(const Options& o, const Emitter& emit) {
  pencil::FiniteNRoute route = pencil::FiniteNRoute::automatic;
  if (o.route == "literal") {
    route = pencil::FiniteNRoute::literal;
  } else if (o.route == "structured") {
    route = pencil::FiniteNRoute::structured;
  } else if (o.route != "automatic") {
    throw ValidationError("--route must be automatic, literal or structured");
  }
  const auto report = pencil::verify_finite_n(params_of(o), {o.z_re, o.z_im}, o.n, o.trials, o.seed, route);
  emit.document("pencil_check.json", json::parse(pencil::report_json(report)));
}

json resolved(const Options& o) {
  json j;
  j["command"] = o.command;
  j["phi"] = o.phi;
  j["psi"] = o.psi;
  j["lambda"] = o.lambda;
  j["mu"] = o.mu;
  j["mu_rule"] = o.mu_rule;
  j["tmax"] = o.tmax;
  j["times"] = o.times;
  j["n"] = o.n;
  j["m"] = o.m;
  j["d"] = o.d;
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["dt"] = o.dt;
  j["format"] = o.format;
  j["lambda_grid"] = o.lambda_grid;
  j["phi_list"] = o.phi_list;
  j["integrator"] = o.integrator;
  j["target"] = o.target;
  j["tolerance"] = o.tolerance;
  j["points"] = o.points;
  j["z_re"] = o.z_re;
  j["z_im"] = o.z_im;
  j["route"] = o.route;
  j["goe"] = o.goe;
  return j;
}

void validate(const Options& o) {
  if (o.format != "csv" && o.format != "json") throw ValidationError("--format must be csv or json");
  if (o.mu_rule != "constant" && o.mu_rule != "inverse-lambda") {
    throw ValidationError("--mu-rule must be constant or inverse-lambda");
  }
  if (o.mu_rule == "inverse-lambda" && o.mu_set) {
    throw ValidationError("--mu conflicts with --mu-rule inverse-lambda");
  }
  if (o.trials < 1) throw ValidationError("--trials must be >= 1");
  if (o.points < 3) throw ValidationError("--points must be >= 3");
  if (o.command != "phase" && o.command != "lowrank") {
    for (double lambda : lambdas(o)) (void)params_at(o, lambda);
  }
  if (!o.phi_list.empty()) {
    for (double p : parse_grid(o.phi_list)) (void)ModelParams(p, o.psi, o.lambda, mu_for(o, o.lambda));
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ValidationError("empty grid");
  std::vector<std::string> parts;
  const char sep = t.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(t);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(trim(item));
  if (sep == ',') {
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(io::parse_double(p));
    return out;
  }
  if (parts.size() != 3) throw ValidationError("grid '" + t + "' must be a:b:k");
  const double a = io::parse_double(parts[0]);
  const double b = io::parse_double(parts[1]);
  const double k = io::parse_double(parts[2]);
  if (!(k >= 1.0) || k != std::floor(k)) throw ValidationError("grid point count must be a positive integer");
  if (k == 1.0) return {a};
  std::vector<double> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a + (b - a) * static_cast<double>(i) / (k - 1.0);
  out.back() = b;
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Spectral theory and simulation of gradient flow for matrix denoising", "psdflow"};
  app.set_config("--config", "", "Flat key = value file; explicit flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  auto* phi = app.add_option("--phi", o.phi, "d / n");
  auto* psi = app.add_option("--psi", o.psi, "m / n");
  app.add_option("--lambda", o.lambda, "signal-to-noise ratio");
  auto* mu = app.add_option("--mu", o.mu, "ridge coefficient");
  app.add_option("--mu-rule", o.mu_rule, "constant | inverse-lambda");
  app.add_option("--tmax", o.tmax, "final time");
  app.add_option("--times", o.times, "time grid, a:b:k or a comma list");
  app.add_option("--n", o.n, "matrix size");
  auto* m = app.add_option("--m", o.m, "columns of X (default psi n)");
  auto* d = app.add_option("--d", o.d, "columns of X* (default phi n)");
  app.add_option("--trials", o.trials, "independent trials");
  app.add_option("--seed", o.seed, "base seed");
  app.add_option("--dt", o.dt, "gradient-descent / RK4 step");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--format", o.format, "csv | json");
  app.add_option("--lambda-grid", o.lambda_grid, "lambda sweep a:b:k or a comma list");
  app.add_option("--phi-list", o.phi_list, "phi sweep for density");
  app.add_option("--integrator", o.integrator, "euler_gd | rk4_ode | closed_form");
  app.add_option("--target", o.target, "compare target: q | mse | mse_inf");
  app.add_option("--tolerance", o.tolerance, "absolute deviation always accepted by compare");
  app.add_option("--points", o.points, "density grid points");
  app.add_option("--z-re", o.z_re, "pencil-check spectral parameter, real part");
  app.add_option("--z-im", o.z_im, "pencil-check spectral parameter, imaginary part");
  app.add_option("--route", o.route, "pencil-check route: automatic | literal | structured");
  app.add_flag("--goe", o.goe, "noise diagonal variance 2/n");

  const std::map<std::string, std::pair<std::string, std::function<void(const Options&, const Emitter&)>>>
      commands = {
          {"density", {"rho_P, rho_Q and support edges", cmd_density}},
          {"evolve", {"q_t, p_t and the error along the flow", cmd_evolve}},
          {"asymptote", {"t -> infinity limit, optionally over a lambda grid", cmd_asymptote}},
          {"phase", {"critical lambda where the upper edge crosses 0", cmd_phase}},
          {"lowrank", {"low-rank overlap Q(1)", cmd_lowrank}},
          {"simulate", {"finite-n trials", cmd_simulate}},
          {"compare", {"theory against simulation", cmd_compare}},
          {"pencil-check", {"finite-n block traces of the M_z pencil", cmd_pencil}},
      };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  o.command = app.get_subcommands().front()->get_name();
  o.phi_set = phi->count() > 0;
  o.psi_set = psi->count() > 0;
  o.mu_set = mu->count() > 0;
  o.m_set = m->count() > 0;
  o.d_set = d->count() > 0;

  try {
    validate(o);
    const Emitter emit(o, out);
    commands.at(o.command).second(o, emit);
    emit.file("config.json", resolved(o).dump(2) + "\n");
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace psdflow::cli
