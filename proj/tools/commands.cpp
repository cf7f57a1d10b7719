#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "eulerlab/asymconst.hpp"
#include "eulerlab/density.hpp"
#include "eulerlab/euler.hpp"
#include "eulerlab/montecarlo.hpp"
#include "eulerlab/saddle.hpp"
#include "eulerlab/specfun.hpp"
#include "eulerlab/verification.hpp"

namespace eulerlab::cli {

using nlohmann::json;

namespace {

struct Options {
  double sigma = 1.0;
  std::optional<double> tau;
  std::optional<double> t;
  std::optional<std::uint64_t> prime_cutoff;
  std::optional<int> quad_order;
  std::uint64_t seed = 1;
  std::size_t n = 100000;
  std::string out;
  std::string format = "json";

  // command specific
  std::string methods = "all";
  std::string direction = "upper";
  int order = 2;
  std::uint64_t mc_cutoff = 1000;
  double kappa = 0.0;
  std::string raw;
  double span = 8.0;
  int points = 161;
  double tau_min = 1.0, tau_max = 0.0, tau_step = 1.0;
  std::vector<int> criteria;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json config_json(const euler::ModelConfig& c) {
  return {{"sigma", c.sigma},
          {"prime_cutoff", c.prime_cutoff},
          {"quadrature_order", c.quadrature_order},
          {"tail_mode", euler::to_string(c.tail_mode)},
          {"smooth_limit", c.smooth_limit},
          {"bucket_width", c.bucket_width}};
}

double resolve_tau(const Options& o) {
  if (o.tau && o.t) throw Usage("give --tau or --t, not both");
  if (o.t) {
    if (o.sigma != 1.0) throw Usage("--t is the sigma = 1 parametrization");
    if (!(*o.t > 0)) throw Usage("--t must be positive");
    return saddle::tau_from_t(*o.t);
  }
  if (!o.tau) throw Usage("--tau or --t is required");
  return *o.tau;
}

euler::ModelConfig resolve_config(const Options& o, double tau) {
  euler::ModelConfig c = saddle::config_for_tau(o.sigma, tau);
  if (o.prime_cutoff) {
    c.prime_cutoff = *o.prime_cutoff;
    c.tail_mode = euler::TailMode::analytic;
    c.smooth_limit = 0.0;
  }
  if (o.quad_order) c.quadrature_order = *o.quad_order;
  c.validate();
  return c;
}

euler::ModelConfig truncated_config(const Options& o, std::uint64_t cutoff) {
  euler::ModelConfig c;
  c.sigma = o.sigma;
  c.prime_cutoff = o.prime_cutoff.value_or(cutoff);
  c.tail_mode = euler::TailMode::none;
  if (o.quad_order) c.quadrature_order = *o.quad_order;
  c.validate();
  return c;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string emit_record(const Options& o, const json& j) { return o.format == "csv" ? json_to_csv(j) : dump(j); }

void check_sigma(const Options& o) {
  if (!(o.sigma > 0.5 && o.sigma <= 1.0)) throw Usage("--sigma must lie in (1/2, 1]");
}

// constants

void cmd_constants(const Options& o, Outcome& out) {
  check_sigma(o);
  const auto& t = asymconst::expansion_constants(o.sigma);
  json g = json::array(), ge = json::array();
  for (int n = 0; n < 3; ++n) {
    g.push_back({t.g[n][0], t.g[n][1], t.g[n][2]});
    ge.push_back({t.g_err[n][0], t.g_err[n][1], t.g_err[n][2]});
  }
  json j = {{"sigma", t.sigma}, {"g", g}, {"g_error", ge}, {"a0", t.a0}, {"a1", t.a1},
            {"a0_error", t.a0_err}, {"a1_error", t.a1_err}};
  if (t.sigma_one) {
    const auto lam = asymconst::crosscheck_two_routes();
    j["A"] = t.A;
    j["A_closed"] = t.A_closed;
    j["b1"] = t.b1;
    j["a1_chain"] = t.a1_chain;
    j["a1_closed"] = t.a1_closed;
    j["A_two_route"] = {{"via_g", lam.a_via_g}, {"via_h", lam.a_via_h}, {"log2_piece", lam.log2_piece},
                        {"error", lam.error}};
  } else {
    j["X"] = t.X;
    j["A_sigma"] = t.A_sigma;
    j["B_sigma"] = t.B_sigma;
    j["A1"] = {{"slope", t.A1_slope}, {"intercept", t.A1_intercept}, {"intercept_printed", t.A1_intercept_printed}};
    j["B1"] = {{"slope", t.B1_slope}, {"intercept", t.B1_intercept}};
  }
  out.config = {{"sigma", o.sigma}};
  out.artifacts.push_back({"stdout", emit_record(o, j)});
}

// saddle

void cmd_saddle(const Options& o, Outcome& out) {
  check_sigma(o);
  const double tau = resolve_tau(o);
  const auto cfg = resolve_config(o, tau);
  const auto s = saddle::solve_saddle(cfg, tau);
  const auto r = euler::cgf(cfg, s.kappa, 2);
  json trace = json::array();
  for (const auto& st : s.trace)
    trace.push_back({{"kappa", st.kappa}, {"fprime", st.fprime}, {"lo", st.lo}, {"hi", st.hi},
                     {"step", st.newton ? "newton" : "bisection"}});
  json j = {{"sigma", o.sigma},       {"tau", tau},           {"kappa", s.kappa},
            {"f", r.f(0)},            {"f1", r.f(1)},         {"f2", r.f(2)},
            {"residual", s.residual}, {"iterations", s.iterations}, {"guess_used", s.guess_used},
            {"guess_source", s.guess_source}};
  if (saddle::guess_valid(o.sigma, tau)) {
    j["guess_n1"] = saddle::saddle_guess(o.sigma, tau, 1);
    try {
      j["guess_n2"] = saddle::saddle_guess(o.sigma, tau, 2);
    } catch (const DomainError&) {
      j["guess_n2"] = nullptr;
    }
  }
  if (o.sigma == 1.0) j["t"] = saddle::t_from_tau(tau);
  j["trace"] = trace;
  out.config = config_json(cfg);
  out.config["tau"] = tau;
  out.artifacts.push_back({"stdout", emit_record(o, j)});
}

// density

void cmd_density(const Options& o, Outcome& out) {
  check_sigma(o);
  if (o.points < 2) throw Usage("--points must be at least 2");
  if (!(o.span > 0)) throw Usage("--span must be positive");
  const double tau = resolve_tau(o);
  const auto cfg = resolve_config(o, tau);
  const density::Inversion inv(cfg, tau);
  const auto curve = density::tilted_density(cfg, tau, density::standard_grid(inv.variance(), o.span, o.points));
  std::string text;
  if (o.format == "csv") {
    text = "x,n_inversion,n_gaussian,log_m\n";
    for (const auto& p : curve.grid)
      text += format_number(p.x) + "," + format_number(p.n_inversion) + "," + format_number(p.n_gaussian) + "," +
              format_number(p.log_m) + "\n";
  } else {
    json j = {{"sigma", curve.sigma}, {"tau", curve.tau}, {"kappa", curve.kappa}, {"variance", curve.variance},
              {"truncation_V", curve.truncation_V}, {"estimated_inversion_error", curve.estimated_inversion_error}};
    json xs = json::array(), ni = json::array(), ng = json::array(), lm = json::array();
    for (const auto& p : curve.grid) {
      xs.push_back(p.x);
      ni.push_back(p.n_inversion);
      ng.push_back(p.n_gaussian);
      lm.push_back(p.log_m);
    }
    j["x"] = xs;
    j["n_inversion"] = ni;
    j["n_gaussian"] = ng;
    j["log_m"] = lm;
    text = dump(j);
  }
  out.config = config_json(cfg);
  out.config["tau"] = tau;
  out.config["span"] = o.span;
  out.config["points"] = o.points;
  out.artifacts.push_back({"stdout", text});
}

// tail

std::vector<density::Method> parse_methods(const std::string& s) {
  if (s == "all") return {density::Method::saddle, density::Method::integrate, density::Method::asymptotic};
  std::vector<density::Method> m;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      m.push_back(density::method_from_string(item));
    } catch (const DomainError&) {
      throw Usage("unknown method '" + item + "'");
    }
  }
  if (m.empty()) throw Usage("--methods is empty");
  return m;
}

json notes_json(const std::vector<std::string>& notes) { return json(notes); }

void cmd_tail(const Options& o, Outcome& out) {
  check_sigma(o);
  const double tau = resolve_tau(o);
  const auto methods = parse_methods(o.methods);
  density::Direction dir;
  try {
    dir = density::direction_from_string(o.direction);
  } catch (const DomainError&) {
    throw Usage("--direction must be upper or lower");
  }
  if (o.order < 1 || o.order > 2) throw Usage("--order must be 1 or 2");
  const double level = dir == density::Direction::upper ? tau : -tau;
  const auto cfg = resolve_config(o, level);
  const auto e = density::tail(cfg, tau, methods, dir, o.order);
  json j = {{"sigma", e.sigma},
            {"tau", e.tau},
            {"direction", density::to_string(e.direction)},
            {"kappa", e.kappa},
            {"log_phi_saddle", e.log_phi_saddle},
            {"log_phi_integrated", e.log_phi_integrated},
            {"log_phi_asymptotic", e.log_phi_asymptotic},
            {"asymptotic_order", e.asymptotic_order},
            {"saddle_error_scale", e.saddle_error_scale},
            {"integrate_error", e.integrate_error},
            {"saddle_minus_integrated", e.saddle_minus_integrated},
            {"notes", notes_json(e.notes)}};
  if (o.sigma == 1.0) j["t"] = saddle::t_from_tau(tau);

  // Monte Carlo cross-check on the model truncated at the sampling cutoff,
  // where sampling is exact.
  json mc = {{"prime_cutoff", o.prime_cutoff.value_or(o.mc_cutoff)}, {"n", o.n}, {"seed", o.seed}};
  if (dir != density::Direction::upper) {
    mc["skipped"] = "tilted sampling covers the upper tail only";
  } else {
    try {
      const auto tc = truncated_config(o, o.mc_cutoff);
      if (o.n > montecarlo::max_samples(tc)) throw Usage("--n exceeds the draw budget for this cutoff");
      const auto ref = density::tail(tc, tau, {density::Method::integrate});
      const auto is = montecarlo::tilted_tail(tc, tau, o.seed, o.n);
      mc["log_phi_integrated"] = ref.log_phi_integrated;
      mc["log_phi_tilted"] = is.log_phi;
      mc["relative_stderr"] = is.relative_stderr;
      mc["kappa"] = is.kappa;
      mc["effective_sample_size"] = is.effective_sample_size;
      mc["z"] = (is.phi() - std::exp(ref.log_phi_integrated)) / is.std_error();
    } catch (const NumericError& err) {
      mc["skipped"] = std::string("numeric failure: ") + err.what();
    } catch (const DomainError& err) {
      mc["skipped"] = std::string("not applicable: ") + err.what();
    }
  }
  j["monte_carlo"] = mc;
  out.config = config_json(cfg);
  out.config["tau"] = tau;
  out.config["methods"] = o.methods;
  out.config["mc_cutoff"] = o.prime_cutoff.value_or(o.mc_cutoff);
  out.config["n"] = o.n;
  out.artifacts.push_back({"stdout", emit_record(o, j)});
}

// sample

void cmd_sample(const Options& o, Outcome& out) {
  check_sigma(o);
  const auto cfg = truncated_config(o, o.mc_cutoff);
  if (o.n < 2) throw Usage("--n must be at least 2");
  if (o.n > montecarlo::max_samples(cfg)) throw Usage("--n exceeds the draw budget for this cutoff");
  const auto s = montecarlo::sample_log_l(cfg, o.seed, o.n, o.kappa);
  auto est = [](const montecarlo::Estimate& e) { return json{{"value", e.value}, {"std_error", e.std_error}}; };
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  json j = {{"sigma", o.sigma},
            {"prime_cutoff", cfg.prime_cutoff},
            {"primes", s.primes},
            {"n", s.n},
            {"seed", s.seed},
            {"kappa", s.kappa},
            {"min", *lo},
            {"max", *hi},
            {"truncation_bias_bound", s.truncation_bias_bound},
            {"truncation_mean_shift", s.truncation_mean_shift},
            {"truncation_rms", s.truncation_rms}};
  if (o.kappa == 0.0) {
    j["mean"] = est(montecarlo::sample_mean(s));
    j["variance"] = est(montecarlo::sample_variance(s));
    if (o.tau) j["tail"] = est(montecarlo::empirical_tail(s, *o.tau));
  } else {
    j["weighted_mean"] = est(montecarlo::weighted_mean(s));
    j["log_normalizer"] = s.log_normalizer;
  }
  out.config = config_json(cfg);
  out.config["kappa"] = o.kappa;
  out.config["n"] = o.n;
  out.artifacts.push_back({"stdout", emit_record(o, j)});
  if (!o.raw.empty()) {
    std::string text = s.log_weights.empty() ? "log_l\n" : "log_l,log_weight\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      text += format_number(s.values[i]);
      if (!s.log_weights.empty()) text += "," + format_number(s.log_weights[i]);
      text += "\n";
    }
    out.artifacts.push_back({o.raw, text});
  }
}

// verify

void cmd_verify(const Options& o, Outcome& out) {
  verification::Report rep;
  if (o.criteria.empty()) {
    rep = verification::run_all();
  } else {
    for (int id : o.criteria) {
      if (id < 1 || id >= verification::kCriteria) throw Usage("--criterion must lie in 1..11");
      rep.results.push_back(verification::run_criterion(id));
    }
  }
  std::string text;
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : rep.results)
      arr.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"details", r.details}, {"seconds", r.seconds}});
    text = dump({{"criteria", arr}, {"all_pass", rep.all_pass()}});
  } else {
    for (const auto& r : rep.results) {
      for (const auto& d : r.details) text += "   " + d + "\n";
      text += verification::format_line(r) + "\n";
    }
  }
  out.config = {{"criteria", o.criteria}};
  out.artifacts.push_back({"stdout", text});
  if (!rep.all_pass()) {
    out.status = kFailure;
    out.diagnostic = "verify: one or more criteria failed";
  }
}

// scan

void cmd_scan(const Options& o, Outcome& out) {
  check_sigma(o);
  if (!(o.tau_step > 0)) throw Usage("--tau-step must be positive");
  if (o.order < 1 || o.order > 2) throw Usage("--order must be 1 or 2");
  std::string text =
      "tau,kappa,f,f1,f2,log_phi_saddle,log_phi_integrated,log_phi_asymptotic,asymptotic_residual,"
      "saddle_over_asymptotic,error\n";
  std::vector<double> taus;
  for (long k = 0;; ++k) {
    const double tau = o.tau_min + double(k) * o.tau_step;
    if (tau > o.tau_max + 1e-9 * o.tau_step) break;
    taus.push_back(tau);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double tau : taus) {
    double kappa = nan, f0 = nan, f1 = nan, f2 = nan;
    density::TailEstimate e;
    std::string error;
    try {
      const auto cfg = resolve_config(o, tau);
      e = density::tail(cfg, tau, {density::Method::saddle, density::Method::integrate, density::Method::asymptotic},
                        density::Direction::upper, o.order);
      kappa = e.kappa;
      const auto r = euler::cgf(cfg, kappa, 2);
      f0 = r.f(0);
      f1 = r.f(1);
      f2 = r.f(2);
    } catch (const std::exception& err) {
      error = err.what();
      std::replace(error.begin(), error.end(), ',', ';');
      std::replace(error.begin(), error.end(), '\n', ' ');
    }
    text += format_number(tau) + "," + format_number(kappa) + "," + format_number(f0) + "," + format_number(f1) +
            "," + format_number(f2) + "," + format_number(e.log_phi_saddle) + "," +
            format_number(e.log_phi_integrated) + "," + format_number(e.log_phi_asymptotic) + "," +
            format_number(e.log_phi_saddle - e.log_phi_asymptotic) + "," +
            format_number(e.log_phi_saddle / e.log_phi_asymptotic) + "," + error + "\n";
  }
  out.config = {{"sigma", o.sigma}, {"tau_min", o.tau_min}, {"tau_max", o.tau_max}, {"tau_step", o.tau_step},
                {"order", o.order}};
  if (o.prime_cutoff) out.config["prime_cutoff"] = *o.prime_cutoff;
  if (o.quad_order) out.config["quadrature_order"] = *o.quad_order;
  out.artifacts.push_back({"stdout", text});
}

void add_common(CLI::App* sub, Options& o, bool model, bool tau) {
  sub->add_option("--out", o.out, "Write the primary output here (manifest goes to <out>.manifest.json)");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  if (!model) return;
  sub->add_option("--sigma", o.sigma, "Real part sigma in (1/2, 1]");
  sub->add_option("--prime-cutoff", o.prime_cutoff, "Exact primes up to this cutoff");
  sub->add_option("--quad-order", o.quad_order, "Gauss-Legendre order per prime");
  if (tau) {
    sub->add_option("--tau", o.tau, "Tail level tau");
    sub->add_option("--t", o.t, "sigma = 1 level t, tau = 2 log t + 2 gamma");
  }
}

}  // namespace

Outcome run(const std::vector<std::string>& args) {
  Options o;
  CLI::App app{"Random Euler product workbench", "eulerlab"};
  app.require_subcommand(1);

  auto* constants = app.add_subcommand("constants", "Expansion constants as JSON");
  add_common(constants, o, true, false);
  auto* sadd = app.add_subcommand("saddle", "Solve f'(kappa) = tau");
  add_common(sadd, o, true, true);
  auto* dens = app.add_subcommand("density", "Tilted density on a standard grid");
  add_common(dens, o, true, true);
  dens->add_option("--span", o.span, "Grid half-width in standard deviations");
  dens->add_option("--points", o.points, "Grid points");
  auto* tl = app.add_subcommand("tail", "Tail probability by every method, with a Monte Carlo cross-check");
  add_common(tl, o, true, true);
  tl->add_option("--methods", o.methods, "all, or a comma list of saddle, integrate, asymptotic");
  tl->add_option("--direction", o.direction, "upper or lower");
  tl->add_option("--order", o.order, "Terms of the large-tau expansion (1 or 2)");
  tl->add_option("--n", o.n, "Monte Carlo samples");
  tl->add_option("--seed", o.seed, "Monte Carlo seed");
  tl->add_option("--mc-cutoff", o.mc_cutoff, "Prime cutoff of the sampled model");
  auto* smp = app.add_subcommand("sample", "Monte Carlo samples of the truncated log L");
  add_common(smp, o, true, true);
  smp->add_option("--n", o.n, "Samples");
  smp->add_option("--seed", o.seed, "Seed");
  smp->add_option("--kappa", o.kappa, "Exponential tilt (0 for plain sampling)");
  smp->add_option("--mc-cutoff", o.mc_cutoff, "Prime cutoff when --prime-cutoff is absent");
  smp->add_option("--raw", o.raw, "Also write the raw samples as CSV");
  auto* ver = app.add_subcommand("verify", "Run the acceptance criteria");
  add_common(ver, o, false, false);
  ver->add_option("--criterion", o.criteria, "Run only these criteria (1..11)");
  auto* scan = app.add_subcommand("scan", "CSV of tail estimates over a tau range");
  add_common(scan, o, true, false);
  scan->add_option("--tau-min", o.tau_min, "First tau");
  scan->add_option("--tau-max", o.tau_max, "Last tau (below --tau-min gives an empty table)");
  scan->add_option("--tau-step", o.tau_step, "Step in tau");
  scan->add_option("--order", o.order, "Terms of the large-tau expansion (1 or 2)");

  Outcome out;
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out.artifacts.push_back({"stdout", sub->help()});
    return out;
  } catch (const CLI::ParseError& e) {
    out.status = kUsage;
    out.diagnostic = std::string(e.what()) + "\nRun with --help for usage.";
    return out;
  }
  CLI::App* sub = app.get_subcommands().front();
  out.command = sub->get_name();
  out.seed = o.seed;
  if (out.command == "verify" && ver->count("--format") == 0) o.format = "text";

  try {
    if (out.command == "constants") cmd_constants(o, out);
    else if (out.command == "saddle") cmd_saddle(o, out);
    else if (out.command == "density") cmd_density(o, out);
    else if (out.command == "tail") cmd_tail(o, out);
    else if (out.command == "sample") cmd_sample(o, out);
    else if (out.command == "verify") cmd_verify(o, out);
    else if (out.command == "scan") cmd_scan(o, out);
  } catch (const Usage& e) {
    out.status = kUsage;
    out.diagnostic = out.command + ": " + e.what();
    out.artifacts.clear();
  } catch (const DomainError& e) {
    out.status = kUsage;
    out.diagnostic = out.command + ": " + e.what();
    out.artifacts.clear();
  } catch (const std::exception& e) {
    out.status = kFailure;
    out.diagnostic = out.command + ": " + e.what();
    out.artifacts.clear();
  }
  if (out.status != kUsage && !o.out.empty() && !out.artifacts.empty()) out.artifacts.front().name = o.out;
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_to_csv(const json& record) {
  std::string text = "key,value\n";
  const json flat = record.flatten();
  for (const auto& [key, value] : flat.items()) {
    std::string v;
    if (value.is_number_float()) v = format_number(value.get<double>());
    else if (value.is_null()) v = "nan";
    else if (value.is_string()) v = value.get<std::string>();
    else v = value.dump();
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    text += key + "," + v + "\n";
  }
  return text;
}

}  // namespace eulerlab::cli
