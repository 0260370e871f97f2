#include "kamforge/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "kamforge/cli/config.hpp"
#include "kamforge/cli/grid_io.hpp"
#include "kamforge/diophantine.hpp"
#include "kamforge/errors.hpp"
#include "kamforge/hypotheses.hpp"
#include "kamforge/kam.hpp"
#include "kamforge/modulus.hpp"
#include "kamforge/regularity.hpp"
#include "kamforge/smoothing.hpp"

namespace kamforge::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kTraceColumns =
    "trace.csv columns:\n"
    "  nu                 iteration index\n"
    "  r                  strip radius epsilon 2^-nu\n"
    "  pre_eta_defect     sup |K_eta(xi,0) - omega| before the step\n"
    "  pre_xi_defect      sup |K_xi(xi,0)| before the step\n"
    "  eta_defect         sup |K_eta(xi,0) - omega| after the step\n"
    "  xi_defect          sup |K_xi(xi,0)| after the step\n"
    "  energy_defect      sup |K(xi,0) - mean| after the step\n"
    "  step_displacement  sup |psi - id| at eta = 0\n"
    "  step_jacobian      sup |psi_zeta - I| at eta = 0\n"
    "  hessian_drift      sup |K_etaeta after - before|\n"
    "  gradient_U         sup |U_x|\n"
    "  increment_u        sup |u^nu - u^(nu-1)|\n"
    "  increment_v        sup |v^nu o (u^nu)^-1 - previous| on the x-grid\n"
    "  symplecticity      max |J^T Omega J - Omega| at seeded points\n"
    "  delta_star         max of the scaled energy and frequency defects entering the step\n"
    "  inverse_norm       |mean K_etaeta^-1|\n"
    "  min_divisor        smallest active |<k, omega>|\n";

constexpr const char* kRemainingColumns =
    "remaining.csv columns:\n"
    "  gamma  table abscissa\n"
    "  L      balanced scale L(gamma)\n"
    "  outer  gamma * integral_L^eps phi(t) / t^(k*+2) dt\n"
    "  inner  integral_0^L phi(t) / t^(k*+1) dt\n"
    "  value  remaining modulus at gamma (= inner)\n";

struct Globals {
  std::string config;
  std::string out;
  double tol = 0.0;
  int grid = 0;
  int numax = 0;
  unsigned long long seed = 0;
  bool force = false;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* numax_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

struct ModulusArgs {
  std::string spec;
  std::string family;
  double alpha = 0.5, lambda = 2.0, beta = 0.0, delta = 0.0;
  int rho = 1;

  void attach(CLI::App* sub, const std::string& prefix = "") {
    sub->add_option("--" + prefix + "spec", spec, "modulus as a JSON object");
    sub->add_option("--" + prefix + "family", family, "holder | logholder | genlogholder | lipschitz | powerlog");
    sub->add_option("--" + prefix + "alpha", alpha, "Holder exponent");
    sub->add_option("--" + prefix + "lambda", lambda, "logarithmic exponent");
    sub->add_option("--" + prefix + "beta", beta, "power of the power-log family");
    sub->add_option("--" + prefix + "rho", rho, "number of iterated logarithms");
    sub->add_option("--" + prefix + "delta", delta, "domain end (0 selects the family default)");
  }

  ModulusSpec build() const {
    if (!spec.empty()) {
      json j;
      try {
        j = json::parse(spec);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("--spec: ") + e.what());
      }
      return modulus_from_json(j);
    }
    if (family.empty()) throw ConfigError("modulus: give --family or --spec");
    json j = {{"family", family}, {"alpha", alpha}, {"lambda", lambda}, {"beta", beta}, {"rho", rho}, {"delta", delta}};
    return modulus_from_json(j);
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  void emit(const json& j, const std::string& name, const Globals& g) {
    out_ << j.dump(2) << "\n";
    if (!g.out.empty()) write_text(g, name + ".json", j.dump(2) + "\n");
  }

  void write_text(const Globals& g, const std::string& name, const std::string& text) {
    const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
    fs::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) throw Error("cannot write " + (dir / name).string());
    os << text;
  }

  fs::path out_dir(const Globals& g) {
    const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
    fs::create_directories(dir);
    return dir;
  }

  std::ostream& err() { return err_; }
  std::ostream& out() { return out_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

json header(const std::string& command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

std::vector<long double> parse_omega(const std::string& text) {
  if (text.find(',') == std::string::npos) return standard_frequency(text).omega;
  std::vector<long double> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stold(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--omega: cannot parse '" + item + "'");
    }
  }
  return w;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(flag + ": cannot parse '" + item + "'");
    }
  }
  return v;
}

json verdicts_json(const HypothesisReport& r) {
  json j = json::object();
  for (const auto& v : r.verdicts) {
    json m = json::object();
    for (const auto& [k, x] : v.measured) m[k] = number_or_null(x);
    json e = {{"pass", v.pass}, {"summary", v.summary}, {"measured", m}};
    if (!v.argmin.empty()) e["argmin"] = v.argmin;
    j[v.id] = e;
  }
  return j;
}

std::string trace_csv(const KamTrace& t) {
  std::ostringstream os;
  os << "nu,r,pre_eta_defect,pre_xi_defect,eta_defect,xi_defect,energy_defect,step_displacement,step_jacobian,"
        "hessian_drift,gradient_U,increment_u,increment_v,symplecticity,delta_star,inverse_norm,min_divisor\n";
  for (const auto& r : t.records) {
    os << r.nu << ',' << num(r.r) << ',' << num(r.pre_eta_defect) << ',' << num(r.pre_xi_defect) << ','
       << num(r.eta_defect) << ',' << num(r.xi_defect) << ',' << num(r.energy_defect) << ','
       << num(r.step_displacement) << ',' << num(r.step_jacobian) << ',' << num(r.hessian_drift) << ','
       << num(r.gradient_U) << ',' << num(r.increment_u) << ',' << num(r.increment_v) << ','
       << num(r.symplecticity) << ',' << num(r.delta_star) << ',' << num(r.inverse_norm) << ','
       << num(r.min_divisor) << '\n';
  }
  return os.str();
}

json trace_summary(const KamTrace& t) {
  return {{"records", t.records.size()},
          {"converged", t.converged},
          {"stop_reason", t.stop_reason},
          {"fitted_constants",
           {{"displacement", t.c_displacement},
            {"jacobian", t.c_jacobian},
            {"drift", t.c_drift},
            {"gradient", t.c_gradient},
            {"increment_u", t.c_increment_u},
            {"increment_v", t.c_increment_v},
            {"frequency", t.c_frequency}}},
          {"summability",
           {{"sum", t.summability_sum},
            {"integral", number_or_null(t.summability_integral)},
            {"constant", t.summability_constant}}}};
}

// ---- subcommand bodies -------------------------------------------------------------------

int modulus_check(Runner& run, const Globals& g, const ModulusArgs& m) {
  const ModulusSpec s = m.build();
  const InvariantReport inv = check_invariants(s);
  std::vector<double> xs;
  for (int j = 0; j <= 20; ++j) xs.push_back(std::ldexp(1.0, j));
  const SeparabilityProfile sep = semi_separability_profile(s, xs);
  json j = header("modulus check");
  j["modulus"] = modulus_to_json(s);
  j["invariants"] = {{"monotone", inv.monotone},
                     {"vanishing", inv.vanishing},
                     {"limsup_x_over_w", number_or_null(inv.limsup_x_over_w)}};
  j["semi_separability"] = {{"linear_bound", sep.linear_bound}, {"fitted_constant", number_or_null(sep.fitted_constant)}};
  json wh = json::object();
  for (double a : {0.25, 0.5, 0.75}) wh[num(a)] = number_or_null(weak_homogeneity_ratio(s, a));
  j["weak_homogeneity"] = wh;
  run.emit(j, "modulus_check", g);
  return kExitOk;
}

int modulus_dini(Runner& run, const Globals& g, const ModulusArgs& m, int k, double tau) {
  const ModulusSpec s = m.build();
  const DiniResult d = dini_integral(s, k, tau);
  json j = header("modulus dini");
  j["modulus"] = modulus_to_json(s);
  j["k"] = k;
  j["tau"] = tau;
  j["power"] = d.power;
  j["finite"] = d.finite;
  j["value"] = number_or_null(d.value);
  j["signature"] = d.signature;
  run.emit(j, "modulus_dini", g);
  return kExitOk;
}

int modulus_compare(Runner& run, const Globals& g, const ModulusArgs& a, const ModulusArgs& b, int count) {
  const ModulusSpec w1 = a.build(), w2 = b.build();
  const auto scales = dyadic_scale_grid(std::min(w1.delta, w2.delta), count);
  const ComparisonVerdict v = compare_moduli(w1, w2, scales);
  json j = header("modulus compare");
  j["first"] = modulus_to_json(w1);
  j["second"] = modulus_to_json(w2);
  j["verdict"] = verdict_name(v.verdict);
  j["tail_slope"] = v.tail_slope;
  json trace = json::array();
  for (const auto& r : v.ratio_trace) trace.push_back({{"scale", r.scale}, {"ratio", number_or_null(r.ratio)}});
  j["ratio_trace"] = trace;
  run.emit(j, "modulus_compare", g);
  return kExitOk;
}

int dioph_check(Runner& run, const Globals& g, const std::string& omega_text, double tau, long K) {
  const auto omega = parse_omega(omega_text);
  const MarginResult m = diophantine_margin(omega, tau, K);
  json j = header("dioph check");
  json w = json::array();
  for (auto x : omega) w.push_back(static_cast<double>(x));
  j["omega"] = w;
  j["tau"] = tau;
  j["K"] = K;
  j["margin"] = static_cast<double>(m.margin);
  j["argmin"] = m.argmin;
  j["resonant"] = m.resonant();
  run.emit(j, "dioph_check", g);
  return m.resonant() ? kExitHypothesis : kExitOk;
}

int smooth_validate(Runner& run, const Globals& g, double rho0) {
  const SmoothingKernel kernel = build_kernel(rho0);
  std::ostringstream csv;
  csv << "alpha,beta,value,expected,abs_error,status\n";
  double worst = 0.0;
  int unresolved = 0;
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 3; ++b) {
      const double expected = a == b ? std::pow(-1.0, a) * std::tgamma(a + 1.0) : 0.0;
      try {
        const double value = kernel_moment(kernel, {a}, {b}, 4096, 64.0);
        const double e = std::abs(value - expected);
        worst = std::max(worst, e);
        csv << a << ',' << b << ',' << num(value) << ',' << num(expected) << ',' << num(e) << ','
            << (e <= 1e-6 ? "ok" : "mismatch") << '\n';
      } catch (const ResolutionError&) {
        ++unresolved;
        csv << a << ',' << b << ",nan," << num(expected) << ",nan,unresolved\n";
      }
    }
  }
  run.out() << csv.str();
  run.write_text(g, "moments.csv", csv.str());

  const KernelDecayReport d = kernel_decay(kernel);
  std::ostringstream dcsv;
  dcsv << "x,weighted\n";
  for (std::size_t i = 0; i < d.x.size(); ++i) dcsv << num(d.x[i]) << ',' << num(d.weighted[i]) << '\n';
  run.write_text(g, "decay.csv", dcsv.str());

  // Degree-8 trig polynomial with seeded coefficients.
  std::mt19937_64 rng(g.seed_opt && g.seed_opt->count() ? g.seed : 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> ca(9), cb(9);
  for (int m = 0; m <= 8; ++m) {
    ca[m] = u(rng);
    cb[m] = u(rng);
  }
  const auto f = PeriodicField::from_function(1, 64, [&](const double* x) {
    double s = 0.0;
    for (int m = 0; m <= 8; ++m) s += ca[m] * std::cos(2 * M_PI * m * x[0]) + cb[m] * std::sin(2 * M_PI * m * x[0]);
    return s;
  });
  const double r = rho0 / (16.0 * M_PI);
  json j = header("smooth validate");
  j["rho0"] = rho0;
  j["moment_max_error"] = worst;
  j["moment_unresolved"] = unresolved;
  j["plateau"] = {{"degree", 8}, {"r", r}, {"sup_error", (smooth_periodic(f, r, kernel) - f).sup_norm()}};
  j["decay"] = {{"power", d.power}, {"box", d.box}, {"fitted_constant", d.fitted_constant}};
  run.write_text(g, "smooth_validate.json", j.dump(2) + "\n");
  return worst <= 1e-6 && unresolved == 0 ? kExitOk : kExitError;
}

int smooth_run(Runner& run, const Globals& g, const std::string& input, double r, double rho0) {
  const PeriodicField f = read_field(input);
  const PeriodicField s = smooth_periodic(f, r, build_kernel(rho0));
  const fs::path path = run.out_dir(g) / "smoothed.kamg";
  write_field(path.string(), s);
  json j = header("smooth run");
  j["input"] = input;
  j["output"] = path.string();
  j["r"] = r;
  j["rho0"] = rho0;
  j["sup_change"] = (s - f).sup_norm();
  run.emit(j, "smooth_run", g);
  return kExitOk;
}

int kam_run(Runner& run, const Globals& g) {
  if (g.config.empty()) throw ConfigError("kam run: --config is required");
  RunConfig cfg = run_config_from_json(load_json_file(g.config));
  if (g.grid_opt->count()) cfg.kam.N = g.grid;
  if (g.numax_opt->count()) cfg.kam.nu_max = g.numax;
  if (g.seed_opt->count()) cfg.kam.seed = g.seed;
  if (g.tol_opt->count()) cfg.kam.increment_tol = g.tol;
  cfg.kam.validate();
  const HamiltonianModel H = cfg.system.build();
  const auto omega_ld = cfg.system.frequency_vector();
  const std::vector<double> omega(omega_ld.begin(), omega_ld.end());

  const fs::path dir = run.out_dir(g);
  json summary = header("kam run");
  summary["config"] = run_config_to_json(cfg);
  const HypothesisReport hyp = check_hypotheses(H, omega_ld, cfg.hypotheses);
  summary["hypotheses"] = verdicts_json(hyp);
  summary["forced"] = g.force;
  auto write_summary = [&] {
    std::ofstream os(dir / "summary.json");
    os << summary.dump(2) << "\n";
    run.out() << summary.dump(2) << "\n";
  };
  if (!hyp.all_pass() && !g.force) {
    summary["status"] = "hypothesis_failure";
    write_summary();
    return kExitHypothesis;
  }
  try {
    const KamResult res = run_kam(H, omega, cfg.kam);
    {
      std::ofstream os(dir / "trace.csv");
      os << trace_csv(res.trace);
    }
    for (int a = 0; a < H.n; ++a) {
      write_field((dir / ("u_minus_id_" + std::to_string(a + 1) + ".kamg")).string(), res.torus.displacement[a]);
      write_field((dir / ("v_" + std::to_string(a + 1) + ".kamg")).string(), res.torus.action[a]);
    }
    const InvarianceResidual inv = invariance_residual(H, res.torus, omega);
    summary["status"] = "ok";
    summary["trace"] = trace_summary(res.trace);
    summary["residuals"] = {{"invariance_u", inv.res_u},
                            {"invariance_v", inv.res_v},
                            {"periodicity", periodicity_defect(res.torus)}};
    write_summary();
    return kExitOk;
  } catch (const KamAbort& e) {
    std::ofstream os(dir / "trace.csv");
    os << trace_csv(e.trace);
    summary["status"] = "aborted";
    summary["error"] = e.what();
    summary["trace"] = trace_summary(e.trace);
    write_summary();
    return kExitError;
  }
}

int regularity_estimate(Runner& run, const Globals& g, const std::string& input, double spacing,
                        const std::string& scales_text) {
  const GridFile grid = read_grid(input);
  if (grid.resolution.size() != 1) throw ConfigError(input + ": regularity estimate expects a 1-D grid");
  const double h0 = spacing > 0.0 ? spacing : 1.0 / grid.resolution[0];
  std::vector<double> scales;
  if (!scales_text.empty()) {
    scales = parse_list(scales_text, "--scales");
  } else {
    for (std::size_t s = 1; s * 4 <= grid.samples.size(); s *= 2) scales.push_back(h0 * s);
  }
  const RegularityReport rep = empirical_modulus(grid.samples, h0, scales);
  json j = header("regularity estimate");
  j["input"] = input;
  j["spacing"] = h0;
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back({{"h", r.h}, {"modulus", r.modulus}});
  j["table"] = rows;
  j["holder_exponent"] = rep.holder_exponent;
  j["holder_residual"] = rep.holder_residual;
  j["log_exponent"] = rep.log_exponent;
  j["log_residual"] = rep.log_residual;
  run.emit(j, "regularity_estimate", g);
  return kExitOk;
}

int regularity_remaining(Runner& run, const Globals& g, const ModulusArgs& m, int k, double tau, int i,
                         double epsilon, double gmin, double gmax, int count) {
  const PhiProfile phi = PhiProfile::from_hypothesis(m.build(), k, tau, i);
  const CriticalExponent ce = critical_exponent(phi);
  if (ce.unbounded) throw DomainError("critical exponent unbounded up to the cap");
  const double eps = epsilon > 0.0 ? epsilon : 0.1 * std::min(phi.base.delta, 1.0);
  const RemainingModulus rm = remaining_modulus(phi, ce.k_star, eps, geometric_grid(gmin, gmax, count));
  std::ostringstream csv;
  csv << "gamma,L,outer,inner,value\n";
  for (const auto& r : rm.rows) {
    csv << num(r.gamma) << ',' << num(r.L) << ',' << num(r.outer) << ',' << num(r.inner) << ',' << num(r.value)
        << '\n';
  }
  run.write_text(g, "remaining.csv", csv.str());
  json j = header("regularity remaining");
  j["modulus"] = modulus_to_json(phi.base);
  j["phi_power"] = phi.power;
  j["k_star"] = ce.k_star;
  j["epsilon"] = eps;
  j["rows"] = rm.rows.size();
  j["family_tag"] = rm.family_tag;
  j["table"] = ((g.out.empty() ? fs::path(".") : fs::path(g.out)) / "remaining.csv").string();
  run.emit(j, "regularity_remaining", g);
  return kExitOk;
}

int examples_gen(Runner& run, const Globals& g, const std::string& which, double epsilon, double M, double lambda) {
  RunConfig cfg;
  cfg.system.which = which;
  cfg.system.epsilon = epsilon;
  cfg.system.M = M;
  cfg.system.lambda = lambda;
  if (which != "hh" && which != "hhh") throw ConfigError("--which: expected hh or hhh");
  if (g.grid_opt->count()) cfg.kam.N = g.grid;
  if (g.numax_opt->count()) cfg.kam.nu_max = g.numax;
  if (g.seed_opt->count()) cfg.kam.seed = g.seed;
  cfg.system.build();  // validates the descriptor
  const json j = run_config_to_json(cfg);
  run.emit(j, which, g);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kamforge: KAM constructions under general moduli of continuity"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "output directory");
  g.tol_opt = app.add_option("--tol", g.tol, "increment tolerance for kam run");
  g.grid_opt = app.add_option("--grid", g.grid, "grid resolution per axis");
  g.numax_opt = app.add_option("--numax", g.numax, "last KAM iteration index");
  g.seed_opt = app.add_option("--seed", g.seed, "random seed");
  app.add_flag("--force", g.force, "run even when a hypothesis check fails");

  Runner run(out, err);
  std::function<int()> action;

  // modulus
  auto* mod = app.add_subcommand("modulus", "modulus of continuity tools")->fallthrough();
  mod->require_subcommand(1);
  ModulusArgs mcheck, mdini, mfirst, msecond;
  auto* mc = mod->add_subcommand("check", "invariants, semi-separability and weak homogeneity")->fallthrough();
  mcheck.attach(mc);
  mc->callback([&] { action = [&] { return modulus_check(run, g, mcheck); }; });
  int dk = 6;
  double dtau = 2.0;
  auto* md = mod->add_subcommand("dini", "integral of w(x) / x^(2 tau + 3 - k) over (0, 1]")->fallthrough();
  mdini.attach(md);
  md->add_option("--k", dk, "differentiability order");
  md->add_option("--tau", dtau, "Diophantine exponent");
  md->callback([&] { action = [&] { return modulus_dini(run, g, mdini, dk, dtau); }; });
  int ccount = 60;
  auto* mcmp = mod->add_subcommand("compare", "is the first modulus weaker than the second")->fallthrough();
  mfirst.attach(mcmp, "first-");
  msecond.attach(mcmp, "second-");
  mcmp->add_option("--count", ccount, "dyadic scales");
  mcmp->callback([&] { action = [&] { return modulus_compare(run, g, mfirst, msecond, ccount); }; });

  // dioph
  auto* dio = app.add_subcommand("dioph", "Diophantine tools")->fallthrough();
  dio->require_subcommand(1);
  std::string omega_text = "golden2";
  double otau = 2.0;
  long oK = 100;
  auto* dc = dio->add_subcommand("check", "truncated lattice margin")->fallthrough();
  dc->add_option("--omega", omega_text, "golden2 | sqrt2_2 | cubic3 | comma-separated values");
  dc->add_option("--tau", otau, "Diophantine exponent");
  dc->add_option("--K", oK, "|k|_1 cutoff");
  dc->callback([&] { action = [&] { return dioph_check(run, g, omega_text, otau, oK); }; });

  // smooth
  auto* sm = app.add_subcommand("smooth", "analytic smoothing")->fallthrough();
  sm->require_subcommand(1);
  double rho0 = 0.5, sr = 0.01;
  std::string sin_path;
  auto* sv = sm->add_subcommand("validate", "moments CSV on stdout; writes moments.csv, decay.csv, smooth_validate.json")->fallthrough();
  sv->add_option("--rho0", rho0, "plateau radius");
  sv->callback([&] { action = [&] { return smooth_validate(run, g, rho0); }; });
  auto* sr_cmd = sm->add_subcommand("run", "smooth a KAMG field; writes smoothed.kamg")->fallthrough();
  sr_cmd->add_option("--input", sin_path, "KAMG field")->required();
  sr_cmd->add_option("--r", sr, "strip radius");
  sr_cmd->add_option("--rho0", rho0, "plateau radius");
  sr_cmd->callback([&] { action = [&] { return smooth_run(run, g, sin_path, sr, rho0); }; });

  // kam
  auto* kam = app.add_subcommand("kam", "KAM iteration")->fallthrough();
  kam->require_subcommand(1);
  auto* kr = kam->add_subcommand("run", "hypothesis gate, Newton steps and reports")->fallthrough();
  kr->footer(std::string("Writes summary.json, trace.csv, u_minus_id_<i>.kamg and v_<i>.kamg into --out.\n") +
             kTraceColumns);
  kr->callback([&] { action = [&] { return kam_run(run, g); }; });

  // regularity
  auto* reg = app.add_subcommand("regularity", "regularity iteration tools")->fallthrough();
  reg->require_subcommand(1);
  std::string rin, rscales;
  double rspacing = 0.0;
  auto* re = reg->add_subcommand("estimate", "empirical modulus of a 1-D KAMG field")->fallthrough();
  re->add_option("--input", rin, "KAMG field")->required();
  re->add_option("--spacing", rspacing, "grid spacing (default 1/N)");
  re->add_option("--scales", rscales, "comma-separated scales (default dyadic multiples of the spacing)");
  re->callback([&] { action = [&] { return regularity_estimate(run, g, rin, rspacing, rscales); }; });
  ModulusArgs mrem;
  int rk = 6, ri = 1, rcount = 15;
  double rtau = 2.0, reps = 0.0, gmin = 1e-10, gmax = 1e-3;
  auto* rr = reg->add_subcommand("remaining", "remaining modulus table; writes remaining.csv")->fallthrough();
  mrem.attach(rr);
  rr->add_option("--k", rk, "differentiability order");
  rr->add_option("--tau", rtau, "Diophantine exponent");
  rr->add_option("--i", ri, "profile index 1 or 2");
  rr->add_option("--epsilon", reps, "upper integration limit (default 0.1 min(delta, 1))");
  rr->add_option("--gamma-min", gmin, "smallest gamma");
  rr->add_option("--gamma-max", gmax, "largest gamma");
  rr->add_option("--count", rcount, "table rows");
  rr->footer(kRemainingColumns);
  rr->callback([&] {
    action = [&] { return regularity_remaining(run, g, mrem, rk, rtau, ri, reps, gmin, gmax, rcount); };
  });

  // examples
  auto* ex = app.add_subcommand("examples", "explicit systems")->fallthrough();
  ex->require_subcommand(1);
  std::string which = "hh";
  double xeps = 1e-4, xM = 10.0, xlambda = 2.0;
  auto* eg = ex->add_subcommand("gen", "emit a kam run descriptor")->fallthrough();
  eg->add_option("--which", which, "hh | hhh");
  eg->add_option("--epsilon", xeps, "perturbation size");
  eg->add_option("--M", xM, "bound M");
  eg->add_option("--lambda", xlambda, "log-Holder exponent of the corner potential");
  eg->callback([&] { action = [&] { return examples_gen(run, g, which, xeps, xM, xlambda); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitError;
  }
  try {
    return action ? action() : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace kamforge::cli
