#include <CLI11.hpp>
#include <bpkpz/error.hpp>
#include <bpkpz/parallel.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "experiments.hpp"

using namespace bpkpz;
using namespace bpkpz::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void add_quad(CLI::App* sub, QuadControls& q) {
  sub->add_option("--halfline-order", q.halfline_order, "Gauss-Legendre order on the half-line");
  sub->add_option("--contour-order", q.contour_order, "nodes per panel on complex contours");
  sub->add_option("--contour-panel", q.contour_panel, "longest panel on complex contours");
  sub->add_option("--inner-order", q.inner.order, "nodes per panel for inner integrals");
  sub->add_option("--tol", q.tol, "self-convergence threshold for determinants");
}

void add_spikes(CLI::App* sub, std::string& b, std::string& beta) {
  sub->add_option("--b", b, "drift-type spikes, comma list");
  sub->add_option("--beta", beta, "source spikes, comma list");
}

std::string json_to_arg(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + json_to_arg(v[i]);
    return out;
  }
  return v.dump();
}

bool is_subcommand(const std::string& s) {
  for (const char* name : {"dist", "sim", "verify-laplace", "verify-scaling", "verify-sigma", "verify-kernel-limit"})
    if (s == name) return true;
  return false;
}

// Splices the settings of a JSON config file in front of the command-line flags,
// so explicit flags win. A saved report.json is accepted as well.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  nlohmann::json cfg = nlohmann::json::parse(in);
  if (cfg.contains("config") && cfg["config"].is_object()) cfg = cfg["config"];
  if (!cfg.is_object()) throw std::invalid_argument("config file must hold a JSON object");

  std::string command;
  std::vector<std::string> rest;
  for (const auto& a : args) {
    if (command.empty() && is_subcommand(a))
      command = a;
    else
      rest.push_back(a);
  }
  if (command.empty() && cfg.contains("command")) command = cfg["command"].get<std::string>();

  std::vector<std::string> out;
  if (!command.empty()) out.push_back(command);
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    const std::string text = json_to_arg(value);
    if (text.empty()) continue;  // empty means the built-in default
    out.push_back("--" + key + "=" + text);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

nlohmann::json echo_config(const CLI::App* sub) {
  nlohmann::json j;
  j["command"] = sub->get_name();
  for (const CLI::Option* o : sub->get_options()) {
    if (o->get_lnames().empty()) continue;
    const std::string& name = o->get_lnames().front();
    if (name == "help" || name == "config" || name == "out") continue;
    std::string value = o->count() > 0 ? o->results().back() : o->get_default_str();
    if (o->get_type_size() == 0 && value.empty()) value = "false";
    j[name] = value;
  }
  return j;
}

int configure_threads() {
  const char* env = std::getenv("BPKPZ_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    std::cerr << "error: BPKPZ_THREADS must be a positive integer\n";
    return kExitConfig;
  }
  set_num_threads(static_cast<int>(n));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const int rc = configure_threads()) return rc;

  CLI::App app{"Borodin-Peche distributions, polymer simulation and verification experiments"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);

  std::string config_path, out_dir;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file with flag values (explicit flags win)");
    sub->add_option("--out", out_dir, "write report.json and rows.csv to this directory");
  };

  DistOptions dist;
  auto* c_dist = app.add_subcommand("dist", "evaluate F_BP on an r grid");
  add_spikes(c_dist, dist.b, dist.beta);
  c_dist->add_option("--r-grid", dist.r_grid, "start:stop:step or comma list");
  c_dist->add_option("--Y", dist.Y, "evaluate F_{b+Y,beta+Y}(r+Y^2)");
  c_dist->add_option("--method", dist.method, "halfline or contour")->check(CLI::IsMember({"halfline", "contour"}));
  c_dist->add_option("--line-offset", dist.quad.c, "line offset of the contours");
  add_quad(c_dist, dist.quad);
  add_common(c_dist);

  SimOptions sim;
  auto* c_sim = app.add_subcommand("sim", "sample free energies of the semi-discrete polymer");
  c_sim->add_option("--N", sim.N, "levels");
  c_sim->add_option("--tau", sim.tau, "time horizon");
  c_sim->add_option("--a", sim.a, "drifts, comma list (default zeros)");
  c_sim->add_option("--alpha", sim.alpha, "boundary parameters, comma list");
  c_sim->add_option("--kappa", sim.kappa, "> 0: scaling parametrization tau = kappa N from --b/--beta");
  add_spikes(c_sim, sim.b, sim.beta);
  c_sim->add_option("--M", sim.M, "time steps (0: max(10 N, 1000))");
  c_sim->add_option("--samples", sim.samples, "number of samples");
  c_sim->add_option("--seed", sim.seed, "master seed");
  c_sim->add_option("--grid-check", sim.grid_check, "samples re-run on the halved grid");
  add_common(c_sim);

  LaplaceOptions lap;
  auto* c_lap = app.add_subcommand("verify-laplace", "Monte Carlo E exp(-uZ) against det(1 + K_u)");
  c_lap->add_option("--N", lap.N, "levels");
  c_lap->add_option("--tau", lap.tau, "time horizon");
  c_lap->add_option("--a", lap.a, "drifts (default zeros)");
  c_lap->add_option("--alpha", lap.alpha, "boundary parameters (default theta+0.5, 'none' for n=0)");
  c_lap->add_option("--u-grid", lap.u_grid, "Laplace variables");
  c_lap->add_option("--samples", lap.samples, "Monte Carlo samples");
  c_lap->add_option("--grid-M", lap.M, "time steps");
  c_lap->add_option("--seed", lap.seed, "master seed");
  c_lap->add_option("--se-factor", lap.se_factor, "allowed gap in standard errors");
  c_lap->add_option("--grid-allowance", lap.grid_allowance, "extra allowance for grid bias");
  c_lap->add_option("--varphi", lap.varphi, "wedge half-angle of C_v");
  add_quad(c_lap, lap.quad);
  add_common(c_lap);

  ScalingOptions scl;
  auto* c_scl = app.add_subcommand("verify-scaling", "KS distance of rescaled free energies to F_BP");
  c_scl->add_option("--kappa", scl.kappa, "tau / N");
  c_scl->add_option("--N-list", scl.N_list, "levels to simulate");
  add_spikes(c_scl, scl.b, scl.beta);
  c_scl->add_option("--samples", scl.samples, "samples per N");
  c_scl->add_option("--seed", scl.seed, "master seed");
  c_scl->add_option("--M", scl.M, "time steps (0: max(10 N, 1000))");
  c_scl->add_option("--ks-bound", scl.ks_bound, "bound for the largest N");
  c_scl->add_option("--grid-check", scl.grid_check, "samples re-run on the halved grid");
  c_scl->add_option("--cdf-step", scl.cdf_step, "spacing of the tabulated limit CDF");
  add_quad(c_scl, scl.quad);
  add_common(c_scl);

  SigmaOptions sig;
  auto* c_sig = app.add_subcommand("verify-sigma", "det(I - K^(sigma)) against F_BP as sigma -> 0");
  c_sig->add_option("--sigmas", sig.sigmas, "decreasing sigma values");
  c_sig->add_option("--r", sig.r, "r values");
  add_spikes(c_sig, sig.b, sig.beta);
  c_sig->add_option("--Y", sig.Y, "spike shift");
  c_sig->add_option("--gap-tol", sig.tol, "bound on the gap at the smallest sigma");
  c_sig->add_flag("--check-decay", sig.check_decay, "check the kernel decay inequality on a grid");
  c_sig->add_option("--decay-grid", sig.decay_grid, "x and y grid for --check-decay");
  c_sig->add_option("--decay-safety", sig.decay_safety, "safety factor on C fitted at the origin");
  c_sig->add_option("--kernel-point", sig.kernel_point, "x:y for a pointwise kernel gap column");
  add_quad(c_sig, sig.quad);
  add_common(c_sig);

  KernelLimitOptions kl;
  auto* c_kl = app.add_subcommand("verify-kernel-limit", "K_N against tilde-K_BP on C_w");
  c_kl->add_option("--N-list", kl.N_list, "N values; each is compared with factor*N");
  c_kl->add_option("--points", kl.points, "t:t' pairs; w = apex + |t| e^{+-3 pi i/4}");
  c_kl->add_option("--r", kl.r, "r");
  c_kl->add_option("--kappa", kl.kappa, "kappa");
  add_spikes(c_kl, kl.b, kl.beta);
  c_kl->add_option("--factor", kl.factor, "N multiplier for the ratio column");
  c_kl->add_option("--ratio-lo", kl.ratio_lo, "lower bound for gap(N)/gap(factor N)");
  c_kl->add_option("--ratio-hi", kl.ratio_hi, "upper bound for gap(N)/gap(factor N)");
  c_kl->add_option("--decay-fit", kl.decay_fit, "fit C on |Im w| <= this");
  c_kl->add_option("--decay-max", kl.decay_max, "check the decay bound out to this |Im w|");
  add_common(c_kl);

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  Report rep;
  try {
    if (sub == c_dist) rep = run_dist(dist);
    if (sub == c_sim) rep = run_sim(sim);
    if (sub == c_lap) rep = run_verify_laplace(lap);
    if (sub == c_scl) rep = run_verify_scaling(scl);
    if (sub == c_sig) rep = run_verify_sigma(sig);
    if (sub == c_kl) rep = run_verify_kernel_limit(kl);
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const PoleProximityError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const GeometryError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  rep.config = echo_config(sub);

  if (!out_dir.empty()) {
    rep.write(out_dir);
    std::cout << rep.experiment << ": " << rep.rows.size() << " rows written to " << out_dir << '\n';
  } else {
    std::cout << rep.csv();
  }
  const int code = rep.exit_code();
  std::cerr << rep.experiment << ": " << (rep.converged ? rep.status : "not converged") << " (exit " << code
            << ", " << rep.wall_seconds << " s)\n";
  return code;
}
