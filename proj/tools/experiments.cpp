#include "experiments.hpp"

#include <bpkpz/error.hpp>
#include <bpkpz/polymer.hpp>
#include <bpkpz/specfun.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace bpkpz::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> parse_optional_list(const std::string& s) { return parse_grid(s); }

std::pair<double, double> parse_pair(const std::string& tok) {
  const auto colon = tok.find(':');
  if (colon == std::string::npos || tok.find(':', colon + 1) != std::string::npos)
    throw std::invalid_argument("expected x:y, got '" + tok + "'");
  const auto x = parse_grid(tok.substr(0, colon));
  const auto y = parse_grid(tok.substr(colon + 1));
  if (x.size() != 1 || y.size() != 1) throw std::invalid_argument("expected x:y, got '" + tok + "'");
  return {x[0], y[0]};
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) out.push_back(parse_pair(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double rescale_gap(const std::vector<std::vector<double>>& F, double scale) {
  if (F.size() < 2 || F[0].empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < F[0].size(); ++i) s += std::abs(F[1][i] - F[0][i]);
  return s / static_cast<double>(F[0].size()) / scale;
}

void require_nonempty(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw std::invalid_argument(std::string(what) + " is empty");
}

}  // namespace

SpikeParams parse_spikes(const std::string& b, const std::string& beta) {
  SpikeParams s{parse_optional_list(b), parse_optional_list(beta)};
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------

Report run_dist(const DistOptions& o) {
  const auto t0 = Clock::now();
  const SpikeParams spikes = parse_spikes(o.b, o.beta);
  const std::vector<double> rs = parse_grid(o.r_grid);
  require_nonempty(rs, "r-grid");

  std::vector<DistValue> vals;
  if (o.method == "halfline") {
    vals = f_bp_grid(spikes, o.Y, rs, o.quad);
  } else if (o.method == "contour") {
    const SpikeParams sh = spikes.shifted(o.Y);
    for (double r : rs) vals.push_back(f_bp_contour(r + o.Y * o.Y, sh, o.quad));
  } else {
    throw std::invalid_argument("method must be halfline or contour");
  }

  Report rep;
  rep.experiment = "dist";
  rep.columns = {"r", "F", "error_estimate", "tol", "pass"};
  bool monotone = true;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const DistValue& v = vals[i];
    const bool ok = v.converged && v.value > -o.quad.tol && v.value < 1.0 + o.quad.tol;
    if (!v.converged) rep.converged = false;
    if (!ok) rep.fail();
    if (i > 0 && rs[i] > rs[i - 1] && v.value < vals[i - 1].value - o.quad.tol) monotone = false;
    rep.add_row({rs[i], v.value, v.error_estimate, o.quad.tol, ok});
  }
  if (!monotone) rep.fail();
  rep.details["monotone"] = monotone;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

Report run_sim(const SimOptions& o) {
  const auto t0 = Clock::now();
  SimConfig cfg;
  const bool scaling = o.kappa > 0.0;
  if (scaling) {
    cfg = SimConfig::scaling(o.kappa, o.N, parse_spikes(o.b, o.beta), o.M);
  } else {
    cfg.N = o.N;
    cfg.tau = o.tau;
    cfg.a = parse_grid(o.a);
    if (cfg.a.empty()) cfg.a.assign(std::max(o.N, 0), 0.0);
    cfg.alpha = parse_grid(o.alpha);
    cfg.M = o.M > 0 ? o.M : std::max(10 * o.N, 1000);
  }
  cfg.num_samples = o.samples;
  cfg.seed = o.seed;
  cfg.validate();

  const auto F = mc_free_energies(cfg, o.samples)[0];
  Report rep;
  rep.experiment = "sim";
  rep.seed = o.seed;
  double scale = 1.0, shift = 0.0;
  if (scaling) {
    const ScalingConstants sc = scaling_constants(o.kappa);
    scale = sc.c * std::cbrt(double(cfg.N));
    shift = cfg.N * sc.f;
    rep.columns = {"index", "F", "rescaled"};
  } else {
    rep.columns = {"index", "F"};
  }
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < o.samples; ++i) {
    if (scaling)
      rep.add_row({i, F[i], (F[i] - shift) / scale});
    else
      rep.add_row({i, F[i]});
    mean += F[i];
    m2 += F[i] * F[i];
  }
  if (o.samples > 0) {
    mean /= static_cast<double>(o.samples);
    rep.details["mean_F"] = mean;
    rep.details["sd_F"] = o.samples > 1 ? std::sqrt(std::max(0.0, (m2 - o.samples * mean * mean) / (o.samples - 1))) : 0.0;
  }
  const auto check = mc_free_energies(cfg, std::min<std::int64_t>(o.grid_check, o.samples), 1);
  rep.details["grid_M"] = cfg.M;
  rep.details["grid_sensitivity_F"] = rescale_gap(check, 1.0);
  rep.details["tau"] = cfg.tau;
  rep.details["a"] = cfg.a;
  rep.details["alpha"] = cfg.alpha;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

Report run_verify_laplace(const LaplaceOptions& o) {
  const auto t0 = Clock::now();
  SimConfig cfg;
  cfg.N = o.N;
  cfg.tau = o.tau;
  cfg.a = parse_grid(o.a);
  if (cfg.a.empty()) cfg.a.assign(std::max(o.N, 0), 0.0);
  if (o.alpha.empty()) {
    if (o.N < 1 || !(o.tau > 0.0)) throw std::invalid_argument("N and tau must be positive");
    cfg.alpha = {scaling_constants(o.tau / o.N).theta + 0.5};
  } else if (o.alpha != "none") {
    cfg.alpha = parse_grid(o.alpha);
  }
  cfg.M = o.M;
  cfg.num_samples = o.samples;
  cfg.seed = o.seed;
  cfg.validate();
  const std::vector<double> us = parse_grid(o.u_grid);
  require_nonempty(us, "u-grid");
  for (double u : us)
    if (u < 0.0) throw std::invalid_argument("u must be non-negative");

  const auto F = mc_free_energies(cfg, o.samples, 1);

  Report rep;
  rep.experiment = "verify-laplace";
  rep.seed = o.seed;
  rep.columns = {"u", "mc", "mc_se", "mc_refined", "det", "det_error", "gap", "gap_refined", "tol", "pass"};
  bool refined_closer = true;
  for (double u : us) {
    const LaplaceEstimate mc = laplace_from_free_energies(F[0], u);
    const LaplaceEstimate mc2 = laplace_from_free_energies(F[1], u);
    FiniteNParams p;
    p.N = cfg.N;
    p.tau = cfg.tau;
    p.a = cfg.a;
    p.alpha = cfg.alpha;
    p.u = u;
    const DistValue det = u == 0.0 ? DistValue{} : finite_n_laplace(p, o.varphi, o.quad);
    if (!det.converged) rep.converged = false;
    const double gap = std::abs(mc.estimate - det.value);
    const double gap2 = std::abs(mc2.estimate - det.value);
    const double tol = o.se_factor * mc.standard_error + o.grid_allowance;
    const bool ok = gap <= tol;
    if (!ok) rep.fail();
    if (gap2 > gap) refined_closer = false;
    rep.add_row({u, mc.estimate, mc.standard_error, mc2.estimate, det.value, det.error_estimate, gap, gap2,
                 tol, ok});
  }
  rep.details["grid_M"] = cfg.M;
  rep.details["refined_M"] = 2 * cfg.M;
  rep.details["refined_gap_not_larger"] = refined_closer;
  rep.details["alpha"] = cfg.alpha;
  rep.details["outside_stated_range"] = cfg.N < 9;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

Report run_verify_scaling(const ScalingOptions& o) {
  const auto t0 = Clock::now();
  const SpikeParams spikes = parse_spikes(o.b, o.beta);
  const auto Ns = parse_int_list(o.N_list);
  if (Ns.empty()) throw std::invalid_argument("N-list is empty");
  for (long long N : Ns)
    if (N < 1 || N < static_cast<long long>(spikes.b.size())) throw std::invalid_argument("bad N in N-list");
  if (o.samples < 1) throw std::invalid_argument("samples must be >= 1");
  const ScalingConstants sc = scaling_constants(o.kappa);
  const TabulatedCdf cdf(spikes, o.cdf_lo, o.cdf_hi, o.cdf_step, o.quad);

  Report rep;
  rep.experiment = "verify-scaling";
  rep.seed = o.seed;
  rep.columns = {"N", "M", "samples", "ks", "mean", "grid_sensitivity", "tol", "pass"};
  std::vector<double> ks;
  for (long long N : Ns) {
    SimConfig cfg = SimConfig::scaling(o.kappa, static_cast<int>(N), spikes, o.M);
    cfg.seed = o.seed;
    cfg.num_samples = o.samples;
    const EmpiricalDistribution emp = mc_free_energy_distribution(cfg, o.samples);
    const double d = ks_statistic(emp, [&cdf](double x) { return cdf(x); });
    const auto check = mc_free_energies(cfg, std::min<std::int64_t>(o.grid_check, o.samples), 1);
    const double sens = rescale_gap(check, sc.c * std::cbrt(double(N)));
    ks.push_back(d);
    rep.add_row({N, cfg.M, o.samples, d, emp.mean(), sens, o.ks_bound, d < o.ks_bound});
  }
  if (ks.size() > 1) {
    bool decreasing = true;
    for (std::size_t i = 1; i < ks.size(); ++i) decreasing = decreasing && ks[i] < ks[i - 1];
    rep.details["trend_decreasing"] = decreasing;
    if (!decreasing)
      rep.fail();
    else if (!(ks.back() < o.ks_bound))
      rep.warn();
  } else {
    rep.details["trend_decreasing"] = nullptr;
  }
  rep.details["kappa"] = o.kappa;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

Report run_verify_sigma(const SigmaOptions& o) {
  const auto t0 = Clock::now();
  const SpikeParams spikes = parse_spikes(o.b, o.beta);
  const std::vector<double> sigmas = parse_grid(o.sigmas);
  const std::vector<double> rs = parse_grid(o.r);
  require_nonempty(sigmas, "sigmas");
  require_nonempty(rs, "r");
  for (double s : sigmas)
    if (!(s > 0.0)) throw std::invalid_argument("sigmas must be positive");
  const bool with_kernel = !o.kernel_point.empty();
  std::pair<double, double> kp{0.0, 0.0};
  if (with_kernel) kp = parse_pair(o.kernel_point);

  // The decay check has its own hypotheses; reject bad input before the scan.
  if (o.check_decay) {
    if (spikes.b.empty() || spikes.beta.empty())
      throw ConstraintError("--check-decay needs at least one b and one beta");
    const double spread = *std::max_element(spikes.beta.begin(), spikes.beta.end()) -
                          *std::min_element(spikes.b.begin(), spikes.b.end());
    if (!(spread < 1.0)) throw ConstraintError("--check-decay needs beta_i - b_j < 1");
  }

  Report rep;
  rep.experiment = "verify-sigma";
  rep.columns = {"r", "sigma", "det", "det_error", "limit", "gap"};
  if (with_kernel) rep.columns.push_back("kernel_gap");
  rep.columns.insert(rep.columns.end(), {"tol", "pass"});

  const SpikeParams sh = spikes.shifted(o.Y);
  for (double r : rs) {
    const double rr = r + o.Y * o.Y;
    const auto rows = sigma_limit_scan(sh, rr, sigmas, o.quad);
    std::optional<DoubleContourKernel> bp;
    if (with_kernel) bp = DoubleContourKernel::borodin_peche(sh, o.quad.c, o.quad.inner);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const SigmaRow& row = rows[i];
      if (!row.det.converged || !row.limit.converged) rep.converged = false;
      bool ok = true;
      if (rows.size() == 1) {
        ok = row.gap < o.tol;
      } else {
        if (i > 0) ok = row.gap < rows[i - 1].gap;
        if (i + 1 == rows.size()) ok = ok && row.gap < o.tol;
      }
      if (!ok) rep.fail();
      std::vector<json> cells{r, row.sigma, row.det.value, row.det.error_estimate, row.limit.value, row.gap};
      if (with_kernel) {
        const auto ks = DoubleContourKernel::sigma_deformed(CdrpParams::from_shift(row.sigma, rr, sh), o.quad.inner);
        cells.push_back(std::abs(ks(kp.first, kp.second) - (*bp)(kp.first + rr, kp.second + rr)));
      }
      cells.push_back(o.tol);
      cells.push_back(ok);
      rep.add_row(std::move(cells));
    }
  }

  if (o.check_decay) {
    const std::vector<double> grid = parse_grid(o.decay_grid);
    require_nonempty(grid, "decay-grid");
    const double bm = *std::max_element(spikes.b.begin(), spikes.b.end());
    const double b1 = *std::min_element(spikes.beta.begin(), spikes.beta.end());
    json checks = json::array();
    bool all = true;
    for (double s : sigmas) {
      CdrpParams p;
      p.sigma = s;
      p.r = 0.0;
      for (double x : spikes.b) p.spikes.b.push_back(x / s);
      for (double x : spikes.beta) p.spikes.beta.push_back(x / s);
      const auto k = DoubleContourKernel::sigma_deformed(p, o.quad.inner);
      const double C0 = std::abs(k(0.0, 0.0));
      double worst = 0.0;
      for (double x : grid)
        for (double y : grid) worst = std::max(worst, std::abs(k(x, y)) / (C0 * std::exp((bm * x - b1 * y) / s)));
      const bool ok = worst <= o.decay_safety;
      all = all && ok;
      checks.push_back({{"sigma", s}, {"C0", C0}, {"worst_ratio", worst}, {"bound", o.decay_safety}, {"pass", ok}});
    }
    rep.details["decay"] = checks;
    rep.details["decay_pass"] = all;
    if (!all) rep.fail();
  }
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

Report run_verify_kernel_limit(const KernelLimitOptions& o) {
  const auto t0 = Clock::now();
  const SpikeParams spikes = parse_spikes(o.b, o.beta);
  const auto Ns = parse_int_list(o.N_list);
  if (Ns.empty()) throw std::invalid_argument("N-list is empty");
  for (long long N : Ns)
    if (N < 1) throw std::invalid_argument("N must be positive");
  if (o.factor < 2) throw std::invalid_argument("factor must be >= 2");
  const auto pairs = parse_pairs(o.points);
  if (pairs.empty()) throw std::invalid_argument("points is empty");

  const ScalingConstants sc = scaling_constants(o.kappa);
  const TildeKBPKernel limit(o.r, spikes);
  const cplx apex = limit.contours().cw.pieces.front().a;
  const auto on_cw = [&](double t) {
    const cplx dir = t >= 0.0 ? cplx(-1.0, 1.0) : cplx(-1.0, -1.0);
    return apex + std::abs(t) * dir / std::sqrt(2.0);
  };

  Report rep;
  rep.experiment = "verify-kernel-limit";
  const bool trend = Ns.size() > 1;
  rep.columns = {"N", "pair", "w_re", "w_im", "w2_re", "w2_im", "gap_N"};
  if (trend) rep.columns.insert(rep.columns.end(), {"gap_fN", "ratio"});
  rep.columns.push_back("pass");

  for (long long N : Ns) {
    const KNKernel kn(static_cast<int>(N), o.r, sc, spikes);
    std::optional<KNKernel> kf;
    if (trend) kf.emplace(static_cast<int>(N * o.factor), o.r, sc, spikes);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const cplx w = on_cw(pairs[j].first), w2 = on_cw(pairs[j].second);
      const cplx ref = limit(w, w2);
      const double gap = std::abs(kn(w, w2) - ref);
      std::vector<json> cells{N, static_cast<int>(j), w.real(), w.imag(), w2.real(), w2.imag(), gap};
      bool ok = std::isfinite(gap);
      if (trend) {
        const double gapf = std::abs((*kf)(w, w2) - ref);
        const double ratio = gap / gapf;
        ok = ratio >= o.ratio_lo && ratio <= o.ratio_hi;
        cells.push_back(gapf);
        cells.push_back(ratio);
      }
      if (!ok) rep.fail();
      cells.push_back(ok);
      rep.add_row(std::move(cells));
    }
  }

  // |K_N(w, w2)| <= C e^{-|Im w|}: C from |Im w| <= decay_fit, checked out to decay_max.
  {
    const KNKernel kn(static_cast<int>(Ns.front()), o.r, sc, spikes);
    const cplx w2 = on_cw(0.7);
    double C = 0.0;
    for (double y = 0.25; y <= o.decay_fit + 1e-12; y += 0.25)
      C = std::max(C, std::abs(kn(on_cw(y * std::sqrt(2.0)), w2)) * std::exp(y));
    json pts = json::array();
    bool all = true;
    for (double y = o.decay_fit; y <= o.decay_max + 1e-12; y += 1.0) {
      const double mag = std::abs(kn(on_cw(y * std::sqrt(2.0)), w2));
      const double bound = C * std::exp(-y);
      const bool ok = mag <= bound;
      all = all && ok;
      pts.push_back({{"im_w", y}, {"abs_K", mag}, {"bound", bound}, {"pass", ok}});
    }
    rep.details["decay_C"] = C;
    rep.details["decay"] = pts;
    rep.details["decay_pass"] = all;
    if (!all) rep.fail();
  }
  rep.details["kappa"] = o.kappa;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

}  // namespace bpkpz::cli
