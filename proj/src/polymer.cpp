#include "bpkpz/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "bpkpz/error.hpp"
#include "bpkpz/parallel.hpp"
#include "bpkpz/specfun.hpp"

namespace bpkpz {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

std::vector<double> brownian_path(double drift, double dt, int M, Engine& eng) {
  std::normal_distribution<double> nd;
  std::vector<double> p(M + 1);
  p[0] = 0.0;
  const double sd = std::sqrt(dt);
  for (int j = 1; j <= M; ++j) p[j] = p[j - 1] + drift * dt + sd * nd(eng);
  return p;
}

// Log lattice sums Z(k, l) over the n x m block; the path starts at row n-1,
// column 0, and moves to k-1 or l+1.
Eigen::MatrixXd lattice(const Eigen::MatrixXd& omega) {
  const Eigen::Index n = omega.rows(), m = omega.cols();
  Eigen::MatrixXd Z(n, m);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      double acc = (k == n - 1 && l == 0) ? 0.0 : kNegInf;
      if (k + 1 < n) acc = logaddexp(acc, Z(k + 1, l));
      if (l > 0) acc = logaddexp(acc, Z(k, l - 1));
      Z(k, l) = omega(k, l) + acc;
    }
  }
  return Z;
}

std::vector<double> unit_start(int len) {
  std::vector<double> d(len, kNegInf);
  if (len > 0) d[0] = 0.0;
  return d;
}

void check_positive_shapes(const std::vector<double>& lo, const std::vector<double>& hi) {
  for (double h : hi)
    for (double l : lo)
      if (!(h - l > 0.0)) throw ConstraintError("log-gamma parameter alpha_k - a_l must be positive");
}

}  // namespace

void SimConfig::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (static_cast<int>(a.size()) != N) throw std::invalid_argument("drift vector a must have length N");
  for (double x : a)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite drift");
  for (double x : alpha)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite alpha");
  check_positive_shapes(a, alpha);
  if (M < 10 * N) throw std::invalid_argument("grid too coarse: need M >= 10 N");
  if (num_samples < 0) throw std::invalid_argument("num_samples must be >= 0");
}

SimConfig SimConfig::scaling(double kappa, int N, const SpikeParams& spikes, int M) {
  const ScalingConstants sc = scaling_constants(kappa);
  const FiniteNParams p = spiked_finite_params(N, sc, spikes, 1.0);
  SimConfig cfg;
  cfg.N = N;
  cfg.tau = p.tau;
  cfg.a = p.a;
  cfg.alpha = p.alpha;
  cfg.M = M > 0 ? M : std::max(10 * N, 1000);
  return cfg;
}

DisorderSample draw_disorder(const SimConfig& cfg, std::uint64_t index) {
  Engine eng = sample_engine(cfg.seed, index, 0);
  DisorderSample d;
  d.index = index;
  const int n = cfg.n();
  d.omega.resize(n, cfg.N);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < cfg.N; ++l) d.omega(k, l) = -log_gamma_variate(cfg.alpha[k] - cfg.a[l], eng);
  d.paths.reserve(cfg.N);
  for (int l = 0; l < cfg.N; ++l) d.paths.push_back(brownian_path(cfg.a[l], cfg.dt(), cfg.M, eng));
  return d;
}

DisorderSample refine(const DisorderSample& d, double dt, Engine& eng) {
  std::normal_distribution<double> nd;
  const double sd = 0.5 * std::sqrt(dt);
  DisorderSample out;
  out.omega = d.omega;
  out.index = d.index;
  for (const auto& p : d.paths) {
    const std::size_t M = p.size() - 1;
    std::vector<double> q(2 * M + 1);
    for (std::size_t j = 0; j < M; ++j) {
      q[2 * j] = p[j];
      q[2 * j + 1] = 0.5 * (p[j] + p[j + 1]) + sd * nd(eng);
    }
    q[2 * M] = p[M];
    out.paths.push_back(std::move(q));
  }
  return out;
}

std::vector<double> log_discrete_block(const Eigen::MatrixXd& omega, int N) {
  if (omega.rows() == 0) return unit_start(N);
  if (omega.cols() != N) throw std::invalid_argument("boundary block must have N columns");
  const Eigen::MatrixXd Z = lattice(omega);
  std::vector<double> d(N);
  for (int l = 0; l < N; ++l) d[l] = Z(0, l);
  return d;
}

std::vector<double> sample_discrete_block(const Eigen::MatrixXd& omega, int N) {
  std::vector<double> d = log_discrete_block(omega, N);
  for (double& x : d) x = std::exp(x);
  return d;
}

std::vector<double> log_discrete_top_row(const Eigen::MatrixXd& omega, int n) {
  if (omega.cols() == 0) return unit_start(n);
  if (omega.rows() != n) throw std::invalid_argument("boundary block must have n rows");
  const Eigen::MatrixXd Z = lattice(omega);
  const Eigen::Index m = omega.cols();
  std::vector<double> d(n);
  for (int k = 0; k < n; ++k) d[k] = Z(n - 1 - k, m - 1);
  return d;
}

std::vector<double> semi_discrete_profile(std::span<const double> log_d,
                                          const std::vector<std::vector<double>>& paths, double dt,
                                          bool reference) {
  if (paths.empty() || log_d.size() != paths.size())
    throw std::invalid_argument("need one boundary value per level");
  const std::size_t len = paths[0].size();
  std::vector<double> prev(len, kNegInf), cur(len), g(len);
  const double log_half_dt = std::log(0.5 * dt);
  const double log_span = std::log(dt * static_cast<double>(len - 1));

  for (std::size_t l = 0; l < paths.size(); ++l) {
    const auto& B = paths[l];
    if (B.size() != len) throw std::invalid_argument("paths must share the grid");
    const double ld = log_d[l];
    double gmax = kNegInf;
    for (std::size_t j = 0; j < len; ++j) {
      g[j] = prev[j] - B[j];
      gmax = std::max(gmax, g[j]);
    }
    if (gmax == kNegInf) {
      for (std::size_t j = 0; j < len; ++j) cur[j] = ld + B[j];
    } else if (reference) {
      double log_s = kNegInf;
      cur[0] = ld + B[0];
      for (std::size_t j = 1; j < len; ++j) {
        log_s = logaddexp(log_s, log_half_dt + logaddexp(g[j - 1], g[j]));
        cur[j] = logaddexp(ld, log_s) + B[j];
      }
    } else {
      // Y(t) = D + int_0^t Z_{l-1} e^{-B_l}, kept in units of e^s with s an
      // upper bound for ln Y.
      const double s = std::max(ld, gmax + log_span);
      const double d = std::exp(ld - s);
      double S = 0.0;
      double e_prev = std::exp(g[0] - s);
      cur[0] = std::log(d) + s + B[0];
      for (std::size_t j = 1; j < len; ++j) {
        const double e = std::exp(g[j] - s);
        S += 0.5 * dt * (e_prev + e);
        e_prev = e;
        cur[j] = std::log(d + S) + s + B[j];
      }
    }
    std::swap(prev, cur);
  }
  return prev;
}

namespace {

PartitionSample partition(const SimConfig& cfg, const DisorderSample& d, bool reference) {
  const std::vector<double> ld = log_discrete_block(d.omega, cfg.N);
  if (static_cast<int>(d.paths.size()) != cfg.N) throw std::invalid_argument("sample has wrong level count");
  const double dt = cfg.tau / static_cast<double>(d.paths[0].size() - 1);
  const double F = semi_discrete_profile(ld, d.paths, dt, reference).back();
  return {std::exp(F), F};
}

}  // namespace

PartitionSample sample_partition_function(const SimConfig& cfg, const DisorderSample& d) {
  return partition(cfg, d, false);
}

PartitionSample sample_partition_function_reference(const SimConfig& cfg, const DisorderSample& d) {
  return partition(cfg, d, true);
}

void SpikedBoundaryConfig::validate() const {
  SpikeParams{b, beta}.validate();
  if (!(x_max > 0.0)) throw std::invalid_argument("x_max must be positive");
  if (M < 1) throw std::invalid_argument("M must be >= 1");
}

SpikedBoundarySample draw_spiked_boundary(const SpikedBoundaryConfig& cfg, std::uint64_t index) {
  cfg.validate();
  Engine eng = sample_engine(cfg.seed, index, 0);
  const int m = static_cast<int>(cfg.b.size()), n = static_cast<int>(cfg.beta.size());
  const double dx = cfg.x_max / cfg.M;
  SpikedBoundarySample s;
  s.omega.resize(n, m);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < m; ++l) s.omega(k, l) = -log_gamma_variate(cfg.beta[k] - cfg.b[l], eng);
  for (int l = 0; l < m; ++l) s.paths.push_back(brownian_path(cfg.b[l], dx, cfg.M, eng));
  for (int k = 0; k < n; ++k) s.dual_paths.push_back(brownian_path(cfg.beta[k], dx, cfg.M, eng));
  return s;
}

std::vector<double> dual_partition_profile(const SpikedBoundarySample& s, double dx) {
  const int n = static_cast<int>(s.dual_paths.size());
  if (n == 0) throw std::invalid_argument("dual partition function needs n >= 1");
  return semi_discrete_profile(log_discrete_top_row(s.omega, n), s.dual_paths, dx);
}

double sample_dual_partition_function(const SpikedBoundaryConfig& cfg, const SpikedBoundarySample& s,
                                      double x_tilde) {
  const double dx = cfg.x_max / cfg.M;
  const double pos = x_tilde / dx;
  const long j = std::lround(pos);
  if (x_tilde < 0.0 || j > cfg.M || std::abs(pos - j) > 1e-9)
    throw std::invalid_argument("x_tilde must be a grid point in [0, x_max]");
  return std::exp(dual_partition_profile(s, dx)[j]);
}

InitialProfile spiked_initial_profile(const SpikedBoundaryConfig& cfg, const SpikedBoundarySample& s) {
  const double dx = cfg.x_max / cfg.M;
  const int m = static_cast<int>(s.paths.size());
  std::vector<double> right(cfg.M + 1, kNegInf), left(cfg.M + 1, kNegInf);
  if (m > 0) right = semi_discrete_profile(log_discrete_block(s.omega, m), s.paths, dx);
  if (!s.dual_paths.empty()) left = dual_partition_profile(s, dx);
  InitialProfile out;
  for (int j = -cfg.M; j <= cfg.M; ++j) {
    out.x.push_back(j * dx);
    out.log_z.push_back(j > 0 ? right[j] : left[-j]);
  }
  return out;
}

double annealed_mean(const SimConfig& cfg) {
  const int n = cfg.n(), N = cfg.N;
  check_positive_shapes(cfg.a, cfg.alpha);
  // E e^{omega} = 1 / (shape - 1)
  Eigen::MatrixXd log_mu(n, N);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < N; ++l) {
      const double shape = cfg.alpha[k] - cfg.a[l];
      if (!(shape > 1.0)) throw DomainError("annealed mean is infinite for shape <= 1");
      log_mu(k, l) = -std::log(shape - 1.0);
    }
  }
  const std::vector<double> ld = log_discrete_block(log_mu, N);
  Eigen::VectorXd m0(N);
  for (int l = 0; l < N; ++l) m0(l) = std::exp(ld[l]);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (int l = 0; l < N; ++l) {
    A(l, l) = cfg.a[l] + 0.5;
    if (l > 0) A(l, l - 1) = 1.0;
  }
  const Eigen::MatrixXd E = (A * cfg.tau).exp();
  return E.row(N - 1).dot(m0);
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : samples_(std::move(samples)) {
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::cdf(double x) const {
  if (samples_.empty()) return 0.0;
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::mean() const {
  double s = 0.0;
  for (double x : samples_) s += x;
  return samples_.empty() ? 0.0 : s / static_cast<double>(samples_.size());
}

double ks_statistic(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf) {
  const auto& x = emp.samples();
  if (x.empty()) throw std::invalid_argument("ks_statistic: no samples");
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

std::vector<std::vector<double>> mc_free_energies(const SimConfig& cfg, std::int64_t count, int levels,
                                                  bool parallel) {
  cfg.validate();
  if (levels < 0) throw std::invalid_argument("levels must be >= 0");
  std::vector<std::vector<double>> F(levels + 1, std::vector<double>(count));
  parallel_for(count, parallel, [&](std::int64_t i) {
    const auto idx = static_cast<std::uint64_t>(i);
    DisorderSample d = draw_disorder(cfg, idx);
    const std::vector<double> ld = log_discrete_block(d.omega, cfg.N);
    double dt = cfg.dt();
    F[0][i] = semi_discrete_profile(ld, d.paths, dt).back();
    Engine eng = sample_engine(cfg.seed, idx, 1);
    for (int j = 1; j <= levels; ++j) {
      d = refine(d, dt, eng);
      dt *= 0.5;
      F[j][i] = semi_discrete_profile(ld, d.paths, dt).back();
    }
  });
  return F;
}

EmpiricalDistribution mc_free_energy_distribution(const SimConfig& cfg, std::int64_t num_samples,
                                                  bool parallel) {
  const ScalingConstants sc = scaling_constants(cfg.tau / cfg.N);
  std::vector<double> F = std::move(mc_free_energies(cfg, num_samples, 0, parallel)[0]);
  const double scale = sc.c * std::cbrt(double(cfg.N));
  for (double& x : F) x = (x - cfg.N * sc.f) / scale;
  return EmpiricalDistribution(std::move(F));
}

LaplaceEstimate laplace_from_free_energies(std::span<const double> F, double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("u must be non-negative");
  if (u == 0.0 || F.empty()) return {1.0, 0.0};
  std::vector<double> y(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) y[i] = std::exp(-u * std::exp(F[i]));
  const double n = static_cast<double>(F.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double var = F.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

LaplaceEstimate mc_laplace(const SimConfig& cfg, double u, std::int64_t num_samples, bool parallel) {
  if (!(u >= 0.0)) throw std::invalid_argument("u must be non-negative");
  if (u == 0.0) return {1.0, 0.0};
  const auto F = mc_free_energies(cfg, num_samples, 0, parallel);
  return laplace_from_free_energies(F[0], u);
}

}  // namespace bpkpz
