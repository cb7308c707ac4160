#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bpkpz/kernels.hpp"
#include "bpkpz/rng.hpp"

namespace bpkpz {

/// Semi-discrete polymer with log-gamma boundary sources. Row k of the boundary
/// block carries alpha_k, level l carries the drift a_l.
struct SimConfig {
  int N = 1;
  double tau = 1.0;
  std::vector<double> a;
  std::vector<double> alpha;
  int M = 1000;
  std::int64_t num_samples = 1000;
  std::uint64_t seed = 1;

  int n() const { return static_cast<int>(alpha.size()); }
  double dt() const { return tau / M; }
  /// Throws ConstraintError for alpha_k <= a_l, std::invalid_argument for shape
  /// errors and for M < 10 N.
  void validate() const;

  /// Scaling-regime parameters: tau = kappa N, a = (theta + b_l/(c N^{1/3}), 0, ...),
  /// alpha_k = theta + beta_k/(c N^{1/3}). M defaults to max(10 N, 1000).
  static SimConfig scaling(double kappa, int N, const SpikeParams& spikes, int M = 0);
};

/// Boundary weights and Brownian paths for one sample.
struct DisorderSample {
  Eigen::MatrixXd omega;                   ///< n x N, omega(k-1, l-1) = omega_{-k,l}
  std::vector<std::vector<double>> paths;  ///< N paths, M+1 grid values, paths[l][0] = 0
  std::uint64_t index = 0;
};

DisorderSample draw_disorder(const SimConfig& cfg, std::uint64_t index);
/// Halves the grid spacing: every new midpoint is a Brownian-bridge draw
/// between its neighbours, so the coarse values are kept exactly.
DisorderSample refine(const DisorderSample& d, double dt, Engine& eng);

/// ln D[l] for l = 1..N, D[l] the sum over up-right lattice paths (-n,1) -> (-1,l)
/// of exp(sum of omega). For n = 0, D = (1, 0, ..., 0).
std::vector<double> log_discrete_block(const Eigen::MatrixXd& omega, int N);
std::vector<double> sample_discrete_block(const Eigen::MatrixXd& omega, int N);
/// ln of the lattice sums ending on the top row, (-n,1) -> (k-n-1, m) for k = 1..n.
/// For m = 0, (1, 0, ..., 0).
std::vector<double> log_discrete_top_row(const Eigen::MatrixXd& omega, int n);

struct PartitionSample {
  double Z = 0.0;
  double F = 0.0;
};

/// ln Z_l(t) on the grid for the top level, given ln D and the level paths.
/// Trapezoid rule; `reference` selects the step-by-step log-space accumulation.
std::vector<double> semi_discrete_profile(std::span<const double> log_d,
                                          const std::vector<std::vector<double>>& paths, double dt,
                                          bool reference = false);

PartitionSample sample_partition_function(const SimConfig& cfg, const DisorderSample& d);
PartitionSample sample_partition_function_reference(const SimConfig& cfg, const DisorderSample& d);

/// Two coupled semi-discrete partition functions sharing the boundary block:
/// drifts b on m horizontal levels, beta on n vertical levels.
struct SpikedBoundaryConfig {
  std::vector<double> b;
  std::vector<double> beta;
  double x_max = 1.0;
  int M = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SpikedBoundarySample {
  Eigen::MatrixXd omega;                         ///< n x m, parameter beta_k - b_l
  std::vector<std::vector<double>> paths;        ///< m paths with drifts b
  std::vector<std::vector<double>> dual_paths;   ///< n paths with drifts beta
};

SpikedBoundarySample draw_spiked_boundary(const SpikedBoundaryConfig& cfg, std::uint64_t index);
/// Dual partition function at every grid point X~ = j dx, j = 0..M, as logs.
std::vector<double> dual_partition_profile(const SpikedBoundarySample& s, double dx);
double sample_dual_partition_function(const SpikedBoundaryConfig& cfg, const SpikedBoundarySample& s,
                                      double x_tilde);
/// ln Z_0(X) on the grid X = -x_max .. x_max: the semi-discrete partition
/// function for X > 0 and the dual one at -X for X <= 0.
struct InitialProfile {
  std::vector<double> x;
  std::vector<double> log_z;
};
InitialProfile spiked_initial_profile(const SpikedBoundaryConfig& cfg, const SpikedBoundarySample& s);

/// E[Z(tau, N)] from the linear ODE for the level means.
double annealed_mean(const SimConfig& cfg);

/// Sorted samples with a right-continuous empirical CDF.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples);

  std::size_t count() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  double cdf(double x) const;
  double mean() const;

 private:
  std::vector<double> samples_;
};

double ks_statistic(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf);

/// Free energies F = ln Z for samples 0..count-1, evaluated on the base grid
/// and `levels` further halvings of it (coupled noise). Result[j][i] is sample i
/// at grid M 2^j.
std::vector<std::vector<double>> mc_free_energies(const SimConfig& cfg, std::int64_t count,
                                                  int levels = 0, bool parallel = true);

/// (F - N f_kappa) / (c_kappa N^{1/3}) with kappa = tau / N.
EmpiricalDistribution mc_free_energy_distribution(const SimConfig& cfg, std::int64_t num_samples,
                                                  bool parallel = true);

struct LaplaceEstimate {
  double estimate = 1.0;
  double standard_error = 0.0;
};

LaplaceEstimate laplace_from_free_energies(std::span<const double> F, double u);
LaplaceEstimate mc_laplace(const SimConfig& cfg, double u, std::int64_t num_samples,
                           bool parallel = true);

}  // namespace bpkpz
