#pragma once

#include <bpkpz/distributions.hpp>
#include <cstdint>
#include <numbers>
#include <string>

#include "report.hpp"

namespace bpkpz::cli {

// List-valued settings are kept as text in the grid syntax of parse_grid so the
// echoed configuration can be fed back verbatim.

struct DistOptions {
  std::string b, beta;
  std::string r_grid = "0";
  double Y = 0.0;
  std::string method = "halfline";  // halfline | contour
  QuadControls quad;
};

struct SimOptions {
  int N = 1;
  double tau = 1.0;
  std::string a, alpha;
  double kappa = 0.0;  // > 0 selects the scaling parametrization from b, beta
  std::string b, beta;
  int M = 0;           // 0: max(10 N, 1000)
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  int grid_check = 100;  // samples re-evaluated on the refined grid
};

struct LaplaceOptions {
  int N = 9;
  double tau = 9.0;
  std::string a;
  std::string alpha;  // empty: theta_kappa + 0.5 with kappa = tau / N; "none": n = 0
  std::string u_grid = "0.5,1,2";
  std::int64_t samples = 100000;
  int M = 2000;
  std::uint64_t seed = 1;
  double se_factor = 3.0;
  double grid_allowance = 0.01;
  double varphi = std::numbers::pi / 8;
  QuadControls quad;
};

struct ScalingOptions {
  double kappa = 1.0;
  std::string N_list = "50,100,200";
  std::string b, beta;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  int M = 0;
  double ks_bound = 0.1;
  int grid_check = 100;
  double cdf_lo = -10.0, cdf_hi = 8.0, cdf_step = 0.05;
  QuadControls quad;
};

struct SigmaOptions {
  std::string sigmas = "0.5,0.25,0.125";
  std::string r = "0";
  std::string b, beta;
  double Y = 0.0;
  double tol = 5e-3;
  bool check_decay = false;
  std::string decay_grid = "0:3:0.6";
  double decay_safety = 2.0;
  std::string kernel_point;  // "x:y", adds a pointwise kernel gap column
  QuadControls quad;
};

struct KernelLimitOptions {
  std::string N_list = "1000,10000";
  std::string points = "0.7:-0.7,1.4:1.4,0.4:-2.1,2.8:0.3,-1.4:1.4";
  double r = 0.0;
  double kappa = 1.0;
  std::string b, beta;
  int factor = 8;
  double ratio_lo = 1.6, ratio_hi = 2.4;
  double decay_fit = 2.0;
  double decay_max = 20.0;
};

Report run_dist(const DistOptions& o);
Report run_sim(const SimOptions& o);
Report run_verify_laplace(const LaplaceOptions& o);
Report run_verify_scaling(const ScalingOptions& o);
Report run_verify_sigma(const SigmaOptions& o);
Report run_verify_kernel_limit(const KernelLimitOptions& o);

SpikeParams parse_spikes(const std::string& b, const std::string& beta);

}  // namespace bpkpz::cli
