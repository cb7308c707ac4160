#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "bpkpz/fredholm.hpp"
#include "bpkpz/kernels.hpp"

namespace bpkpz {

struct QuadControls {
  int halfline_order = 64;
  int contour_order = 16;  ///< per panel, for determinants on complex contours
  double contour_panel = 2.0;  ///< longest panel on complex contours
  InnerQuadrature inner;   ///< inner contour integrals of the kernels
  double c = 1.0;          ///< line offset of the Borodin-Peche contours
  double tol = 1e-6;       ///< convergence threshold on the order-halving gap
};

struct DistributionQuery {
  double r = 0.0;
  SpikeParams spikes;
  double Y = 0.0;  ///< evaluates F_{b+Y, beta+Y}(r + Y^2)
  QuadControls quad;
};

struct DistValue {
  double value = 1.0;
  double error_estimate = 0.0;
  double imag = 0.0;  ///< imaginary part of the determinant, a quadrature diagnostic
  bool converged = true;
};

/// Borodin-Peche distribution function; BBP for empty beta and GUE Tracy-Widom
/// for empty b and beta.
DistValue f_bp(const DistributionQuery& q);
/// Same law on a grid of arguments, sharing one kernel discretization.
std::vector<DistValue> f_bp_grid(const SpikeParams& spikes, double Y, std::span<const double> r,
                                 const QuadControls& quad = {});
/// Second route: det(I + tilde-K)_{L^2(C_w)}.
DistValue f_bp_contour(double r, const SpikeParams& spikes, const QuadControls& quad = {});

/// det(I - K^(sigma)) on L^2(R_+); the Laplace transform of the CDRP partition function.
DistValue cdrp_laplace(const CdrpParams& p, const QuadControls& quad = {});

struct SigmaRow {
  double sigma;
  DistValue det;
  DistValue limit;
  double gap;
};

/// |det(I - K^(sigma)) - F_BP(r)| for each sigma, with S = e^{-r/sigma}.
std::vector<SigmaRow> sigma_limit_scan(const SpikeParams& spikes, double r,
                                       std::span<const double> sigmas, const QuadControls& quad = {});

/// det(I + K_u) on L^2(C_v); equals E exp(-u Z) of the semi-discrete polymer.
DistValue finite_n_laplace(const FiniteNParams& p, double varphi = std::numbers::pi / 8,
                           const QuadControls& quad = {});

/// Continuous CDF built from f_bp on a grid with linear interpolation; 0 / 1
/// outside the grid.
class TabulatedCdf {
 public:
  TabulatedCdf(const SpikeParams& spikes, double lo, double hi, double step,
               const QuadControls& quad = {});
  double operator()(double x) const;
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& values() const { return f_; }

 private:
  std::vector<double> x_, f_;
};

}  // namespace bpkpz
