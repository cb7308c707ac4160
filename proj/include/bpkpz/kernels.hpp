#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <span>
#include <vector>

#include "bpkpz/contours.hpp"
#include "bpkpz/specfun.hpp"

namespace bpkpz {

using CMatrix = Eigen::MatrixXcd;

/// Boundary-perturbation vectors; b are drift-type spikes, beta source spikes.
struct SpikeParams {
  std::vector<double> b;
  std::vector<double> beta;

  /// Throws ConstraintError unless max(b) < min(beta).
  void validate() const;
  /// Coordinatewise shift of both vectors.
  SpikeParams shifted(double y) const;
};

/// Parameters of the finite-N Laplace-transform formula.
struct FiniteNParams {
  int N = 1;
  double tau = 1.0;
  std::vector<double> a;      ///< drifts, length N
  std::vector<double> alpha;  ///< boundary parameters, length n
  cplx u = 1.0;

  int n() const { return static_cast<int>(alpha.size()); }
  /// Throws ConstraintError / std::invalid_argument on inconsistent input.
  void validate() const;
  /// True when N is below the bound the exact formula is stated for.
  bool outside_stated_range() const { return N < 9; }
};

/// u = exp(-N f - r c N^{1/3}).
double scaled_u(int N, double r, const ScalingConstants& sc);

/// Spiked drift vector a = (theta + b_l / (c N^{1/3}), 0, ..., 0) of length N and
/// alpha_k = theta + beta_k / (c N^{1/3}).
FiniteNParams spiked_finite_params(int N, const ScalingConstants& sc, const SpikeParams& spikes,
                                   cplx u);

/// Parameters of the sigma-deformed kernel, stored in the shifted form
///   sigma pi e^{-r(z-w)} / sin(sigma pi (z-w)) * prod Gamma(sigma(w-b)) / Gamma(sigma(z-b)) ...
struct CdrpParams {
  double sigma = 1.0;
  cplx r = 0.0;
  SpikeParams spikes;

  double T() const { return 2.0 / (sigma * sigma * sigma); }

  /// sigma and spikes from (T, X, S) and unshifted spikes of the Laplace formula:
  /// the spikes move by X/T, then are divided by sigma; r = -sigma Log S.
  static CdrpParams from_laplace(double T, double X, cplx S, const SpikeParams& raw);
  static CdrpParams from_shift(double sigma, cplx r, const SpikeParams& spikes);
};

struct InnerQuadrature {
  int order = 24;
  double max_panel = 0.5;
  double cut_log = 40.0;  ///< rays stop where the integrand has decayed by e^{-cut_log}
};

// ---------------------------------------------------------------------------

/// Laplace-transform kernel on the wedge C_v with per-row inner contours C_s(v).
class KuKernel {
 public:
  KuKernel(FiniteNParams p, double varphi = std::numbers::pi / 8, InnerQuadrature q = {});

  const FiniteNParams& params() const { return p_; }
  const WedgeContour& wedge() const { return cv_; }
  /// Radius beyond which the kernel is below e^{-cut_log} along the wedge.
  double wedge_radius() const;

  ComplexPath inner_contour(cplx v, double d) const;
  ComplexPath inner_contour(cplx v) const { return inner_contour(v, default_cs_height(cv_.varphi)); }
  QuadratureRule inner_rule(cplx v, const ComplexPath& cs) const;

  /// Integrand without the 1/(v+s-v') factor.
  cplx integrand(cplx v, cplx s) const;
  /// Pointwise value with the default inner contour.
  cplx operator()(cplx v, cplx v2) const;
  /// K(v_i, v_j) for all pairs; rows in parallel.
  CMatrix matrix(std::span<const cplx> nodes) const;
  /// Single-threaded version of matrix(); same arithmetic, kept for testing.
  CMatrix matrix_serial(std::span<const cplx> nodes) const;

 private:
  CMatrix assemble(std::span<const cplx> nodes, bool parallel) const;
  void row(cplx v, std::span<const cplx> nodes, CMatrix& out, Eigen::Index i) const;

  FiniteNParams p_;
  WedgeContour cv_;
  InnerQuadrature q_;
  cplx log_u_;
};

cplx eval_Ku(cplx v, cplx v2, const FiniteNParams& p, const ComplexPath& cs,
             const QuadratureRule& quad);

// ---------------------------------------------------------------------------

/// Rescaled finite-N kernel on C_w.
class KNKernel {
 public:
  KNKernel(int N, double r, const ScalingConstants& sc, SpikeParams spikes, InnerQuadrature q = {});

  const RescaledContours& contours() const { return rc_; }
  double sigma_N() const { return sigma_; }
  /// Phi(z) = theta + z sigma_N.
  cplx phi(cplx z) const { return sc_.theta + sigma_ * z; }

  /// z-contour used for row w: C_z, with a leftward bump at height Im w when a
  /// sine pole would otherwise sit to the left of the line.
  ComplexPath row_contour(cplx w) const;
  bool needs_notch(cplx w) const;
  /// N (G(Phi(z)) - G(theta)).
  cplx scaled_G(cplx z) const;
  cplx integrand(cplx w, cplx z) const;
  cplx operator()(cplx w, cplx w2) const;
  CMatrix matrix(std::span<const cplx> nodes) const;
  CMatrix matrix_serial(std::span<const cplx> nodes) const;

 private:
  CMatrix assemble(std::span<const cplx> nodes, bool parallel) const;
  QuadratureRule rule_for(const ComplexPath& cz) const;

  int N_;
  double r_;
  ScalingConstants sc_;
  SpikeParams spikes_;
  InnerQuadrature q_;
  RescaledContours rc_;
  double sigma_;
  double lin_res_;   // G'(theta) as evaluated, ~1e-16
  double quad_res_;  // G''(theta) as evaluated
  CubicTail tail_;
  QuadratureRule base_rule_;
};

cplx eval_KN(cplx w, cplx w2, double r, int N, const ScalingConstants& sc, const SpikeParams& spikes,
             const ComplexPath& cz);

// ---------------------------------------------------------------------------

/// Limit kernel on C_w with one inner integral along C_z.
class TildeKBPKernel {
 public:
  TildeKBPKernel(double r, SpikeParams spikes, InnerQuadrature q = {});
  TildeKBPKernel(double r, SpikeParams spikes, const ComplexPath& cz, InnerQuadrature q = {});

  const RescaledContours& contours() const { return rc_; }
  const QuadratureRule& z_rule() const { return zr_; }
  cplx operator()(cplx w, cplx w2) const;
  CMatrix matrix(std::span<const cplx> nodes) const;
  CMatrix matrix_serial(std::span<const cplx> nodes) const;

 private:
  cplx prefactor(cplx w) const;

  double r_;
  SpikeParams spikes_;
  RescaledContours rc_;
  QuadratureRule zr_;
  std::vector<cplx> zfac_;
};

cplx eval_tildeKBP(cplx w, cplx w2, double r, const SpikeParams& spikes, const ComplexPath& cz);

// ---------------------------------------------------------------------------

/// Double-contour kernels K(x, y) = A(x) M B(y) with w on the lower contour,
/// z on the upper one. Two families share the machinery: the Borodin-Peche kernel
/// (core 1/(z-w)) and the sigma-deformed kernel.
class DoubleContourKernel {
 public:
  /// Borodin-Peche kernel with line offset c.
  static DoubleContourKernel borodin_peche(const SpikeParams& spikes, double c = 1.0,
                                           InnerQuadrature q = {});
  static DoubleContourKernel borodin_peche(const SpikeParams& spikes,
                                           const TwoSidedContours& contours,
                                           InnerQuadrature q = {});
  /// Sigma-deformed kernel in shifted form; lines at -/+ min(1/(4 sigma), 1).
  static DoubleContourKernel sigma_deformed(const CdrpParams& p, InnerQuadrature q = {});
  static DoubleContourKernel sigma_deformed(const CdrpParams& p, const TwoSidedContours& contours,
                                            InnerQuadrature q = {});
  /// Contours used by sigma_deformed(p) when none are supplied.
  static TwoSidedContours sigma_contours(const CdrpParams& p);

  const TwoSidedContours& contours() const { return tc_; }
  const QuadratureRule& w_rule() const { return wr_; }
  const QuadratureRule& z_rule() const { return zr_; }

  /// Serial double sum; the reference implementation.
  cplx operator()(double x, double y) const;
  /// K(x_a, y_b) through two matrix products, parallel over node blocks.
  CMatrix matrix(std::span<const double> x, std::span<const double> y) const;
  CMatrix matrix_serial(std::span<const double> x, std::span<const double> y) const;

 private:
  DoubleContourKernel() = default;
  void finish(InnerQuadrature q);
  cplx core(cplx z, cplx w) const;
  CMatrix assemble(std::span<const double> x, std::span<const double> y, bool parallel) const;

  bool sigma_form_ = false;
  double sigma_ = 0.0;
  cplx r_ = 0.0;
  SpikeParams spikes_;
  TwoSidedContours tc_;
  QuadratureRule wr_, zr_;
  std::vector<cplx> wfac_;  // w-only factors, weights included, without e^{wx}
  std::vector<cplx> zfac_;
  CMatrix M_;               // core(z_j, w_i), rows i
};

cplx eval_KBP(double x, double y, const SpikeParams& spikes, const TwoSidedContours& contours,
              InnerQuadrature q = {});
cplx eval_Ksigma(double x, double y, const CdrpParams& p, const TwoSidedContours& contours,
                 InnerQuadrature q = {});

/// Stable 1 / sin(z) for complex z, no overflow for large |Im z|.
cplx inv_sin(cplx z);

}  // namespace bpkpz
