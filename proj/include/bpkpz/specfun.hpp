#pragma once

#include <complex>
#include <vector>

namespace bpkpz {

using cplx = std::complex<double>;

/// Principal branch of ln Gamma(z), analytic on C \ (-inf, 0].
/// Throws DomainError at the poles z = 0, -1, -2, ...
cplx log_gamma(cplx z);

/// Real-argument log-gamma; thin wrapper kept for symmetry with the complex version.
double log_gamma(double x);

double digamma(double x);
double trigamma(double x);
/// Second derivative of digamma.
double psi2(double x);

/// Hurwitz zeta sum_{j>=0} (a+j)^{-s} for integer s >= 2 and a > 0.
double hurwitz_zeta(int s, double a);

/// ln Gamma(a+x) - ln Gamma(a) - digamma(a) x - trigamma(a) x^2/2, accurate in
/// relative terms for small |x|. Requires a > 0; uses the Taylor series when
/// |x| < a/2 and direct differences otherwise.
cplx log_gamma_cubic_tail(double a, cplx x);

/// log_gamma_cubic_tail with the base fixed and its series coefficients cached.
class CubicTail {
 public:
  explicit CubicTail(double a);
  cplx operator()(cplx x) const;

 private:
  double a_, lg_, psi_, psi1_;
  std::vector<double> coef_;  // (-1)^k zeta(k, a) / k for k = 3, 4, ...
};

/// Inverse of trigamma on (0, inf).
double theta_of_kappa(double kappa);

/// Constants tying the polymer scale kappa = tau/N to the fluctuation scale.
struct ScalingConstants {
  double kappa;
  double theta;  ///< trigamma(theta) == kappa
  double f;      ///< free-energy density, theta*kappa - digamma(theta)
  double c;      ///< (-psi2(theta)/2)^(1/3)
};

ScalingConstants scaling_constants(double kappa);

}  // namespace bpkpz
