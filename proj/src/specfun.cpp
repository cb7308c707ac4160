#include "bpkpz/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bpkpz/error.hpp"

namespace bpkpz {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// B_{2k} / (2k (2k-1)), k = 1..8
constexpr double kStirling[] = {
    1.0 / 12.0,          -1.0 / 360.0,   1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0};

cplx stirling_log_gamma(cplx z) {
  const cplx inv = 1.0 / z;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx p = inv;
  for (double coeff : kStirling) {
    series += coeff * p;
    p *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + kHalfLog2Pi + series;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

}  // namespace

cplx log_gamma(cplx z) {
  if (z.imag() == 0.0 && is_nonpositive_integer(z.real())) {
    throw DomainError("log_gamma: pole at non-positive integer");
  }
  if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
  // Shift upward until Stirling is accurate; the shift contributes the sum of
  // principal logs ln(z+j), which stays continuous on the cut plane.
  cplx w = z;
  if (z.imag() == 0.0) {
    cplx shift_sum = 0.0;
    while (w.real() < 0.0 || std::norm(w) < 144.0) {
      shift_sum += std::log(w);
      w += 1.0;
    }
    return stirling_log_gamma(w) - shift_sum;
  }
  // Upper half plane: multiply the factors and take one log. Each factor turns
  // the product by less than pi, so a wrap past pi shows up as Im P going
  // from >= 0 to < 0.
  cplx P = 1.0;
  double log_scale = 0.0;
  int turns = 0;
  while (w.real() < 0.0 || std::norm(w) < 144.0) {
    const bool upper = P.imag() >= 0.0;
    P *= w;
    if (upper && P.imag() < 0.0) ++turns;
    const double n2 = std::norm(P);
    if (n2 > 1e200) {
      const double m = std::sqrt(n2);
      log_scale += std::log(m);
      P /= m;
    }
    w += 1.0;
  }
  const cplx shift_sum(log_scale + std::log(std::abs(P)), std::arg(P) + 2.0 * std::numbers::pi * turns);
  return stirling_log_gamma(w) - shift_sum;
}

double log_gamma(double x) {
  if (is_nonpositive_integer(x)) throw DomainError("log_gamma: pole at non-positive integer");
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double i2 = 1.0 / (x * x);
  const double tail =
      i2 * (1.0 / 12 - i2 * (1.0 / 120 - i2 * (1.0 / 252 - i2 * (1.0 / 240 - i2 * (1.0 / 132 - i2 * (691.0 / 32760 - i2 / 12))))));
  return acc + std::log(x) - 0.5 / x - tail;
}

double trigamma(double x) {
  if (!(x > 0.0)) throw DomainError("trigamma: argument must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double i = 1.0 / x;
  const double i2 = i * i;
  const double tail =
      i * i2 * (1.0 / 6 - i2 * (1.0 / 30 - i2 * (1.0 / 42 - i2 * (1.0 / 30 - i2 * (5.0 / 66 - i2 * (691.0 / 2730 - i2 * 7.0 / 6))))));
  return acc + i + 0.5 * i2 + tail;
}

double psi2(double x) {
  if (!(x > 0.0)) throw DomainError("psi2: argument must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 2.0 / (x * x * x);
    x += 1.0;
  }
  const double i = 1.0 / x;
  const double i2 = i * i;
  const double tail =
      i2 * i2 * (0.5 - i2 * (1.0 / 6 - i2 * (1.0 / 6 - i2 * (3.0 / 10 - i2 * (5.0 / 6 - i2 * (691.0 / 210 - i2 * 35.0 / 2))))));
  return acc - i2 - i2 * i - tail;
}

double hurwitz_zeta(int s, double a) {
  if (s < 2) throw DomainError("hurwitz_zeta: order must be >= 2");
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta: shift must be positive");
  // Euler-Maclaurin with the head summed directly.
  constexpr int M = 12;
  double head = 0.0;
  for (int j = 0; j < M; ++j) head += std::pow(a + j, -s);
  const double x = a + M;
  double tail = std::pow(x, 1 - s) / (s - 1) + 0.5 * std::pow(x, -s);
  // B_{2k}/(2k)!
  constexpr double kB[] = {1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600, 1.0 / 47900160,
                           -691.0 / 1307674368000.0};
  double rising = s;  // s (s+1) ... (s+2k-2)
  double xp = std::pow(x, -s - 1);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 6; ++k) {
    const double term = kB[k] * rising * xp;
    if (std::abs(term) >= prev) break;  // asymptotic series turned around
    prev = std::abs(term);
    tail += term;
    rising *= (s + 2.0 * k + 1) * (s + 2.0 * k + 2);
    xp /= x * x;
  }
  return head + tail;
}

cplx log_gamma_cubic_tail(double a, cplx x) { return CubicTail(a)(x); }

CubicTail::CubicTail(double a) : a_(a) {
  if (!(a > 0.0)) throw DomainError("log_gamma_cubic_tail: base must be positive");
  lg_ = std::lgamma(a);
  psi_ = digamma(a);
  psi1_ = trigamma(a);
  for (int k = 3; k < 80; ++k) coef_.push_back(((k % 2) ? -1.0 : 1.0) * hurwitz_zeta(k, a) / double(k));
}

cplx CubicTail::operator()(cplx x) const {
  if (std::abs(x) >= 0.5 * a_) return log_gamma(a_ + x) - lg_ - psi_ * x - 0.5 * psi1_ * x * x;
  // terms shrink at least like 2^-k
  cplx sum = 0.0;
  cplx p = x * x * x;
  for (double c : coef_) {
    const cplx term = c * p;
    sum += term;
    if (std::norm(term) <= 1e-34 * std::norm(sum)) break;
    p *= x;
  }
  return sum;
}

double theta_of_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("theta_of_kappa: kappa must be positive and finite");
  }
  double lo = 1e-6;
  double hi = 1e6;
  while (trigamma(lo) < kappa) lo *= 1e-3;
  while (trigamma(hi) > kappa) hi *= 1e3;

  // Bisection to a narrow bracket, then safeguarded Newton.
  for (int it = 0; it < 200 && (hi - lo) > 1e-3 * lo; ++it) {
    const double mid = std::sqrt(lo * hi);
    (trigamma(mid) > kappa ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double g = trigamma(t) - kappa;
    if (std::abs(g) <= 1e-15 * kappa) break;
    double next = t - g / psi2(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    (g > 0.0 ? lo : hi) = t;
    if (next == t) break;
    t = next;
  }
  return t;
}

ScalingConstants scaling_constants(double kappa) {
  const double theta = theta_of_kappa(kappa);
  return {kappa, theta, theta * kappa - digamma(theta), std::cbrt(-psi2(theta) / 2.0)};
}

}  // namespace bpkpz
