#include <doctest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <bpkpz/error.hpp>
#include <bpkpz/specfun.hpp>
#include <cmath>
#include <numbers>
#include <random>

using namespace bpkpz;
using std::numbers::pi;

namespace {

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// ln Gamma is only defined mod 2 pi i away from the principal branch; compare exponentials
// where the imaginary parts may legitimately differ by a multiple of 2 pi.
bool close_mod_2pi(cplx a, cplx b, double tol) {
  const double k = std::round((a.imag() - b.imag()) / (2 * pi));
  return close(a - cplx(0, 2 * pi * k), b, tol);
}

}  // namespace

TEST_CASE("values at one") {
  const double euler = std::numbers::egamma;
  CHECK(std::abs(digamma(1.0) + euler) < 1e-13);
  CHECK(std::abs(trigamma(1.0) - pi * pi / 6) < 1e-13);
  CHECK(std::abs(psi2(1.0) + 2 * boost::math::zeta(3.0)) < 1e-12);
  CHECK(std::abs(log_gamma(1.0)) < 1e-15);
  CHECK(std::abs(log_gamma(cplx(1.0, 0.0))) < 1e-14);
  CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(pi)) < 1e-14);
}

TEST_CASE("frozen high-precision references") {
  // mpmath at 30 digits, see tests/oracles/specfun_oracle.py
  CHECK(digamma(10.3) == doctest::Approx(2.28281544643912259308712215627).epsilon(1e-14));
  CHECK(trigamma(10.3) == doctest::Approx(0.101952596170991910007490650965).epsilon(1e-13));
  CHECK(psi2(10.3) == doctest::Approx(-0.0103853868163000343757687092697).epsilon(1e-12));
  CHECK(psi2(0.2) == doctest::Approx(-251.478036114435933059198090037).epsilon(1e-12));

  const ScalingConstants sc = scaling_constants(1.0);
  CHECK(sc.theta == doctest::Approx(1.42625512021507899036898830053).epsilon(1e-12));
  CHECK(sc.f == doctest::Approx(1.46105432642945453746159818687).epsilon(1e-12));
  CHECK(sc.c == doctest::Approx(0.778312481505722744114638515487).epsilon(1e-12));

  struct Ref {
    cplx z, lg;
  };
  const Ref refs[] = {
      {{2.5, 1.0}, {0.0481086296235550212195940732586, 0.740143596999088944699451412069}},
      {{-3.7, 0.2}, {-1.63643309256245641722831000796, -12.6632826796357719694169508659}},
      {{0.1, -7.0}, {-10.8548770444209025172371087711, -5.98757015330144030731665344233}},
      {{30.0, 40.0}, {49.2328084940702988186647282361, 143.834795822664824615401197805}},
      {{-20.5, 3.0}, {-51.2253036766033973194735079977, -56.829458531801580889496659433}},
      {{1e-3, 1e-3}, {6.56060447383755261873645985533, -0.785973734929653434847941926998}},
  };
  for (const auto& r : refs) {
    CAPTURE(r.z);
    CHECK(close(log_gamma(r.z), r.lg, 1e-12));
  }
}

TEST_CASE("polygammas agree with boost on a sweep") {
  for (double x = 0.05; x < 60.0; x *= 1.37) {
    CAPTURE(x);
    CHECK(digamma(x) == doctest::Approx(boost::math::digamma(x)).epsilon(1e-12));
    CHECK(trigamma(x) == doctest::Approx(boost::math::trigamma(x)).epsilon(1e-12));
    CHECK(psi2(x) == doctest::Approx(boost::math::polygamma(2, x)).epsilon(1e-11));
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("recurrence and reflection at random points") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> re(-25.0, 25.0), im(-25.0, 25.0);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const cplx z(re(gen), im(gen));
    if (std::abs(z.imag()) < 1e-3) continue;
    // ln Gamma(z+1) = ln Gamma(z) + ln z
    CHECK(close_mod_2pi(log_gamma(z + 1.0), log_gamma(z) + std::log(z), 1e-10));
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    CHECK(close_mod_2pi(log_gamma(z) + log_gamma(1.0 - z), std::log(pi / std::sin(pi * z)), 1e-10));
    // conjugate symmetry holds exactly on the principal branch
    CHECK(close(log_gamma(std::conj(z)), std::conj(log_gamma(z)), 1e-12));
    ++checked;
  }
  CHECK(checked > 990);

  std::uniform_real_distribution<double> xs(0.01, 40.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = xs(gen);
    CHECK(std::abs(digamma(x + 1) - digamma(x) - 1 / x) <= 1e-10 * std::max(1.0, 1 / x));
    CHECK(std::abs(trigamma(x) - trigamma(x + 1) - 1 / (x * x)) <= 1e-10 * std::max(1.0, 1 / (x * x)));
    CHECK(std::abs(psi2(x + 1) - psi2(x) - 2 / (x * x * x)) <= 1e-10 * std::max(1.0, 2 / (x * x * x)));
  }
}

TEST_CASE("principal branch far into the left half plane") {
  // ln Gamma(z) = ln Gamma(z + k) - sum_j ln(z + j) with principal logs, no 2 pi i slack
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> re(-300.0, 0.0), im(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const cplx z(re(gen), im(gen));
    const int k = static_cast<int>(std::ceil(-z.real())) + 1;
    cplx ref = log_gamma(z + double(k));
    for (int j = 0; j < k; ++j) ref -= std::log(z + double(j));
    CAPTURE(z);
    CHECK(std::abs(log_gamma(z) - ref) <= 1e-12 * std::abs(ref));
  }
}

TEST_CASE("principal branch is continuous off the negative axis") {
  // walk around the origin at radius 5 from arg -3 to 3 and watch for jumps
  cplx prev = log_gamma(std::polar(5.0, -3.0));
  for (double t = -3.0 + 1e-3; t <= 3.0; t += 1e-3) {
    const cplx cur = log_gamma(std::polar(5.0, t));
    REQUIRE(std::abs(cur - prev) < 0.05);
    prev = cur;
  }
}

TEST_CASE("poles and domain errors") {
  CHECK_THROWS_AS(log_gamma(cplx(0.0, 0.0)), DomainError);
  CHECK_THROWS_AS(log_gamma(cplx(-3.0, 0.0)), DomainError);
  CHECK_THROWS_AS(digamma(0.0), DomainError);
  CHECK_THROWS_AS(trigamma(-2.5), DomainError);
  CHECK_THROWS_AS(psi2(-0.1), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(1, 1.0), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(2, 0.0), DomainError);
  CHECK_THROWS_AS(theta_of_kappa(0.0), DomainError);
  CHECK_THROWS_AS(theta_of_kappa(-1.0), DomainError);
  CHECK_THROWS_AS(log_gamma_cubic_tail(0.0, 0.1), DomainError);
}

TEST_CASE("hurwitz zeta") {
  for (int s : {2, 3, 5}) {
    for (double a : {0.1, 1.0, 3.7, 25.0}) {
      CAPTURE(s);
      CAPTURE(a);
      CHECK(hurwitz_zeta(s, a) == doctest::Approx(boost::math::polygamma(s - 1, a) * ((s % 2) ? -1 : 1) /
                                                  std::tgamma(double(s)))
                                      .epsilon(1e-12));
    }
  }
}

TEST_CASE("cubic tail of log gamma") {
  for (double a : {0.7, 1.42625512, 4.0}) {
    for (cplx x : {cplx(1e-4, 0), cplx(0.01, 0.02), cplx(-0.2, 0.1), cplx(0.3, -0.3), cplx(2.0, 1.0)}) {
      CAPTURE(a);
      CAPTURE(x);
      const cplx direct = log_gamma(a + x) - log_gamma(cplx(a, 0.0)) - digamma(a) * x - 0.5 * trigamma(a) * x * x;
      const cplx tail = log_gamma_cubic_tail(a, x);
      // the tail is O(x^3); relative accuracy only makes sense against the leading term
      const double lead = std::abs(psi2(a) * x * x * x / 6.0);
      CHECK(std::abs(tail - direct) <= 1e-12 + 1e-9 * lead);
      if (std::abs(x) < 0.05) CHECK(std::abs(tail / (psi2(a) * x * x * x / 6.0) - 1.0) < 0.5);
    }
  }
}

TEST_CASE("theta of kappa inverts trigamma") {
  for (double kappa : {1e-3, 0.1, 1.0, 5.0, 100.0}) {
    const double th = theta_of_kappa(kappa);
    CAPTURE(kappa);
    CHECK(trigamma(th) == doctest::Approx(kappa).epsilon(1e-12));
    const ScalingConstants sc = scaling_constants(kappa);
    CHECK(sc.f == doctest::Approx(th * kappa - digamma(th)).epsilon(1e-14));
    CHECK(sc.c > 0.0);
  }
}
