#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <bpkpz/contours.hpp>
#include <bpkpz/error.hpp>
#include <numbers>

using namespace bpkpz;
using Kind = PathPiece::Kind;

namespace {

const cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);

template <class F>
cplx integrate(const QuadratureRule& q, F&& f) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * f(q.nodes[k]);
  return s;
}

}  // namespace

TEST_CASE("segment rule integrates polynomials") {
  ComplexPath p;
  p.pieces.push_back({Kind::Segment, cplx(-1.0, 0.5), cplx(2.0, -1.0)});
  p.pieces.push_back({Kind::Segment, cplx(2.0, -1.0), cplx(3.0, 2.0)});
  REQUIRE(p.connected());
  const QuadratureRule q = discretize(p, 8, 10.0);
  const cplx a(-1.0, 0.5), b(3.0, 2.0);
  CHECK(std::abs(integrate(q, [](cplx) { return cplx(1.0); }) - (b - a)) < 1e-14);
  const cplx exact = (std::pow(b, 4) - std::pow(a, 4)) / 4.0;
  CHECK(std::abs(integrate(q, [](cplx z) { return z * z * z; }) - exact) < 1e-12);
}

TEST_CASE("closed loop gives the residue") {
  // square around the origin, counter-clockwise
  ComplexPath p;
  const cplx c[] = {{1, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  for (int i = 0; i < 4; ++i) p.pieces.push_back({Kind::Segment, c[i], c[i + 1]});
  const QuadratureRule q = discretize(p, 16, 10.0);
  CHECK(std::abs(integrate(q, [](cplx z) { return std::exp(z) / z; }) / kTwoPiI - 1.0) < 1e-12);
  CHECK(std::abs(integrate(q, [](cplx z) { return std::exp(z); })) < 1e-12);
}

TEST_CASE("Airy integrals on the rescaled contours") {
  const RescaledContours rc = build_rescaled_contours({}, {});
  REQUIRE(rc.cw.connected());
  REQUIRE(rc.cz.connected());
  DiscretizeOptions o;
  o.truncation_radius = 12.0;
  const QuadratureRule qw = discretize(rc.cw, o);
  const QuadratureRule qz = discretize(rc.cz, o);
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    CAPTURE(x);
    const double ai = boost::math::airy_ai(x);
    const cplx iz = integrate(qz, [x](cplx z) { return std::exp(z * z * z / 3.0 - x * z); }) / kTwoPiI;
    const cplx iw = integrate(qw, [x](cplx w) { return std::exp(-w * w * w / 3.0 + x * w); }) / kTwoPiI;
    CHECK(std::abs(iz - ai) < 1e-12);
    CHECK(std::abs(iw - ai) < 1e-12);
  }
}

TEST_CASE("wedge contour geometry") {
  const std::vector<double> a{0.0, 0.3, -0.2};
  const std::vector<double> alpha{1.5, 2.0};
  const WedgeContour cv = build_cv(a, alpha, std::numbers::pi / 8);
  CHECK(cv.mu == doctest::Approx(0.9));
  CHECK(cv.eta == doctest::Approx(0.25 * 0.3 + 0.75 * 1.5));
  CHECK(cv.mu > 0.3);
  CHECK(cv.mu < 1.5);
  REQUIRE(cv.path.connected());
  // the wedge opens to the left, so the drifts a stay inside it, alpha outside
  for (const auto& pc : cv.path.pieces) CHECK(pc.b.real() < 0.0);

  CHECK_THROWS_AS(build_cv(a, std::vector<double>{0.2}, 0.3), ConstraintError);
  CHECK_THROWS_AS(build_cv(a, alpha, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_cv({}, alpha, 0.3), std::invalid_argument);

  const WedgeContour bare = build_cv(a, {}, 0.3);
  CHECK(bare.mu == doctest::Approx(0.3 + 0.5));
}

TEST_CASE("inner s-contours clear the wedge") {
  const std::vector<double> a(9, 0.0);
  const std::vector<double> alpha{1.5};
  const WedgeContour cv = build_cv(a, alpha, std::numbers::pi / 8);
  const double d = default_cs_height(cv.varphi);
  for (double t : {0.0, 0.3, 2.0, 10.0}) {
    for (int side : {-1, 1}) {
      const cplx v = cv.mu + t * std::polar(1.0, std::numbers::pi + side * cv.varphi);
      const ComplexPath cs = build_cs(v, cv, d);
      REQUIRE(cs.connected());
      CHECK(*cs.crossing == 0.5);
      CHECK(min_distance(cs.shifted(v), cv.path) > 1e-6);
      // the crossing stays strictly between the sine poles at 0 and 1
      CHECK(distance_to_path(0.0, cs) > 0.0);
      CHECK(distance_to_path(1.0, cs) > 0.0);
    }
  }
  // the horizontal legs reach the ray once d > tan(varphi) / 2
  const cplx far = cv.mu + 10.0 * std::polar(1.0, std::numbers::pi - cv.varphi);
  CHECK_NOTHROW(build_cs(far, cv, 0.45 * std::tan(cv.varphi)));
  CHECK_THROWS_AS(build_cs(far, cv, 0.55 * std::tan(cv.varphi)), GeometryError);
  CHECK_THROWS_AS(build_cs(cplx(cv.mu), cv, 0.0), std::invalid_argument);
}

TEST_CASE("two-sided contours separate the spikes") {
  struct Case {
    std::vector<double> b, beta;
  };
  const Case cases[] = {{{}, {}}, {{-1.0}, {1.0}}, {{-0.2}, {0.3}}, {{0.5, 2.0}, {}}, {{}, {-3.0}},
                        {{-0.3, -0.1}, {0.2, 0.4}}};
  for (const auto& c : cases) {
    for (double gap : {0.25, 1.0, 1e9}) {
      const TwoSidedContours tc = build_two_sided_contours(c.b, c.beta, 1.0, gap);
      REQUIRE(tc.lower.connected());
      REQUIRE(tc.upper.connected());
      const double xw = *tc.lower.crossing, xz = *tc.upper.crossing;
      CHECK(xw < xz);
      CHECK(xz - xw <= gap + 1e-12);
      for (double b : c.b) CHECK(b < xw);
      for (double be : c.beta) CHECK(xz < be);
      CHECK(min_distance(tc.lower, tc.upper) > 0.0);
    }
  }
  CHECK_THROWS_AS(build_bp_contours(std::vector<double>{1.0}, std::vector<double>{0.5}), ConstraintError);
  CHECK_THROWS_AS(build_bp_contours({}, {}, 0.0), std::invalid_argument);
}

TEST_CASE("rescaled contours keep the z-line right of the wedge") {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
      {{}, {}}, {{-1.0}, {1.0}}, {{0.5}, {}}, {{2.0}, {3.0}}, {{}, {-1.0}}, {{-0.2}, {0.3}}};
  for (const auto& [b, beta] : cases) {
    const RescaledContours rc = build_rescaled_contours(b, beta);
    const double xw = *rc.cw.crossing, xz = *rc.cz.crossing;
    CHECK(xw < xz);
    for (double x : b) CHECK(x < xw);
    for (double x : beta) CHECK(xz < x);
    CHECK(min_distance(rc.cw, rc.cz) > 0.0);
  }
}

TEST_CASE("discretization bookkeeping") {
  const RescaledContours rc = build_rescaled_contours({}, {});
  DiscretizeOptions o;
  o.order = 10;
  o.truncation_radius = 8.0;
  const QuadratureRule q = discretize(rc.cw, o);
  CHECK(q.size() % 10 == 0);
  CHECK(q.truncation_radius == doctest::Approx(8.0));
  for (const cplx& z : q.nodes) CHECK(std::abs(z) <= 8.0 + 1e-12);
  o.order = 2;
  CHECK_THROWS_AS(discretize(rc.cw, o), std::invalid_argument);

  ComplexPath p = rc.cz;
  const ComplexPath s = p.shifted(cplx(0.5, 0.0));
  CHECK(*s.crossing == doctest::Approx(*p.crossing + 0.5));
  CHECK_FALSE(p.shifted(cplx(0.0, 1.0)).crossing.has_value());
}
