#include "bpkpz/contours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bpkpz/error.hpp"
#include "bpkpz/quadrature.hpp"

namespace bpkpz {

namespace {

using Kind = PathPiece::Kind;
constexpr double kInf = std::numeric_limits<double>::infinity();

double dist_point_segment(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::real((p - a) * std::conj(ab)) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

double cross2(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
  const double d1 = cross2(d - c, a - c);
  const double d2 = cross2(d - c, b - c);
  const double d3 = cross2(b - a, c - a);
  const double d4 = cross2(b - a, d - a);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

double dist_segment_segment(cplx a, cplx b, cplx c, cplx d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({dist_point_segment(a, c, d), dist_point_segment(b, c, d),
                   dist_point_segment(c, a, b), dist_point_segment(d, a, b)});
}

// Parameter t >= 0 at which |a + t u| = radius (u unit). Negative if the ray
// starts outside the disc.
double ray_exit(cplx a, cplx u, double radius) {
  const double p = std::real(std::conj(u) * a);
  const double disc = p * p - std::norm(a) + radius * radius;
  if (disc < 0.0) return -1.0;
  return -p + std::sqrt(disc);
}

// Finite straight pieces of a path with rays cut at `radius`, in traversal order.
std::vector<std::pair<cplx, cplx>> finite_pieces(const ComplexPath& path, double radius) {
  std::vector<std::pair<cplx, cplx>> out;
  for (const auto& pc : path.pieces) {
    switch (pc.kind) {
      case Kind::Segment:
        out.emplace_back(pc.a, pc.b);
        break;
      case Kind::RayIn: {
        const double t = std::max(ray_exit(pc.a, pc.b, radius), 0.0);
        out.emplace_back(pc.a + t * pc.b, pc.a);
        break;
      }
      case Kind::RayOut: {
        const double t = std::max(ray_exit(pc.a, pc.b, radius), 0.0);
        out.emplace_back(pc.a, pc.a + t * pc.b);
        break;
      }
    }
  }
  return out;
}

double dist_segment_points(cplx a, cplx b, const std::vector<cplx>& pts) {
  double best = kInf;
  for (cplx s : pts) best = std::min(best, dist_point_segment(s, a, b));
  return best;
}

void append_panel(QuadratureRule& rule, const GaussLegendre& gl, cplx a, cplx b) {
  const cplx mid = 0.5 * (a + b);
  const cplx half = 0.5 * (b - a);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    rule.nodes.push_back(mid + half * gl.nodes[i]);
    rule.weights.push_back(half * gl.weights[i]);
  }
}

// Splits [a,b] until every panel is short relative to its distance from the
// singular set. Panels are appended in traversal order.
void graded_panels(QuadratureRule& rule, const GaussLegendre& gl, cplx a, cplx b,
                   const std::vector<cplx>& sing, double grading, int depth) {
  const double len = std::abs(b - a);
  if (len == 0.0) return;
  if (depth < 40 && !sing.empty() && len > grading * dist_segment_points(a, b, sing)) {
    const cplx m = 0.5 * (a + b);
    graded_panels(rule, gl, a, m, sing, grading, depth + 1);
    graded_panels(rule, gl, m, b, sing, grading, depth + 1);
    return;
  }
  append_panel(rule, gl, a, b);
}

void split_uniform(QuadratureRule& rule, const GaussLegendre& gl, cplx a, cplx b,
                   const DiscretizeOptions& o, const std::vector<cplx>& sing) {
  const double len = std::abs(b - a);
  if (len == 0.0) return;
  const int k = std::max(1, static_cast<int>(std::ceil(len / o.max_panel - 1e-12)));
  for (int j = 0; j < k; ++j) {
    const cplx p = a + (b - a) * (static_cast<double>(j) / k);
    const cplx q = a + (b - a) * (static_cast<double>(j + 1) / k);
    graded_panels(rule, gl, p, q, sing, o.grading, 0);
  }
}

// Ray breakpoints measured from the finite endpoint: geometric growth capped at
// max_panel, last one clipped to the cut.
std::vector<double> ray_breaks(double length, const DiscretizeOptions& o) {
  std::vector<double> t{0.0};
  double h = std::min(o.first_ray_panel, o.max_panel);
  while (t.back() < length) {
    t.push_back(std::min(length, t.back() + h));
    h = std::min(h * o.ray_growth, o.max_panel);
  }
  // avoid a sliver at the end
  if (t.size() > 2 && t[t.size() - 1] - t[t.size() - 2] < 0.25 * h) t.erase(t.end() - 2);
  return t;
}

cplx unit(double angle) { return std::polar(1.0, angle); }

double max_of(std::span<const double> v) {
  return v.empty() ? -kInf : *std::max_element(v.begin(), v.end());
}
double min_of(std::span<const double> v) {
  return v.empty() ? kInf : *std::min_element(v.begin(), v.end());
}

void check_separated(std::span<const double> b, std::span<const double> beta) {
  if (!b.empty() && !beta.empty() && !(max_of(b) < min_of(beta))) {
    throw ConstraintError("spike vectors must satisfy max(b) < min(beta)");
  }
}

std::vector<cplx> as_points(std::span<const double> b, std::span<const double> beta) {
  std::vector<cplx> pts;
  for (double x : b) pts.emplace_back(x, 0.0);
  for (double x : beta) pts.emplace_back(x, 0.0);
  return pts;
}

// Upward path along Re = p; when x != p it leaves the line at p -/+ ih and
// passes through the real point x.
ComplexPath upward_path(double p, double x, double h) {
  ComplexPath path;
  if (x == p) {
    path.pieces.push_back({Kind::RayIn, cplx(p, 0.0), cplx(0.0, -1.0)});
    path.pieces.push_back({Kind::RayOut, cplx(p, 0.0), cplx(0.0, 1.0)});
  } else {
    path.pieces.push_back({Kind::RayIn, cplx(p, -h), cplx(0.0, -1.0)});
    path.pieces.push_back({Kind::Segment, cplx(p, -h), cplx(x, 0.0)});
    path.pieces.push_back({Kind::Segment, cplx(x, 0.0), cplx(p, h)});
    path.pieces.push_back({Kind::RayOut, cplx(p, h), cplx(0.0, 1.0)});
  }
  path.crossing = x;
  return path;
}

// Clear when x sits inside (lo, hi) with a margin.
bool clear_of(double x, double lo, double hi, double margin) {
  return x - lo >= margin && hi - x >= margin;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<cplx> ComplexPath::vertices() const {
  std::vector<cplx> v;
  for (const auto& pc : pieces) {
    if (pc.kind == Kind::RayIn) {
      v.push_back(pc.a);
    } else {
      if (v.empty() || v.back() != pc.a) v.push_back(pc.a);
      if (pc.kind == Kind::Segment) v.push_back(pc.b);
    }
  }
  return v;
}

bool ComplexPath::connected(double tol) const {
  if (pieces.empty()) return false;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& pc = pieces[i];
    if (pc.kind == Kind::RayIn && i != 0) return false;
    if (pc.kind == Kind::RayOut && i + 1 != pieces.size()) return false;
    if (i == 0) continue;
    const auto& prev = pieces[i - 1];
    const cplx end = prev.kind == Kind::Segment ? prev.b : prev.a;
    if (std::abs(end - pc.a) > tol) return false;
  }
  return true;
}

ComplexPath ComplexPath::shifted(cplx shift) const {
  ComplexPath out = *this;
  for (auto& pc : out.pieces) {
    pc.a += shift;
    if (pc.kind == Kind::Segment) pc.b += shift;
  }
  for (auto& s : out.singularities) s += shift;
  if (out.crossing && shift.imag() == 0.0) {
    *out.crossing += shift.real();
  } else {
    out.crossing.reset();
  }
  return out;
}

QuadratureRule discretize(const ComplexPath& path, const DiscretizeOptions& o) {
  if (o.order < 4) throw std::invalid_argument("discretize: order must be >= 4");
  if (!(o.truncation_radius > 0.0)) throw std::invalid_argument("discretize: radius must be positive");
  const GaussLegendre& gl = gauss_legendre(o.order);
  std::vector<cplx> sing = path.singularities;
  sing.insert(sing.end(), o.extra_singularities.begin(), o.extra_singularities.end());

  QuadratureRule rule;
  rule.truncation_radius = o.truncation_radius;
  for (const auto& pc : path.pieces) {
    if (pc.kind == Kind::Segment) {
      split_uniform(rule, gl, pc.a, pc.b, o, sing);
      continue;
    }
    const double len = ray_exit(pc.a, pc.b, o.truncation_radius);
    if (len <= 0.0) {
      throw std::invalid_argument("discretize: truncation radius inside a finite vertex");
    }
    const std::vector<double> t = ray_breaks(len, o);
    if (pc.kind == Kind::RayOut) {
      for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        graded_panels(rule, gl, pc.a + t[j] * pc.b, pc.a + t[j + 1] * pc.b, sing, o.grading, 0);
      }
    } else {
      for (std::size_t j = t.size() - 1; j > 0; --j) {
        graded_panels(rule, gl, pc.a + t[j] * pc.b, pc.a + t[j - 1] * pc.b, sing, o.grading, 0);
      }
    }
  }
  return rule;
}

QuadratureRule discretize(const ComplexPath& path, int order, double truncation_radius) {
  DiscretizeOptions o;
  o.order = order;
  o.truncation_radius = truncation_radius;
  return discretize(path, o);
}

double min_distance(const ComplexPath& p, const ComplexPath& q, double radius) {
  const auto a = finite_pieces(p, radius);
  const auto b = finite_pieces(q, radius);
  double best = kInf;
  for (const auto& [s0, s1] : a)
    for (const auto& [t0, t1] : b) best = std::min(best, dist_segment_segment(s0, s1, t0, t1));
  return best;
}

double distance_to_path(cplx z, const ComplexPath& p, double radius) {
  double best = kInf;
  for (const auto& [s0, s1] : finite_pieces(p, radius))
    best = std::min(best, dist_point_segment(z, s0, s1));
  return best;
}

// ---------------------------------------------------------------------------

WedgeContour build_cv(std::span<const double> a, std::span<const double> alpha, double varphi,
                      double fallback_offset) {
  if (a.empty()) throw std::invalid_argument("build_cv: drift vector must be non-empty");
  if (!(varphi > 0.0 && varphi < std::numbers::pi / 4)) {
    throw std::invalid_argument("build_cv: varphi must lie in (0, pi/4)");
  }
  const double amax = max_of(a);
  if (!alpha.empty() && !(min_of(alpha) > amax)) {
    throw ConstraintError("build_cv: need alpha_k - a_l > 0 for all k, l");
  }
  const double amin = alpha.empty() ? amax + 2.0 * fallback_offset : min_of(alpha);

  WedgeContour cv;
  cv.mu = 0.5 * amax + 0.5 * amin;
  cv.eta = 0.25 * amax + 0.75 * amin;
  cv.varphi = varphi;
  const cplx apex(cv.mu, 0.0);
  cv.path.pieces.push_back({Kind::RayIn, apex, unit(std::numbers::pi + varphi)});
  cv.path.pieces.push_back({Kind::RayOut, apex, unit(std::numbers::pi - varphi)});
  cv.path.crossing = cv.mu;
  for (double x : a) cv.path.singularities.emplace_back(x, 0.0);
  return cv;
}

double default_cs_height(double varphi) { return 0.25 * std::tan(varphi); }

ComplexPath build_cs(cplx v, const WedgeContour& cv, double d, double min_clearance) {
  if (!(d > 0.0)) throw std::invalid_argument("build_cs: d must be positive");
  const double R = -v.real() + cv.eta;
  ComplexPath cs;
  const cplx lo_r(R, -d), lo_h(0.5, -d), hi_h(0.5, d), hi_r(R, d);
  cs.pieces.push_back({Kind::RayIn, lo_r, cplx(0.0, -1.0)});
  if (R != 0.5) cs.pieces.push_back({Kind::Segment, lo_r, lo_h});
  cs.pieces.push_back({Kind::Segment, lo_h, hi_h});
  if (R != 0.5) cs.pieces.push_back({Kind::Segment, hi_h, hi_r});
  cs.pieces.push_back({Kind::RayOut, hi_r, cplx(0.0, 1.0)});
  cs.crossing = 0.5;

  const double gap = min_distance(cs.shifted(v), cv.path, 1e3);
  if (!(gap > min_clearance)) {
    throw GeometryError("build_cs: v + C_s(v) meets the wedge; reduce d");
  }
  return cs;
}

TwoSidedContours build_two_sided_contours(std::span<const double> b, std::span<const double> beta,
                                          double c, double max_crossing_gap) {
  if (!(c > 0.0)) throw std::invalid_argument("contours: c must be positive");
  check_separated(b, beta);
  double L = max_of(b);
  double U = min_of(beta);

  TwoSidedContours out;
  const double margin = 0.25;
  if (clear_of(-c, L, U, margin) && clear_of(c, L, U, margin) && 2.0 * c <= max_crossing_gap) {
    out.lower = upward_path(-c, -c, 0.0);
    out.upper = upward_path(c, c, 0.0);
  } else {
    if (std::isinf(L) && std::isinf(U)) {
      L = -c - 1.0;
      U = c + 1.0;
    } else if (std::isinf(L)) {
      L = U - 2.0;
    } else if (std::isinf(U)) {
      U = L + 2.0;
    }
    const double gap = U - L;
    double xw = L + 0.25 * gap;
    double xz = L + 0.75 * gap;
    if (xz - xw > max_crossing_gap) {
      const double mid = 0.5 * (L + U);
      xw = mid - 0.5 * max_crossing_gap;
      xz = mid + 0.5 * max_crossing_gap;
    }
    // A shared height keeps the chevrons disjoint: at every height the z-path
    // lies strictly to the right of the w-path.
    const double h = std::max({1.0, std::abs(-c - xw), std::abs(c - xz)});
    out.lower = upward_path(-c, xw, h);
    out.upper = upward_path(c, xz, h);
  }
  out.lower.singularities = as_points(b, beta);
  out.upper.singularities = out.lower.singularities;
  return out;
}

TwoSidedContours build_bp_contours(std::span<const double> b, std::span<const double> beta,
                                   double c) {
  return build_two_sided_contours(b, beta, c, kInf);
}

RescaledContours build_rescaled_contours(std::span<const double> b, std::span<const double> beta) {
  check_separated(b, beta);
  const double L = max_of(b);
  const double U = min_of(beta);
  double xw = 0.0;
  if (!(L < 0.0 && 0.0 < U)) {
    if (std::isinf(U)) {
      xw = L + 1.0;
    } else if (std::isinf(L)) {
      xw = U - 1.0;
    } else {
      xw = 0.5 * (L + U);
    }
  }

  RescaledContours out;
  const cplx apex(xw, 0.0);
  out.cw.pieces.push_back({Kind::RayIn, apex, cplx(-1.0, -1.0) / std::sqrt(2.0)});
  out.cw.pieces.push_back({Kind::RayOut, apex, cplx(-1.0, 1.0) / std::sqrt(2.0)});
  out.cw.crossing = xw;

  double xz = 1.0;
  if (!(xz > xw && xz < U && U - xz >= 0.25 * std::min(U - xw, 1.0) && xz - xw >= 0.5)) {
    xz = std::isinf(U) ? xw + 1.0 : 0.5 * (xw + U);
  }
  if (xz == 1.0) {
    out.cz = upward_path(1.0, 1.0, 0.0);
  } else {
    // Chevron heights must clear the wedge, whose half-width at height y is xw - |y|.
    const double h = std::max({1.0, std::abs(1.0 - xz), xw - 1.0 + 1.0});
    out.cz = upward_path(1.0, xz, h);
  }
  out.cw.singularities = as_points(b, beta);
  out.cz.singularities = out.cw.singularities;
  return out;
}

}  // namespace bpkpz
