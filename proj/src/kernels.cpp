#include "bpkpz/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "bpkpz/error.hpp"
#include "bpkpz/parallel.hpp"

namespace bpkpz {

namespace {

constexpr double kPoleTol = 1e-8;
const cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);
constexpr double kPi = std::numbers::pi;

// Distinct values with multiplicities; the Laplace kernel takes products over
// drift vectors that are usually constant.
std::vector<std::pair<double, int>> grouped(std::span<const double> v) {
  std::map<double, int> m;
  for (double x : v) ++m[x];
  return {m.begin(), m.end()};
}

// Positive root of A t^2 - B t - C = 0.
double positive_root(double A, double B, double C) {
  return (B + std::sqrt(B * B + 4.0 * A * C)) / (2.0 * A);
}

void check_pole(cplx d, const char* what) {
  if (std::abs(d) < kPoleTol) throw PoleProximityError(what);
}

// 1/d for the Cauchy factors of the inner sums.
inline cplx checked_inverse(cplx d, const char* what) {
  const double n = d.real() * d.real() + d.imag() * d.imag();
  if (n < kPoleTol * kPoleTol) throw PoleProximityError(what);
  return cplx(d.real() / n, -d.imag() / n);
}

}  // namespace

cplx inv_sin(cplx z) {
  if (std::abs(z) < 1.0) return 1.0 / std::sin(z);
  const cplx I(0.0, 1.0);
  if (z.imag() > 0.0) {
    const cplx e = std::exp(I * z);
    return 2.0 * I * e / (e * e - 1.0);
  }
  const cplx e = std::exp(-I * z);
  return -2.0 * I * e / (e * e - 1.0);
}

// ---------------------------------------------------------------------------

void SpikeParams::validate() const {
  for (double x : b)
    if (!std::isfinite(x)) throw ConstraintError("spikes: b entries must be finite");
  for (double x : beta)
    if (!std::isfinite(x)) throw ConstraintError("spikes: beta entries must be finite");
  if (!b.empty() && !beta.empty() &&
      !(*std::max_element(b.begin(), b.end()) < *std::min_element(beta.begin(), beta.end()))) {
    throw ConstraintError("spikes: need max(b) < min(beta)");
  }
}

SpikeParams SpikeParams::shifted(double y) const {
  SpikeParams out = *this;
  for (double& x : out.b) x += y;
  for (double& x : out.beta) x += y;
  return out;
}

void FiniteNParams::validate() const {
  if (N < 1) throw std::invalid_argument("finite-N params: N must be >= 1");
  if (static_cast<int>(a.size()) != N) throw std::invalid_argument("finite-N params: a must have length N");
  if (!(tau > 0.0)) throw std::invalid_argument("finite-N params: tau must be positive");
  if (!(u.real() > 0.0)) throw std::invalid_argument("finite-N params: Re(u) must be positive");
  for (double ak : alpha)
    for (double al : a)
      if (!(ak - al > 0.0)) throw ConstraintError("finite-N params: need alpha_k - a_l > 0");
}

double scaled_u(int N, double r, const ScalingConstants& sc) {
  return std::exp(-N * sc.f - r * sc.c * std::cbrt(double(N)));
}

FiniteNParams spiked_finite_params(int N, const ScalingConstants& sc, const SpikeParams& spikes,
                                   cplx u) {
  spikes.validate();
  if (static_cast<int>(spikes.b.size()) > N) {
    throw std::invalid_argument("spiked params: more drift spikes than levels");
  }
  const double s = 1.0 / (sc.c * std::cbrt(double(N)));
  FiniteNParams p;
  p.N = N;
  p.tau = sc.kappa * N;
  p.a.assign(N, 0.0);
  for (std::size_t l = 0; l < spikes.b.size(); ++l) p.a[l] = sc.theta + spikes.b[l] * s;
  for (double bk : spikes.beta) p.alpha.push_back(sc.theta + bk * s);
  p.u = u;
  return p;
}

CdrpParams CdrpParams::from_laplace(double T, double X, cplx S, const SpikeParams& raw) {
  if (!(T > 0.0)) throw std::invalid_argument("cdrp params: T must be positive");
  if (!(S.real() > 0.0)) throw std::invalid_argument("cdrp params: Re(S) must be positive");
  raw.validate();
  CdrpParams p;
  p.sigma = std::cbrt(2.0 / T);
  p.r = -p.sigma * std::log(S);
  p.spikes = raw.shifted(X / T);
  for (double& x : p.spikes.b) x /= p.sigma;
  for (double& x : p.spikes.beta) x /= p.sigma;
  return p;
}

CdrpParams CdrpParams::from_shift(double sigma, cplx r, const SpikeParams& spikes) {
  if (!(sigma > 0.0)) throw std::invalid_argument("cdrp params: sigma must be positive");
  spikes.validate();
  return {sigma, r, spikes};
}

// ---------------------------------------------------------------------------
// Laplace kernel

namespace {

struct KuTerms {
  std::vector<std::pair<double, int>> a;
  std::vector<std::pair<double, int>> alpha;
  double tau;
  cplx log_u;
};

KuTerms ku_terms(const FiniteNParams& p) {
  return {grouped(p.a), grouped(p.alpha), p.tau, std::log(p.u)};
}

// The gamma factors that depend on v only.
cplx ku_row_constant(const KuTerms& t, cplx v) {
  cplx lg = 0.0;
  for (auto [al, mult] : t.a) lg += double(mult) * log_gamma(v - al);
  for (auto [ak, mult] : t.alpha) lg -= double(mult) * log_gamma(ak - v);
  return lg;
}

// Everything in the integrand except 1/(v+s-v').
cplx ku_integrand(const KuTerms& t, cplx v, cplx s, cplx row_constant) {
  cplx lg = row_constant + s * t.log_u + t.tau * (v * s + 0.5 * s * s);
  for (auto [al, mult] : t.a) lg -= double(mult) * log_gamma(s + v - al);
  for (auto [ak, mult] : t.alpha) lg += double(mult) * log_gamma(ak - v - s);
  // Gamma(-s) Gamma(1+s) = -pi / sin(pi s)
  return -kPi * inv_sin(kPi * s) * std::exp(lg);
}

}  // namespace

cplx eval_Ku(cplx v, cplx v2, const FiniteNParams& p, const ComplexPath&, const QuadratureRule& quad) {
  p.validate();
  const KuTerms t = ku_terms(p);
  const cplx c = ku_row_constant(t, v);
  cplx sum = 0.0;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    const cplx s = quad.nodes[k];
    if (std::abs(s - std::round(s.real())) < kPoleTol) throw PoleProximityError("K_u: node on a sine pole");
    const cplx den = v + s - v2;
    sum += quad.weights[k] * ku_integrand(t, v, s, c) * checked_inverse(den, "K_u: node on the pole s = v' - v");
  }
  return sum / kTwoPiI;
}

KuKernel::KuKernel(FiniteNParams p, double varphi, InnerQuadrature q)
    : p_(std::move(p)), q_(q) {
  p_.validate();
  cv_ = build_cv(p_.a, p_.alpha, varphi);
  log_u_ = std::log(p_.u);
}

double KuKernel::wedge_radius() const {
  const double phi = cv_.varphi;
  const double cot = 1.0 / std::tan(phi);
  const double A = 0.5 * p_.tau * (cot * cot - 1.0);
  const double B = p_.tau * std::abs(cv_.eta) * cot + 0.5 * kPi * (p_.N + p_.n()) +
                   std::abs(log_u_.imag()) + std::max(0.0, log_u_.real()) * cot;
  const double cap = std::min(positive_root(A, B, q_.cut_log + 10.0) / std::sin(phi), 60.0);

  // Walk out along both rays until the diagonal has decayed by e^{-cut_log}.
  const double floor_ratio = std::exp(-q_.cut_log);
  double reach = 0.0;
  for (int side = -1; side <= 1; side += 2) {
    const cplx dir = std::polar(1.0, kPi + side * phi);
    double peak = 0.0;
    double t = 0.25;
    for (; t < cap; t += 0.5) {
      const cplx v = cv_.mu + t * dir;
      const double mag = std::abs((*this)(v, v));
      peak = std::max(peak, mag);
      if (t > 1.0 && mag < floor_ratio * peak) break;
    }
    reach = std::max(reach, t + 0.5);
  }
  return std::abs(cv_.mu) + std::min(reach, cap) + 0.5;
}

ComplexPath KuKernel::inner_contour(cplx v, double d) const { return build_cs(v, cv_, d); }

QuadratureRule KuKernel::inner_rule(cplx v, const ComplexPath& cs) const {
  const double R = -v.real() + cv_.eta;
  const double P = 0.5 * kPi * (p_.N + p_.n()) + std::abs(log_u_.imag()) + kPi;
  const double Y = positive_root(0.5 * p_.tau, P, q_.cut_log + P * std::abs(v.imag()));

  DiscretizeOptions o;
  o.order = q_.order;
  o.max_panel = q_.max_panel;
  o.truncation_radius = std::hypot(std::abs(R) + 1.0, std::abs(v.imag()) + Y) + 1.0;

  // Integer poles near the bump, boundary poles, and the shifted wedge that
  // carries the 1/(v+s-v') singularities.
  const double lo = std::floor(std::min(0.5, R)) - 1.0;
  const double hi = std::ceil(std::max(0.5, R)) + 1.0;
  for (double k = lo; k <= hi; k += 1.0) o.extra_singularities.emplace_back(k, 0.0);
  for (double ak : p_.alpha)
    for (int j = 0; j < 3; ++j) o.extra_singularities.push_back(ak - v + double(j));
  const double phi = cv_.varphi;
  const cplx apex(cv_.mu, 0.0);
  for (int side = -1; side <= 1; side += 2) {
    const cplx dir = std::polar(1.0, kPi + side * phi);
    for (double t = 0.0; t < 8.0; t += 0.05) {
      const cplx s = apex + t * dir - v;
      if (std::abs(s.imag()) < 2.0 && s.real() < std::max(R, 0.5) + 2.0 && s.real() > -1.0)
        o.extra_singularities.push_back(s);
    }
  }
  return discretize(cs, o);
}

cplx KuKernel::integrand(cplx v, cplx s) const {
  const KuTerms t = ku_terms(p_);
  return ku_integrand(t, v, s, ku_row_constant(t, v));
}

void KuKernel::row(cplx v, std::span<const cplx> nodes, CMatrix& out, Eigen::Index i) const {
  const ComplexPath cs = inner_contour(v);
  const QuadratureRule rule = inner_rule(v, cs);
  const KuTerms t = ku_terms(p_);
  const cplx c = ku_row_constant(t, v);
  std::vector<cplx> g(rule.size());
  double gmax = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const cplx s = rule.nodes[k];
    if (std::abs(s - std::round(s.real())) < kPoleTol) throw PoleProximityError("K_u: node on a sine pole");
    g[k] = rule.weights[k] * ku_integrand(t, v, s, c) / kTwoPiI;
    gmax = std::max(gmax, std::norm(g[k]));
  }
  // The rays are cut generously; drop nodes that cannot affect the sum.
  std::vector<cplx> gs, ss;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    if (std::norm(g[k]) > 1e-36 * gmax) {
      gs.push_back(g[k]);
      ss.push_back(rule.nodes[k]);
    }
  }
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    cplx acc = 0.0;
    const cplx shift = v - nodes[j];
    for (std::size_t k = 0; k < ss.size(); ++k) {
      const cplx den = shift + ss[k];
      acc += gs[k] * checked_inverse(den, "K_u: node on the pole s = v' - v");
    }
    out(i, static_cast<Eigen::Index>(j)) = acc;
  }
}

cplx KuKernel::operator()(cplx v, cplx v2) const {
  CMatrix out(1, 1);
  const cplx nodes[1] = {v2};
  row(v, nodes, out, 0);
  return out(0, 0);
}

CMatrix KuKernel::assemble(std::span<const cplx> nodes, bool parallel) const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  CMatrix K(n, n);
  parallel_for(n, parallel, [&](std::int64_t i) { row(nodes[i], nodes, K, i); });
  return K;
}

CMatrix KuKernel::matrix(std::span<const cplx> nodes) const { return assemble(nodes, true); }
CMatrix KuKernel::matrix_serial(std::span<const cplx> nodes) const { return assemble(nodes, false); }

// ---------------------------------------------------------------------------
// Rescaled kernel

namespace {

double cubic_cut_radius(double cut, double extra) {
  // |Re z^3|/3 along Re z = 1 grows like t^2; keep a margin for the finite-N
  // corrections to the cubic.
  return std::clamp(1.5 * std::sqrt(cut + extra) + 2.0, 8.0, 16.0);
}

}  // namespace

KNKernel::KNKernel(int N, double r, const ScalingConstants& sc, SpikeParams spikes, InnerQuadrature q)
    : N_(N), r_(r), sc_(sc), spikes_(std::move(spikes)), q_(q), tail_(sc.theta) {
  if (N < 1) throw std::invalid_argument("K_N: N must be >= 1");
  spikes_.validate();
  if (static_cast<int>(spikes_.b.size()) > N) throw std::invalid_argument("K_N: more drift spikes than levels");
  rc_ = build_rescaled_contours(spikes_.b, spikes_.beta);
  sigma_ = 1.0 / (sc_.c * std::cbrt(double(N)));
  lin_res_ = digamma(sc_.theta) - sc_.kappa * sc_.theta + sc_.f;
  quad_res_ = trigamma(sc_.theta) - sc_.kappa;
  base_rule_ = rule_for(rc_.cz);
}

QuadratureRule KNKernel::rule_for(const ComplexPath& cz) const {
  DiscretizeOptions o;
  o.order = q_.order;
  o.max_panel = q_.max_panel;
  o.truncation_radius = cubic_cut_radius(q_.cut_log, std::abs(r_));
  for (const auto& pc : cz.pieces) {
    if (pc.kind != PathPiece::Kind::Segment) {
      o.truncation_radius = std::max(o.truncation_radius, std::abs(pc.a) + 2.0);
    }
  }
  for (double bk : spikes_.beta)
    for (int j = 1; j < 3; ++j) o.extra_singularities.emplace_back(bk + j / sigma_, 0.0);
  return discretize(cz, o);
}

cplx KNKernel::scaled_G(cplx z) const {
  const cplx x = sigma_ * z;
  return double(N_) * (lin_res_ * x + 0.5 * quad_res_ * x * x + tail_(x));
}

bool KNKernel::needs_notch(cplx w) const { return w.real() + 1.0 / sigma_ < 1.0 + 0.25; }

ComplexPath KNKernel::row_contour(cplx w) const {
  const double step = 1.0 / sigma_;
  if (!needs_notch(w)) return rc_.cz;

  const double dh = std::min(0.5, 0.25 * step);
  const double y0 = w.imag() - dh;
  const double y1 = w.imag() + dh;
  const double xl = w.real() + 0.5 * step;
  // Vertical extent of the finite part of C_z.
  double hmin = 0.0, hmax = 0.0;
  for (const auto& pc : rc_.cz.pieces) {
    hmin = std::min(hmin, pc.a.imag());
    hmax = std::max(hmax, pc.a.imag());
  }
  if (!(y0 > hmax + 0.1 || y1 < hmin - 0.1)) {
    throw GeometryError("K_N: sine pole next to the C_z detour; N too small for this w");
  }
  using Kind = PathPiece::Kind;
  const std::vector<cplx> base = rc_.cz.vertices();
  std::vector<cplx> verts;
  if (y0 > hmax) {
    verts = base;
    verts.insert(verts.end(), {cplx(1.0, y0), cplx(xl, y0), cplx(xl, y1), cplx(1.0, y1)});
  } else {
    verts = {cplx(1.0, y0), cplx(xl, y0), cplx(xl, y1), cplx(1.0, y1)};
    verts.insert(verts.end(), base.begin(), base.end());
  }
  ComplexPath out;
  out.pieces.push_back({Kind::RayIn, verts.front(), cplx(0.0, -1.0)});
  for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
    if (verts[k] != verts[k + 1]) out.pieces.push_back({Kind::Segment, verts[k], verts[k + 1]});
  }
  out.pieces.push_back({Kind::RayOut, verts.back(), cplx(0.0, 1.0)});
  out.crossing = rc_.cz.crossing;
  out.singularities = rc_.cz.singularities;
  // sine poles just left of the line, where the notch passes
  for (int k = 1; w.real() + k * step < 1.0; ++k) out.singularities.push_back(w + double(k) * step);
  return out;
}

cplx KNKernel::integrand(cplx w, cplx z) const {
  const double s = sigma_;
  const cplx arg = s * (z - w);
  const double k = std::round(arg.real());
  if (k != 0.0 && std::abs(arg - k) < kPoleTol) throw PoleProximityError("K_N: node on a sine pole");
  cplx lg = scaled_G(w) - scaled_G(z) + r_ * (w - z);
  for (double bl : spikes_.b) {
    lg += log_gamma(s * (w - bl)) - log_gamma(s * (z - bl)) + log_gamma(phi(z)) - log_gamma(phi(w));
  }
  for (double bk : spikes_.beta) lg += log_gamma(s * (bk - z)) - log_gamma(s * (bk - w));
  return -s / kTwoPiI * kPi * inv_sin(kPi * arg) * std::exp(lg);
}

CMatrix KNKernel::assemble(std::span<const cplx> nodes, bool parallel) const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  CMatrix K(n, n);
  parallel_for(n, parallel, [&](std::int64_t i) {
    const cplx w = nodes[i];
    const QuadratureRule own = needs_notch(w) ? rule_for(row_contour(w)) : QuadratureRule{};
    const QuadratureRule& rule = needs_notch(w) ? own : base_rule_;
    std::vector<cplx> g(rule.size());
    for (std::size_t k = 0; k < rule.size(); ++k) g[k] = rule.weights[k] * integrand(w, rule.nodes[k]);
    for (Eigen::Index j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < rule.size(); ++k) {
        const cplx den = rule.nodes[k] - nodes[j];
        acc += g[k] * checked_inverse(den, "K_N: node on the pole z = w'");
      }
      K(i, j) = acc;
    }
  });
  return K;
}

cplx KNKernel::operator()(cplx w, cplx w2) const {
  const cplx nodes[2] = {w, w2};
  // Row 0 of the 2x2 matrix for (w, w2).
  return assemble(nodes, false)(0, 1);
}

CMatrix KNKernel::matrix(std::span<const cplx> nodes) const { return assemble(nodes, true); }
CMatrix KNKernel::matrix_serial(std::span<const cplx> nodes) const { return assemble(nodes, false); }

cplx eval_KN(cplx w, cplx w2, double r, int N, const ScalingConstants& sc, const SpikeParams& spikes,
             const ComplexPath& cz) {
  KNKernel k(N, r, sc, spikes);
  const QuadratureRule rule = discretize(cz, 24, cubic_cut_radius(40.0, std::abs(r)));
  cplx acc = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const cplx den = rule.nodes[j] - w2;
    acc += rule.weights[j] * k.integrand(w, rule.nodes[j]) * checked_inverse(den, "K_N: node on the pole z = w'");
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Limit kernel on C_w

TildeKBPKernel::TildeKBPKernel(double r, SpikeParams spikes, InnerQuadrature q)
    : TildeKBPKernel(r, spikes, build_rescaled_contours(spikes.b, spikes.beta).cz, q) {}

TildeKBPKernel::TildeKBPKernel(double r, SpikeParams spikes, const ComplexPath& cz, InnerQuadrature q)
    : r_(r), spikes_(std::move(spikes)) {
  spikes_.validate();
  rc_ = build_rescaled_contours(spikes_.b, spikes_.beta);
  rc_.cz = cz;
  DiscretizeOptions o;
  o.order = q.order;
  o.max_panel = q.max_panel;
  o.truncation_radius = cubic_cut_radius(q.cut_log, std::abs(r));
  for (const auto& pc : cz.pieces)
    if (pc.kind != PathPiece::Kind::Segment)
      o.truncation_radius = std::max(o.truncation_radius, std::abs(pc.a) + 2.0);
  zr_ = discretize(cz, o);
  zfac_.resize(zr_.size());
  for (std::size_t j = 0; j < zr_.size(); ++j) {
    const cplx z = zr_.nodes[j];
    cplx f = zr_.weights[j] * std::exp(z * z * z / 3.0 - r * z) / kTwoPiI;
    for (double bl : spikes_.b) f *= (z - bl);
    for (double bk : spikes_.beta) f /= (z - bk);
    zfac_[j] = f;
  }
}

cplx TildeKBPKernel::prefactor(cplx w) const {
  cplx pre = std::exp(-w * w * w / 3.0 + r_ * w);
  for (double bl : spikes_.b) pre /= (w - bl);
  for (double bk : spikes_.beta) pre *= (w - bk);
  return pre;
}

cplx TildeKBPKernel::operator()(cplx w, cplx w2) const {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < zr_.size(); ++j) {
    const cplx z = zr_.nodes[j];
    check_pole(w - z, "tilde-K: node on the pole z = w");
    check_pole(z - w2, "tilde-K: node on the pole z = w'");
    acc += zfac_[j] / ((w - z) * (z - w2));
  }
  return prefactor(w) * acc;
}

CMatrix TildeKBPKernel::matrix(std::span<const cplx> nodes) const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const auto m = static_cast<Eigen::Index>(zr_.size());
  CMatrix P(n, m), Q(m, n);
  parallel_for(n, true, [&](std::int64_t i) {
    const cplx pre = prefactor(nodes[i]);
    for (Eigen::Index j = 0; j < m; ++j) {
      const cplx d = nodes[i] - zr_.nodes[j];
      check_pole(d, "tilde-K: node on the pole z = w");
      P(i, j) = pre / d;
    }
  });
  parallel_for(m, true, [&](std::int64_t j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const cplx d = zr_.nodes[j] - nodes[k];
      check_pole(d, "tilde-K: node on the pole z = w'");
      Q(j, k) = zfac_[j] / d;
    }
  });
  return P * Q;
}

CMatrix TildeKBPKernel::matrix_serial(std::span<const cplx> nodes) const {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  CMatrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = (*this)(nodes[i], nodes[j]);
  return K;
}

cplx eval_tildeKBP(cplx w, cplx w2, double r, const SpikeParams& spikes, const ComplexPath& cz) {
  return TildeKBPKernel(r, spikes, cz)(w, w2);
}

// ---------------------------------------------------------------------------
// Double-contour kernels

DoubleContourKernel DoubleContourKernel::borodin_peche(const SpikeParams& spikes, double c,
                                                       InnerQuadrature q) {
  spikes.validate();
  return borodin_peche(spikes, build_bp_contours(spikes.b, spikes.beta, c), q);
}

DoubleContourKernel DoubleContourKernel::borodin_peche(const SpikeParams& spikes,
                                                       const TwoSidedContours& contours,
                                                       InnerQuadrature q) {
  spikes.validate();
  DoubleContourKernel k;
  k.spikes_ = spikes;
  k.tc_ = contours;
  k.finish(q);
  return k;
}

TwoSidedContours DoubleContourKernel::sigma_contours(const CdrpParams& p) {
  p.spikes.validate();
  const double c = std::min(0.25 / p.sigma, 1.0);
  TwoSidedContours tc = build_two_sided_contours(p.spikes.b, p.spikes.beta, c, 0.5 / p.sigma);
  for (auto* path : {&tc.lower, &tc.upper}) {
    for (double bl : p.spikes.b)
      for (int j = 1; j < 3; ++j) path->singularities.emplace_back(bl - j / p.sigma, 0.0);
    for (double bk : p.spikes.beta)
      for (int j = 1; j < 3; ++j) path->singularities.emplace_back(bk + j / p.sigma, 0.0);
  }
  return tc;
}

DoubleContourKernel DoubleContourKernel::sigma_deformed(const CdrpParams& p, InnerQuadrature q) {
  return sigma_deformed(p, sigma_contours(p), q);
}

DoubleContourKernel DoubleContourKernel::sigma_deformed(const CdrpParams& p,
                                                        const TwoSidedContours& contours,
                                                        InnerQuadrature q) {
  if (!(p.sigma > 0.0)) throw std::invalid_argument("sigma kernel: sigma must be positive");
  p.spikes.validate();
  DoubleContourKernel k;
  k.sigma_form_ = true;
  k.sigma_ = p.sigma;
  k.r_ = p.r;
  k.spikes_ = p.spikes;
  k.tc_ = contours;
  k.finish(q);
  return k;
}

cplx DoubleContourKernel::core(cplx z, cplx w) const {
  if (!sigma_form_) {
    check_pole(z - w, "double-contour kernel: contours touch");
    return 1.0 / (z - w);
  }
  const cplx arg = sigma_ * (z - w);
  const double k = std::round(arg.real());
  if (std::abs(arg - k) < kPoleTol) throw PoleProximityError("sigma kernel: node on a sine pole");
  return sigma_ * kPi * inv_sin(kPi * arg);
}

void DoubleContourKernel::finish(InnerQuadrature q) {
  const double m = static_cast<double>(spikes_.b.size());
  const double n = static_cast<double>(spikes_.beta.size());
  auto radius_for = [&](const ComplexPath& path) {
    double p = 0.0, extent = 0.0;
    for (const auto& pc : path.pieces) {
      if (pc.kind != PathPiece::Kind::Segment) {
        p = std::abs(pc.a.real());
        extent = std::max(extent, std::abs(pc.a));
      }
    }
    p = std::max(p, 0.1);
    // decay e^{-p t^2} against growth from gamma ratios, e^{-r z} and e^{-zy}
    const double B = (sigma_form_ ? 0.5 * kPi * sigma_ * (m + n) : 0.0) + std::abs(r_.imag());
    const double C = q.cut_log + p * p * p / 3.0 + p * (std::abs(r_.real()) + 10.0);
    const double t = positive_root(p, B, C);
    return std::max(std::min(t, 20.0), extent + 2.0);
  };

  DiscretizeOptions o;
  o.order = q.order;
  o.max_panel = q.max_panel;
  o.truncation_radius = radius_for(tc_.lower);
  wr_ = discretize(tc_.lower, o);
  o.truncation_radius = radius_for(tc_.upper);
  zr_ = discretize(tc_.upper, o);

  const double s = sigma_;
  wfac_.resize(wr_.size());
  for (std::size_t i = 0; i < wr_.size(); ++i) {
    const cplx w = wr_.nodes[i];
    cplx lg = -w * w * w / 3.0 + r_ * w;
    cplx poly = 1.0;
    if (sigma_form_) {
      for (double bl : spikes_.b) lg += log_gamma(s * (w - bl));
      for (double bk : spikes_.beta) lg -= log_gamma(s * (bk - w));
    } else {
      for (double bl : spikes_.b) poly /= (w - bl);
      for (double bk : spikes_.beta) poly *= (w - bk);
    }
    wfac_[i] = wr_.weights[i] / kTwoPiI * poly * std::exp(lg);
  }
  zfac_.resize(zr_.size());
  for (std::size_t j = 0; j < zr_.size(); ++j) {
    const cplx z = zr_.nodes[j];
    cplx lg = z * z * z / 3.0 - r_ * z;
    cplx poly = 1.0;
    if (sigma_form_) {
      for (double bl : spikes_.b) lg -= log_gamma(s * (z - bl));
      for (double bk : spikes_.beta) lg += log_gamma(s * (bk - z));
    } else {
      for (double bl : spikes_.b) poly *= (z - bl);
      for (double bk : spikes_.beta) poly /= (z - bk);
    }
    zfac_[j] = zr_.weights[j] / kTwoPiI * poly * std::exp(lg);
  }
  M_.resize(static_cast<Eigen::Index>(wr_.size()), static_cast<Eigen::Index>(zr_.size()));
  for (std::size_t i = 0; i < wr_.size(); ++i)
    for (std::size_t j = 0; j < zr_.size(); ++j) M_(i, j) = core(zr_.nodes[j], wr_.nodes[i]);
}

cplx DoubleContourKernel::operator()(double x, double y) const {
  cplx total = 0.0;
  for (std::size_t i = 0; i < wr_.size(); ++i) {
    cplx inner = 0.0;
    for (std::size_t j = 0; j < zr_.size(); ++j) {
      inner += M_(i, j) * zfac_[j] * std::exp(-zr_.nodes[j] * y);
    }
    total += wfac_[i] * std::exp(wr_.nodes[i] * x) * inner;
  }
  return total;
}

CMatrix DoubleContourKernel::assemble(std::span<const double> x, std::span<const double> y,
                                      bool parallel) const {
  const auto nw = static_cast<Eigen::Index>(wr_.size());
  const auto nz = static_cast<Eigen::Index>(zr_.size());
  const auto nx = static_cast<Eigen::Index>(x.size());
  const auto ny = static_cast<Eigen::Index>(y.size());
  CMatrix A(nx, nw), B(nz, ny);
  parallel_for(nx, parallel, [&](std::int64_t a) {
    for (Eigen::Index i = 0; i < nw; ++i) A(a, i) = wfac_[i] * std::exp(wr_.nodes[i] * x[a]);
  });
  parallel_for(ny, parallel, [&](std::int64_t b) {
    for (Eigen::Index j = 0; j < nz; ++j) B(j, b) = zfac_[j] * std::exp(-zr_.nodes[j] * y[b]);
  });
  if (parallel) return A * (M_ * B);

  CMatrix MB = CMatrix::Zero(nw, ny);
  for (Eigen::Index b = 0; b < ny; ++b)
    for (Eigen::Index j = 0; j < nz; ++j) {
      const cplx bj = B(j, b);
      for (Eigen::Index i = 0; i < nw; ++i) MB(i, b) += M_(i, j) * bj;
    }
  CMatrix K = CMatrix::Zero(nx, ny);
  for (Eigen::Index b = 0; b < ny; ++b)
    for (Eigen::Index i = 0; i < nw; ++i) {
      const cplx mb = MB(i, b);
      for (Eigen::Index a = 0; a < nx; ++a) K(a, b) += A(a, i) * mb;
    }
  return K;
}

CMatrix DoubleContourKernel::matrix(std::span<const double> x, std::span<const double> y) const {
  return assemble(x, y, true);
}

CMatrix DoubleContourKernel::matrix_serial(std::span<const double> x, std::span<const double> y) const {
  return assemble(x, y, false);
}

cplx eval_KBP(double x, double y, const SpikeParams& spikes, const TwoSidedContours& contours,
              InnerQuadrature q) {
  return DoubleContourKernel::borodin_peche(spikes, contours, q)(x, y);
}

cplx eval_Ksigma(double x, double y, const CdrpParams& p, const TwoSidedContours& contours,
                 InnerQuadrature q) {
  return DoubleContourKernel::sigma_deformed(p, contours, q)(x, y);
}

}  // namespace bpkpz
