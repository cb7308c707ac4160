#include "bpkpz/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bpkpz/error.hpp"

namespace bpkpz {

namespace {

const cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);

DistValue from_result(const FredholmResult& res, double tol) {
  DistValue v;
  v.value = res.value.real();
  v.imag = res.value.imag();
  v.error_estimate = res.error_estimate;
  v.converged = res.error_estimate <= tol;
  return v;
}

// Close spikes slow the decay of the kernel to e^{-(beta_1 - b_m) x}; stretch
// the half-line map accordingly.
double halfline_scale(const SpikeParams& s) {
  if (s.b.empty() || s.beta.empty()) return 1.0;
  const double d = *std::min_element(s.beta.begin(), s.beta.end()) - *std::max_element(s.b.begin(), s.b.end());
  return std::max(1.0, 2.0 / d);
}

RealMatrixKernel as_matrix_kernel(const DoubleContourKernel& k) {
  return [&k](std::span<const double> x, std::span<const double> y) { return k.matrix(x, y); };
}

}  // namespace

std::vector<DistValue> f_bp_grid(const SpikeParams& spikes, double Y, std::span<const double> r,
                                 const QuadControls& quad) {
  spikes.validate();
  const SpikeParams s = spikes.shifted(Y);
  const auto kernel = DoubleContourKernel::borodin_peche(s, quad.c, quad.inner);
  const RealMatrixKernel mk = as_matrix_kernel(kernel);
  const double scale = halfline_scale(s);
  std::vector<DistValue> out;
  for (double x : r) {
    out.push_back(from_result(det_halfline(mk, x + Y * Y, -1, quad.halfline_order, quad.tol, scale), quad.tol));
  }
  return out;
}

DistValue f_bp(const DistributionQuery& q) {
  const double r[1] = {q.r};
  return f_bp_grid(q.spikes, q.Y, r, q.quad).front();
}

DistValue f_bp_contour(double r, const SpikeParams& spikes, const QuadControls& quad) {
  const TildeKBPKernel kernel(r, spikes, quad.inner);
  DiscretizeOptions o;
  o.order = quad.contour_order;
  o.max_panel = quad.contour_panel;
  o.truncation_radius = 8.0;
  // the w-integral carries the measure dw / (2 pi i)
  const NodeMatrixKernel mk = [&kernel](std::span<const cplx> nodes) -> CMatrix {
    return kernel.matrix(nodes) / kTwoPiI;
  };
  return from_result(det_contour_matrix(mk, kernel.contours().cw, o, +1, quad.tol), quad.tol);
}

DistValue cdrp_laplace(const CdrpParams& p, const QuadControls& quad) {
  const auto kernel = DoubleContourKernel::sigma_deformed(p, quad.inner);
  return from_result(det_halfline(as_matrix_kernel(kernel), 0.0, -1, quad.halfline_order, quad.tol,
                                  halfline_scale(p.spikes)),
                     quad.tol);
}

std::vector<SigmaRow> sigma_limit_scan(const SpikeParams& spikes, double r,
                                       std::span<const double> sigmas, const QuadControls& quad) {
  DistributionQuery q;
  q.r = r;
  q.spikes = spikes;
  q.quad = quad;
  const DistValue limit = f_bp(q);
  std::vector<SigmaRow> rows;
  for (double s : sigmas) {
    const DistValue d = cdrp_laplace(CdrpParams::from_shift(s, r, spikes), quad);
    rows.push_back({s, d, limit, std::abs(d.value - limit.value)});
  }
  return rows;
}

DistValue finite_n_laplace(const FiniteNParams& p, double varphi, const QuadControls& quad) {
  if (p.u == cplx(0.0)) return {};
  const KuKernel kernel(p, varphi, quad.inner);
  DiscretizeOptions o;
  o.order = quad.contour_order;
  o.max_panel = quad.contour_panel;
  o.truncation_radius = kernel.wedge_radius();
  const NodeMatrixKernel mk = [&kernel](std::span<const cplx> nodes) -> CMatrix {
    return kernel.matrix(nodes) / kTwoPiI;
  };
  return from_result(det_contour_matrix(mk, kernel.wedge().path, o, +1, quad.tol), quad.tol);
}

TabulatedCdf::TabulatedCdf(const SpikeParams& spikes, double lo, double hi, double step,
                           const QuadControls& quad) {
  if (!(hi > lo) || !(step > 0.0)) throw std::invalid_argument("TabulatedCdf: bad grid");
  for (int i = 0;; ++i) {
    const double x = lo + i * step;
    if (x > hi + 1e-12) break;
    x_.push_back(x);
  }
  for (const auto& v : f_bp_grid(spikes, 0.0, x_, quad)) f_.push_back(std::clamp(v.value, 0.0, 1.0));
  // enforce monotonicity against quadrature noise
  for (std::size_t i = 1; i < f_.size(); ++i) f_[i] = std::max(f_[i], f_[i - 1]);
}

double TabulatedCdf::operator()(double x) const {
  if (x <= x_.front()) return x < x_.front() ? 0.0 : f_.front();
  if (x >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin());
  const double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
  return f_[i - 1] + t * (f_[i] - f_[i - 1]);
}

}  // namespace bpkpz
