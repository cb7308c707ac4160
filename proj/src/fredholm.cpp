#include "bpkpz/fredholm.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

#include "bpkpz/error.hpp"
#include "bpkpz/quadrature.hpp"

namespace bpkpz {

cplx nystrom_det(const CMatrix& K, std::span<const cplx> weights, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("nystrom_det: sign must be +1 or -1");
  const auto n = K.rows();
  if (K.cols() != n || static_cast<std::size_t>(n) != weights.size()) {
    throw std::invalid_argument("nystrom_det: dimension mismatch");
  }
  if (n == 0) return 1.0;
  Eigen::VectorXcd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(weights[i]);
  CMatrix A = double(sign) * (s.asDiagonal() * K * s.asDiagonal());
  A.diagonal().array() += 1.0;
  if (!A.allFinite()) throw ConvergenceError("nystrom_det: non-finite matrix entries");
  const cplx d = Eigen::PartialPivLU<CMatrix>(A).determinant();
  if (!std::isfinite(d.real()) || !std::isfinite(d.imag())) {
    throw ConvergenceError("nystrom_det: factorization broke down");
  }
  return d;
}

cplx det_on_rule(const PointKernel& kernel, const QuadratureRule& rule, int sign) {
  const auto n = static_cast<Eigen::Index>(rule.size());
  CMatrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = kernel(rule.nodes[i], rule.nodes[j]);
  return nystrom_det(K, rule.weights, sign);
}

cplx det_on_rule(const NodeMatrixKernel& kernel, const QuadratureRule& rule, int sign) {
  return nystrom_det(kernel(rule.nodes), rule.weights, sign);
}

namespace {

template <class K>
FredholmResult two_orders(const K& kernel, const ComplexPath& path, DiscretizeOptions opts, int sign,
                          double tol) {
  const QuadratureRule fine = discretize(path, opts);
  opts.order = std::max(4, opts.order / 2);
  const QuadratureRule coarse = discretize(path, opts);
  FredholmResult res;
  res.value = det_on_rule(kernel, fine, sign);
  res.error_estimate = std::abs(res.value - det_on_rule(kernel, coarse, sign));
  res.matrix_dim = static_cast<int>(fine.size());
  res.converged = res.error_estimate <= tol;
  return res;
}

}  // namespace

FredholmResult det_contour(const PointKernel& kernel, const ComplexPath& path,
                           const DiscretizeOptions& opts, int sign, double tol) {
  return two_orders(kernel, path, opts, sign, tol);
}

FredholmResult det_contour_matrix(const NodeMatrixKernel& kernel, const ComplexPath& path,
                                  const DiscretizeOptions& opts, int sign, double tol) {
  return two_orders(kernel, path, opts, sign, tol);
}

HalfLineRule halfline_rule(double r, int order, double scale) {
  if (order < 1) throw std::invalid_argument("halfline_rule: order must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("halfline_rule: scale must be positive");
  const GaussLegendre& gl = gauss_legendre(order);
  HalfLineRule rule;
  for (int i = 0; i < order; ++i) {
    const double t = 0.5 * (gl.nodes[i] + 1.0);
    rule.nodes.push_back(r - scale * std::log1p(-t));
    rule.weights.push_back(0.5 * scale * gl.weights[i] / (1.0 - t));
  }
  return rule;
}

namespace {

cplx halfline_value(const RealMatrixKernel& kernel, double r, int sign, int order, double scale) {
  const HalfLineRule rule = halfline_rule(r, order, scale);
  const std::vector<cplx> w(rule.weights.begin(), rule.weights.end());
  return nystrom_det(kernel(rule.nodes, rule.nodes), w, sign);
}

}  // namespace

FredholmResult det_halfline(const RealMatrixKernel& kernel, double r, int sign, int order, double tol,
                            double scale) {
  FredholmResult res;
  res.value = halfline_value(kernel, r, sign, order, scale);
  res.error_estimate = std::abs(res.value - halfline_value(kernel, r, sign, std::max(2, order / 2), scale));
  res.matrix_dim = order;
  res.converged = res.error_estimate <= tol;
  return res;
}

FredholmResult det_halfline_pointwise(const std::function<cplx(double, double)>& kernel, double r,
                                      int sign, int order, double tol, double scale) {
  const RealMatrixKernel mk = [&](std::span<const double> x, std::span<const double> y) {
    CMatrix K(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t a = 0; a < x.size(); ++a)
      for (std::size_t b = 0; b < y.size(); ++b) K(a, b) = kernel(x[a], y[b]);
    return K;
  };
  return det_halfline(mk, r, sign, order, tol, scale);
}

double series_bound_check(double C, double gap, int terms) {
  if (!(gap > 0.0)) throw std::invalid_argument("series_bound_check: gap must be positive");
  if (terms < 0) throw std::invalid_argument("series_bound_check: terms must be >= 0");
  if (C == 0.0) return 0.0;
  // log of C^{2k} k^{k/2} / (gap^k k!)
  auto log_term = [&](int k) {
    return 2.0 * k * std::log(std::abs(C)) + 0.5 * k * std::log(double(k)) - k * std::log(gap) -
           std::lgamma(k + 1.0);
  };
  double sum = 0.0;
  for (int k = terms + 1; k < terms + 100000; ++k) {
    const double t = std::exp(log_term(k));
    sum += t;
    // terms eventually decrease super-exponentially; stop once negligible and falling
    if (k > terms + 2 && t < 1e-17 * sum && log_term(k + 1) < log_term(k)) break;
  }
  return sum;
}

}  // namespace bpkpz
