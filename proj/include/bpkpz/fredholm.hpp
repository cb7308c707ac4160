#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bpkpz/contours.hpp"
#include "bpkpz/kernels.hpp"

namespace bpkpz {

struct FredholmResult {
  cplx value = 1.0;
  double error_estimate = 0.0;  ///< |value(order) - value(order/2)|
  int matrix_dim = 0;
  bool converged = true;
};

using PointKernel = std::function<cplx(cplx, cplx)>;
/// Square matrix K(z_i, z_j) for a node set.
using NodeMatrixKernel = std::function<CMatrix(std::span<const cplx>)>;
/// Matrix K(x_a, y_b) for real node sets.
using RealMatrixKernel = std::function<CMatrix(std::span<const double>, std::span<const double>)>;

/// det(I + sign W^{1/2} K W^{1/2}) by LU with partial pivoting.
cplx nystrom_det(const CMatrix& K, std::span<const cplx> weights, int sign);

/// Nystrom determinant on a fixed rule.
cplx det_on_rule(const PointKernel& kernel, const QuadratureRule& rule, int sign);
cplx det_on_rule(const NodeMatrixKernel& kernel, const QuadratureRule& rule, int sign);

/// Determinant on a contour at opts.order and opts.order/2.
FredholmResult det_contour(const PointKernel& kernel, const ComplexPath& path,
                           const DiscretizeOptions& opts, int sign, double tol = 1e-6);
FredholmResult det_contour_matrix(const NodeMatrixKernel& kernel, const ComplexPath& path,
                                  const DiscretizeOptions& opts, int sign, double tol = 1e-6);

/// Gauss-Legendre rule on (r, inf) through x = r - L ln(1 - t), t in (0, 1).
/// A kernel decaying like e^{-d x} needs L d >= 1 or so; L = 1 suits Airy-type decay.
struct HalfLineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
HalfLineRule halfline_rule(double r, int order, double scale = 1.0);

/// Determinant on L^2((r, inf)) at `order` and order/2.
FredholmResult det_halfline(const RealMatrixKernel& kernel, double r, int sign, int order = 64,
                            double tol = 1e-6, double scale = 1.0);
FredholmResult det_halfline_pointwise(const std::function<cplx(double, double)>& kernel, double r,
                                      int sign, int order = 64, double tol = 1e-6, double scale = 1.0);

/// Tail sum_{k > terms} C^{2k} k^{k/2} / (gap^k k!) of the Hadamard-type series.
double series_bound_check(double C, double gap, int terms);

}  // namespace bpkpz
