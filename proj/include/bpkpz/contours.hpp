#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bpkpz/specfun.hpp"

namespace bpkpz {

/// One straight piece of an integration path.
///
/// Segment runs from `a` to `b`. Rays have a finite endpoint `a` and a unit
/// direction `b` pointing away from it: RayIn is traversed from infinity towards
/// `a`, RayOut from `a` out to infinity.
struct PathPiece {
  enum class Kind { Segment, RayIn, RayOut };
  Kind kind;
  cplx a;
  cplx b;
};

/// Oriented piecewise-linear contour.
struct ComplexPath {
  std::vector<PathPiece> pieces;
  /// Real-axis crossing, when the path has exactly one.
  std::optional<double> crossing;
  /// Integrand singularities the path was built to avoid; discretize() grades
  /// its panels towards them.
  std::vector<cplx> singularities;

  /// Finite vertices in traversal order.
  std::vector<cplx> vertices() const;
  /// Pieces are joined end-to-start and only the first/last may be rays.
  bool connected(double tol = 1e-12) const;
  /// Copy of the path translated by `shift` (singularities move with it).
  ComplexPath shifted(cplx shift) const;
};

struct QuadratureRule {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  double truncation_radius = 0.0;

  std::size_t size() const { return nodes.size(); }
};

struct DiscretizeOptions {
  int order = 16;                 ///< Gauss-Legendre points per panel (>= 4)
  double truncation_radius = 10;  ///< rays are cut where |z| reaches this radius
  double max_panel = 0.5;         ///< longest allowed panel
  double first_ray_panel = 0.25;  ///< length of the ray panel touching the finite vertex
  double ray_growth = 1.5;        ///< geometric growth of successive ray panels
  double grading = 1.0;           ///< panel length <= grading * distance to nearest singularity
  std::vector<cplx> extra_singularities;
};

QuadratureRule discretize(const ComplexPath& path, const DiscretizeOptions& opts);
QuadratureRule discretize(const ComplexPath& path, int order, double truncation_radius);

/// Euclidean distance between two paths, rays cut at `radius`.
double min_distance(const ComplexPath& p, const ComplexPath& q, double radius = 1e3);
/// Distance from a point to a path, rays cut at `radius`.
double distance_to_path(cplx z, const ComplexPath& p, double radius = 1e3);

// ---------------------------------------------------------------------------
// Contour families

/// Wedge through mu with rays at angles pi -/+ varphi, plus the reference
/// abscissae used to build the inner s-contours.
struct WedgeContour {
  ComplexPath path;
  double mu;
  double eta;
  double varphi;
};

/// Wedge C_v(a; alpha; varphi). With no alpha entries the missing barrier is
/// replaced by max(a) + 2*fallback_offset, giving mu = max(a) + fallback_offset.
WedgeContour build_cv(std::span<const double> a, std::span<const double> alpha, double varphi,
                      double fallback_offset = 0.5);

/// Default bump half-height: half the clearance tan(varphi)/2.
double default_cs_height(double varphi);

/// Six-segment s-contour attached to v on the wedge. Throws GeometryError when
/// v + C_s(v) comes within `min_clearance` of the wedge.
ComplexPath build_cs(cplx v, const WedgeContour& cv, double d, double min_clearance = 1e-6);

/// Pair of upward contours: w-contour near Re = -c, z-contour near Re = +c.
struct TwoSidedContours {
  ComplexPath lower;  ///< gamma (w variable)
  ComplexPath upper;  ///< Gamma (z variable)
};

/// Borodin-Peche contours gamma / Gamma for spikes b, beta and line offset c.
TwoSidedContours build_bp_contours(std::span<const double> b, std::span<const double> beta,
                                   double c = 1.0);

/// Same construction with an explicit upper bound on the horizontal distance
/// between the two crossings (needed when the integrand has a sine factor).
TwoSidedContours build_two_sided_contours(std::span<const double> b, std::span<const double> beta,
                                          double c, double max_crossing_gap);

/// Rescaled contours C_w (translated wedge -|y| + iy) and C_z (line 1 + iR).
struct RescaledContours {
  ComplexPath cw;
  ComplexPath cz;
};

RescaledContours build_rescaled_contours(std::span<const double> b, std::span<const double> beta);

}  // namespace bpkpz
