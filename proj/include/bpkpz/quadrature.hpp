#pragma once

#include <vector>

namespace bpkpz {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights by Newton iteration on P_n; results are cached per order
/// and the returned reference stays valid for the lifetime of the program.
const GaussLegendre& gauss_legendre(int order);

}  // namespace bpkpz
