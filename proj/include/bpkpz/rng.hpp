#pragma once

#include <cstdint>
#include <random>

namespace bpkpz {

using Engine = std::mt19937_64;

/// Engine for sample `index` of a run with the given master seed. Different
/// `stream` values give independent engines for the same sample, so a grid
/// refinement can draw extra noise without disturbing the coarse path.
Engine sample_engine(std::uint64_t master, std::uint64_t index, std::uint32_t stream = 0);

/// ln X for X ~ gamma(shape, 1). Shapes below one are boosted,
/// X = Y U^{1/shape} with Y ~ gamma(shape + 1), so tiny variates do not underflow.
double log_gamma_variate(double shape, Engine& eng);

}  // namespace bpkpz
