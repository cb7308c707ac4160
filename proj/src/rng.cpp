#include "bpkpz/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bpkpz {

Engine sample_engine(std::uint64_t master, std::uint64_t index, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream};
  return Engine(seq);
}

double log_gamma_variate(double shape, Engine& eng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw std::invalid_argument("gamma shape must be positive");
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(eng));
  }
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  const double y = g(eng);
  // U in (0, 1]
  const double u = 1.0 - std::generate_canonical<double, 53>(eng);
  return std::log(y) + std::log(u) / shape;
}

}  // namespace bpkpz
