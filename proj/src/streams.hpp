#pragma once

#include <cstdint>
#include <vector>

#include "distributions.hpp"
#include "partition.hpp"

namespace recsp {

// Identifier of the keyed candidate-stream generator below. Written into
// every serialized block; decoders must refuse blocks with an unknown id.
constexpr uint8_t kGeneratorId = 1;

/// splitmix64 finalizer. Stateless 64-bit mixing step used both for keyed
/// streams and as the increment function of the sequential generator.
uint64_t mix64(uint64_t x);

/// Key of one shared-randomness variate: (base seed, bin, local sample
/// index, dimension) -> uniform. Distinct keys give independent uniforms.
struct StreamKey {
  uint64_t base_seed = 0;
  uint64_t bin = 0;
  uint64_t local_index = 1;
  uint32_t dim = 0;
};

/// Keyed uniform in the open interval (0, 1). A pure function of the key:
/// the same key always yields the same bits, on the encoder and the decoder.
double keyed_uniform(const StreamKey& key);

/// The local_index-th candidate of bin j: per dimension, a keyed uniform is
/// squeezed into the bin's quantile range (k_d/J_d, (k_d+1)/J_d) and pushed
/// through the prior quantile, i.e. inverse-transform sampling of the prior
/// restricted to the bin.
std::vector<double> sample_in_bin(const FactorizedDistribution& prior, const GridPartition& part,
                                  uint64_t bin, uint64_t local_index, uint64_t base_seed);

/// Sequential sender-private generator (splitmix64).
class Splitmix64 {
public:
  explicit Splitmix64(uint64_t seed) : state_(seed) {}
  uint64_t next();
  double uniform01();              // [0, 1)
  double uniform_open();           // (0, 1)
  double exponential();           // -ln(1 - u), u in [0, 1)

private:
  uint64_t state_;
};

enum class ArrivalMode { pfr, orc };

/// Strictly increasing arrival times. PFR mode: unit-rate Poisson process
/// gaps. ORC mode: the n-th call returns the n-th order statistic of
/// n_candidates i.i.d. Exp(1) draws, generated incrementally; at most
/// n_candidates arrivals may be consumed.
class ArrivalProcess {
public:
  static ArrivalProcess pfr(uint64_t private_seed);
  static ArrivalProcess orc(uint64_t n_candidates, uint64_t private_seed);

  double next_arrival();
  uint64_t consumed() const { return n_; }
  ArrivalMode mode() const { return mode_; }

private:
  ArrivalProcess(ArrivalMode mode, uint64_t n_candidates, uint64_t seed)
      : mode_(mode), n_candidates_(n_candidates), rng_(seed) {}

  ArrivalMode mode_;
  uint64_t n_candidates_ = 0;
  uint64_t n_ = 0;
  double t_ = 0.0;
  Splitmix64 rng_;
};

}  // namespace recsp
