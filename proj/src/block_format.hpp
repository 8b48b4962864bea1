#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "partition.hpp"
#include "rec.hpp"

namespace recsp {

constexpr uint8_t kBlockFormatVersion = 1;

/// Serialized-block header. All multi-byte integers are big-endian; the
/// whole stream is most-significant-bit-first.
///
///   format_version  u8
///   D               u16
///   per_dim_counts  u16 * D
///   base_seed       u64
///   generator_id    u8
///   zeta            f64 (IEEE-754 bits)
///   bin index       ceil(log2 J) bits, big-endian
///   local index     range-coded against Zipf(zeta)
///   zero padding to a byte boundary
struct BlockHeader {
  uint8_t format_version = kBlockFormatVersion;
  std::vector<uint32_t> counts;
  uint64_t base_seed = 0;
  uint8_t generator_id = kGeneratorId;
  double zeta = 1.0;
};

struct DecodedBlock {
  BlockHeader header;
  CodePoint code;
};

std::vector<uint8_t> write_block(const GridPartition& part, const CodePoint& code,
                                 uint64_t base_seed, double zeta);

DecodedBlock read_block(std::span<const uint8_t> bytes);

/// Number of bits needed for a bin index over J bins (0 when J == 1).
unsigned bin_index_bits(uint64_t total_bins);

}  // namespace recsp
