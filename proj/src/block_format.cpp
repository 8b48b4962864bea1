#include "block_format.hpp"

#include <bit>
#include <cstring>

#include "index_codec.hpp"

namespace recsp {

unsigned bin_index_bits(uint64_t total_bins) {
  if (total_bins <= 1) return 0;
  return static_cast<unsigned>(std::bit_width(total_bins - 1));
}

std::vector<uint8_t> write_block(const GridPartition& part, const CodePoint& code,
                                 uint64_t base_seed, double zeta) {
  if (part.dim() == 0 || part.dim() > 0xFFFF)
    throw Error(ErrorCode::invalid_argument, "block dimension must fit in u16");
  for (uint32_t c : part.counts)
    if (c > 0xFFFF)
      throw Error(ErrorCode::invalid_argument, "per-dim interval count must fit in u16");
  uint64_t total = part.total_bins();
  if (code.bin >= total) throw Error(ErrorCode::out_of_range, "bin index out of range");
  if (code.local_index == 0 || code.local_index > kIndexCap)
    throw Error(ErrorCode::out_of_range, "local index outside [1, 2^32]");

  BitWriter w;
  w.write_byte(kBlockFormatVersion);
  w.write_u16(static_cast<uint16_t>(part.dim()));
  for (uint32_t c : part.counts) w.write_u16(static_cast<uint16_t>(c));
  w.write_u64(base_seed);
  w.write_byte(kGeneratorId);
  uint64_t zeta_bits;
  static_assert(sizeof(zeta_bits) == sizeof(zeta));
  std::memcpy(&zeta_bits, &zeta, sizeof(zeta_bits));
  w.write_u64(zeta_bits);

  w.write_bits(code.bin, bin_index_bits(total));
  RangeEncoder rc(w);
  encode_index(ZipfModel::from_zeta(zeta), code.local_index, rc);
  rc.flush();
  return w.finish();
}

DecodedBlock read_block(std::span<const uint8_t> bytes) {
  BitReader r(bytes);
  DecodedBlock out;
  out.header.format_version = r.read_byte();
  if (out.header.format_version != kBlockFormatVersion)
    throw Error(ErrorCode::parse_error, "unsupported block format version");
  uint16_t dim = r.read_u16();
  if (dim == 0) throw Error(ErrorCode::parse_error, "block dimension must be positive");
  uint64_t total = 1;
  out.header.counts.resize(dim);
  for (uint16_t d = 0; d < dim; ++d) {
    uint16_t c = r.read_u16();
    if (c == 0) throw Error(ErrorCode::parse_error, "interval counts must be positive");
    out.header.counts[d] = c;
    total *= c;
  }
  out.header.base_seed = r.read_u64();
  out.header.generator_id = r.read_byte();
  if (out.header.generator_id != kGeneratorId)
    throw Error(ErrorCode::parse_error, "unknown candidate-stream generator id");
  uint64_t zeta_bits = r.read_u64();
  std::memcpy(&out.header.zeta, &zeta_bits, sizeof(zeta_bits));
  if (r.bits_read() > bytes.size() * 8)
    throw Error(ErrorCode::parse_error, "block truncated inside header");

  out.code.bin = r.read_bits(bin_index_bits(total));
  if (out.code.bin >= total) throw Error(ErrorCode::parse_error, "bin index out of range");
  RangeDecoder rc(r);
  out.code.local_index = decode_index(ZipfModel::from_zeta(out.header.zeta), rc);
  return out;
}

}  // namespace recsp
