#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distributions.hpp"

namespace recsp {

/// Most-significant-bit-first bit sink backed by a byte vector.
class BitWriter {
public:
  void write_bit(int bit);
  void write_bits(uint64_t value, unsigned nbits);  // big-endian bit order
  void write_byte(uint8_t byte) { write_bits(byte, 8); }
  void write_u16(uint16_t v) { write_bits(v, 16); }
  void write_u64(uint64_t v) { write_bits(v, 64); }

  /// Pads the final partial byte with zero bits and returns the buffer.
  std::vector<uint8_t> finish();

  size_t bits_written() const { return bits_; }

private:
  std::vector<uint8_t> bytes_;
  size_t bits_ = 0;
};

/// Matching bit source. Reads past the end yield zero bits, so a range
/// decoder may drain its lookahead beyond the flushed payload.
class BitReader {
public:
  explicit BitReader(std::span<const uint8_t> data) : data_(data) {}

  int read_bit();
  uint64_t read_bits(unsigned nbits);
  uint8_t read_byte() { return static_cast<uint8_t>(read_bits(8)); }
  uint16_t read_u16() { return static_cast<uint16_t>(read_bits(16)); }
  uint64_t read_u64() { return read_bits(64); }

  bool exhausted() const { return bits_ >= data_.size() * 8; }
  size_t bits_read() const { return bits_; }

private:
  std::span<const uint8_t> data_;
  size_t bits_ = 0;
};

/// Binary range coder with 32-bit state and byte-wise renormalization
/// (carry handling via the cached-byte scheme). Probabilities are 16-bit:
/// p0 = P(bit == 0) * 2^16, clamped to [1, 65535] by the callers.
class RangeEncoder {
public:
  explicit RangeEncoder(BitWriter& sink) : sink_(sink) {}

  void encode_bit(int bit, uint32_t p0);
  void flush();

private:
  void shift_low();

  BitWriter& sink_;
  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  bool flushed_ = false;
};

class RangeDecoder {
public:
  explicit RangeDecoder(BitReader& source);

  int decode_bit(uint32_t p0);

private:
  BitReader& source_;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

}  // namespace recsp
