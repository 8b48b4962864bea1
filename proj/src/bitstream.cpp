#include "bitstream.hpp"

namespace recsp {

void BitWriter::write_bit(int bit) {
  size_t byte_pos = bits_ / 8;
  if (byte_pos == bytes_.size()) bytes_.push_back(0);
  if (bit) bytes_[byte_pos] |= static_cast<uint8_t>(0x80u >> (bits_ % 8));
  ++bits_;
}

void BitWriter::write_bits(uint64_t value, unsigned nbits) {
  if (nbits > 64) throw Error(ErrorCode::invalid_argument, "at most 64 bits per write");
  for (unsigned i = nbits; i-- > 0;) write_bit(static_cast<int>((value >> i) & 1u));
}

std::vector<uint8_t> BitWriter::finish() {
  bits_ = bytes_.size() * 8;
  return std::move(bytes_);
}

int BitReader::read_bit() {
  size_t byte_pos = bits_ / 8;
  int bit = 0;
  if (byte_pos < data_.size()) bit = (data_[byte_pos] >> (7 - bits_ % 8)) & 1;
  ++bits_;
  return bit;
}

uint64_t BitReader::read_bits(unsigned nbits) {
  if (nbits > 64) throw Error(ErrorCode::invalid_argument, "at most 64 bits per read");
  uint64_t v = 0;
  for (unsigned i = 0; i < nbits; ++i) v = (v << 1) | static_cast<uint64_t>(read_bit());
  return v;
}

void RangeEncoder::encode_bit(int bit, uint32_t p0) {
  uint32_t bound = (range_ >> 16) * p0;
  if (!bit) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  while (range_ < (1u << 24)) {
    shift_low();
    range_ <<= 8;
  }
}

void RangeEncoder::shift_low() {
  if (static_cast<uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    uint8_t carry = static_cast<uint8_t>(low_ >> 32);
    uint8_t out = cache_;
    do {
      sink_.write_byte(static_cast<uint8_t>(out + carry));
      out = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFull) << 8;
}

void RangeEncoder::flush() {
  if (flushed_) return;
  flushed_ = true;
  for (int i = 0; i < 5; ++i) shift_low();
}

RangeDecoder::RangeDecoder(BitReader& source) : source_(source) {
  // The first flushed byte is always the encoder's zero-valued initial
  // cache; consume it together with the 4 code bytes.
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | source_.read_byte();
}

int RangeDecoder::decode_bit(uint32_t p0) {
  uint32_t bound = (range_ >> 16) * p0;
  int bit;
  if (code_ < bound) {
    bit = 0;
    range_ = bound;
  } else {
    bit = 1;
    code_ -= bound;
    range_ -= bound;
  }
  while (range_ < (1u << 24)) {
    code_ = (code_ << 8) | source_.read_byte();
    range_ <<= 8;
  }
  return bit;
}

}  // namespace recsp
