#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrseal {

// Append-only bit buffer with a separate read cursor, MSB-first within the
// values passed to append_bits / returned from read_bits.
class BitString {
public:
    void append_bit(bool bit) { bits_.push_back(bit ? 1 : 0); }
    void append_bits(std::uint32_t value, int count);  // count in [0, 32]

    std::size_t size() const { return bits_.size(); }
    bool bit(std::size_t i) const { return bits_.at(i) != 0; }

    std::uint32_t read_bits(int count);  // advances the cursor; throws past the end
    std::size_t bits_left() const { return bits_.size() - cursor_; }
    void reset_cursor() { cursor_ = 0; }

    // Packs to bytes MSB-first, zero-filling the final partial byte.
    std::vector<std::uint8_t> to_bytes() const;
    static BitString from_bytes(std::span<const std::uint8_t> bytes);

private:
    std::vector<std::uint8_t> bits_;
    std::size_t cursor_ = 0;
};

enum class SegmentMode { Numeric, Alphanumeric, Byte };

struct Segment {
    SegmentMode mode;
    std::string text;                 // numeric / alphanumeric payload
    std::vector<std::uint8_t> bytes;  // byte-mode payload

    static Segment numeric(std::string digits);
    static Segment alphanumeric(std::string text);
    static Segment byte(std::vector<std::uint8_t> data);
};

// Value of a character in the 45-symbol alphanumeric alphabet; throws on
// characters outside it.
int alnum_value(char c);

// Mode indicator + character count + payload bits for one segment.
// The count field width depends on mode and version.
BitString encode_segment(const Segment& segment, int version);

// Inverse of encode_segment, reading from the stream's cursor.
Segment parse_segment(BitString& bits, int version);

enum class EcLevel { L, M, Q, H };

char ec_level_letter(EcLevel level);
EcLevel ec_level_from_letter(char c);

// Capacity and block structure for one (version, level) pair, versions 1-10.
// Data codewords split into num_blocks Reed-Solomon blocks: the first
// num_short_blocks hold short_block_data bytes each, the rest one byte more.
struct QrProfile {
    int version;
    EcLevel level;
    int total_codewords;
    int data_codewords;
    int ec_per_block;
    int num_blocks;
    int num_short_blocks;
    int short_block_data;
    int remainder_bits;

    static QrProfile get(int version, EcLevel level);  // throws outside 1-10
};

// Terminator, pad-to-byte, and the alternating 236/17 pad codewords.
// Throws CapacityError when bits exceed the profile's data capacity.
std::vector<std::uint8_t> assemble_codewords(const BitString& bits, const QrProfile& profile);

struct RsBlock {
    std::vector<std::uint8_t> data;
    std::vector<std::uint8_t> ec;
};

// Splits data codewords into blocks and computes each block's parity.
std::vector<RsBlock> split_blocks(std::span<const std::uint8_t> data, const QrProfile& profile);

// Full transmission stream: data codewords interleaved column-major across
// blocks, then parity codewords likewise.
std::vector<std::uint8_t> interleave_blocks(std::span<const std::uint8_t> data,
                                            const QrProfile& profile);

// Inverse of the interleaving, returning parity still attached per block.
std::vector<RsBlock> deinterleave_blocks(std::span<const std::uint8_t> stream,
                                         const QrProfile& profile);

}  // namespace qrseal
