#include "qrseal/bitstream.hpp"

#include <cstddef>
#include <stdexcept>

#include "qrseal/errors.hpp"
#include "qrseal/rs.hpp"

namespace qrseal {

void BitString::append_bits(std::uint32_t value, int count) {
    if (count < 0 || count > 32)
        throw std::invalid_argument("bit count out of range [0, 32]");
    if (count < 32 && (value >> count) != 0)
        throw std::invalid_argument("value does not fit in the requested bit count");
    for (int i = count - 1; i >= 0; --i)
        bits_.push_back((value >> i) & 1);
}

std::uint32_t BitString::read_bits(int count) {
    if (count < 0 || count > 32)
        throw std::invalid_argument("bit count out of range [0, 32]");
    if (static_cast<std::size_t>(count) > bits_left())
        throw std::out_of_range("read past the end of the bit stream");
    std::uint32_t value = 0;
    for (int i = 0; i < count; ++i)
        value = (value << 1) | bits_[cursor_++];
    return value;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i])
            out[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
    return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
    BitString bs;
    for (std::uint8_t b : bytes)
        bs.append_bits(b, 8);
    return bs;
}

Segment Segment::numeric(std::string digits) {
    return Segment{SegmentMode::Numeric, std::move(digits), {}};
}

Segment Segment::alphanumeric(std::string text) {
    return Segment{SegmentMode::Alphanumeric, std::move(text), {}};
}

Segment Segment::byte(std::vector<std::uint8_t> data) {
    return Segment{SegmentMode::Byte, {}, std::move(data)};
}

namespace {

const char kAlnumAlphabet[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:";

int mode_indicator(SegmentMode mode) {
    switch (mode) {
        case SegmentMode::Numeric: return 0b0001;
        case SegmentMode::Alphanumeric: return 0b0010;
        case SegmentMode::Byte: return 0b0100;
    }
    throw std::invalid_argument("unknown segment mode");
}

// Character-count field width. Versions 1-9 and 10-26 differ; only 1-10 are
// supported here.
int count_bits(SegmentMode mode, int version) {
    if (version < 1 || version > 10)
        throw std::invalid_argument("version out of range [1, 10]");
    bool small = version <= 9;
    switch (mode) {
        case SegmentMode::Numeric: return small ? 10 : 12;
        case SegmentMode::Alphanumeric: return small ? 9 : 11;
        case SegmentMode::Byte: return small ? 8 : 16;
    }
    throw std::invalid_argument("unknown segment mode");
}

}  // namespace

int alnum_value(char c) {
    for (int i = 0; kAlnumAlphabet[i] != '\0'; ++i)
        if (kAlnumAlphabet[i] == c)
            return i;
    throw std::invalid_argument(std::string("character not in the alphanumeric alphabet: '") + c + "'");
}

BitString encode_segment(const Segment& segment, int version) {
    BitString bits;
    bits.append_bits(static_cast<std::uint32_t>(mode_indicator(segment.mode)), 4);
    int cbits = count_bits(segment.mode, version);

    switch (segment.mode) {
        case SegmentMode::Numeric: {
            const std::string& s = segment.text;
            for (char c : s)
                if (c < '0' || c > '9')
                    throw std::invalid_argument("numeric segment contains a non-digit");
            bits.append_bits(static_cast<std::uint32_t>(s.size()), cbits);
            std::size_t i = 0;
            for (; i + 3 <= s.size(); i += 3) {
                int v = (s[i] - '0') * 100 + (s[i + 1] - '0') * 10 + (s[i + 2] - '0');
                bits.append_bits(static_cast<std::uint32_t>(v), 10);
            }
            if (s.size() - i == 2)
                bits.append_bits(static_cast<std::uint32_t>((s[i] - '0') * 10 + (s[i + 1] - '0')), 7);
            else if (s.size() - i == 1)
                bits.append_bits(static_cast<std::uint32_t>(s[i] - '0'), 4);
            break;
        }
        case SegmentMode::Alphanumeric: {
            const std::string& s = segment.text;
            bits.append_bits(static_cast<std::uint32_t>(s.size()), cbits);
            std::size_t i = 0;
            for (; i + 2 <= s.size(); i += 2)
                bits.append_bits(static_cast<std::uint32_t>(alnum_value(s[i]) * 45 + alnum_value(s[i + 1])), 11);
            if (i < s.size())
                bits.append_bits(static_cast<std::uint32_t>(alnum_value(s[i])), 6);
            break;
        }
        case SegmentMode::Byte: {
            bits.append_bits(static_cast<std::uint32_t>(segment.bytes.size()), cbits);
            for (std::uint8_t b : segment.bytes)
                bits.append_bits(b, 8);
            break;
        }
    }
    return bits;
}

Segment parse_segment(BitString& bits, int version) {
    std::uint32_t mode = bits.read_bits(4);
    switch (mode) {
        case 0b0001: {
            std::uint32_t n = bits.read_bits(count_bits(SegmentMode::Numeric, version));
            std::string s;
            while (s.size() + 3 <= n) {
                std::uint32_t v = bits.read_bits(10);
                if (v > 999)
                    throw DecodeError("numeric triple out of range");
                s += static_cast<char>('0' + v / 100);
                s += static_cast<char>('0' + (v / 10) % 10);
                s += static_cast<char>('0' + v % 10);
            }
            if (n - s.size() == 2) {
                std::uint32_t v = bits.read_bits(7);
                if (v > 99)
                    throw DecodeError("numeric pair out of range");
                s += static_cast<char>('0' + v / 10);
                s += static_cast<char>('0' + v % 10);
            } else if (n - s.size() == 1) {
                std::uint32_t v = bits.read_bits(4);
                if (v > 9)
                    throw DecodeError("numeric digit out of range");
                s += static_cast<char>('0' + v);
            }
            return Segment::numeric(std::move(s));
        }
        case 0b0010: {
            std::uint32_t n = bits.read_bits(count_bits(SegmentMode::Alphanumeric, version));
            std::string s;
            while (s.size() + 2 <= n) {
                std::uint32_t v = bits.read_bits(11);
                if (v >= 45 * 45)
                    throw DecodeError("alphanumeric pair out of range");
                s += kAlnumAlphabet[v / 45];
                s += kAlnumAlphabet[v % 45];
            }
            if (s.size() < n) {
                std::uint32_t v = bits.read_bits(6);
                if (v >= 45)
                    throw DecodeError("alphanumeric value out of range");
                s += kAlnumAlphabet[v];
            }
            return Segment::alphanumeric(std::move(s));
        }
        case 0b0100: {
            std::uint32_t n = bits.read_bits(count_bits(SegmentMode::Byte, version));
            std::vector<std::uint8_t> data;
            data.reserve(n);
            for (std::uint32_t i = 0; i < n; ++i)
                data.push_back(static_cast<std::uint8_t>(bits.read_bits(8)));
            return Segment::byte(std::move(data));
        }
        default:
            throw DecodeError("unsupported mode indicator in bit stream");
    }
}

char ec_level_letter(EcLevel level) {
    switch (level) {
        case EcLevel::L: return 'L';
        case EcLevel::M: return 'M';
        case EcLevel::Q: return 'Q';
        case EcLevel::H: return 'H';
    }
    throw std::invalid_argument("unknown error-correction level");
}

EcLevel ec_level_from_letter(char c) {
    switch (c) {
        case 'L': return EcLevel::L;
        case 'M': return EcLevel::M;
        case 'Q': return EcLevel::Q;
        case 'H': return EcLevel::H;
    }
    throw std::invalid_argument("unknown error-correction level letter");
}

namespace {

// Parity codewords per block and block counts for versions 1-10, indexed
// [level][version - 1] with level order L, M, Q, H. Values from the public
// QR code specification.
constexpr int kEcPerBlock[4][10] = {
    {7, 10, 15, 20, 26, 18, 20, 24, 30, 18},   // L
    {10, 16, 26, 18, 24, 16, 18, 22, 22, 26},  // M
    {13, 22, 18, 26, 18, 24, 18, 22, 20, 24},  // Q
    {17, 28, 22, 16, 22, 28, 26, 26, 24, 28},  // H
};

constexpr int kNumBlocks[4][10] = {
    {1, 1, 1, 1, 1, 2, 2, 2, 2, 4},  // L
    {1, 1, 1, 2, 2, 4, 4, 4, 5, 5},  // M
    {1, 1, 2, 2, 4, 4, 6, 6, 8, 8},  // Q
    {1, 1, 2, 4, 4, 4, 5, 6, 8, 8},  // H
};

// Modules available for codewords once function patterns are placed.
int raw_data_modules(int version) {
    int result = (16 * version + 128) * version + 64;
    if (version >= 2) {
        int num_align = version / 7 + 2;
        result -= (25 * num_align - 10) * num_align - 55;
        if (version >= 7)
            result -= 36;
    }
    return result;
}

}  // namespace

QrProfile QrProfile::get(int version, EcLevel level) {
    if (version < 1 || version > 10)
        throw std::invalid_argument("version out of range [1, 10]");
    int li = static_cast<int>(level);
    int raw = raw_data_modules(version);
    QrProfile p{};
    p.version = version;
    p.level = level;
    p.total_codewords = raw / 8;
    p.remainder_bits = raw % 8;
    p.ec_per_block = kEcPerBlock[li][version - 1];
    p.num_blocks = kNumBlocks[li][version - 1];
    p.data_codewords = p.total_codewords - p.ec_per_block * p.num_blocks;
    // Short blocks absorb the rounding: total codewords spread as evenly as
    // possible, long blocks carrying one extra data byte.
    p.num_short_blocks = p.num_blocks - p.total_codewords % p.num_blocks;
    p.short_block_data = p.total_codewords / p.num_blocks - p.ec_per_block;
    return p;
}

std::vector<std::uint8_t> assemble_codewords(const BitString& bits, const QrProfile& profile) {
    std::size_t capacity_bits = static_cast<std::size_t>(profile.data_codewords) * 8;
    if (bits.size() > capacity_bits)
        throw CapacityError("bit stream exceeds the data capacity of the profile");

    BitString out;
    for (std::size_t i = 0; i < bits.size(); ++i)
        out.append_bit(bits.bit(i));

    // Terminator: up to four zero bits, shortened when capacity is tight.
    std::size_t terminator = capacity_bits - out.size();
    if (terminator > 4)
        terminator = 4;
    out.append_bits(0, static_cast<int>(terminator));
    if (out.size() % 8 != 0)
        out.append_bits(0, static_cast<int>(8 - out.size() % 8));

    std::vector<std::uint8_t> codewords = out.to_bytes();
    for (std::uint8_t pad = 236; codewords.size() < static_cast<std::size_t>(profile.data_codewords);
         pad ^= 236 ^ 17)
        codewords.push_back(pad);
    return codewords;
}

std::vector<RsBlock> split_blocks(std::span<const std::uint8_t> data, const QrProfile& profile) {
    if (data.size() != static_cast<std::size_t>(profile.data_codewords))
        throw std::invalid_argument("data length does not match the profile's data capacity");

    std::vector<RsBlock> blocks;
    blocks.reserve(static_cast<std::size_t>(profile.num_blocks));
    std::size_t offset = 0;
    for (int b = 0; b < profile.num_blocks; ++b) {
        int len = profile.short_block_data + (b < profile.num_short_blocks ? 0 : 1);
        RsBlock block;
        block.data.assign(data.begin() + static_cast<std::ptrdiff_t>(offset),
                          data.begin() + static_cast<std::ptrdiff_t>(offset + static_cast<std::size_t>(len)));
        block.ec = rs::encode(block.data, profile.ec_per_block);
        blocks.push_back(std::move(block));
        offset += static_cast<std::size_t>(len);
    }
    return blocks;
}

std::vector<std::uint8_t> interleave_blocks(std::span<const std::uint8_t> data,
                                            const QrProfile& profile) {
    std::vector<RsBlock> blocks = split_blocks(data, profile);

    std::vector<std::uint8_t> stream;
    stream.reserve(static_cast<std::size_t>(profile.total_codewords));
    std::size_t max_data = blocks.back().data.size();
    for (std::size_t i = 0; i < max_data; ++i)
        for (const RsBlock& b : blocks)
            if (i < b.data.size())
                stream.push_back(b.data[i]);
    for (int i = 0; i < profile.ec_per_block; ++i)
        for (const RsBlock& b : blocks)
            stream.push_back(b.ec[static_cast<std::size_t>(i)]);
    return stream;
}

std::vector<RsBlock> deinterleave_blocks(std::span<const std::uint8_t> stream,
                                         const QrProfile& profile) {
    if (stream.size() != static_cast<std::size_t>(profile.total_codewords))
        throw std::invalid_argument("stream length does not match the profile's total codewords");

    std::vector<RsBlock> blocks(static_cast<std::size_t>(profile.num_blocks));
    for (int b = 0; b < profile.num_blocks; ++b) {
        int len = profile.short_block_data + (b < profile.num_short_blocks ? 0 : 1);
        blocks[static_cast<std::size_t>(b)].data.resize(static_cast<std::size_t>(len));
        blocks[static_cast<std::size_t>(b)].ec.resize(static_cast<std::size_t>(profile.ec_per_block));
    }

    std::size_t pos = 0;
    std::size_t max_data = blocks.back().data.size();
    for (std::size_t i = 0; i < max_data; ++i)
        for (RsBlock& b : blocks)
            if (i < b.data.size())
                b.data[i] = stream[pos++];
    for (int i = 0; i < profile.ec_per_block; ++i)
        for (RsBlock& b : blocks)
            b.ec[static_cast<std::size_t>(i)] = stream[pos++];
    return blocks;
}

}  // namespace qrseal
