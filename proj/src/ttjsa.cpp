#include "qrseal/ttjsa.hpp"

#include <stdexcept>
#include <utility>

namespace qrseal::ttjsa {

namespace {

// One 32-byte block as 256 individual bits, MSB-first within each byte.
std::array<std::uint8_t, 256> unpack_bits(const std::uint8_t* block) {
    std::array<std::uint8_t, 256> bits{};
    for (int i = 0; i < 256; ++i)
        bits[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((block[i / 8] >> (7 - i % 8)) & 1);
    return bits;
}

void pack_bits(const std::array<std::uint8_t, 256>& bits, std::uint8_t* block) {
    for (int i = 0; i < 32; ++i) {
        std::uint8_t b = 0;
        for (int j = 0; j < 8; ++j)
            b = static_cast<std::uint8_t>((b << 1) | bits[static_cast<std::size_t>(i * 8 + j)]);
        block[i] = b;
    }
}

std::array<std::uint8_t, 256> cell_positions(const KeyMatrix& m) {
    std::array<std::uint8_t, 256> pos{};
    for (int i = 0; i < 256; ++i)
        pos[m.cells[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
    return pos;
}

}  // namespace

CipherParams derive_params(std::span<const std::uint8_t> passphrase) {
    if (passphrase.empty())
        throw std::invalid_argument("passphrase must not be empty");
    if (passphrase.size() > 256)
        throw std::invalid_argument("passphrase must be at most 256 bytes");
    std::uint32_t num = 0;
    for (std::size_t i = 0; i < passphrase.size(); ++i)
        num += static_cast<std::uint32_t>(passphrase[i]) * static_cast<std::uint32_t>(i + 1);
    return {num, static_cast<int>(num % 32) + 1, static_cast<int>(num % 256)};
}

void cycling(KeyMatrix& m) {
    for (int ring = 0; ring < 8; ++ring) {
        const int lo = ring, hi = 15 - ring;
        std::vector<std::pair<int, int>> path;
        for (int c = lo; c <= hi; ++c) path.emplace_back(lo, c);
        for (int r = lo + 1; r <= hi; ++r) path.emplace_back(r, hi);
        for (int c = hi - 1; c >= lo; --c) path.emplace_back(hi, c);
        for (int r = hi - 1; r > lo; --r) path.emplace_back(r, lo);

        const std::uint8_t last = m.at(path.back().first, path.back().second);
        for (std::size_t i = path.size() - 1; i > 0; --i)
            m.put(path[i].first, path[i].second, m.at(path[i - 1].first, path[i - 1].second));
        m.put(path[0].first, path[0].second, last);
    }
}

void upshift(KeyMatrix& m, int amount) {
    KeyMatrix old = m;
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c)
            m.put(r, c, old.at(r + amount, c));
}

void downshift(KeyMatrix& m, int amount) {
    upshift(m, 16 - (amount & 15));
}

void leftshift(KeyMatrix& m, int amount) {
    KeyMatrix old = m;
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c)
            m.put(r, c, old.at(r, c + amount));
}

void rightshift(KeyMatrix& m, int amount) {
    leftshift(m, 16 - (amount & 15));
}

KeyMatrix generate_key_matrix(const CipherParams& params) {
    KeyMatrix m;
    for (int i = 0; i < 256; ++i)
        m.cells[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    const int down = static_cast<int>(params.num % 3) + 1;
    const int right = static_cast<int>(params.num % 5) + 1;
    for (int round = 0; round < params.times; ++round) {
        cycling(m);
        upshift(m, 1);
        downshift(m, down);
        leftshift(m, 1);
        rightshift(m, right);
    }
    return m;
}

std::vector<std::uint8_t> vernam_encrypt(std::span<const std::uint8_t> plain,
                                         const KeyMatrix& matrix, const CipherParams& params) {
    if (plain.empty())
        throw std::invalid_argument("vernam_encrypt: empty input");
    std::vector<std::uint8_t> buf(plain.begin(), plain.end());
    for (int pass = 0; pass < params.times; ++pass) {
        std::uint8_t feedback = 0;
        for (std::size_t i = 0; i < buf.size(); ++i) {
            const std::uint8_t key = matrix.cells[i % 256];
            buf[i] = static_cast<std::uint8_t>(buf[i] + key + feedback);
            feedback = static_cast<std::uint8_t>(buf[i] + key);
        }
    }
    return buf;
}

std::vector<std::uint8_t> vernam_decrypt(std::span<const std::uint8_t> cipher,
                                         const KeyMatrix& matrix, const CipherParams& params) {
    if (cipher.empty())
        throw std::invalid_argument("vernam_decrypt: empty input");
    std::vector<std::uint8_t> buf(cipher.begin(), cipher.end());
    for (int pass = 0; pass < params.times; ++pass) {
        std::uint8_t feedback = 0;
        for (std::size_t i = 0; i < buf.size(); ++i) {
            const std::uint8_t key = matrix.cells[i % 256];
            const std::uint8_t plain = static_cast<std::uint8_t>(buf[i] - key - feedback);
            feedback = static_cast<std::uint8_t>(buf[i] + key);
            buf[i] = plain;
        }
    }
    return buf;
}

std::vector<std::uint8_t> njjsa_encrypt(std::span<const std::uint8_t> data,
                                        const KeyMatrix& matrix, const CipherParams& params) {
    if (data.empty())
        throw std::invalid_argument("njjsa_encrypt: empty input");
    std::vector<std::uint8_t> buf(data.begin(), data.end());
    buf.resize((buf.size() + 31) / 32 * 32, 0);
    const int rounds = params.secure % 8 + 1;

    for (std::size_t off = 0; off < buf.size(); off += 32) {
        auto bits = unpack_bits(buf.data() + off);
        for (int k = 0; k < 256; ++k)
            std::swap(bits[static_cast<std::size_t>(k)], bits[matrix.cells[static_cast<std::size_t>(k)]]);
        for (int r = 1; r <= rounds; ++r) {
            std::array<std::uint8_t, 256> rotated{};
            for (int i = 0; i < 256; ++i)
                rotated[static_cast<std::size_t>((i + r) % 256)] = bits[static_cast<std::size_t>(i)];
            bits = rotated;
            for (int p = 0; p < 256; p += 2)
                bits[static_cast<std::size_t>(p)] ^= bits[static_cast<std::size_t>(p + 1)];
        }
        pack_bits(bits, buf.data() + off);
    }
    return buf;
}

std::vector<std::uint8_t> njjsa_decrypt(std::span<const std::uint8_t> data,
                                        const KeyMatrix& matrix, const CipherParams& params) {
    if (data.empty())
        throw std::invalid_argument("njjsa_decrypt: empty input");
    if (data.size() % 32 != 0)
        throw std::invalid_argument("njjsa_decrypt: length must be a 32-byte multiple");
    std::vector<std::uint8_t> buf(data.begin(), data.end());
    const int rounds = params.secure % 8 + 1;

    for (std::size_t off = 0; off < buf.size(); off += 32) {
        auto bits = unpack_bits(buf.data() + off);
        for (int r = rounds; r >= 1; --r) {
            for (int p = 0; p < 256; p += 2)
                bits[static_cast<std::size_t>(p)] ^= bits[static_cast<std::size_t>(p + 1)];
            std::array<std::uint8_t, 256> rotated{};
            for (int i = 0; i < 256; ++i)
                rotated[static_cast<std::size_t>(i)] = bits[static_cast<std::size_t>((i + r) % 256)];
            bits = rotated;
        }
        for (int k = 255; k >= 0; --k)
            std::swap(bits[static_cast<std::size_t>(k)], bits[matrix.cells[static_cast<std::size_t>(k)]]);
        pack_bits(bits, buf.data() + off);
    }
    return buf;
}

std::vector<std::uint8_t> msa_encrypt(std::span<const std::uint8_t> data,
                                      const KeyMatrix& matrix, const CipherParams& params) {
    if (data.empty())
        throw std::invalid_argument("msa_encrypt: empty input");
    std::vector<std::uint8_t> buf(data.begin(), data.end());
    const auto pos = cell_positions(matrix);

    for (int pass = 0; pass < params.times; ++pass) {
        std::size_t i = 0;
        for (; i + 1 < buf.size(); i += 2) {
            const int pa = pos[buf[i]], pb = pos[buf[i + 1]];
            const int ra = pa >> 4, ca = pa & 15;
            const int rb = pb >> 4, cb = pb & 15;
            if (buf[i] == buf[i + 1]) {
                const std::uint8_t d = matrix.at(ra + 1, ca + 1);
                buf[i] = d;
                buf[i + 1] = d;
            } else if (ra == rb) {
                buf[i] = matrix.at(ra, ca + 1);
                buf[i + 1] = matrix.at(rb, cb + 1);
            } else if (ca == cb) {
                buf[i] = matrix.at(ra + 1, ca);
                buf[i + 1] = matrix.at(rb + 1, cb);
            } else {
                buf[i] = matrix.at(ra, cb);
                buf[i + 1] = matrix.at(rb, ca);
            }
        }
        if (i < buf.size()) {
            const int p = pos[buf[i]];
            buf[i] = matrix.at(p >> 4, (p & 15) + 1);
        }
    }
    return buf;
}

std::vector<std::uint8_t> msa_decrypt(std::span<const std::uint8_t> data,
                                      const KeyMatrix& matrix, const CipherParams& params) {
    if (data.empty())
        throw std::invalid_argument("msa_decrypt: empty input");
    std::vector<std::uint8_t> buf(data.begin(), data.end());
    const auto pos = cell_positions(matrix);

    for (int pass = 0; pass < params.times; ++pass) {
        std::size_t i = 0;
        for (; i + 1 < buf.size(); i += 2) {
            const int pa = pos[buf[i]], pb = pos[buf[i + 1]];
            const int ra = pa >> 4, ca = pa & 15;
            const int rb = pb >> 4, cb = pb & 15;
            if (buf[i] == buf[i + 1]) {
                const std::uint8_t d = matrix.at(ra - 1, ca - 1);
                buf[i] = d;
                buf[i + 1] = d;
            } else if (ra == rb) {
                buf[i] = matrix.at(ra, ca - 1);
                buf[i + 1] = matrix.at(rb, cb - 1);
            } else if (ca == cb) {
                buf[i] = matrix.at(ra - 1, ca);
                buf[i + 1] = matrix.at(rb - 1, cb);
            } else {
                buf[i] = matrix.at(ra, cb);
                buf[i + 1] = matrix.at(rb, ca);
            }
        }
        if (i < buf.size()) {
            const int p = pos[buf[i]];
            buf[i] = matrix.at(p >> 4, (p & 15) - 1);
        }
    }
    return buf;
}

CipherText encrypt(std::span<const std::uint8_t> plain,
                   std::span<const std::uint8_t> passphrase) {
    if (plain.empty())
        throw std::invalid_argument("encrypt: empty plaintext");
    const auto params = derive_params(passphrase);
    const auto matrix = generate_key_matrix(params);
    auto stage = vernam_encrypt(plain, matrix, params);
    stage = njjsa_encrypt(stage, matrix, params);
    stage = msa_encrypt(stage, matrix, params);
    return {std::move(stage), plain.size()};
}

std::vector<std::uint8_t> decrypt(const CipherText& cipher,
                                  std::span<const std::uint8_t> passphrase) {
    const auto params = derive_params(passphrase);
    if (cipher.bytes.empty() || cipher.bytes.size() % 32 != 0)
        throw std::invalid_argument("decrypt: ciphertext length must be a positive 32-byte multiple");
    if (cipher.original_length > cipher.bytes.size())
        throw std::invalid_argument("decrypt: declared length exceeds ciphertext size");
    const auto matrix = generate_key_matrix(params);
    auto stage = msa_decrypt(cipher.bytes, matrix, params);
    stage = njjsa_decrypt(stage, matrix, params);
    stage = vernam_decrypt(stage, matrix, params);
    stage.resize(cipher.original_length);
    return stage;
}

}  // namespace qrseal::ttjsa
