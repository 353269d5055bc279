#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qrseal::ttjsa {

// 16x16 permutation of the byte values 0..255, stored row-major.
struct KeyMatrix {
    std::array<std::uint8_t, 256> cells{};

    std::uint8_t at(int row, int col) const {
        return cells[static_cast<std::size_t>((row & 15) * 16 + (col & 15))];
    }
    void put(int row, int col, std::uint8_t v) {
        cells[static_cast<std::size_t>((row & 15) * 16 + (col & 15))] = v;
    }
};

struct CipherParams {
    std::uint32_t num = 0;
    int times = 1;    // pass/repetition count, 1..32
    int secure = 0;   // round-count seed, 0..255
};

struct CipherText {
    std::vector<std::uint8_t> bytes;
    std::size_t original_length = 0;
};

CipherParams derive_params(std::span<const std::uint8_t> passphrase);
KeyMatrix generate_key_matrix(const CipherParams& params);

// Matrix randomization steps; amounts wrap modulo 16. Used by
// generate_key_matrix and exposed for targeted testing.
void cycling(KeyMatrix& m);                    // each concentric ring one step clockwise
void upshift(KeyMatrix& m, int amount);        // columns rotated up
void downshift(KeyMatrix& m, int amount);      // columns rotated down
void leftshift(KeyMatrix& m, int amount);      // rows rotated left
void rightshift(KeyMatrix& m, int amount);     // rows rotated right

std::vector<std::uint8_t> vernam_encrypt(std::span<const std::uint8_t> plain,
                                         const KeyMatrix& matrix, const CipherParams& params);
std::vector<std::uint8_t> vernam_decrypt(std::span<const std::uint8_t> cipher,
                                         const KeyMatrix& matrix, const CipherParams& params);

// Pads to a 32-byte multiple with zero bytes; the true length is carried by
// CipherText.original_length, never guessed from the padding.
std::vector<std::uint8_t> njjsa_encrypt(std::span<const std::uint8_t> data,
                                        const KeyMatrix& matrix, const CipherParams& params);
std::vector<std::uint8_t> njjsa_decrypt(std::span<const std::uint8_t> data,
                                        const KeyMatrix& matrix, const CipherParams& params);

std::vector<std::uint8_t> msa_encrypt(std::span<const std::uint8_t> data,
                                      const KeyMatrix& matrix, const CipherParams& params);
std::vector<std::uint8_t> msa_decrypt(std::span<const std::uint8_t> data,
                                      const KeyMatrix& matrix, const CipherParams& params);

CipherText encrypt(std::span<const std::uint8_t> plain,
                   std::span<const std::uint8_t> passphrase);
std::vector<std::uint8_t> decrypt(const CipherText& cipher,
                                  std::span<const std::uint8_t> passphrase);

}  // namespace qrseal::ttjsa
