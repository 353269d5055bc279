#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qrseal/gf256.hpp"

namespace qrseal::rs {

// Reed-Solomon over GF(2^8) in the QR convention: generator roots start at
// alpha^0, codeword = data followed by ec_count parity bytes, and a block of
// ec_count parity bytes corrects up to floor(ec_count / 2) byte errors.

// g(x) = product of (x - alpha^k) for k = 0 .. ec_count-1. Monic, degree ec_count.
gf256::Poly generator_poly(int ec_count);

// Parity bytes for data: the remainder of data(x) * x^ec_count divided by g(x).
std::vector<std::uint8_t> encode(std::span<const std::uint8_t> data, int ec_count);

struct Corrected {
    std::vector<std::uint8_t> data;  // data portion only, errors repaired
    int errors_fixed;
};

// received is data followed by ec_count parity bytes. Repairs up to
// floor(ec_count / 2) byte errors; throws UnrecoverableBlockError beyond that.
Corrected correct(std::span<const std::uint8_t> received, int ec_count);

}  // namespace qrseal::rs
