#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace qrseal::gf256 {

// Arithmetic in GF(2^8) with reduction polynomial x^8+x^4+x^3+x^2+1 (0x11D)
// and generator alpha = 2, the field used by QR error correction.

std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t alpha_pow(int n);         // alpha^n, exponent reduced mod 255
int log_alpha(std::uint8_t a);         // discrete log base alpha; throws on 0
std::uint8_t inverse(std::uint8_t a);  // multiplicative inverse; throws on 0

// Dense polynomial over GF(2^8), coefficients highest degree first.
// The zero polynomial is an empty coefficient vector; a nonzero polynomial
// never has a leading zero coefficient.
struct Poly {
    std::vector<std::uint8_t> coeffs;

    static Poly zero() { return Poly{}; }
    static Poly from_coeffs(std::vector<std::uint8_t> c);  // strips leading zeros

    bool is_zero() const { return coeffs.empty(); }
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    std::uint8_t eval(std::uint8_t x) const;
};

Poly add(const Poly& a, const Poly& b);  // addition and subtraction are both XOR
Poly mul(const Poly& a, const Poly& b);

// Long division: returns (quotient, remainder) with
// dividend = quotient * divisor + remainder and deg(remainder) < deg(divisor).
// Throws std::invalid_argument on a zero divisor.
std::pair<Poly, Poly> divmod(const Poly& dividend, const Poly& divisor);

}  // namespace qrseal::gf256
