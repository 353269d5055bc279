#include "qrseal/gf256.hpp"

#include <array>
#include <stdexcept>

namespace qrseal::gf256 {

namespace {

constexpr int kReduction = 0x11D;

struct Tables {
    // exp is doubled so mul can add logs without a modulo.
    std::array<std::uint8_t, 512> exp{};
    std::array<std::int16_t, 256> log{};
};

constexpr Tables build_tables() {
    Tables t{};
    int x = 1;
    for (int i = 0; i < 255; ++i) {
        t.exp[i] = static_cast<std::uint8_t>(x);
        t.log[x] = static_cast<std::int16_t>(i);
        x <<= 1;
        if (x & 0x100)
            x ^= kReduction;
    }
    for (int i = 255; i < 512; ++i)
        t.exp[i] = t.exp[i - 255];
    t.log[0] = -1;
    return t;
}

constexpr Tables kTables = build_tables();

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0)
        return 0;
    return kTables.exp[kTables.log[a] + kTables.log[b]];
}

std::uint8_t alpha_pow(int n) {
    int r = n % 255;
    if (r < 0)
        r += 255;
    return kTables.exp[r];
}

int log_alpha(std::uint8_t a) {
    if (a == 0)
        throw std::invalid_argument("log of zero is undefined");
    return kTables.log[a];
}

std::uint8_t inverse(std::uint8_t a) {
    if (a == 0)
        throw std::invalid_argument("zero has no multiplicative inverse");
    return kTables.exp[255 - kTables.log[a]];
}

Poly Poly::from_coeffs(std::vector<std::uint8_t> c) {
    std::size_t lead = 0;
    while (lead < c.size() && c[lead] == 0)
        ++lead;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead));
    return Poly{std::move(c)};
}

std::uint8_t Poly::eval(std::uint8_t x) const {
    std::uint8_t acc = 0;
    for (std::uint8_t c : coeffs)
        acc = static_cast<std::uint8_t>(mul(acc, x) ^ c);
    return acc;
}

Poly add(const Poly& a, const Poly& b) {
    const auto& longer = a.coeffs.size() >= b.coeffs.size() ? a : b;
    const auto& shorter = a.coeffs.size() >= b.coeffs.size() ? b : a;
    std::vector<std::uint8_t> out = longer.coeffs;
    std::size_t off = longer.coeffs.size() - shorter.coeffs.size();
    for (std::size_t i = 0; i < shorter.coeffs.size(); ++i)
        out[off + i] ^= shorter.coeffs[i];
    return Poly::from_coeffs(std::move(out));
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero())
        return Poly::zero();
    std::vector<std::uint8_t> out(a.coeffs.size() + b.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            out[i + j] ^= mul(a.coeffs[i], b.coeffs[j]);
    return Poly::from_coeffs(std::move(out));
}

std::pair<Poly, Poly> divmod(const Poly& dividend, const Poly& divisor) {
    if (divisor.is_zero())
        throw std::invalid_argument("division by the zero polynomial");
    if (dividend.degree() < divisor.degree())
        return {Poly::zero(), dividend};

    std::vector<std::uint8_t> work = dividend.coeffs;
    std::size_t qlen = work.size() - divisor.coeffs.size() + 1;
    std::vector<std::uint8_t> quot(qlen, 0);
    std::uint8_t lead_inv = inverse(divisor.coeffs[0]);

    for (std::size_t i = 0; i < qlen; ++i) {
        std::uint8_t factor = mul(work[i], lead_inv);
        quot[i] = factor;
        if (factor == 0)
            continue;
        for (std::size_t j = 0; j < divisor.coeffs.size(); ++j)
            work[i + j] ^= mul(factor, divisor.coeffs[j]);
    }

    std::vector<std::uint8_t> rem(work.end() - (divisor.coeffs.size() - 1), work.end());
    return {Poly::from_coeffs(std::move(quot)), Poly::from_coeffs(std::move(rem))};
}

}  // namespace qrseal::gf256
