#include "qrseal/rs.hpp"

#include <cstddef>
#include <stdexcept>

#include "qrseal/errors.hpp"

namespace qrseal::rs {

using gf256::alpha_pow;
using gf256::Poly;

gf256::Poly generator_poly(int ec_count) {
    if (ec_count < 1 || ec_count > 68)
        throw std::invalid_argument("ec_count out of range [1, 68]");
    Poly g = Poly::from_coeffs({1});
    for (int k = 0; k < ec_count; ++k) {
        // multiply by (x - alpha^k); minus is plus in characteristic 2
        Poly factor = Poly::from_coeffs({1, alpha_pow(k)});
        g = gf256::mul(g, factor);
    }
    return g;
}

std::vector<std::uint8_t> encode(std::span<const std::uint8_t> data, int ec_count) {
    if (data.empty())
        throw std::invalid_argument("cannot encode an empty block");
    if (ec_count < 1 || ec_count > 68)
        throw std::invalid_argument("ec_count out of range [1, 68]");
    if (data.size() + static_cast<std::size_t>(ec_count) > 255)
        throw std::invalid_argument("block longer than the field allows");

    Poly g = generator_poly(ec_count);

    // Synthetic division of data(x) * x^ec_count by the monic generator.
    std::vector<std::uint8_t> work(data.begin(), data.end());
    work.resize(data.size() + static_cast<std::size_t>(ec_count), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint8_t coef = work[i];
        if (coef == 0)
            continue;
        for (std::size_t j = 1; j < g.coeffs.size(); ++j)
            work[i + j] ^= gf256::mul(g.coeffs[j], coef);
    }
    return std::vector<std::uint8_t>(work.end() - ec_count, work.end());
}

namespace {

// Polynomials in this decoder are lowest degree first (natural for
// Berlekamp-Massey); the public Poly type is not used here.
using VecPoly = std::vector<std::uint8_t>;

std::uint8_t eval_low_first(const VecPoly& p, std::uint8_t x) {
    std::uint8_t acc = 0;
    for (std::size_t i = p.size(); i-- > 0;)
        acc = static_cast<std::uint8_t>(gf256::mul(acc, x) ^ p[i]);
    return acc;
}

std::vector<std::uint8_t> syndromes(std::span<const std::uint8_t> received, int count) {
    std::vector<std::uint8_t> s(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        std::uint8_t x = alpha_pow(j);
        std::uint8_t acc = 0;
        for (std::uint8_t byte : received)
            acc = static_cast<std::uint8_t>(gf256::mul(acc, x) ^ byte);
        s[static_cast<std::size_t>(j)] = acc;
    }
    return s;
}

// Berlekamp-Massey: smallest LFSR generating the syndrome sequence.
VecPoly find_locator(const std::vector<std::uint8_t>& synd) {
    VecPoly lambda{1};
    VecPoly prev{1};
    std::uint8_t b = 1;
    int m = 1;
    int L = 0;

    for (std::size_t n = 0; n < synd.size(); ++n) {
        std::uint8_t delta = synd[n];
        for (int i = 1; i <= L && i < static_cast<int>(lambda.size()); ++i)
            delta ^= gf256::mul(lambda[static_cast<std::size_t>(i)], synd[n - static_cast<std::size_t>(i)]);

        if (delta == 0) {
            ++m;
            continue;
        }

        VecPoly shifted(prev.size() + static_cast<std::size_t>(m), 0);
        std::uint8_t scale = gf256::mul(delta, gf256::inverse(b));
        for (std::size_t i = 0; i < prev.size(); ++i)
            shifted[i + static_cast<std::size_t>(m)] = gf256::mul(prev[i], scale);

        VecPoly next = lambda;
        if (next.size() < shifted.size())
            next.resize(shifted.size(), 0);
        for (std::size_t i = 0; i < shifted.size(); ++i)
            next[i] ^= shifted[i];

        if (2 * L <= static_cast<int>(n)) {
            prev = lambda;
            b = delta;
            L = static_cast<int>(n) + 1 - L;
            m = 1;
        } else {
            ++m;
        }
        lambda = std::move(next);
    }

    while (!lambda.empty() && lambda.back() == 0)
        lambda.pop_back();
    return lambda;
}

}  // namespace

Corrected correct(std::span<const std::uint8_t> received, int ec_count) {
    if (ec_count < 1 || ec_count > 68)
        throw std::invalid_argument("ec_count out of range [1, 68]");
    if (received.size() <= static_cast<std::size_t>(ec_count))
        throw std::invalid_argument("received block holds no data bytes");
    if (received.size() > 255)
        throw std::invalid_argument("block longer than the field allows");

    const int n = static_cast<int>(received.size());
    const int t = ec_count / 2;
    std::vector<std::uint8_t> word(received.begin(), received.end());

    std::vector<std::uint8_t> synd = syndromes(word, ec_count);
    bool clean = true;
    for (std::uint8_t s : synd)
        if (s != 0)
            clean = false;
    if (clean)
        return {std::vector<std::uint8_t>(word.begin(), word.end() - ec_count), 0};

    VecPoly lambda = find_locator(synd);
    int num_errors = static_cast<int>(lambda.size()) - 1;
    if (num_errors < 1 || num_errors > t)
        throw UnrecoverableBlockError("error locator degree exceeds correction capability");

    // Exhaustive root search: position p (0 = first byte) has locator X = alpha^(n-1-p),
    // and X is an error location iff lambda(X^-1) == 0.
    std::vector<int> positions;
    std::vector<std::uint8_t> locators;
    for (int p = 0; p < n; ++p) {
        std::uint8_t x = alpha_pow(n - 1 - p);
        if (eval_low_first(lambda, gf256::inverse(x)) == 0) {
            positions.push_back(p);
            locators.push_back(x);
        }
    }
    if (static_cast<int>(positions.size()) != num_errors)
        throw UnrecoverableBlockError("error locator roots do not match its degree");

    // Omega = S(x) * lambda(x) mod x^ec_count.
    VecPoly omega(static_cast<std::size_t>(ec_count), 0);
    for (std::size_t i = 0; i < synd.size(); ++i)
        for (std::size_t j = 0; j < lambda.size() && i + j < omega.size(); ++j)
            omega[i + j] ^= gf256::mul(synd[i], lambda[j]);

    // Forney with first generator root alpha^0: e = X * omega(X^-1) / lambda'(X^-1).
    for (std::size_t k = 0; k < positions.size(); ++k) {
        std::uint8_t xinv = gf256::inverse(locators[k]);
        std::uint8_t num = eval_low_first(omega, xinv);
        std::uint8_t den = 0;
        for (std::size_t i = 1; i < lambda.size(); i += 2) {
            // formal derivative keeps odd-degree terms only
            std::uint8_t term = lambda[i];
            for (std::size_t j = 0; j + 1 < i; ++j)
                term = gf256::mul(term, xinv);
            den ^= term;
        }
        if (den == 0)
            throw UnrecoverableBlockError("error evaluator is singular at a located position");
        std::uint8_t magnitude = gf256::mul(locators[k], gf256::mul(num, gf256::inverse(den)));
        if (magnitude == 0)
            throw UnrecoverableBlockError("located position carries a zero error magnitude");
        word[static_cast<std::size_t>(positions[k])] ^= magnitude;
    }

    for (std::uint8_t s : syndromes(word, ec_count))
        if (s != 0)
            throw UnrecoverableBlockError("corrected block still fails the syndrome check");

    return {std::vector<std::uint8_t>(word.begin(), word.end() - ec_count), num_errors};
}

}  // namespace qrseal::rs
