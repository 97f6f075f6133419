#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ectl {

using Bigint = mpz_class;

// Big-endian minimal magnitude bytes; zero encodes as the empty vector.
std::vector<std::uint8_t> to_bytes_be(const Bigint& v);
Bigint from_bytes_be(const std::uint8_t* data, std::size_t len);

std::size_t bit_length(const Bigint& v);
Bigint mod_pow(const Bigint& base, const Bigint& exp, const Bigint& mod);
Bigint mod_inverse(const Bigint& v, const Bigint& mod);  // throws NotDivisible if none
Bigint gcd(const Bigint& a, const Bigint& b);
Bigint lcm(const Bigint& a, const Bigint& b);

// Checked narrowing; throws OverflowDetected when the value does not fit.
std::int64_t to_int64(const Bigint& v);

// Deterministic random source. Draws come from std::mt19937_64, which the
// C++ standard pins bit-for-bit, so identical seeds reproduce identical
// streams on every platform. derive() forks an independent stream so
// concurrent users never share state.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform over [0, 2^bits) with the top bit forced, so the result has
    // exactly `bits` binary digits. bits >= 1.
    Bigint random_bits(std::size_t bits);

    // Uniform over [0, bound) by rejection. bound >= 1.
    Bigint random_below(const Bigint& bound);

    SeededRng derive(std::uint64_t stream) const;

private:
    std::mt19937_64 gen_;
    std::uint64_t seed_;
};

}  // namespace ectl
