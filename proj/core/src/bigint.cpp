#include "ectl/bigint.hpp"

#include "ectl/errors.hpp"

namespace ectl {

std::vector<std::uint8_t> to_bytes_be(const Bigint& v) {
    if (v < 0) throw OverflowDetected("to_bytes_be: negative value");
    if (v == 0) return {};
    std::vector<std::uint8_t> out((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
    std::size_t count = 0;
    mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    out.resize(count);
    return out;
}

Bigint from_bytes_be(const std::uint8_t* data, std::size_t len) {
    Bigint v;
    if (len > 0) mpz_import(v.get_mpz_t(), len, 1, 1, 1, 0, data);
    return v;
}

std::size_t bit_length(const Bigint& v) {
    if (v == 0) return 0;
    return mpz_sizeinbase(v.get_mpz_t(), 2);
}

Bigint mod_pow(const Bigint& base, const Bigint& exp, const Bigint& mod) {
    Bigint r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

Bigint mod_inverse(const Bigint& v, const Bigint& mod) {
    Bigint r;
    if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw NotDivisible("mod_inverse: value not invertible");
    return r;
}

Bigint gcd(const Bigint& a, const Bigint& b) {
    Bigint r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Bigint lcm(const Bigint& a, const Bigint& b) {
    Bigint r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

std::int64_t to_int64(const Bigint& v) {
    if (!v.fits_slong_p()) throw OverflowDetected("to_int64: value exceeds 64 bits");
    return static_cast<std::int64_t>(v.get_si());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

std::uint64_t SeededRng::next_u64() { return gen_(); }

Bigint SeededRng::random_bits(std::size_t bits) {
    if (bits == 0) throw ScalarOutOfRange("random_bits: bits must be positive");
    std::size_t words = (bits + 63) / 64;
    Bigint v = 0;
    for (std::size_t i = 0; i < words; ++i) {
        v <<= 64;
        v |= Bigint(static_cast<unsigned long>(next_u64()));
    }
    v >>= (words * 64 - bits);
    mpz_setbit(v.get_mpz_t(), bits - 1);
    return v;
}

Bigint SeededRng::random_below(const Bigint& bound) {
    if (bound <= 0) throw ScalarOutOfRange("random_below: bound must be positive");
    if (bound == 1) return 0;
    std::size_t bits = bit_length(bound);
    std::size_t words = (bits + 63) / 64;
    for (;;) {
        Bigint v = 0;
        for (std::size_t i = 0; i < words; ++i) {
            v <<= 64;
            v |= Bigint(static_cast<unsigned long>(next_u64()));
        }
        v >>= (words * 64 - bits);
        if (v < bound) return v;
    }
}

SeededRng SeededRng::derive(std::uint64_t stream) const {
    return SeededRng(splitmix64(seed_ ^ splitmix64(stream)));
}

}  // namespace ectl
