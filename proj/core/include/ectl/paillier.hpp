#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ectl/bigint.hpp"

namespace ectl {

// Additively homomorphic cryptosystem over Z_N with ciphertexts in Z*_{N^2}.
// Messages are residues in [0, N); signed quantities ride on the upper half
// of the residue ring (see encoding.hpp).

struct PublicKey {
    Bigint n;
    Bigint g;          // fixed to n + 1 by keygen
    Bigint n_squared;

    std::size_t bits() const { return bit_length(n); }
};

struct PrivateKey {
    Bigint lambda;  // lcm(p-1, q-1)
    Bigint mu;      // (L(g^lambda mod n^2))^{-1} mod n
};

struct KeyPair {
    PublicKey pub;
    PrivateKey priv;
};

struct Ciphertext {
    Bigint value;
    bool operator==(const Ciphertext& o) const { return value == o.value; }
};

// Multiplicative one-time pad for gain entries: blind(m) = r*m over the
// integers, unblind divides exactly. r is drawn uniformly from [1, r_max).
struct BlindingKey {
    Bigint r;
    Bigint r_max;
};

// Probabilistic Miller-Rabin, 40 rounds with witnesses from rng.
bool is_probable_prime(const Bigint& n, SeededRng& rng, int rounds = 40);

// Generates p, q of bit_length/2 bits each with p != q and
// gcd(pq, (p-1)(q-1)) == 1. Identical seeds reproduce identical keys.
// Throws PrimeSearchExhausted when the candidate budget runs out
// (bit_length too small to admit a valid pair).
KeyPair keygen(std::size_t bit_length, std::uint64_t seed);

// Assembles a key pair from caller-supplied primes; used by tests to pin
// tiny parameter sets. Validates the same keygen constraints.
KeyPair keypair_from_primes(const Bigint& p, const Bigint& q);

// c = g^m * r^n mod n^2 with r uniform in Z*_n. Throws MessageOutOfRange
// unless 0 <= m < n.
Ciphertext encrypt(const PublicKey& pk, const Bigint& m, SeededRng& rng);

// m = L(c^lambda mod n^2) * mu mod n where L(x) = (x-1)/n.
// Throws CiphertextOutOfRange unless 0 < c < n^2.
Bigint decrypt(const PublicKey& pk, const PrivateKey& sk, const Ciphertext& c);

// decrypt(result) == m1 + m2 mod n.
Ciphertext add_encrypted(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2);

// decrypt(result) == a * m mod n. Throws ScalarOutOfRange unless 0 <= a < n.
Ciphertext scalar_mult(const PublicKey& pk, const Bigint& a, const Ciphertext& c);

// decrypt(result) == sum_i a_i * m_i mod n. Lengths must match and be >= 1.
Ciphertext linear_combination(const PublicKey& pk,
                              const std::vector<Bigint>& scalars,
                              const std::vector<Ciphertext>& cts);

BlindingKey make_blinding_key(const Bigint& r_max, SeededRng& rng);
Bigint blind(const BlindingKey& bk, const Bigint& m);
// Exact inverse of blind; throws NotDivisible when c is not a multiple of r.
Bigint unblind(const BlindingKey& bk, const Bigint& c);

// Key-pair (de)serialization: a small text document with decimal fields.
std::string serialize_keypair(const KeyPair& kp);
KeyPair deserialize_keypair(const std::string& text);

}  // namespace ectl
