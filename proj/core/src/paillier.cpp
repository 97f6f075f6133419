#include "ectl/paillier.hpp"

#include <sstream>

#include "ectl/errors.hpp"

namespace ectl {

namespace {

// L(x) = (x - 1) / n, defined on x == 1 mod n.
Bigint ell(const Bigint& x, const Bigint& n) { return (x - 1) / n; }

bool miller_rabin_witness(const Bigint& n, const Bigint& a, const Bigint& d, unsigned long s) {
    Bigint x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == n - 1) return false;
    }
    return true;  // composite witness found
}

}  // namespace

bool is_probable_prime(const Bigint& n, SeededRng& rng, int rounds) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    // n is odd and > 37 here: write n - 1 = d * 2^s with d odd.
    Bigint d = n - 1;
    unsigned long s = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d >>= 1;
        ++s;
    }
    for (int i = 0; i < rounds; ++i) {
        Bigint a = rng.random_below(n - 3) + 2;  // witness in [2, n-2]
        if (miller_rabin_witness(n, a, d, s)) return false;
    }
    return true;
}

namespace {

// Searches for a prime of exactly `bits` bits. Candidates have the top bit and
// LSB forced; the attempt budget bounds the search deterministically.
Bigint random_prime(std::size_t bits, SeededRng& rng) {
    if (bits < 2) throw PrimeSearchExhausted("random_prime: need at least 2 bits");
    const int max_attempts = 64 * static_cast<int>(bits) + 256;
    for (int i = 0; i < max_attempts; ++i) {
        Bigint cand = rng.random_bits(bits);
        if (bits > 1) mpz_setbit(cand.get_mpz_t(), 0);
        if (is_probable_prime(cand, rng)) return cand;
    }
    throw PrimeSearchExhausted("random_prime: attempt budget exhausted");
}

}  // namespace

KeyPair keypair_from_primes(const Bigint& p, const Bigint& q) {
    if (p == q) throw PrimeSearchExhausted("keypair_from_primes: p == q");
    Bigint n = p * q;
    Bigint phi_like = (p - 1) * (q - 1);
    if (gcd(n, phi_like) != 1)
        throw PrimeSearchExhausted("keypair_from_primes: gcd(pq, (p-1)(q-1)) != 1");
    KeyPair kp;
    kp.pub.n = n;
    kp.pub.g = n + 1;
    kp.pub.n_squared = n * n;
    kp.priv.lambda = lcm(p - 1, q - 1);
    Bigint gl = mod_pow(kp.pub.g, kp.priv.lambda, kp.pub.n_squared);
    kp.priv.mu = mod_inverse(ell(gl, n), n);
    return kp;
}

KeyPair keygen(std::size_t bit_length, std::uint64_t seed) {
    if (bit_length < 4) throw PrimeSearchExhausted("keygen: bit_length too small");
    SeededRng rng = SeededRng(seed).derive(0x6b65796765ull);  // keygen stream
    const int max_pairs = 256;
    for (int i = 0; i < max_pairs; ++i) {
        Bigint p = random_prime(bit_length / 2, rng);
        Bigint q = random_prime(bit_length / 2, rng);
        if (p == q) continue;
        if (gcd(p * q, (p - 1) * (q - 1)) != 1) continue;
        return keypair_from_primes(p, q);
    }
    throw PrimeSearchExhausted("keygen: no valid prime pair found");
}

Ciphertext encrypt(const PublicKey& pk, const Bigint& m, SeededRng& rng) {
    if (m < 0 || m >= pk.n) throw MessageOutOfRange("encrypt: message outside [0, n)");
    Bigint r;
    do {
        r = rng.random_below(pk.n - 1) + 1;  // [1, n)
    } while (gcd(r, pk.n) != 1);
    Bigint gm;
    if (pk.g == pk.n + 1) {
        gm = (1 + m * pk.n) % pk.n_squared;  // (n+1)^m collapses mod n^2
    } else {
        gm = mod_pow(pk.g, m, pk.n_squared);
    }
    Ciphertext c;
    c.value = (gm * mod_pow(r, pk.n, pk.n_squared)) % pk.n_squared;
    return c;
}

Bigint decrypt(const PublicKey& pk, const PrivateKey& sk, const Ciphertext& c) {
    if (c.value <= 0 || c.value >= pk.n_squared)
        throw CiphertextOutOfRange("decrypt: ciphertext outside (0, n^2)");
    Bigint u = mod_pow(c.value, sk.lambda, pk.n_squared);
    return (ell(u, pk.n) * sk.mu) % pk.n;
}

Ciphertext add_encrypted(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
    if (c1.value <= 0 || c1.value >= pk.n_squared || c2.value <= 0 || c2.value >= pk.n_squared)
        throw CiphertextOutOfRange("add_encrypted: ciphertext outside (0, n^2)");
    return Ciphertext{(c1.value * c2.value) % pk.n_squared};
}

Ciphertext scalar_mult(const PublicKey& pk, const Bigint& a, const Ciphertext& c) {
    if (a < 0 || a >= pk.n) throw ScalarOutOfRange("scalar_mult: scalar outside [0, n)");
    if (c.value <= 0 || c.value >= pk.n_squared)
        throw CiphertextOutOfRange("scalar_mult: ciphertext outside (0, n^2)");
    return Ciphertext{mod_pow(c.value, a, pk.n_squared)};
}

Ciphertext linear_combination(const PublicKey& pk,
                              const std::vector<Bigint>& scalars,
                              const std::vector<Ciphertext>& cts) {
    if (scalars.empty() || scalars.size() != cts.size())
        throw LengthMismatch("linear_combination: need equal nonzero lengths");
    Ciphertext acc = scalar_mult(pk, scalars[0], cts[0]);
    for (std::size_t i = 1; i < scalars.size(); ++i)
        acc = add_encrypted(pk, acc, scalar_mult(pk, scalars[i], cts[i]));
    return acc;
}

BlindingKey make_blinding_key(const Bigint& r_max, SeededRng& rng) {
    if (r_max < 2) throw ScalarOutOfRange("make_blinding_key: r_max must be >= 2");
    BlindingKey bk;
    bk.r_max = r_max;
    bk.r = rng.random_below(r_max - 1) + 1;  // [1, r_max)
    return bk;
}

Bigint blind(const BlindingKey& bk, const Bigint& m) { return bk.r * m; }

Bigint unblind(const BlindingKey& bk, const Bigint& c) {
    Bigint q, rem;
    mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), c.get_mpz_t(), bk.r.get_mpz_t());
    if (rem != 0) throw NotDivisible("unblind: value is not a multiple of r");
    return q;
}

std::string serialize_keypair(const KeyPair& kp) {
    std::ostringstream os;
    os << "ectl-paillier-keypair v1\n";
    os << "n = " << kp.pub.n.get_str(10) << "\n";
    os << "g = " << kp.pub.g.get_str(10) << "\n";
    os << "lambda = " << kp.priv.lambda.get_str(10) << "\n";
    os << "mu = " << kp.priv.mu.get_str(10) << "\n";
    return os.str();
}

KeyPair deserialize_keypair(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "ectl-paillier-keypair v1")
        throw ConfigError("key file: bad header");
    KeyPair kp;
    bool have_n = false, have_g = false, have_l = false, have_m = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto eq = line.find(" = ");
        if (eq == std::string::npos) throw ConfigError("key file: malformed line: " + line);
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 3);
        Bigint v;
        if (v.set_str(val, 10) != 0) throw ConfigError("key file: bad integer for " + key);
        if (key == "n") { kp.pub.n = v; have_n = true; }
        else if (key == "g") { kp.pub.g = v; have_g = true; }
        else if (key == "lambda") { kp.priv.lambda = v; have_l = true; }
        else if (key == "mu") { kp.priv.mu = v; have_m = true; }
        else throw ConfigError("key file: unknown field " + key);
    }
    if (!(have_n && have_g && have_l && have_m))
        throw ConfigError("key file: missing fields");
    kp.pub.n_squared = kp.pub.n * kp.pub.n;
    return kp;
}

}  // namespace ectl
