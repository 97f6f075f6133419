// Cost of the cryptographic primitives at deployment key sizes. Key
// generation happens once per size, outside the timed region.
#include <benchmark/benchmark.h>

#include "ectl/paillier.hpp"

using namespace ectl;

namespace {

KeyPair& cached_keypair(std::size_t bits) {
    static KeyPair kp256 = keygen(256, 1);
    static KeyPair kp512 = keygen(512, 1);
    static KeyPair kp1024 = keygen(1024, 1);
    switch (bits) {
        case 256: return kp256;
        case 512: return kp512;
        default: return kp1024;
    }
}

}  // namespace

static void BM_Keygen(benchmark::State& state) {
    const auto bits = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        KeyPair kp = keygen(bits, seed++);
        benchmark::DoNotOptimize(kp.pub.n);
    }
}
BENCHMARK(BM_Keygen)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Encrypt(benchmark::State& state) {
    const KeyPair& kp = cached_keypair(static_cast<std::size_t>(state.range(0)));
    SeededRng rng(7);
    const Bigint m = rng.random_below(kp.pub.n);
    for (auto _ : state) {
        Ciphertext c = encrypt(kp.pub, m, rng);
        benchmark::DoNotOptimize(c.value);
    }
}
BENCHMARK(BM_Encrypt)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_Decrypt(benchmark::State& state) {
    const KeyPair& kp = cached_keypair(static_cast<std::size_t>(state.range(0)));
    SeededRng rng(7);
    const Ciphertext c = encrypt(kp.pub, rng.random_below(kp.pub.n), rng);
    for (auto _ : state) {
        Bigint m = decrypt(kp.pub, kp.priv, c);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_Decrypt)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_AddEncrypted(benchmark::State& state) {
    const KeyPair& kp = cached_keypair(static_cast<std::size_t>(state.range(0)));
    SeededRng rng(7);
    const Ciphertext c1 = encrypt(kp.pub, rng.random_below(kp.pub.n), rng);
    const Ciphertext c2 = encrypt(kp.pub, rng.random_below(kp.pub.n), rng);
    for (auto _ : state) {
        Ciphertext c = add_encrypted(kp.pub, c1, c2);
        benchmark::DoNotOptimize(c.value);
    }
}
BENCHMARK(BM_AddEncrypted)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_ScalarMult(benchmark::State& state) {
    const KeyPair& kp = cached_keypair(static_cast<std::size_t>(state.range(0)));
    SeededRng rng(7);
    const Ciphertext c = encrypt(kp.pub, rng.random_below(kp.pub.n), rng);
    const Bigint a = rng.random_below(kp.pub.n);
    for (auto _ : state) {
        Ciphertext r = scalar_mult(kp.pub, a, c);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_ScalarMult)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_LinearCombination4(benchmark::State& state) {
    const KeyPair& kp = cached_keypair(static_cast<std::size_t>(state.range(0)));
    SeededRng rng(7);
    std::vector<Bigint> scalars;
    std::vector<Ciphertext> cts;
    for (int i = 0; i < 4; ++i) {
        scalars.push_back(rng.random_below(kp.pub.n));
        cts.push_back(encrypt(kp.pub, rng.random_below(kp.pub.n), rng));
    }
    for (auto _ : state) {
        Ciphertext r = linear_combination(kp.pub, scalars, cts);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_LinearCombination4)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
