// Per-step cost of the encrypted control path: the controller's homomorphic
// input computation at a deployment key size, and a whole desk-scale loop.
#include <benchmark/benchmark.h>

#include "ectl/lindesign.hpp"
#include "ectl/nodes.hpp"
#include "ectl/simloop.hpp"

using namespace ectl;

namespace {

Scenario scalar_scenario() {
    Scenario s;
    s.mode = RunMode::Linear;
    s.seed = 7;
    s.horizon = 50;
    s.x0 = Vec::Constant(1, 10.0);
    s.plant.a = Mat::Constant(1, 1, 2.0);
    s.plant.b = Mat::Constant(1, 1, 1.0);
    s.k = Mat::Constant(1, 1, 1.5);
    s.q_sat = 10;
    s.convergence_floor_rel = 0;
    return s;
}

}  // namespace

// One controller step on a double-integrator state at a 512-bit key:
// two scalar exponentiations and a homomorphic sum behind one frame.
static void BM_ControllerComputeInput(benchmark::State& state) {
    KeyPair kp = keygen(static_cast<std::size_t>(state.range(0)), 1);
    SeededRng enc_rng(11), blind_rng(12);
    PlantCrypto plant(kp, Bigint(1024), enc_rng, blind_rng);

    IntMat gain(1, 2);
    gain << 3, 14;
    ControllerState ctl;
    ctl.handle(plant.pubkey_msg());
    ctl.handle(SensitivityEpochMsg{0});
    ctl.handle(plant.emit_gain(gain, -1, 0));

    IntVec levels(2);
    levels << -7, 42;
    const EncStateMsg msg = plant.emit_state(levels, 0);

    for (auto _ : state) {
        EncInputMsg out = ctl.compute_input(msg);
        benchmark::DoNotOptimize(out.epoch);
    }
}
BENCHMARK(BM_ControllerComputeInput)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

// Plant-side cost of one state emission (quantize + encrypt per entry).
static void BM_PlantEmitState(benchmark::State& state) {
    KeyPair kp = keygen(static_cast<std::size_t>(state.range(0)), 1);
    SeededRng enc_rng(11), blind_rng(12);
    PlantCrypto plant(kp, Bigint(1024), enc_rng, blind_rng);
    IntVec levels(2);
    levels << -7, 42;
    for (auto _ : state) {
        EncStateMsg out = plant.emit_state(levels, 0);
        benchmark::DoNotOptimize(out.epoch);
    }
}
BENCHMARK(BM_PlantEmitState)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

// A full 50-step encrypted run, transport and zoom schedule included, at the
// scenario's self-selected (small) key size and at a deployment size.
static void BM_FullEncryptedRun(benchmark::State& state) {
    Scenario s = scalar_scenario();
    s.encrypted = true;
    s.key_bits = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        TrajectoryRecord rec = run_scenario(s);
        benchmark::DoNotOptimize(rec.metrics.final_norm);
    }
}
BENCHMARK(BM_FullEncryptedRun)->Arg(0)->Arg(256)->Unit(benchmark::kMillisecond);

// The integer-exact reference loop, for the crypto-vs-logic cost split.
static void BM_FullPlaintextRun(benchmark::State& state) {
    Scenario s = scalar_scenario();
    s.encrypted = false;
    for (auto _ : state) {
        TrajectoryRecord rec = run_scenario(s);
        benchmark::DoNotOptimize(rec.metrics.final_norm);
    }
}
BENCHMARK(BM_FullPlaintextRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
