#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ectl/lindesign.hpp"
#include "ectl/polyapprox.hpp"
#include "ectl/transport.hpp"
#include "ectl/zoom.hpp"

namespace ectl {

enum class RunMode { Linear, EventTriggered, Nonlinear };
enum class TransportKind { InProcess, Tcp };

// Everything that determines a closed-loop run. Together with the seed this
// fixes every output byte: the trajectory CSV is identical across repeats
// and across the two transports. key_bits = 0 and q_sat = 0 self-select from
// the design; a key_bits forced below the design's modulus bound is allowed
// on purpose (overflow is then detected at decode time, not prevented).
struct Scenario {
    RunMode mode = RunMode::Linear;
    TransportKind transport = TransportKind::InProcess;
    std::uint64_t seed = 1;
    long horizon = 1000;
    Vec x0;

    // Linear / event-triggered plant and designer gain.
    PlantModel plant;
    Mat k;
    double q_weight = 1.0;  // Lyapunov weight Q = q_weight * I

    // Nonlinear scalar plant x+ = a x + b (u - alpha(x)).
    double nl_a = 0;
    double nl_b = 0;
    double nl_k = 0;
    std::string alpha_name = "zero";
    double x_min = -1;
    double x_max = 1;
    double target_eps = 0.01;  // polynomial fit target
    double delta0 = 0;         // 0: auto
    int freeze_stage = -1;     // < 0: auto
    double c2_radius = 0;      // > 0: pick the freeze stage from this radius

    // Shared design knobs.
    double epsilon = 0.01;
    double safety_factor = 0.9;
    std::int64_t q_sat = 0;     // 0: auto
    std::uint64_t r_max = 1024; // blinding factor bound, >= 2
    std::size_t key_bits = 0;   // 0: auto from the design bound

    double convergence_floor_rel = 1e-9;  // linear modes stop at this * ||x0||
    bool reblind_per_step = false;
    bool always_trigger = false;  // event-triggered only
    bool encrypted = true;        // false: integer-exact plaintext reference
    bool record_timings = false;  // false keeps the CSV wall-clock-free
};

// Throws ConfigError on any structural defect (dimensions, ranges, mode
// mismatches). Every run entry point calls this first.
void validate_scenario(const Scenario& s);

// Smallest power-of-two bit length whose minimum modulus (two top-bit-forced
// primes) clears n_min with at least 8 bits of margin; never below 16.
std::size_t auto_key_bits(const Bigint& n_min);

// Linear design products for a scenario (modes Linear / EventTriggered).
LinearDesign linear_design_for(const Scenario& s);

// Nonlinear design products: polynomial fit, quantizer schedule, freeze
// stage, and the per-stage error constants the containment argument needs.
struct NonlinearDesign {
    NonlinearModel model;
    PolyApprox approx;
    double delta0 = 0;
    std::int64_t q_sat = 1;
    int freeze_stage = 0;
    double theta = 0;
    double omega = 0;             // stage contraction ratio, in (0, 1)
    double update_threshold = 0;  // on |x_q| at the stage sensitivity
    double k_worst = 0;           // |k| + delta0/2
    double s_worst = 0;           // |a - b k| + |b| delta0/2
    double m_worst = 0;           // max over stages of eps1_i + eps2_i
    std::vector<double> stage_delta;   // size freeze_stage + 1
    std::vector<double> stage_radius;  // delta_i * (q_sat - 1/2)
    std::vector<double> stage_m;       // certified per-stage error constant
    Bigint r_max;
    Bigint n_min;

    // Folded controller vector length: degree-0 fits still carry the linear
    // slot that holds -k.
    int p_eff() const { return approx.degree() < 1 ? 1 : approx.degree(); }

    // Levels of c_q - k_q e_2 at the given sensitivity, as a 1-row matrix.
    IntMat folded_gain_levels(double delta) const;
};

NonlinearDesign nonlinear_design_for(const Scenario& s);

struct StepRecord {
    long t = 0;
    Vec x;
    Vec u;
    double delta = 0;
    ZoomPhase phase = ZoomPhase::ZoomOut;
    int stage = -1;
    bool triggered = false;  // a quantized state actually went out this step
    double crypto_ms = 0;    // 0 unless the scenario records timings
};

struct RunMetrics {
    long steps = 0;
    long t0 = -1;                    // capture instant; 0 in nonlinear mode
    std::vector<long> update_times;  // zoom stage advances (freeze included)
    long trigger_count = 0;
    double final_norm = 0;
    std::size_t key_bits = 0;   // 0 for plaintext reference runs
    double crypto_ms_mean = 0;  // always measured, never in the CSV
};

struct TrajectoryRecord {
    std::vector<StepRecord> steps;
    RunMetrics metrics;
};

// Runs the scenario end to end, owning the transport (in-process queue pair
// or a TCP loopback connection plus a controller thread). plant_tap, when
// set, observes every serialized frame the plant sends controller-ward.
TrajectoryRecord run_scenario(
    const Scenario& s,
    const std::function<void(const std::vector<std::uint8_t>&)>& plant_tap = {});

// Plant side only, over an established channel whose peer speaks the
// controller protocol; sends Shutdown when the run ends. Used by the
// two-process deployment.
TrajectoryRecord run_plant_on_channel(const Scenario& s, MessageChannel& channel);

// Renders the record in the stable CSV schema: a version comment, a header
// row "t,x_0..,u_0..,delta,phase,stage,triggered,crypto_ms", then one row
// per step with doubles in round-trip precision.
std::string trajectory_csv(const TrajectoryRecord& record);

}  // namespace ectl
