#pragma once

#include <cstdint>

#include "ectl/encoding.hpp"

namespace ectl {

enum class ZoomPhase { ZoomOut, ZoomIn, Frozen };
enum class ZoomEvent { None, Captured, Advanced, Frozen };

// Sublevel set {x : x' P_bar x <= radius_sq} that traps the state for one
// zoom stage.
struct ContainmentRegion {
    Mat p_bar;
    double radius_sq = 0;
    bool contains(const Vec& x) const {
        return (x.transpose() * p_bar * x).value() <= radius_sq;
    }
};

ContainmentRegion containment_region(const Mat& p_bar, double delta, std::int64_t q_sat);

// Time-varying quantizer sensitivity shared by plant and designer. The
// linear schedule opens with a zoom-out phase (sensitivity ||A||^{2t}, no
// meaningful transmission) until the quantized state is small enough to
// capture, then contracts geometrically: Delta_i = Omega^i * Delta_0. The
// nonlinear schedule starts captured at a configured Delta_0 and freezes
// after a fixed number of stages. All thresholds are evaluated on the norm
// of the integer level vector, never on the real state.
class ZoomState {
public:
    static ZoomState linear(double norm_a, double omega, double capture_threshold,
                            double update_threshold, std::int64_t q_sat);
    static ZoomState nonlinear(double delta0, double omega, double update_threshold,
                               std::int64_t q_sat, int freeze_stage);

    // One call per time step, before the state is transmitted. Applies the
    // capture rule (t >= 1) during zoom-out and the stage-advance rule
    // (t >= last event + 1, threshold checked at the pre-advance
    // sensitivity) during zoom-in.
    ZoomEvent observe(long t, const Vec& x);

    double delta(long t) const;
    ZoomPhase phase() const { return phase_; }
    int stage() const { return stage_; }
    long capture_time() const { return t0_; }
    double delta0() const { return delta0_; }

private:
    ZoomState() = default;

    ZoomPhase phase_ = ZoomPhase::ZoomOut;
    double norm_a_ = 0;
    double omega_ = 0;
    double delta0_ = 0;
    double capture_threshold_ = 0;
    double update_threshold_ = 0;
    std::int64_t q_sat_ = 1;
    int stage_ = -1;
    int freeze_stage_ = -1;  // negative: never freeze
    long t0_ = -1;
    long last_event_ = -1;
};

}  // namespace ectl
