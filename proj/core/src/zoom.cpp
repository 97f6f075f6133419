#include "ectl/zoom.hpp"

#include <cmath>

#include "ectl/errors.hpp"
#include "ectl/linalg.hpp"

namespace ectl {

ContainmentRegion containment_region(const Mat& p_bar, double delta, std::int64_t q_sat) {
    ContainmentRegion r;
    r.p_bar = p_bar;
    double half_range = (static_cast<double>(q_sat) - 0.5) * delta;
    r.radius_sq = eig_extremes_sym(p_bar).first * half_range * half_range;
    return r;
}

namespace {

double level_norm(const IntVec& levels) {
    double sum = 0;
    for (Eigen::Index i = 0; i < levels.size(); ++i) {
        double v = static_cast<double>(levels[i]);
        sum += v * v;
    }
    return std::sqrt(sum);
}

}  // namespace

ZoomState ZoomState::linear(double norm_a, double omega, double capture_threshold,
                            double update_threshold, std::int64_t q_sat) {
    ZoomState z;
    z.phase_ = ZoomPhase::ZoomOut;
    z.norm_a_ = norm_a;
    z.omega_ = omega;
    z.capture_threshold_ = capture_threshold;
    z.update_threshold_ = update_threshold;
    z.q_sat_ = q_sat;
    return z;
}

ZoomState ZoomState::nonlinear(double delta0, double omega, double update_threshold,
                               std::int64_t q_sat, int freeze_stage) {
    if (freeze_stage < 0) throw ConfigError("ZoomState: freeze stage must be >= 0");
    ZoomState z;
    z.omega_ = omega;
    z.delta0_ = delta0;
    z.update_threshold_ = update_threshold;
    z.q_sat_ = q_sat;
    z.freeze_stage_ = freeze_stage;
    z.stage_ = 0;
    z.t0_ = 0;
    z.last_event_ = 0;
    z.phase_ = freeze_stage == 0 ? ZoomPhase::Frozen : ZoomPhase::ZoomIn;
    return z;
}

double ZoomState::delta(long t) const {
    if (phase_ == ZoomPhase::ZoomOut)
        return std::pow(norm_a_, 2.0 * static_cast<double>(t));
    return std::pow(omega_, static_cast<double>(stage_)) * delta0_;
}

ZoomEvent ZoomState::observe(long t, const Vec& x) {
    if (phase_ == ZoomPhase::ZoomOut) {
        if (t < 1) return ZoomEvent::None;
        double d = std::pow(norm_a_, 2.0 * static_cast<double>(t));
        if (!std::isfinite(d))
            throw OverflowDetected("zoom-out sensitivity overflowed; state never captured");
        IntVec levels = quantize_vector({d, q_sat_}, x);
        if (level_norm(levels) <= capture_threshold_) {
            phase_ = ZoomPhase::ZoomIn;
            stage_ = 0;
            t0_ = t;
            delta0_ = d;
            last_event_ = t;
            return ZoomEvent::Captured;
        }
        return ZoomEvent::None;
    }
    if (phase_ == ZoomPhase::Frozen) return ZoomEvent::None;

    if (t < last_event_ + 1) return ZoomEvent::None;
    IntVec levels = quantize_vector({delta(t), q_sat_}, x);
    if (level_norm(levels) <= update_threshold_) {
        // The sensitivity must stay a positive double. Once the next stage
        // would underflow to zero, park at the current stage instead of
        // advancing; the state is already below any representable scale.
        double next = std::pow(omega_, static_cast<double>(stage_) + 1.0) * delta0_;
        if (!(next > 0.0)) return ZoomEvent::None;
        ++stage_;
        last_event_ = t;
        if (freeze_stage_ >= 0 && stage_ >= freeze_stage_) {
            phase_ = ZoomPhase::Frozen;
            return ZoomEvent::Frozen;
        }
        return ZoomEvent::Advanced;
    }
    return ZoomEvent::None;
}

}  // namespace ectl
