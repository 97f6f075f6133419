#include "ectl/simloop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <thread>
#include <utility>

#include "ectl/errors.hpp"
#include "ectl/nodes.hpp"
#include "ectl/paillier.hpp"
#include "ectl/wire.hpp"

namespace ectl {

namespace {

// Independent plant-side RNG streams, forked from the scenario seed. The key
// generator derives its own stream internally, so the three never overlap.
constexpr std::uint64_t kEncryptStream = 0x706c616e74656e63ULL;  // "plantenc"
constexpr std::uint64_t kBlindStream = 0x706c616e74626c64ULL;    // "plantbld"

// What a driver needs from the far side of the loop, with the transport and
// cryptography abstracted away. Level vectors in, level vectors out; the
// integer arithmetic is exact in both implementations, which is what makes
// the encrypted run reproduce the plaintext reference bit for bit.
class Backend {
public:
    virtual ~Backend() = default;

    // (Re)keys the controller for a sensitivity epoch. sign folds the
    // feedback convention into the transmitted gain.
    virtual void announce(std::uint32_t epoch, const IntMat& gain_levels, int sign) = 0;

    // One state-to-input round trip at the given epoch.
    virtual IntVec exchange(const IntVec& state_levels, std::uint32_t epoch) = 0;

    virtual void finish() = 0;

    // Drains the wall-clock cost accumulated since the last call.
    double take_step_ms() { return std::exchange(step_ms_, 0.0); }

protected:
    double step_ms_ = 0.0;
};

class PlaintextBackend final : public Backend {
public:
    void announce(std::uint32_t, const IntMat& gain_levels, int sign) override {
        gain_ = sign >= 0 ? IntMat(gain_levels) : IntMat(-gain_levels);
    }

    IntVec exchange(const IntVec& state_levels, std::uint32_t) override {
        IntVec out(gain_.rows());
        for (Eigen::Index i = 0; i < gain_.rows(); ++i) {
            __int128 acc = 0;
            for (Eigen::Index j = 0; j < gain_.cols(); ++j)
                acc += static_cast<__int128>(gain_(i, j)) * state_levels[j];
            if (acc > std::numeric_limits<std::int64_t>::max() ||
                acc < std::numeric_limits<std::int64_t>::min())
                throw OverflowDetected("plaintext reference: input level exceeds int64");
            out[i] = static_cast<std::int64_t>(acc);
        }
        return out;
    }

    void finish() override {}

private:
    IntMat gain_;
};

// Drives the wire protocol: public key once, then blinded gain per epoch
// (or per step when requested), then encrypted state out / encrypted input
// back. The accumulated time covers the full round trip, including the
// controller's homomorphic work and the transport.
class EncryptedBackend final : public Backend {
public:
    EncryptedBackend(MessageChannel& ch, KeyPair kp, Bigint r_max, SeededRng enc_rng,
                     SeededRng blind_rng, bool reblind_per_step)
        : ch_(ch),
          crypto_(std::move(kp), std::move(r_max), std::move(enc_rng), std::move(blind_rng)),
          reblind_per_step_(reblind_per_step) {
        timed([&] { ch_.send(crypto_.pubkey_msg()); });
    }

    void announce(std::uint32_t epoch, const IntMat& gain_levels, int sign) override {
        epoch_ = epoch;
        gain_levels_ = gain_levels;
        sign_ = sign;
        timed([&] {
            ch_.send(SensitivityEpochMsg{epoch});
            ch_.send(crypto_.emit_gain(gain_levels, sign, epoch));
        });
        fresh_gain_ = true;
    }

    IntVec exchange(const IntVec& state_levels, std::uint32_t epoch) override {
        std::vector<std::int64_t> vals;
        timed([&] {
            if (reblind_per_step_ && !fresh_gain_)
                ch_.send(crypto_.emit_gain(gain_levels_, sign_, epoch_));
            fresh_gain_ = false;
            ch_.send(crypto_.emit_state(state_levels, epoch));
            WireMessage reply = ch_.recv();
            auto* in = std::get_if<EncInputMsg>(&reply);
            if (!in) throw TransportError("plant: expected an encrypted input frame");
            vals = crypto_.apply_input(*in, epoch);
        });
        IntVec out(static_cast<Eigen::Index>(vals.size()));
        for (std::size_t i = 0; i < vals.size(); ++i)
            out[static_cast<Eigen::Index>(i)] = vals[i];
        return out;
    }

    void finish() override { ch_.send(ShutdownMsg{}); }

private:
    template <class F>
    void timed(F&& f) {
        auto start = std::chrono::steady_clock::now();
        f();
        step_ms_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
    }

    MessageChannel& ch_;
    PlantCrypto crypto_;
    bool reblind_per_step_;
    std::uint32_t epoch_ = 0;
    IntMat gain_levels_;
    int sign_ = 1;
    bool fresh_gain_ = false;
};

TrajectoryRecord drive_linear(const Scenario& s, const LinearDesign& d, Backend& backend) {
    const bool et = s.mode == RunMode::EventTriggered;
    const int nx = d.n_x();
    const int nu = d.n_u();

    TrajectoryRecord rec;
    RunMetrics& m = rec.metrics;

    ZoomState zoom = ZoomState::linear(d.norm_a, d.omega, d.capture_threshold,
                                       d.update_threshold, d.q_sat);
    Vec x = s.x0;
    const double floor_norm = s.convergence_floor_rel * s.x0.norm();
    Vec u = Vec::Zero(nu);
    Vec held_u = Vec::Zero(nu);
    Vec x_bar_held = Vec::Zero(nx);  // quantized reconstruction at the last transmission

    // The feedback convention is u = -K x, folded into the transmitted gain.
    backend.announce(0, d.k_q, -1);
    backend.take_step_ms();  // setup cost stays out of the per-step mean

    auto input_from_levels = [&](const IntVec& levels, double delta) {
        Vec out(nu);
        for (int i = 0; i < nu; ++i)
            out[i] = static_cast<double>(levels[i]) * d.delta_g * delta;
        return out;
    };
    auto round_trip = [&](double delta) {
        IntVec xq = quantize_vector({delta, d.q_sat}, x);
        IntVec levels = backend.exchange(xq, 0);
        x_bar_held = xq.cast<double>() * delta;
        return input_from_levels(levels, delta);
    };

    double crypto_total = 0;
    for (long t = 0; t < s.horizon; ++t) {
        StepRecord step;
        step.t = t;
        step.x = x;
        bool triggered = false;

        if (zoom.phase() == ZoomPhase::ZoomOut) {
            // Shared by all linear modes: transmit at every zoom-out step so
            // the channel carries realistic traffic from t = 0. Before
            // capture the level vector is zero by construction, and u = 0
            // falls out of the controller's own arithmetic.
            if (zoom.observe(t, x) == ZoomEvent::Captured) {
                m.t0 = t;
                u = round_trip(zoom.delta(t));
                held_u = u;
                triggered = true;
            } else {
                u = input_from_levels(backend.exchange(IntVec::Zero(nx), 0), zoom.delta(t));
            }
        } else if (!et) {
            if (zoom.observe(t, x) == ZoomEvent::Advanced) m.update_times.push_back(t);
            u = round_trip(zoom.delta(t));
            held_u = u;
            triggered = true;
        } else {
            Vec e = x - x_bar_held;
            if (s.always_trigger || should_trigger(d.theta, x, e)) {
                if (zoom.observe(t, x) == ZoomEvent::Advanced) m.update_times.push_back(t);
                held_u = round_trip(zoom.delta(t));
                triggered = true;
            }
            u = held_u;
        }

        double ms = backend.take_step_ms();
        crypto_total += ms;
        step.u = u;
        step.delta = zoom.delta(t);
        step.phase = zoom.phase();
        step.stage = zoom.stage();
        step.triggered = triggered;
        step.crypto_ms = s.record_timings ? ms : 0.0;
        rec.steps.push_back(std::move(step));
        if (triggered) ++m.trigger_count;

        x = d.plant.a * x + d.plant.b * u;
        if (zoom.phase() != ZoomPhase::ZoomOut && floor_norm > 0 && x.norm() <= floor_norm)
            break;  // converged to the requested floor
    }

    m.steps = static_cast<long>(rec.steps.size());
    m.final_norm = x.norm();
    m.crypto_ms_mean = crypto_total / static_cast<double>(m.steps);
    return rec;
}

TrajectoryRecord drive_nonlinear(const Scenario& s, const NonlinearDesign& d, Backend& backend) {
    TrajectoryRecord rec;
    RunMetrics& m = rec.metrics;
    m.t0 = 0;  // the nonlinear schedule starts captured

    ZoomState zoom = ZoomState::nonlinear(d.delta0, d.omega, d.update_threshold, d.q_sat,
                                          d.freeze_stage);
    double x = s.x0[0];
    const int pe = d.p_eff();

    backend.announce(0, d.folded_gain_levels(d.stage_delta[0]), +1);
    backend.take_step_ms();

    double crypto_total = 0;
    for (long t = 0; t < s.horizon; ++t) {
        StepRecord step;
        step.t = t;
        step.x = Vec::Constant(1, x);

        ZoomEvent ev = zoom.observe(t, Vec::Constant(1, x));
        if (ev == ZoomEvent::Advanced || ev == ZoomEvent::Frozen) {
            m.update_times.push_back(t);
            // Each stage is its own epoch: the coefficients are re-quantized
            // at the new sensitivity and go out under fresh blinding.
            backend.announce(static_cast<std::uint32_t>(zoom.stage()),
                             d.folded_gain_levels(zoom.delta(t)), +1);
        }

        const double delta = zoom.delta(t);
        const QuantizerSpec spec{delta, d.q_sat};
        // Each true power of x is quantized once. Rounding x first and then
        // raising the rounded value would compound the error per degree and
        // void the certified fit bound.
        IntVec mono_levels = quantize_vector(spec, monomial_vector(x, pe));
        IntVec levels = backend.exchange(mono_levels, static_cast<std::uint32_t>(zoom.stage()));
        const double u = static_cast<double>(levels[0]) * delta * delta;

        double ms = backend.take_step_ms();
        crypto_total += ms;
        step.u = Vec::Constant(1, u);
        step.delta = delta;
        step.phase = zoom.phase();
        step.stage = zoom.stage();
        step.triggered = true;
        step.crypto_ms = s.record_timings ? ms : 0.0;
        rec.steps.push_back(std::move(step));
        ++m.trigger_count;

        x = d.model.a * x + d.model.b * (u - d.model.alpha(x));
    }

    m.steps = static_cast<long>(rec.steps.size());
    m.final_norm = std::abs(x);
    m.crypto_ms_mean = crypto_total / static_cast<double>(m.steps);
    return rec;
}

struct PreparedDesign {
    std::optional<LinearDesign> lin;
    std::optional<NonlinearDesign> nl;
    const Bigint& n_min() const { return lin ? lin->n_min : nl->n_min; }
};

PreparedDesign prepare_design(const Scenario& s) {
    PreparedDesign d;
    if (s.mode == RunMode::Nonlinear)
        d.nl = nonlinear_design_for(s);
    else
        d.lin = linear_design_for(s);
    return d;
}

TrajectoryRecord drive_with(const Scenario& s, const PreparedDesign& d, Backend& backend) {
    return d.lin ? drive_linear(s, *d.lin, backend) : drive_nonlinear(s, *d.nl, backend);
}

TrajectoryRecord run_encrypted_over(const Scenario& s, const PreparedDesign& d,
                                    MessageChannel& ch) {
    const std::size_t bits = s.key_bits != 0 ? s.key_bits : auto_key_bits(d.n_min());
    KeyPair kp = keygen(bits, s.seed);
    SeededRng root(s.seed);
    EncryptedBackend backend(ch, std::move(kp), Bigint(static_cast<unsigned long>(s.r_max)),
                             root.derive(kEncryptStream), root.derive(kBlindStream),
                             s.reblind_per_step);
    TrajectoryRecord rec = drive_with(s, d, backend);
    backend.finish();
    rec.metrics.key_bits = bits;
    return rec;
}

// Fit-only estimate of the quantization-error constant, used to size the
// saturation level before a quantizer exists: |c_bar| is taken as
// |c| + delta/2 and no saturation is checked.
double eps2_formula(const PolyApprox& approx, double delta, double radius) {
    double sum = 0;
    for (int j = 0; j <= approx.degree(); ++j) {
        if (approx.coeffs[j] == 0.0) continue;
        sum += std::pow(radius, j) + delta / 2.0 + (std::abs(approx.coeffs[j]) + delta / 2.0) +
               std::abs(approx.coeffs[j]);
    }
    return sum;
}

constexpr int kMaxStages = 40;
constexpr int kMaxFixpointIters = 64;

// One full nonlinear design attempt at a fixed delta0. Throws when the
// combination cannot be certified; the auto-delta0 search catches and
// retries smaller candidates.
NonlinearDesign attempt_nonlinear_design(const Scenario& s, const NonlinearModel& model,
                                         const PolyApprox& approx, double delta0,
                                         std::int64_t q_sat, double domain_half,
                                         double s_lin) {
    NonlinearDesign d;
    d.model = model;
    d.approx = approx;
    d.delta0 = delta0;
    d.q_sat = q_sat;
    d.r_max = Bigint(static_cast<unsigned long>(s.r_max));
    d.k_worst = std::abs(model.k) + delta0 / 2.0;
    d.s_worst = s_lin + std::abs(model.b) * delta0 / 2.0;
    if (d.s_worst >= 1.0)
        throw ConfigError("nonlinear design: delta0 breaks the worst-case contraction");

    const double qh = static_cast<double>(q_sat) - 0.5;
    const bool f_pinned = s.freeze_stage >= 0 || s.c2_radius > 0;

    std::vector<double> stage_delta, stage_radius, stage_m;

    // Extends the stage schedule 0..f_req under the contraction ratio om.
    // Returns the deepest representable stage; with throw_on_cut the cut is
    // an error (an explicitly requested stage must be reachable).
    auto extend = [&](double om, int f_req, bool throw_on_cut) -> int {
        stage_delta.clear();
        stage_radius.clear();
        stage_m.clear();
        for (int i = 0; i <= f_req; ++i) {
            const double di = std::pow(om, i) * delta0;
            const double ri = di * qh;
            const double rho = std::min(ri, domain_half);
            const QuantizerSpec spec{di, q_sat};
            if (std::llabs(quantize(spec, model.k)) >= q_sat) {
                if (throw_on_cut)
                    throw QSatTooSmall("nonlinear design: gain level saturates at stage " +
                                       std::to_string(i));
                return i - 1;
            }
            double e2;
            try {
                // The certified domain is inflated by di/2: the quantized
                // state the monomials are built from can sit half a step
                // outside the true state's range.
                e2 = eps2_bound(approx, spec, -(rho + di / 2.0), rho + di / 2.0);
            } catch (const SaturationInDomain&) {
                if (throw_on_cut) throw;
                return i - 1;
            }
            stage_delta.push_back(di);
            stage_radius.push_back(ri);
            stage_m.push_back(2.0 * approx.eps1_prime / di + e2);
        }
        return f_req;
    };

    auto c2_stages = [&](double om) -> int {
        const double r0 = delta0 * qh;
        if (r0 <= s.c2_radius) return 0;
        const double need = std::ceil(std::log(s.c2_radius / r0) / std::log(om));
        if (!(need >= 0)) return 0;
        if (need > kMaxStages)
            throw ConfigError("nonlinear design: the target radius needs too many stages");
        return static_cast<int>(need);
    };

    // The contraction ratio and the stage schedule determine each other:
    // omega sets the stage sensitivities, the per-stage error constants set
    // theta, and theta sets omega. Iterate to a fixpoint.
    double omega = 0.5;
    double theta = 0;
    double m_worst = 0;
    int f_prev = -1;
    int f = 0;
    int auto_cap = kMaxStages;
    for (int iter = 0;; ++iter) {
        if (iter >= kMaxFixpointIters)
            throw NoConvergence("nonlinear design: stage schedule did not settle");
        int f_req = auto_cap;
        if (s.freeze_stage >= 0)
            f_req = s.freeze_stage;
        else if (s.c2_radius > 0)
            f_req = c2_stages(omega);
        const int f_new = extend(omega, f_req, f_pinned);
        if (f_new < 0)
            throw SaturationInDomain("nonlinear design: stage 0 cannot be represented");

        m_worst = *std::max_element(stage_m.begin(), stage_m.end());
        theta = std::abs(model.b) * (d.k_worst + m_worst) / (1.0 - d.s_worst);
        const double omega_new = (theta + s.epsilon + 1.0) / qh;
        if (omega_new >= 1.0) {
            // Deeper stages only ever raise the worst-case constant, so a
            // shorter schedule is the one retreat that can help.
            if (!f_pinned && f_new > 0) {
                auto_cap = f_new - 1;
                omega = 0.5;
                f_prev = -1;
                continue;
            }
            throw QSatTooSmall("nonlinear design: stage contraction ratio reached one");
        }

        const bool stable = f_new == f_prev && std::abs(omega_new - omega) <= 1e-13;
        f_prev = f_new;
        omega = omega_new;
        if (stable) {
            f = f_new;
            break;
        }
    }

    // One rebuild at the converged ratio keeps the stored schedule and the
    // live zoom state machine numerically identical.
    if (extend(omega, f, true) != f)
        throw NoConvergence("nonlinear design: converged schedule not reproducible");
    m_worst = *std::max_element(stage_m.begin(), stage_m.end());
    theta = std::abs(model.b) * (d.k_worst + m_worst) / (1.0 - d.s_worst);

    d.omega = omega;
    d.theta = theta;
    d.m_worst = m_worst;
    d.freeze_stage = f;
    d.update_threshold = theta + s.epsilon + 0.5;
    d.stage_delta = std::move(stage_delta);
    d.stage_radius = std::move(stage_radius);
    d.stage_m = std::move(stage_m);

    // Containment: the stage-0 attractor and the initial state must both sit
    // inside the certified (symmetric) part of the model domain; from there
    // the advance threshold keeps every later stage inside its own radius.
    const double rho0 = std::min(d.stage_radius[0], domain_half);
    if (theta * delta0 / 2.0 > rho0)
        throw ConfigError("nonlinear design: stage-0 attractor leaves the model domain");
    if (std::abs(s.x0[0]) > rho0)
        throw ConfigError("nonlinear design: x0 outside the certified stage-0 region");

    // The folded vector entries reach 2 q_sat - 2 in magnitude, hence the
    // doubled gain term in the modulus bound.
    d.n_min = key_size_bound(q_sat, 2 * q_sat, d.p_eff() + 1, d.r_max);
    return d;
}

std::string phase_name(ZoomPhase p) {
    switch (p) {
        case ZoomPhase::ZoomOut: return "zoomout";
        case ZoomPhase::ZoomIn: return "zoomin";
        case ZoomPhase::Frozen: return "frozen";
    }
    return "unknown";
}

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

void validate_scenario(const Scenario& s) {
    if (s.horizon < 1) throw ConfigError("scenario: horizon must be >= 1");
    if (s.r_max < 2) throw ConfigError("scenario: r_max must be >= 2");
    if (s.q_sat < 0) throw ConfigError("scenario: q_sat must be >= 0 (0 selects automatically)");
    if (!(s.epsilon > 0)) throw ConfigError("scenario: epsilon must be positive");
    if (!(s.safety_factor > 0) || s.safety_factor > 1)
        throw ConfigError("scenario: safety_factor must be in (0, 1]");
    if (s.key_bits != 0 && s.key_bits < 6)
        throw ConfigError("scenario: key_bits must be 0 (auto) or >= 6");
    if (s.convergence_floor_rel < 0)
        throw ConfigError("scenario: convergence_floor_rel must be >= 0");
    if (!(s.q_weight > 0)) throw ConfigError("scenario: q_weight must be positive");
    if (s.always_trigger && s.mode != RunMode::EventTriggered)
        throw ConfigError("scenario: always_trigger needs event_triggered mode");

    if (s.mode == RunMode::Nonlinear) {
        if (s.x0.size() != 1) throw ConfigError("scenario: nonlinear x0 must be scalar");
        if (s.nl_b == 0.0) throw ConfigError("scenario: nonlinear b must be nonzero");
        if (!(s.x_min < 0 && 0 < s.x_max))
            throw ConfigError("scenario: the model domain must straddle zero");
        if (s.x0[0] < s.x_min || s.x0[0] > s.x_max)
            throw ConfigError("scenario: x0 outside the model domain");
        if (!(s.target_eps > 0)) throw ConfigError("scenario: target_eps must be positive");
        if (s.delta0 < 0) throw ConfigError("scenario: delta0 must be >= 0 (0 selects automatically)");
        if (s.c2_radius < 0) throw ConfigError("scenario: c2_radius must be >= 0");
        if (s.freeze_stage >= 0 && s.c2_radius > 0)
            throw ConfigError("scenario: freeze_stage and c2_radius are exclusive");
        alpha_registry(s.alpha_name);  // unknown names throw here
        return;
    }

    const Eigen::Index nx = s.plant.a.rows();
    if (nx < 1 || s.plant.a.cols() != nx)
        throw ConfigError("scenario: A must be square and nonempty");
    if (s.plant.b.rows() != nx || s.plant.b.cols() < 1)
        throw ConfigError("scenario: B must have n_x rows and at least one column");
    if (s.k.rows() != s.plant.b.cols() || s.k.cols() != nx)
        throw ConfigError("scenario: K must be n_u x n_x");
    if (s.x0.size() != nx) throw ConfigError("scenario: x0 must have n_x entries");
}

std::size_t auto_key_bits(const Bigint& n_min) {
    // Two half-length primes with forced top bits give N >= 2^(bits-2), so
    // bits >= bit_length(n_min) + 10 leaves at least 8 bits of headroom.
    const std::size_t need = bit_length(n_min) + 10;
    std::size_t bits = 16;
    while (bits < need) bits *= 2;
    return bits;
}

LinearDesign linear_design_for(const Scenario& s) {
    const Mat q = s.q_weight * Mat::Identity(s.plant.a.rows(), s.plant.a.rows());
    return design_linear(s.plant, s.k, q, s.epsilon, s.q_sat,
                         Bigint(static_cast<unsigned long>(s.r_max)), s.safety_factor);
}

IntMat NonlinearDesign::folded_gain_levels(double delta) const {
    const QuantizerSpec spec{delta, q_sat};
    IntMat out = IntMat::Zero(1, p_eff() + 1);
    for (int j = 0; j <= approx.degree(); ++j) out(0, j) = quantize(spec, approx.coeffs[j]);
    out(0, 1) -= quantize(spec, model.k);
    return out;
}

NonlinearDesign nonlinear_design_for(const Scenario& s) {
    NonlinearModel model;
    model.a = s.nl_a;
    model.b = s.nl_b;
    model.k = s.nl_k;
    model.alpha = alpha_registry(s.alpha_name);
    model.x_min = s.x_min;
    model.x_max = s.x_max;

    if (model.b == 0.0) throw DegenerateB("nonlinear design: b must be nonzero");
    const double s_lin = std::abs(model.a - model.b * model.k);
    if (s_lin >= 1.0) throw NotSchur("nonlinear design: |a - b k| must be below one");

    const PolyApprox approx = fit_polynomial(model, s.target_eps);
    const double domain_half = std::min(-model.x_min, model.x_max);
    // Largest delta0 that keeps the quantized gain contracting, scaled back
    // by the safety factor.
    const double stab_cap = s.safety_factor * 2.0 * (1.0 - s_lin) / std::abs(model.b);

    std::int64_t q_sat = s.q_sat;
    if (q_sat == 0) {
        double pd = std::min(stab_cap, domain_half);
        pd = std::min(pd, (1.0 - s_lin) / std::abs(model.b));  // keeps the probe contraction < 1
        const double kw = std::abs(model.k) + pd / 2.0;
        const double sw = s_lin + std::abs(model.b) * pd / 2.0;
        const double mp = 2.0 * approx.eps1_prime / pd + eps2_formula(approx, pd, domain_half);
        const double theta_probe = std::abs(model.b) * (kw + mp) / (1.0 - sw);
        if (!std::isfinite(theta_probe) || theta_probe > 1e12)
            throw ConfigError("nonlinear design: saturation probe diverged");
        q_sat = static_cast<std::int64_t>(
                    std::ceil(2.0 * (theta_probe + s.epsilon + 1.0) + 0.5)) +
                1;
        if (q_sat < 2) q_sat = 2;
    }

    if (s.delta0 > 0)
        return attempt_nonlinear_design(s, model, approx, s.delta0, q_sat, domain_half, s_lin);

    // Auto delta0: largest feasible power of two at or below the cap. Powers
    // of two keep the stage-0 quantizer exact in binary.
    double cand = std::exp2(std::floor(std::log2(stab_cap)));
    std::exception_ptr last;
    for (int tries = 0; tries < 60; ++tries, cand /= 2.0) {
        try {
            return attempt_nonlinear_design(s, model, approx, cand, q_sat, domain_half, s_lin);
        } catch (const Error&) {
            last = std::current_exception();
        }
    }
    std::rethrow_exception(last);
}

TrajectoryRecord run_scenario(
    const Scenario& s, const std::function<void(const std::vector<std::uint8_t>&)>& plant_tap) {
    validate_scenario(s);
    const PreparedDesign design = prepare_design(s);

    if (!s.encrypted) {
        PlaintextBackend backend;
        TrajectoryRecord rec = drive_with(s, design, backend);
        rec.metrics.key_bits = 0;
        return rec;
    }

    if (s.transport == TransportKind::InProcess) {
        auto ends = make_inprocess_pair();
        std::unique_ptr<MessageChannel>& plant_ch = ends.first;
        std::unique_ptr<MessageChannel>& ctrl_ch = ends.second;
        if (plant_tap) plant_ch->set_send_tap(plant_tap);
        std::exception_ptr ctrl_err;
        std::thread ctrl([&ctrl_ch, &ctrl_err] {
            try {
                controller_serve(*ctrl_ch);
            } catch (...) {
                ctrl_err = std::current_exception();
            }
        });
        TrajectoryRecord rec;
        try {
            rec = run_encrypted_over(s, design, *plant_ch);
        } catch (...) {
            plant_ch->close();  // unblocks the controller, the plant error wins
            ctrl.join();
            throw;
        }
        ctrl.join();
        if (ctrl_err) std::rethrow_exception(ctrl_err);
        return rec;
    }

    TcpListener listener("127.0.0.1", 0);
    std::exception_ptr ctrl_err;
    std::thread ctrl([&listener, &ctrl_err] {
        try {
            std::unique_ptr<MessageChannel> ch = listener.accept(10000);
            if (ch) controller_serve(*ch);
        } catch (...) {
            ctrl_err = std::current_exception();
        }
    });
    std::unique_ptr<MessageChannel> ch;
    TrajectoryRecord rec;
    try {
        ch = tcp_connect("127.0.0.1", listener.port(), 5000);
        if (plant_tap) ch->set_send_tap(plant_tap);
        rec = run_encrypted_over(s, design, *ch);
    } catch (...) {
        if (ch) ch->close();
        ctrl.join();
        throw;
    }
    ctrl.join();
    if (ctrl_err) std::rethrow_exception(ctrl_err);
    return rec;
}

TrajectoryRecord run_plant_on_channel(const Scenario& s, MessageChannel& channel) {
    validate_scenario(s);
    if (!s.encrypted) throw ConfigError("plant node: a networked run must be encrypted");
    const PreparedDesign design = prepare_design(s);
    return run_encrypted_over(s, design, channel);
}

std::string trajectory_csv(const TrajectoryRecord& record) {
    const Eigen::Index nx = record.steps.empty() ? 0 : record.steps.front().x.size();
    const Eigen::Index nu = record.steps.empty() ? 0 : record.steps.front().u.size();

    std::string out = "# ectl-trajectory v1\n";
    out += "t";
    for (Eigen::Index i = 0; i < nx; ++i) out += ",x_" + std::to_string(i);
    for (Eigen::Index i = 0; i < nu; ++i) out += ",u_" + std::to_string(i);
    out += ",delta,phase,stage,triggered,crypto_ms\n";

    for (const StepRecord& step : record.steps) {
        out += std::to_string(step.t);
        for (Eigen::Index i = 0; i < nx; ++i) {
            out += ',';
            append_double(out, step.x[i]);
        }
        for (Eigen::Index i = 0; i < nu; ++i) {
            out += ',';
            append_double(out, step.u[i]);
        }
        out += ',';
        append_double(out, step.delta);
        out += ',' + phase_name(step.phase);
        out += ',' + std::to_string(step.stage);
        out += step.triggered ? ",1" : ",0";
        char buf[32];
        std::snprintf(buf, sizeof buf, ",%.3f\n", step.crypto_ms);
        out += buf;
    }
    return out;
}

}  // namespace ectl
