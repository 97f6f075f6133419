#include "ectl/lindesign.hpp"

#include <cmath>

#include "ectl/errors.hpp"

namespace ectl {

double gain_sensitivity_bound(const PlantModel& plant, const Mat& k, const Mat& q,
                              const Mat& p, double safety) {
    const double nx = static_cast<double>(plant.a.rows());
    const double nu = static_cast<double>(plant.b.cols());
    Mat a_cl = plant.a - plant.b * k;
    double bpb = spectral_norm(plant.b.transpose() * p * plant.b);
    if (bpb <= 0) throw DegenerateB("gain_sensitivity_bound: ||B'PB|| is zero");
    double cross = spectral_norm(a_cl.transpose() * p * plant.b);
    double qmin = eig_extremes_sym(q).first;
    double bracket = -cross + std::sqrt(cross * cross + qmin * bpb);
    return safety * 2.0 / (std::sqrt(nx * nu) * bpb) * bracket;
}

std::int64_t gain_saturation(const Mat& k, double delta_g) {
    if (delta_g <= 0) throw ScalarOutOfRange("gain_saturation: delta_g must be positive");
    double kmax = k.size() ? k.cwiseAbs().maxCoeff() : 0.0;
    auto q = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(kmax / delta_g + 0.5)));
    while ((static_cast<double>(q) - 0.5) * delta_g < kmax) ++q;
    while (q > 1 && (static_cast<double>(q) - 1.5) * delta_g >= kmax) --q;
    return q;
}

Bigint key_size_bound(std::int64_t q_sat, std::int64_t q_sat_g, int n_x, const Bigint& r_max) {
    // 3 (q+1/2)(g+1/2) n r = 3 (2q+1)(2g+1) n r / 4, rounded up exactly.
    Bigint num = 3 * Bigint(2 * q_sat + 1) * Bigint(2 * q_sat_g + 1) * n_x * r_max;
    Bigint bound;
    mpz_cdiv_q_ui(bound.get_mpz_t(), num.get_mpz_t(), 4);
    return bound;
}

bool should_trigger(double theta, const Vec& x, const Vec& e) {
    return x.norm() <= 2.0 * theta * e.norm();
}

ZoomConstants zoom_constants(const PlantModel& plant, const Mat& k_bar, const Mat& q_bar,
                             const Mat& p_bar, double epsilon, std::int64_t q_sat) {
    const double nx = static_cast<double>(plant.a.rows());
    Mat a_cl = plant.a - plant.b * k_bar;
    Mat bk = plant.b * k_bar;
    double qmin = eig_extremes_sym(q_bar).first;
    double cross = spectral_norm(a_cl.transpose() * p_bar * bk);
    double kbpbk = spectral_norm(k_bar.transpose() * plant.b.transpose() * p_bar * plant.b * k_bar);

    ZoomConstants zc;
    zc.theta = (cross + std::sqrt(cross * cross + qmin * kbpbk)) / (2.0 * qmin);
    auto [pmin, pmax] = eig_extremes_sym(p_bar);
    double cond_sqrt = std::sqrt(pmax / pmin);
    zc.omega_prime = (zc.theta * std::sqrt(nx) + epsilon) * cond_sqrt + std::sqrt(nx);
    zc.omega = zc.omega_prime * cond_sqrt / (static_cast<double>(q_sat) - 0.5);
    if (!(zc.omega < 1.0))
        throw QSatTooSmall("zoom_constants: contraction ratio >= 1, raise q_sat");
    return zc;
}

LinearDesign design_linear(const PlantModel& plant, const Mat& k, const Mat& q,
                           double epsilon, std::int64_t q_sat, const Bigint& r_max,
                           double safety) {
    LinearDesign d;
    d.plant = plant;
    d.k = k;
    d.q = q;
    d.epsilon = epsilon;
    d.r_max = r_max;

    Mat a_cl = plant.a - plant.b * k;
    d.p = solve_discrete_lyapunov(a_cl, q);

    d.delta_g = gain_sensitivity_bound(plant, k, q, d.p, safety);
    d.q_sat_g = gain_saturation(k, d.delta_g);
    d.k_q = quantize_matrix({d.delta_g, d.q_sat_g}, k);
    d.k_bar = d.k_q.cast<double>() * d.delta_g;

    Mat a_cl_bar = plant.a - plant.b * d.k_bar;
    d.p_bar = solve_discrete_lyapunov(a_cl_bar, q);
    auto [pmin, pmax] = eig_extremes_sym(d.p_bar);
    d.lambda_min_pbar = pmin;
    d.lambda_max_pbar = pmax;

    const double nx = static_cast<double>(d.n_x());
    if (q_sat == 0) {
        // Auto-select: smallest level count giving omega ~ 1/2.
        ZoomConstants probe = [&] {
            // omega' does not depend on q_sat; compute it with a huge level
            // count, then solve for the level count that halves omega.
            return zoom_constants(plant, d.k_bar, q, d.p_bar, epsilon, std::int64_t(1) << 62);
        }();
        double cond_sqrt = std::sqrt(pmax / pmin);
        q_sat = static_cast<std::int64_t>(std::ceil(2.0 * probe.omega_prime * cond_sqrt + 0.5)) + 1;
    }
    d.q_sat = q_sat;

    ZoomConstants zc = zoom_constants(plant, d.k_bar, q, d.p_bar, epsilon, q_sat);
    d.theta = zc.theta;
    d.omega_prime = zc.omega_prime;
    d.omega = zc.omega;

    // Zoom-out base: the sensitivity must outgrow the open-loop state, which
    // needs a base > 1. Floor at 9/8 (exact in binary) so open-loop-stable
    // plants still capture; identical to ||A|| whenever ||A|| >= 9/8.
    d.norm_a = std::max(spectral_norm(plant.a), 1.125);
    double ratio = std::sqrt(d.lambda_min_pbar / d.lambda_max_pbar);
    d.capture_threshold = (static_cast<double>(q_sat) - 0.5) * ratio - std::sqrt(nx) / 2.0;
    d.update_threshold = d.omega_prime - std::sqrt(nx) / 2.0;

    d.n_min = key_size_bound(d.q_sat, d.q_sat_g, d.n_x(), r_max);
    return d;
}

}  // namespace ectl
