#pragma once

#include <cstdint>

#include "ectl/bigint.hpp"
#include "ectl/linalg.hpp"

namespace ectl {

// Discrete-time plant x[t+1] = A x[t] + B u[t].
struct PlantModel {
    Mat a;
    Mat b;
};

// Largest gain-quantizer sensitivity that keeps A - B K' Schur for every K'
// within half a step of K elementwise, scaled by a safety factor:
//   safety * 2 / (sqrt(nx*nu) * ||B'PB||) *
//     (-||(A-BK)'PB|| + sqrt(||(A-BK)'PB||^2 + lambda_min(Q) ||B'PB||))
// P must certify A - BK for Q. Throws DegenerateB when ||B'PB|| vanishes.
double gain_sensitivity_bound(const PlantModel& plant, const Mat& k, const Mat& q,
                              const Mat& p, double safety = 0.9);

// Smallest saturation level that represents every entry of K without
// truncation: max |K_ij| <= (q_sat_g - 1/2) * delta_g.
std::int64_t gain_saturation(const Mat& k, double delta_g);

// Minimum modulus that keeps every controller-side product inside the signed
// band: ceil(3 (q_sat + 1/2)(q_sat_g + 1/2) n_x r_max), computed exactly.
Bigint key_size_bound(std::int64_t q_sat, std::int64_t q_sat_g, int n_x, const Bigint& r_max);

// Event trigger: fire iff ||x|| <= 2 theta ||e||.
bool should_trigger(double theta, const Vec& x, const Vec& e);

struct ZoomConstants {
    double theta;        // radius factor of the attractor ball
    double omega_prime;  // per-stage level bound
    double omega;        // per-stage contraction ratio, in (0, 1)
};

// Stage constants for the zoom-in schedule. Throws QSatTooSmall when the
// resulting contraction ratio is not below one.
ZoomConstants zoom_constants(const PlantModel& plant, const Mat& k_bar, const Mat& q_bar,
                             const Mat& p_bar, double epsilon, std::int64_t q_sat);

// Everything the plant node needs to run the encrypted loop.
struct LinearDesign {
    PlantModel plant;
    Mat k;       // designer gain
    Mat p;       // certificate for (A - B K, Q)
    Mat q;       // Lyapunov weight used for both certificates
    double delta_g = 0;
    std::int64_t q_sat_g = 1;
    IntMat k_q;  // gain levels at delta_g
    Mat k_bar;   // k_q * delta_g
    Mat p_bar;   // certificate for (A - B k_bar, Q)
    double lambda_min_pbar = 0;
    double lambda_max_pbar = 0;
    double epsilon = 0.01;
    std::int64_t q_sat = 1;
    double theta = 0;
    double omega_prime = 0;
    double omega = 0;
    double norm_a = 0;            // max(||A||, 9/8), drives the zoom-out schedule
    double capture_threshold = 0; // on ||x_q|| at the current sensitivity
    double update_threshold = 0;  // on ||x_q|| at the stage sensitivity
    Bigint r_max;
    Bigint n_min;

    int n_x() const { return static_cast<int>(plant.a.rows()); }
    int n_u() const { return static_cast<int>(plant.b.cols()); }
};

// Runs the full design pipeline: certify K, derive the gain quantizer,
// quantize K, re-certify the quantized gain, derive zoom constants and
// thresholds, and bound the key size. q_sat == 0 selects the saturation
// level automatically (targets omega ~ 1/2).
LinearDesign design_linear(const PlantModel& plant, const Mat& k, const Mat& q,
                           double epsilon, std::int64_t q_sat, const Bigint& r_max,
                           double safety = 0.9);

}  // namespace ectl
