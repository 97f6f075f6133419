#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ectl/encoding.hpp"

namespace ectl {

// Scalar plant x[t+1] = a x + b (u - alpha(x)) stabilized by the
// feedback-linearizing input u = alpha(x) - k x. Requires |a - b k| < 1 and
// a b != 0; alpha is only evaluated on [x_min, x_max].
struct NonlinearModel {
    double a = 0;
    double b = 0;
    double k = 0;
    std::function<double(double)> alpha;
    double x_min = -1;
    double x_max = 1;
};

// Named nonlinearities available to configs. Throws ConfigError for an
// unknown name.
std::function<double(double)> alpha_registry(const std::string& name);

struct PolyApprox {
    Vec coeffs;         // c_0 .. c_p, monomial basis
    double eps1_prime;  // measured sup error of the fit over the domain
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Least-squares fit of alpha on Chebyshev nodes, degree escalated from 0
// until the sup error over a 10001-point uniform grid drops to target_eps.
// Throws DegreeExhausted when no degree up to max_degree reaches the target.
PolyApprox fit_polynomial(const NonlinearModel& model, double target_eps, int max_degree = 16);

// Certified quantization-error constant: the returned eps2 satisfies
//   |alpha_bar_p(x_bar) - alpha_p(x)| <= eps2 * delta / 2
// for every x in [lo, hi], where alpha_bar_p is the dot product of the
// quantized coefficient and monomial vectors. Concretely
//   eps2 = sum_j (max_domain |x^j| + delta/2 + |c_bar_j| + |c_j|).
// Throws SaturationInDomain when any coefficient or endpoint monomial
// level saturates; saturation-free endpoints cover the whole interval
// because monomial magnitudes peak there.
double eps2_bound(const PolyApprox& approx, const QuantizerSpec& spec, double lo, double hi);

// Monomial vector (1, x, x^2, ..., x^p).
Vec monomial_vector(double x, int degree);

// Exact integer dot product of level vectors scaled by delta^2:
//   sum_j c_q[j] * x_q[j] * delta^2.
double eval_quantized_poly(const IntVec& coeff_levels, const IntVec& monomial_levels,
                           double delta);

}  // namespace ectl
