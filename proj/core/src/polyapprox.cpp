#include "ectl/polyapprox.hpp"

#include <cmath>

#include "ectl/errors.hpp"

namespace ectl {

std::function<double(double)> alpha_registry(const std::string& name) {
    if (name == "zero") return [](double) { return 0.0; };
    if (name == "square") return [](double x) { return x * x; };
    if (name == "half_square") return [](double x) { return 0.5 * x * x; };
    if (name == "sin") return [](double x) { return std::sin(x); };
    if (name == "cubic") return [](double x) { return x * x * x; };
    throw ConfigError("alpha_registry: unknown nonlinearity '" + name + "'");
}

Vec monomial_vector(double x, int degree) {
    Vec v(degree + 1);
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
        v[j] = p;
        p *= x;
    }
    return v;
}

namespace {

constexpr int kGridPoints = 10001;

double sup_error(const NonlinearModel& model, const Vec& coeffs) {
    double worst = 0;
    for (int i = 0; i < kGridPoints; ++i) {
        double x = model.x_min + (model.x_max - model.x_min) * i / (kGridPoints - 1);
        double fit = 0, p = 1.0;
        for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
            fit += coeffs[j] * p;
            p *= x;
        }
        worst = std::max(worst, std::abs(fit - model.alpha(x)));
    }
    return worst;
}

}  // namespace

PolyApprox fit_polynomial(const NonlinearModel& model, double target_eps, int max_degree) {
    if (!(model.x_min < model.x_max)) throw ConfigError("fit_polynomial: empty domain");
    for (int p = 0; p <= max_degree; ++p) {
        // 2p+1 Chebyshev nodes keep the Vandermonde system overdetermined
        // and well-behaved on [x_min, x_max].
        const int nodes = 2 * p + 1;
        Mat vand(nodes, p + 1);
        Vec rhs(nodes);
        for (int i = 0; i < nodes; ++i) {
            double theta = M_PI * (2.0 * i + 1.0) / (2.0 * nodes);
            double x = 0.5 * (model.x_min + model.x_max) +
                       0.5 * (model.x_max - model.x_min) * std::cos(theta);
            double pw = 1.0;
            for (int j = 0; j <= p; ++j) {
                vand(i, j) = pw;
                pw *= x;
            }
            rhs[i] = model.alpha(x);
        }
        Vec coeffs = vand.colPivHouseholderQr().solve(rhs);
        // Snap least-squares noise to exact zeros (odd/even symmetry would
        // otherwise leave ~1e-17 residue that later stages must represent).
        double cmax = coeffs.cwiseAbs().maxCoeff();
        for (int j = 0; j <= p; ++j)
            if (std::abs(coeffs[j]) <= 1e-12 * cmax) coeffs[j] = 0.0;
        double err = sup_error(model, coeffs);
        if (err <= target_eps) return PolyApprox{coeffs, err};
    }
    throw DegreeExhausted("fit_polynomial: target not reached by max_degree");
}

double eps2_bound(const PolyApprox& approx, const QuantizerSpec& spec, double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("eps2_bound: empty domain");
    const int p = approx.degree();
    const double d = spec.delta;

    IntVec coeff_levels = quantize_vector(spec, approx.coeffs);

    // Terms whose coefficient is exactly zero before and after quantization
    // contribute exactly nothing to the product, so they neither add error
    // nor constrain the quantizer range.
    auto active = [&](int j) { return approx.coeffs[j] != 0.0 || coeff_levels[j] != 0; };

    for (int j = 0; j <= p; ++j)
        if (active(j) && std::llabs(coeff_levels[j]) >= spec.q_sat)
            throw SaturationInDomain("eps2_bound: coefficient saturates quantizer");

    // Monomial magnitudes peak at an endpoint, so saturation only needs the
    // endpoint powers checked (both signs survive quantize symmetrically).
    for (int j = 0; j <= p; ++j) {
        if (!active(j)) continue;
        for (double end : {lo, hi}) {
            std::int64_t lvl = quantize(spec, std::pow(end, j));
            if (std::llabs(lvl) >= spec.q_sat)
                throw SaturationInDomain("eps2_bound: monomial saturates quantizer");
        }
    }

    double eps2 = 0;
    for (int j = 0; j <= p; ++j) {
        if (!active(j)) continue;
        double mono_max = std::max(std::pow(std::abs(lo), j), std::pow(std::abs(hi), j));
        double c_bar = static_cast<double>(coeff_levels[j]) * d;
        eps2 += mono_max + d / 2.0 + std::abs(c_bar) + std::abs(approx.coeffs[j]);
    }
    return eps2;
}

double eval_quantized_poly(const IntVec& coeff_levels, const IntVec& monomial_levels,
                           double delta) {
    if (coeff_levels.size() != monomial_levels.size() || coeff_levels.size() == 0)
        throw LengthMismatch("eval_quantized_poly: level vectors must match");
    std::int64_t acc = 0;
    for (Eigen::Index j = 0; j < coeff_levels.size(); ++j)
        acc += coeff_levels[j] * monomial_levels[j];
    return static_cast<double>(acc) * delta * delta;
}

}  // namespace ectl
