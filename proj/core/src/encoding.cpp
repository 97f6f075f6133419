#include "ectl/encoding.hpp"

#include <cmath>

#include "ectl/errors.hpp"

namespace ectl {

namespace {

// max{k in Z : k < x}
double strict_floor(double x) {
    double f = std::floor(x);
    return f == x ? f - 1.0 : f;
}

}  // namespace

std::int64_t quantize(const QuantizerSpec& spec, double x) {
    const double d = spec.delta;
    const double q = static_cast<double>(spec.q_sat);
    if (x > (q + 0.5) * d) return spec.q_sat;
    if (x <= -(q + 0.5) * d) return -spec.q_sat;
    return static_cast<std::int64_t>(strict_floor(x / d + 0.5));
}

IntVec quantize_vector(const QuantizerSpec& spec, const Vec& x) {
    IntVec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = quantize(spec, x[i]);
    return out;
}

IntMat quantize_matrix(const QuantizerSpec& spec, const Mat& m) {
    IntMat out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = quantize(spec, m(i, j));
    return out;
}

Bigint encode_signed(const Bigint& n, const Bigint& z) {
    if (3 * abs(z) >= n) throw EncodeOutOfBand("encode_signed: |z| >= n/3");
    return z >= 0 ? z : n + z;
}

Bigint decode_signed(const Bigint& n, const Bigint& residue) {
    if (residue < 0 || residue >= n)
        throw EncodeOutOfBand("decode_signed: residue outside [0, n)");
    Bigint v = 2 * residue > n ? residue - n : residue;
    if (3 * abs(v) >= n) throw OverflowDetected("decode_signed: value in reserved band");
    return v;
}

}  // namespace ectl
