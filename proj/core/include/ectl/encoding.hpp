#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ectl/bigint.hpp"

namespace ectl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Uniform saturating quantizer. Output is an integer level; the represented
// value is level * delta. The rounding floor is strict: floor*(x) is the
// largest integer strictly below x, so exact integers map down by one and
// quantize(delta/2, delta) lands on level 0.
struct QuantizerSpec {
    double delta = 1.0;
    std::int64_t q_sat = 1;
};

std::int64_t quantize(const QuantizerSpec& spec, double x);
IntVec quantize_vector(const QuantizerSpec& spec, const Vec& x);
IntMat quantize_matrix(const QuantizerSpec& spec, const Mat& m);

// Signed residue embedding into [0, n): nonnegative z maps to itself,
// negative z to n + z. Valid band is |z| < n/3; the middle third is reserved
// so wrap-around is detectable. encode throws EncodeOutOfBand, decode throws
// OverflowDetected when a value lands in the reserved band.
Bigint encode_signed(const Bigint& n, const Bigint& z);
Bigint decode_signed(const Bigint& n, const Bigint& residue);

}  // namespace ectl
