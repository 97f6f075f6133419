#include "ectl/encoding.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "ectl/errors.hpp"

using namespace ectl;

TEST(Quantize, StrictFloorPinnedLevels) {
    QuantizerSpec spec{1.0, 1000};
    EXPECT_EQ(quantize(spec, 0.0), 0);
    EXPECT_EQ(quantize(spec, 0.5), 0);  // ratio plus half lands on an exact integer: maps down
    EXPECT_EQ(quantize(spec, 0.50001), 1);
    EXPECT_EQ(quantize(spec, 1.0), 1);
    EXPECT_EQ(quantize(spec, 1.5), 1);
    EXPECT_EQ(quantize(spec, -0.5), -1);
    EXPECT_EQ(quantize(spec, -0.49999), 0);
    EXPECT_EQ(quantize(spec, 2.7), 3);
}

TEST(Quantize, FinestBinaryDelta) {
    QuantizerSpec spec{0.001953125, 4096};  // 2^-9
    EXPECT_EQ(quantize(spec, 1.0), 512);
}

TEST(Quantize, SaturationBoundary) {
    QuantizerSpec spec{0.25, 4};
    // +(q + 1/2) delta sits on the in-band side, -(q + 1/2) delta saturates.
    EXPECT_EQ(quantize(spec, 1.125), 4);
    EXPECT_EQ(quantize(spec, std::nextafter(1.125, 2.0)), 4);
    EXPECT_EQ(quantize(spec, 100.0), 4);
    EXPECT_EQ(quantize(spec, -1.125), -4);
    EXPECT_EQ(quantize(spec, std::nextafter(-1.125, 0.0)), -4);
    EXPECT_EQ(quantize(spec, -100.0), -4);
}

TEST(Quantize, SaturationChecksComeBeforeDivision) {
    // A zero sensitivity would divide to inf/nan if the branch order were
    // wrong; the saturation comparisons alone must decide.
    QuantizerSpec spec{0.0, 7};
    EXPECT_EQ(quantize(spec, 1e-300), 7);
    EXPECT_EQ(quantize(spec, 0.0), -7);
    EXPECT_EQ(quantize(spec, -1e-300), -7);
}

TEST(Quantize, MonotoneOverSweep) {
    QuantizerSpec spec{0.125, 20};
    std::int64_t prev = quantize(spec, -4.0);
    for (double x = -4.0 + 1e-3; x <= 4.0; x += 1e-3) {
        std::int64_t level = quantize(spec, x);
        EXPECT_GE(level, prev) << "x=" << x;
        prev = level;
    }
}

TEST(Quantize, ReconstructionErrorHalfDeltaInBand) {
    QuantizerSpec spec{0.03125, 4000};
    for (double x = -100.0; x <= 100.0; x += 0.0137) {
        std::int64_t level = quantize(spec, x);
        double err = x - static_cast<double>(level) * spec.delta;
        EXPECT_GT(err, -spec.delta / 2) << "x=" << x;
        EXPECT_LE(err, spec.delta / 2) << "x=" << x;
    }
}

TEST(Quantize, VectorAndMatrixApplyElementwise) {
    QuantizerSpec spec{0.5, 10};
    Vec x(3);
    x << 1.3, -0.2, 40.0;
    IntVec xq = quantize_vector(spec, x);
    ASSERT_EQ(xq.size(), 3);
    EXPECT_EQ(xq(0), quantize(spec, 1.3));
    EXPECT_EQ(xq(1), quantize(spec, -0.2));
    EXPECT_EQ(xq(2), 10);

    Mat m(2, 2);
    m << 0.6, -0.6, 2.2, -40.0;
    IntMat mq = quantize_matrix(spec, m);
    EXPECT_EQ(mq(0, 0), quantize(spec, 0.6));
    EXPECT_EQ(mq(0, 1), quantize(spec, -0.6));
    EXPECT_EQ(mq(1, 0), quantize(spec, 2.2));
    EXPECT_EQ(mq(1, 1), -10);
}

TEST(Quantize, VectorReconstructionNormBound) {
    QuantizerSpec spec{0.01, 100000};
    Vec x(4);
    x << 3.14159, -2.71828, 0.0, 141.42;
    IntVec xq = quantize_vector(spec, x);
    Vec xbar = xq.cast<double>() * spec.delta;
    // componentwise half-delta error implies sqrt(n) * delta / 2 in norm
    EXPECT_LE((x - xbar).norm(), std::sqrt(4.0) * spec.delta / 2 + 1e-15);
}

TEST(SignedEmbedding, PinnedToyModulus) {
    Bigint n(35);
    EXPECT_EQ(encode_signed(n, Bigint(0)), 0);
    EXPECT_EQ(encode_signed(n, Bigint(7)), 7);
    EXPECT_EQ(encode_signed(n, Bigint(11)), 11);
    EXPECT_EQ(encode_signed(n, Bigint(-1)), 34);
    EXPECT_EQ(encode_signed(n, Bigint(-11)), 24);

    EXPECT_EQ(decode_signed(n, Bigint(0)), 0);
    EXPECT_EQ(decode_signed(n, Bigint(11)), 11);
    EXPECT_EQ(decode_signed(n, Bigint(24)), -11);
    EXPECT_EQ(decode_signed(n, Bigint(34)), -1);
}

TEST(SignedEmbedding, BandLimits) {
    Bigint n(35);
    EXPECT_THROW(encode_signed(n, Bigint(12)), EncodeOutOfBand);
    EXPECT_THROW(encode_signed(n, Bigint(-12)), EncodeOutOfBand);
    EXPECT_THROW(encode_signed(n, Bigint(1000)), EncodeOutOfBand);
    // the reserved middle third decodes to an overflow report
    EXPECT_THROW(decode_signed(n, Bigint(12)), OverflowDetected);
    EXPECT_THROW(decode_signed(n, Bigint(23)), OverflowDetected);
    EXPECT_THROW(decode_signed(n, Bigint(17)), OverflowDetected);
    // residues must already be reduced
    EXPECT_THROW(decode_signed(n, Bigint(35)), EncodeOutOfBand);
    EXPECT_THROW(decode_signed(n, Bigint(-1)), EncodeOutOfBand);
}

TEST(SignedEmbedding, RoundTripAcrossBand) {
    Bigint n(1000003);
    for (long z = -333334; z <= 333334; z += 12345) {
        if (3 * std::abs(z) >= 1000003) continue;
        EXPECT_EQ(decode_signed(n, encode_signed(n, Bigint(z))), z) << "z=" << z;
    }
    EXPECT_EQ(decode_signed(n, encode_signed(n, Bigint(333334))), 333334);
    EXPECT_EQ(decode_signed(n, encode_signed(n, Bigint(-333334))), -333334);
    EXPECT_THROW(encode_signed(n, Bigint(333335)), EncodeOutOfBand);
}
