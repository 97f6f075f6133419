#pragma once

#include <stdexcept>
#include <string>

namespace ectl {

// Base for every failure the library raises on purpose. name() is stable and
// machine-readable; the CLI maps it to the process exit diagnostic.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define ECTL_DEFINE_ERROR(NAME)                                    \
    class NAME : public Error {                                    \
    public:                                                        \
        explicit NAME(const std::string& what = #NAME)             \
            : Error(#NAME, what) {}                                \
    }

ECTL_DEFINE_ERROR(PrimeSearchExhausted);
ECTL_DEFINE_ERROR(MessageOutOfRange);
ECTL_DEFINE_ERROR(CiphertextOutOfRange);
ECTL_DEFINE_ERROR(ScalarOutOfRange);
ECTL_DEFINE_ERROR(LengthMismatch);
ECTL_DEFINE_ERROR(NotDivisible);
ECTL_DEFINE_ERROR(EncodeOutOfBand);
ECTL_DEFINE_ERROR(OverflowDetected);
ECTL_DEFINE_ERROR(NotSchur);
ECTL_DEFINE_ERROR(NoConvergence);
ECTL_DEFINE_ERROR(DegenerateB);
ECTL_DEFINE_ERROR(QSatTooSmall);
ECTL_DEFINE_ERROR(NotControllable);
ECTL_DEFINE_ERROR(DegreeExhausted);
ECTL_DEFINE_ERROR(SaturationInDomain);
ECTL_DEFINE_ERROR(NoGainEpoch);
ECTL_DEFINE_ERROR(EpochMismatch);
ECTL_DEFINE_ERROR(BadMagic);
ECTL_DEFINE_ERROR(BadVersion);
ECTL_DEFINE_ERROR(Truncated);
ECTL_DEFINE_ERROR(UnknownType);
ECTL_DEFINE_ERROR(TransportError);
ECTL_DEFINE_ERROR(ConfigError);

#undef ECTL_DEFINE_ERROR

}  // namespace ectl
