#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "ectl/bigint.hpp"

namespace ectl {

// Frame layout, all integers big-endian:
//   magic "ECTL" | version u8 (= 1) | msg_type u8 | payload_len u32 | payload
// Payload primitives:
//   uint:   u16 or u32 fixed width
//   bigint: u32 byte count | minimal big-endian magnitude (zero -> count 0)
//   signed: u8 sign (0 nonnegative, 1 negative) | bigint magnitude
// Payloads by type:
//   PUBKEY(1):            bigint n | bigint g
//   BLINDED_GAIN(2):      u32 epoch | u16 rows | u16 cols | rows*cols signed, row-major
//   ENC_STATE(3):         u32 epoch | u16 count | count bigint ciphertexts
//   ENC_INPUT(4):         u32 epoch | u16 count | count bigint ciphertexts
//   SENSITIVITY_EPOCH(5): u32 epoch
//   SHUTDOWN(6):          empty

enum class MsgType : std::uint8_t {
    Pubkey = 1,
    BlindedGain = 2,
    EncState = 3,
    EncInput = 4,
    SensitivityEpoch = 5,
    Shutdown = 6,
};

constexpr std::uint8_t kWireVersion = 1;

struct PubkeyMsg {
    Bigint n;
    Bigint g;
    bool operator==(const PubkeyMsg&) const = default;
};

struct BlindedGainMsg {
    std::uint32_t epoch = 0;
    std::uint16_t rows = 0;
    std::uint16_t cols = 0;
    std::vector<Bigint> entries;  // signed values, row-major
    bool operator==(const BlindedGainMsg&) const = default;
};

struct EncStateMsg {
    std::uint32_t epoch = 0;
    std::vector<Bigint> ciphertexts;
    bool operator==(const EncStateMsg&) const = default;
};

struct EncInputMsg {
    std::uint32_t epoch = 0;
    std::vector<Bigint> ciphertexts;
    bool operator==(const EncInputMsg&) const = default;
};

struct SensitivityEpochMsg {
    std::uint32_t epoch = 0;
    bool operator==(const SensitivityEpochMsg&) const = default;
};

struct ShutdownMsg {
    bool operator==(const ShutdownMsg&) const = default;
};

using WireMessage = std::variant<PubkeyMsg, BlindedGainMsg, EncStateMsg, EncInputMsg,
                                 SensitivityEpochMsg, ShutdownMsg>;

std::vector<std::uint8_t> serialize_message(const WireMessage& msg);

// Parses exactly one full frame; the buffer must contain the frame and
// nothing else. Throws BadMagic, BadVersion, UnknownType, or Truncated
// (the latter also for trailing or missing payload bytes).
WireMessage parse_message(const std::uint8_t* data, std::size_t len);

}  // namespace ectl
