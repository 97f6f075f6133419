#include "ectl/wire.hpp"

#include "ectl/errors.hpp"

namespace ectl {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_bigint(std::vector<std::uint8_t>& out, const Bigint& v) {
    std::vector<std::uint8_t> mag = to_bytes_be(v);
    put_u32(out, static_cast<std::uint32_t>(mag.size()));
    out.insert(out.end(), mag.begin(), mag.end());
}

void put_signed(std::vector<std::uint8_t>& out, const Bigint& v) {
    out.push_back(v < 0 ? 1 : 0);
    put_bigint(out, abs(v));
}

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 4;
        return v;
    }
    Bigint bigint() {
        std::uint32_t count = u32();
        need(count);
        Bigint v = from_bytes_be(data_ + pos_, count);
        pos_ += count;
        return v;
    }
    Bigint signed_bigint() {
        std::uint8_t sign = u8();
        if (sign > 1) throw Truncated("parse: bad sign byte");
        Bigint mag = bigint();
        return sign ? Bigint(-mag) : mag;
    }
    std::size_t remaining() const { return len_ - pos_; }

private:
    void need(std::size_t n) const {
        if (len_ - pos_ < n) throw Truncated("parse: frame shorter than declared");
    }
    const std::uint8_t* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_message(const WireMessage& msg) {
    std::vector<std::uint8_t> payload;
    std::uint8_t type = 0;

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PubkeyMsg>) {
                type = static_cast<std::uint8_t>(MsgType::Pubkey);
                put_bigint(payload, m.n);
                put_bigint(payload, m.g);
            } else if constexpr (std::is_same_v<T, BlindedGainMsg>) {
                type = static_cast<std::uint8_t>(MsgType::BlindedGain);
                put_u32(payload, m.epoch);
                put_u16(payload, m.rows);
                put_u16(payload, m.cols);
                if (m.entries.size() != static_cast<std::size_t>(m.rows) * m.cols)
                    throw LengthMismatch("serialize: gain entry count mismatch");
                for (const Bigint& e : m.entries) put_signed(payload, e);
            } else if constexpr (std::is_same_v<T, EncStateMsg>) {
                type = static_cast<std::uint8_t>(MsgType::EncState);
                put_u32(payload, m.epoch);
                put_u16(payload, static_cast<std::uint16_t>(m.ciphertexts.size()));
                for (const Bigint& c : m.ciphertexts) put_bigint(payload, c);
            } else if constexpr (std::is_same_v<T, EncInputMsg>) {
                type = static_cast<std::uint8_t>(MsgType::EncInput);
                put_u32(payload, m.epoch);
                put_u16(payload, static_cast<std::uint16_t>(m.ciphertexts.size()));
                for (const Bigint& c : m.ciphertexts) put_bigint(payload, c);
            } else if constexpr (std::is_same_v<T, SensitivityEpochMsg>) {
                type = static_cast<std::uint8_t>(MsgType::SensitivityEpoch);
                put_u32(payload, m.epoch);
            } else {
                type = static_cast<std::uint8_t>(MsgType::Shutdown);
            }
        },
        msg);

    std::vector<std::uint8_t> out;
    out.reserve(payload.size() + 10);
    out.push_back('E');
    out.push_back('C');
    out.push_back('T');
    out.push_back('L');
    out.push_back(kWireVersion);
    out.push_back(type);
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

WireMessage parse_message(const std::uint8_t* data, std::size_t len) {
    if (len < 4) throw BadMagic("parse: frame too short for magic");
    if (data[0] != 'E' || data[1] != 'C' || data[2] != 'T' || data[3] != 'L')
        throw BadMagic("parse: bad magic");
    if (len < 6) throw Truncated("parse: missing version/type");
    if (data[4] != kWireVersion) throw BadVersion("parse: unsupported version");
    std::uint8_t type = data[5];

    Reader hdr(data + 6, len - 6);
    std::uint32_t payload_len = hdr.u32();
    if (hdr.remaining() != payload_len)
        throw Truncated("parse: payload length mismatch");

    Reader r(data + 10, payload_len);
    WireMessage out;
    switch (static_cast<MsgType>(type)) {
        case MsgType::Pubkey: {
            PubkeyMsg m;
            m.n = r.bigint();
            m.g = r.bigint();
            out = m;
            break;
        }
        case MsgType::BlindedGain: {
            BlindedGainMsg m;
            m.epoch = r.u32();
            m.rows = r.u16();
            m.cols = r.u16();
            m.entries.reserve(static_cast<std::size_t>(m.rows) * m.cols);
            for (std::size_t i = 0; i < static_cast<std::size_t>(m.rows) * m.cols; ++i)
                m.entries.push_back(r.signed_bigint());
            out = m;
            break;
        }
        case MsgType::EncState: {
            EncStateMsg m;
            m.epoch = r.u32();
            std::uint16_t count = r.u16();
            for (std::uint16_t i = 0; i < count; ++i) m.ciphertexts.push_back(r.bigint());
            out = m;
            break;
        }
        case MsgType::EncInput: {
            EncInputMsg m;
            m.epoch = r.u32();
            std::uint16_t count = r.u16();
            for (std::uint16_t i = 0; i < count; ++i) m.ciphertexts.push_back(r.bigint());
            out = m;
            break;
        }
        case MsgType::SensitivityEpoch: {
            SensitivityEpochMsg m;
            m.epoch = r.u32();
            out = m;
            break;
        }
        case MsgType::Shutdown:
            out = ShutdownMsg{};
            break;
        default:
            throw UnknownType("parse: unknown message type");
    }
    if (r.remaining() != 0) throw Truncated("parse: trailing payload bytes");
    return out;
}

}  // namespace ectl
