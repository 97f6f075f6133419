#include "ectl/nodes.hpp"

#include "ectl/errors.hpp"

namespace ectl {

void ControllerState::handle(const PubkeyMsg& m) {
    pk_.n = m.n;
    pk_.g = m.g;
    pk_.n_squared = m.n * m.n;
    have_pk_ = true;
}

void ControllerState::handle(const SensitivityEpochMsg& m) { epoch_ = m.epoch; }

void ControllerState::handle(const BlindedGainMsg& m) {
    if (!have_pk_) throw NoGainEpoch("controller: gain before public key");
    gain_epoch_ = m.epoch;
    rows_ = m.rows;
    cols_ = m.cols;
    gain_residues_.clear();
    gain_residues_.reserve(m.entries.size());
    for (const Bigint& e : m.entries) {
        Bigint r = e % pk_.n;
        if (r < 0) r += pk_.n;
        gain_residues_.push_back(r);
    }
    have_gain_ = true;
}

EncInputMsg ControllerState::compute_input(const EncStateMsg& m) const {
    if (!have_pk_ || !have_gain_) throw NoGainEpoch("controller: no gain for any epoch");
    if (m.epoch != gain_epoch_) throw EpochMismatch("controller: state epoch != gain epoch");
    if (m.ciphertexts.size() != cols_)
        throw LengthMismatch("controller: state length != gain columns");

    std::vector<Ciphertext> cts;
    cts.reserve(cols_);
    for (const Bigint& c : m.ciphertexts) cts.push_back(Ciphertext{c});

    EncInputMsg out;
    out.epoch = m.epoch;
    out.ciphertexts.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        std::vector<Bigint> row(gain_residues_.begin() + i * cols_,
                                gain_residues_.begin() + (i + 1) * cols_);
        out.ciphertexts.push_back(linear_combination(pk_, row, cts).value);
    }
    return out;
}

std::size_t controller_serve(MessageChannel& channel) {
    ControllerState state;
    std::size_t handled = 0;
    for (;;) {
        WireMessage msg = channel.recv();
        ++handled;
        if (std::holds_alternative<ShutdownMsg>(msg)) return handled;
        if (auto* pk = std::get_if<PubkeyMsg>(&msg)) {
            state.handle(*pk);
        } else if (auto* se = std::get_if<SensitivityEpochMsg>(&msg)) {
            state.handle(*se);
        } else if (auto* bg = std::get_if<BlindedGainMsg>(&msg)) {
            state.handle(*bg);
        } else if (auto* es = std::get_if<EncStateMsg>(&msg)) {
            channel.send(state.compute_input(*es));
        } else {
            throw UnknownType("controller: unexpected message");
        }
    }
}

PlantCrypto::PlantCrypto(KeyPair kp, Bigint r_max, SeededRng enc_rng, SeededRng blind_rng)
    : kp_(std::move(kp)),
      r_max_(std::move(r_max)),
      enc_rng_(enc_rng),
      blind_rng_(blind_rng) {}

PubkeyMsg PlantCrypto::pubkey_msg() const { return PubkeyMsg{kp_.pub.n, kp_.pub.g}; }

BlindedGainMsg PlantCrypto::emit_gain(const IntMat& levels, int sign, std::uint32_t epoch) {
    bk_ = make_blinding_key(r_max_, blind_rng_);
    BlindedGainMsg m;
    m.epoch = epoch;
    m.rows = static_cast<std::uint16_t>(levels.rows());
    m.cols = static_cast<std::uint16_t>(levels.cols());
    m.entries.reserve(static_cast<std::size_t>(levels.rows()) * levels.cols());
    for (Eigen::Index i = 0; i < levels.rows(); ++i)
        for (Eigen::Index j = 0; j < levels.cols(); ++j)
            m.entries.push_back(blind(*bk_, Bigint(sign) * Bigint(levels(i, j))));
    return m;
}

EncStateMsg PlantCrypto::emit_state(const IntVec& levels, std::uint32_t epoch) {
    EncStateMsg m;
    m.epoch = epoch;
    m.ciphertexts.reserve(levels.size());
    for (Eigen::Index i = 0; i < levels.size(); ++i) {
        Bigint residue = encode_signed(kp_.pub.n, Bigint(levels[i]));
        m.ciphertexts.push_back(encrypt(kp_.pub, residue, enc_rng_).value);
    }
    return m;
}

std::vector<std::int64_t> PlantCrypto::apply_input(const EncInputMsg& m,
                                                   std::uint32_t expected_epoch) {
    if (!bk_) throw NoGainEpoch("plant: no blinding factor outstanding");
    if (m.epoch != expected_epoch) throw EpochMismatch("plant: input epoch mismatch");
    std::vector<std::int64_t> out;
    out.reserve(m.ciphertexts.size());
    for (const Bigint& cv : m.ciphertexts) {
        Bigint residue = decrypt(kp_.pub, kp_.priv, Ciphertext{cv});
        Bigint value = decode_signed(kp_.pub.n, residue);
        out.push_back(to_int64(unblind(*bk_, value)));
    }
    return out;
}

}  // namespace ectl
