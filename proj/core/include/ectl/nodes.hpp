#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ectl/encoding.hpp"
#include "ectl/paillier.hpp"
#include "ectl/transport.hpp"
#include "ectl/wire.hpp"

namespace ectl {

// Controller-side state. Deliberately holds nothing but public key material,
// the blinded gain residues, and an opaque epoch counter: quantizer
// sensitivities, blinding factors, plaintext levels, and private key parts
// have no field here to live in. The controller never decrypts.
class ControllerState {
public:
    void handle(const PubkeyMsg& m);
    void handle(const SensitivityEpochMsg& m);
    void handle(const BlindedGainMsg& m);

    // One homomorphic linear combination per gain row. Throws NoGainEpoch
    // before any gain arrived, EpochMismatch when the state message belongs
    // to a different epoch, LengthMismatch when the dimension disagrees.
    EncInputMsg compute_input(const EncStateMsg& m) const;

private:
    PublicKey pk_;
    bool have_pk_ = false;
    std::uint32_t epoch_ = 0;
    bool have_gain_ = false;
    std::uint32_t gain_epoch_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Bigint> gain_residues_;  // entries reduced into [0, n)
};

// Serves one plant over the channel until a Shutdown frame arrives. Returns
// the number of frames handled, Shutdown included.
std::size_t controller_serve(MessageChannel& channel);

// Plant-side cryptographic endpoint: owns the key pair and the current
// blinding factor. Quantization stays with the caller; this class only maps
// integer levels to and from ciphertext vectors.
class PlantCrypto {
public:
    PlantCrypto(KeyPair kp, Bigint r_max, SeededRng enc_rng, SeededRng blind_rng);

    PubkeyMsg pubkey_msg() const;
    const PublicKey& pub() const { return kp_.pub; }

    // Draws a fresh blinding factor and emits r * (sign * levels). The same
    // factor is used to unblind every input until the next emit_gain.
    BlindedGainMsg emit_gain(const IntMat& levels, int sign, std::uint32_t epoch);

    EncStateMsg emit_state(const IntVec& levels, std::uint32_t epoch);

    // decrypt -> signed decode -> exact unblind, one entry per input channel.
    std::vector<std::int64_t> apply_input(const EncInputMsg& m, std::uint32_t expected_epoch);

private:
    KeyPair kp_;
    Bigint r_max_;
    std::optional<BlindingKey> bk_;
    SeededRng enc_rng_;
    SeededRng blind_rng_;
};

}  // namespace ectl
