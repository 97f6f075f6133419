#include "ectl/nodes.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "ectl/encoding.hpp"
#include "ectl/errors.hpp"
#include "ectl/paillier.hpp"
#include "ectl/simloop.hpp"
#include "ectl/transport.hpp"

using namespace ectl;

namespace {

KeyPair small_key() { return keypair_from_primes(101, 103); }  // n = 10403

IntMat levels_1x1(std::int64_t v) {
    IntMat m(1, 1);
    m << v;
    return m;
}

IntVec ivec1(std::int64_t v) {
    IntVec x(1);
    x << v;
    return x;
}

}  // namespace

TEST(Pipeline, PinnedBlindedProduct) {
    // gain level 2 folded with sign -1 and blinding 3 -> wire entry -6;
    // state level 4 -> controller returns -24, unblinding leaves -8,
    // and the caller's scaling delta_g * delta = 0.125 gives u = -1.
    KeyPair kp = small_key();
    ControllerState ctl;
    ctl.handle(PubkeyMsg{kp.pub.n, kp.pub.g});
    ctl.handle(SensitivityEpochMsg{1});
    BlindedGainMsg gain;
    gain.epoch = 1;
    gain.rows = 1;
    gain.cols = 1;
    gain.entries = {Bigint(-6)};
    ctl.handle(gain);

    SeededRng rng(3);
    EncStateMsg state;
    state.epoch = 1;
    state.ciphertexts = {encrypt(kp.pub, encode_signed(kp.pub.n, Bigint(4)), rng).value};

    EncInputMsg input = ctl.compute_input(state);
    ASSERT_EQ(input.ciphertexts.size(), 1u);
    EXPECT_EQ(input.epoch, 1u);

    Bigint residue = decrypt(kp.pub, kp.priv, Ciphertext{input.ciphertexts[0]});
    Bigint value = decode_signed(kp.pub.n, residue);
    EXPECT_EQ(value, -24);
    Bigint level = unblind(BlindingKey{Bigint(3), Bigint(1024)}, value);
    EXPECT_EQ(level, -8);
    EXPECT_EQ(static_cast<double>(to_int64(level)) * 0.5 * 0.25, -1.0);
}

TEST(Pipeline, PlantCryptoEndToEnd) {
    PlantCrypto plant(small_key(), Bigint(256), SeededRng(1), SeededRng(2));
    ControllerState ctl;
    ctl.handle(plant.pubkey_msg());
    ctl.handle(SensitivityEpochMsg{5});
    ctl.handle(plant.emit_gain(levels_1x1(2), -1, 5));
    EncInputMsg input = ctl.compute_input(plant.emit_state(ivec1(4), 5));
    std::vector<std::int64_t> u = plant.apply_input(input, 5);
    ASSERT_EQ(u.size(), 1u);
    EXPECT_EQ(u[0], -8);
}

TEST(Pipeline, FreshBlindingPerGainEmission) {
    // r_max keeps |u * r| inside the decode band of the 14 bit test modulus
    PlantCrypto plant(small_key(), Bigint(200), SeededRng(1), SeededRng(2));
    ControllerState ctl;
    ctl.handle(plant.pubkey_msg());

    BlindedGainMsg g1 = plant.emit_gain(levels_1x1(3), 1, 1);
    BlindedGainMsg g2 = plant.emit_gain(levels_1x1(3), 1, 2);
    EXPECT_NE(g1.entries[0], g2.entries[0]);  // different r, same plaintext gain

    // the outstanding factor after the second emission still unblinds exactly
    ctl.handle(g2);
    std::vector<std::int64_t> u = plant.apply_input(ctl.compute_input(plant.emit_state(ivec1(-5), 2)), 2);
    EXPECT_EQ(u[0], -15);
}

TEST(Pipeline, RandomMatrixVectorProductsAreExact) {
    KeyPair kp = keygen(64, 123);
    PlantCrypto plant(kp, Bigint(1) << 20, SeededRng(7), SeededRng(8));
    ControllerState ctl;
    ctl.handle(plant.pubkey_msg());

    SeededRng rng(99);
    for (std::uint32_t epoch = 1; epoch <= 50; ++epoch) {
        IntMat k(2, 2);
        IntVec x(2);
        for (int i = 0; i < 2; ++i) {
            x[i] = static_cast<std::int64_t>(rng.next_u64() % 2001) - 1000;
            for (int j = 0; j < 2; ++j)
                k(i, j) = static_cast<std::int64_t>(rng.next_u64() % 201) - 100;
        }
        int sign = (rng.next_u64() & 1) ? 1 : -1;

        ctl.handle(plant.emit_gain(k, sign, epoch));
        std::vector<std::int64_t> u =
            plant.apply_input(ctl.compute_input(plant.emit_state(x, epoch)), epoch);
        IntVec expect = sign * (k * x);
        ASSERT_EQ(u.size(), 2u);
        EXPECT_EQ(u[0], expect[0]);
        EXPECT_EQ(u[1], expect[1]);
    }
}

TEST(Pipeline, GuardsFireInOrder) {
    KeyPair kp = small_key();
    ControllerState ctl;
    EncStateMsg state;
    state.epoch = 3;
    state.ciphertexts = {Bigint(2)};
    EXPECT_THROW(ctl.compute_input(state), NoGainEpoch);  // nothing arrived yet

    BlindedGainMsg gain;
    gain.epoch = 2;
    gain.rows = 1;
    gain.cols = 1;
    gain.entries = {Bigint(5)};
    EXPECT_THROW(ctl.handle(gain), NoGainEpoch);  // gain cannot precede the key

    ctl.handle(PubkeyMsg{kp.pub.n, kp.pub.g});
    ctl.handle(gain);
    EXPECT_THROW(ctl.compute_input(state), EpochMismatch);  // 3 != 2

    state.epoch = 2;
    state.ciphertexts = {Bigint(2), Bigint(3)};
    EXPECT_THROW(ctl.compute_input(state), LengthMismatch);

    PlantCrypto plant(kp, Bigint(1024), SeededRng(1), SeededRng(2));
    EncInputMsg input;
    input.epoch = 2;
    EXPECT_THROW(plant.apply_input(input, 2), NoGainEpoch);  // no blinding drawn
    plant.emit_gain(levels_1x1(1), 1, 2);
    EXPECT_THROW(plant.apply_input(input, 9), EpochMismatch);
}

TEST(FoldedGain, PinnedLevels) {
    NonlinearDesign nd;
    nd.model.k = 3.2;
    Vec c(3);
    c << 1.2, 5.2, 2.2;
    nd.approx = PolyApprox{c, 0.0};
    nd.q_sat = 1000;
    IntMat folded = nd.folded_gain_levels(1.0);
    ASSERT_EQ(folded.rows(), 1);
    ASSERT_EQ(folded.cols(), 3);
    EXPECT_EQ(folded(0, 0), 1);
    EXPECT_EQ(folded(0, 1), 2);  // 5 - 3
    EXPECT_EQ(folded(0, 2), 2);
}

TEST(FoldedGain, ConstantFitKeepsTheLinearSlot) {
    NonlinearDesign nd;
    nd.model.k = 1.0;
    Vec c(1);
    c << 2.5;
    nd.approx = PolyApprox{c, 0.0};
    nd.q_sat = 1000;
    IntMat folded = nd.folded_gain_levels(0.5);
    ASSERT_EQ(folded.cols(), 2);  // p_eff floors the degree at 1
    EXPECT_EQ(folded(0, 0), 5);
    EXPECT_EQ(folded(0, 1), -2);
}

TEST(Serve, CountsFramesAndAnswersStates) {
    auto [plant_end, ctl_end] = make_inprocess_pair();
    std::size_t handled = 0;
    std::thread server([&] { handled = controller_serve(*ctl_end); });

    PlantCrypto plant(small_key(), Bigint(128), SeededRng(4), SeededRng(5));
    plant_end->send(plant.pubkey_msg());
    plant_end->send(SensitivityEpochMsg{1});
    plant_end->send(plant.emit_gain(levels_1x1(-3), 1, 1));
    plant_end->send(plant.emit_state(ivec1(7), 1));
    auto reply = plant_end->recv();
    plant_end->send(ShutdownMsg{});
    server.join();

    // assertions only after the join so a failure cannot tear down a live thread
    EXPECT_EQ(plant.apply_input(std::get<EncInputMsg>(reply), 1)[0], -21);
    EXPECT_EQ(handled, 5u);
}

TEST(Transport, TcpCarriesFramesBothWays) {
    TcpListener listener("127.0.0.1", 0);
    ASSERT_GT(listener.port(), 0);

    PubkeyMsg pk{Bigint(35), Bigint(36)};
    std::thread client([&] {
        auto ch = tcp_connect("127.0.0.1", listener.port());
        ch->send(pk);
        EXPECT_EQ(std::get<SensitivityEpochMsg>(ch->recv()).epoch, 7u);
        ch->close();
    });

    auto server = listener.accept(5000);
    ASSERT_NE(server, nullptr);
    EXPECT_EQ(std::get<PubkeyMsg>(server->recv()), pk);
    server->send(SensitivityEpochMsg{7});
    client.join();
    server->close();
}

TEST(Transport, AcceptTimesOutWithoutClient) {
    TcpListener listener("127.0.0.1", 0);
    auto t0 = std::chrono::steady_clock::now();
    EXPECT_EQ(listener.accept(50), nullptr);
    EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(5));
}

TEST(Transport, TornTcpFrameSurfacesAsTruncated) {
    TcpListener listener("127.0.0.1", 0);

    std::thread client([&] {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        ASSERT_GE(fd, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(listener.port());
        ASSERT_EQ(inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr), 1);
        ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
        std::vector<std::uint8_t> frame = serialize_message(PubkeyMsg{Bigint(35), Bigint(36)});
        // send the header plus one payload byte, then vanish mid-frame
        ASSERT_EQ(::send(fd, frame.data(), 11, 0), 11);
        ::close(fd);
    });

    auto server = listener.accept(5000);
    ASSERT_NE(server, nullptr);
    EXPECT_THROW(server->recv(), Truncated);
    client.join();
}

TEST(Transport, GarbageBytesSurfaceAsBadMagic) {
    TcpListener listener("127.0.0.1", 0);

    std::thread client([&] {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        ASSERT_GE(fd, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(listener.port());
        ASSERT_EQ(inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr), 1);
        ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
        const char junk[16] = "GARBAGEGARBAGE!";
        ASSERT_EQ(::send(fd, junk, sizeof(junk), 0), static_cast<ssize_t>(sizeof(junk)));
        ::close(fd);
    });

    auto server = listener.accept(5000);
    ASSERT_NE(server, nullptr);
    EXPECT_THROW(server->recv(), BadMagic);
    client.join();
}

TEST(Transport, ClosingOneEndWakesTheBlockedPeer) {
    auto [a, b] = make_inprocess_pair();
    std::thread waiter([&] { EXPECT_THROW(b->recv(), TransportError); });
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    a->close();
    waiter.join();
}
