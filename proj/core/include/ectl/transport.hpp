#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "ectl/wire.hpp"

namespace ectl {

// Bidirectional, ordered, reliable message stream. Both implementations move
// the same serialized frames, so a run is byte-identical whichever carries
// it. recv blocks; a closed peer surfaces as TransportError.
class MessageChannel {
public:
    virtual ~MessageChannel() = default;
    virtual void send(const WireMessage& msg) = 0;
    virtual WireMessage recv() = 0;
    virtual void close() = 0;

    // Observes every outbound frame at the byte layer (testing hook).
    void set_send_tap(std::function<void(const std::vector<std::uint8_t>&)> tap) {
        send_tap_ = std::move(tap);
    }

protected:
    std::function<void(const std::vector<std::uint8_t>&)> send_tap_;
};

// Two ends of an in-process duplex queue.
std::pair<std::unique_ptr<MessageChannel>, std::unique_ptr<MessageChannel>>
make_inprocess_pair();

// Loopback/TCP transport. The listener binds immediately (port 0 picks an
// ephemeral port); accept waits up to timeout_ms and returns nullptr on
// timeout.
class TcpListener {
public:
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    std::unique_ptr<MessageChannel> accept(int timeout_ms);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

std::unique_ptr<MessageChannel> tcp_connect(const std::string& host, std::uint16_t port,
                                            int timeout_ms = 5000);

}  // namespace ectl
