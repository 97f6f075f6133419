#include "ectl/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "ectl/errors.hpp"

namespace ectl {

namespace {

struct FrameQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> frames;
    bool closed = false;

    void push(std::vector<std::uint8_t> frame) {
        {
            std::lock_guard<std::mutex> lk(mu);
            if (closed) throw TransportError("in-process channel: peer closed");
            frames.push_back(std::move(frame));
        }
        cv.notify_one();
    }

    std::vector<std::uint8_t> pop() {
        std::unique_lock<std::mutex> lk(mu);
        cv.wait(lk, [&] { return !frames.empty() || closed; });
        if (frames.empty()) throw TransportError("in-process channel: closed");
        std::vector<std::uint8_t> f = std::move(frames.front());
        frames.pop_front();
        return f;
    }

    void close() {
        {
            std::lock_guard<std::mutex> lk(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

class InProcessChannel final : public MessageChannel {
public:
    InProcessChannel(std::shared_ptr<FrameQueue> out, std::shared_ptr<FrameQueue> in)
        : out_(std::move(out)), in_(std::move(in)) {}
    ~InProcessChannel() override { close(); }

    void send(const WireMessage& msg) override {
        std::vector<std::uint8_t> frame = serialize_message(msg);
        if (send_tap_) send_tap_(frame);
        out_->push(std::move(frame));
    }

    WireMessage recv() override {
        std::vector<std::uint8_t> frame = in_->pop();
        return parse_message(frame.data(), frame.size());
    }

    void close() override {
        out_->close();
        in_->close();
    }

private:
    std::shared_ptr<FrameQueue> out_;
    std::shared_ptr<FrameQueue> in_;
};

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
    while (len > 0) {
        ssize_t n = ::write(fd, data, len);
        if (n <= 0) throw TransportError("tcp: write failed");
        data += n;
        len -= static_cast<std::size_t>(n);
    }
}

// False on clean EOF before the first byte; EOF mid-buffer is a torn frame.
bool read_exact(int fd, std::uint8_t* data, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        ssize_t n = ::read(fd, data + got, len - got);
        if (n == 0) {
            if (got == 0) return false;
            throw Truncated("tcp: stream ended inside a frame");
        }
        if (n < 0) throw TransportError("tcp: read failed");
        got += static_cast<std::size_t>(n);
    }
    return true;
}

class TcpChannel final : public MessageChannel {
public:
    explicit TcpChannel(int fd) : fd_(fd) {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }
    ~TcpChannel() override { close(); }

    void send(const WireMessage& msg) override {
        std::vector<std::uint8_t> frame = serialize_message(msg);
        if (send_tap_) send_tap_(frame);
        write_all(fd_, frame.data(), frame.size());
    }

    WireMessage recv() override {
        std::uint8_t header[10];
        if (!read_exact(fd_, header, sizeof(header)))
            throw TransportError("tcp: peer closed");
        if (header[0] != 'E' || header[1] != 'C' || header[2] != 'T' || header[3] != 'L')
            throw BadMagic("tcp: bad magic");
        std::uint32_t payload_len = 0;
        for (int i = 6; i < 10; ++i) payload_len = payload_len << 8 | header[i];
        if (payload_len > (1u << 26)) throw Truncated("tcp: absurd payload length");
        std::vector<std::uint8_t> frame(sizeof(header) + payload_len);
        std::memcpy(frame.data(), header, sizeof(header));
        if (payload_len > 0 && !read_exact(fd_, frame.data() + sizeof(header), payload_len))
            throw Truncated("tcp: stream ended before the payload");
        return parse_message(frame.data(), frame.size());
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_;
};

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw TransportError("tcp: bad address " + host);
    return addr;
}

}  // namespace

std::pair<std::unique_ptr<MessageChannel>, std::unique_ptr<MessageChannel>>
make_inprocess_pair() {
    auto ab = std::make_shared<FrameQueue>();
    auto ba = std::make_shared<FrameQueue>();
    return {std::make_unique<InProcessChannel>(ab, ba),
            std::make_unique<InProcessChannel>(ba, ab)};
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError("tcp: socket failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = make_addr(host, port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        throw TransportError("tcp: bind failed");
    }
    if (::listen(fd_, 1) != 0) {
        ::close(fd_);
        throw TransportError("tcp: listen failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<MessageChannel> TcpListener::accept(int timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, timeout_ms);
    if (rc == 0) return nullptr;
    if (rc < 0) throw TransportError("tcp: poll failed");
    int conn = ::accept(fd_, nullptr, nullptr);
    if (conn < 0) throw TransportError("tcp: accept failed");
    return std::make_unique<TcpChannel>(conn);
}

std::unique_ptr<MessageChannel> tcp_connect(const std::string& host, std::uint16_t port,
                                            int timeout_ms) {
    sockaddr_in addr = make_addr(host, port);
    const int attempts = std::max(1, timeout_ms / 50);
    for (int i = 0; i < attempts; ++i) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw TransportError("tcp: socket failed");
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0)
            return std::make_unique<TcpChannel>(fd);
        ::close(fd);
        ::poll(nullptr, 0, 50);  // retry while the listener comes up
    }
    throw TransportError("tcp: connect failed");
}

}  // namespace ectl
