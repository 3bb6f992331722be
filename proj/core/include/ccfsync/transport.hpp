#ifndef CCFSYNC_TRANSPORT_HPP
#define CCFSYNC_TRANSPORT_HPP

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "ccfsync/wire.hpp"

namespace ccfsync {

// Frame-oriented duplex link between two sync endpoints.
class Transport {
public:
    virtual ~Transport() = default;

    virtual void send(const Frame& frame) = 0;
    // Blocks until a frame arrives; throws transport_error on EOF/failure.
    virtual Frame recv() = 0;

    uint64_t bytes_sent() const { return bytes_sent_; }
    uint64_t bytes_received() const { return bytes_received_; }

protected:
    void count_sent(size_t n) { bytes_sent_ += n; }
    void count_received(size_t n) { bytes_received_ += n; }

private:
    uint64_t bytes_sent_ = 0;
    uint64_t bytes_received_ = 0;
};

// In-process channel pair for tests and single-process simulation.
// Each endpoint owns one end; sends never block.
class ChannelTransport : public Transport {
public:
    static std::pair<std::unique_ptr<ChannelTransport>,
                     std::unique_ptr<ChannelTransport>>
    make_pair();

    void send(const Frame& frame) override;
    Frame recv() override;

    // Closing one end makes pending/future recv() on the peer throw.
    void close();
    ~ChannelTransport() override;

private:
    struct Queue {
        std::mutex mu;
        std::condition_variable cv;
        std::deque<Frame> frames;
        bool closed = false;
    };

    ChannelTransport() = default;

    std::shared_ptr<Queue> incoming_;
    std::shared_ptr<Queue> outgoing_;
};

// Blocking TCP transport over a connected socket.
class TcpTransport : public Transport {
public:
    explicit TcpTransport(int fd) : fd_(fd) {}
    TcpTransport(TcpTransport&& other) noexcept
        : fd_(std::exchange(other.fd_, -1)) {}
    ~TcpTransport() override;

    static TcpTransport connect_to(const std::string& host, uint16_t port);

    void send(const Frame& frame) override;
    Frame recv() override;

private:
    int fd_ = -1;
};

// Listening socket; binds immediately. Port 0 picks an ephemeral port.
class TcpListener {
public:
    explicit TcpListener(uint16_t port);
    TcpListener(TcpListener&& other) noexcept
        : fd_(std::exchange(other.fd_, -1)), port_(other.port_) {}
    ~TcpListener();

    uint16_t port() const { return port_; }
    TcpTransport accept_one();

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

}  // namespace ccfsync

#endif  // CCFSYNC_TRANSPORT_HPP
