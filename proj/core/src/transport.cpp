#include "ccfsync/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ccfsync/bytes.hpp"
#include "ccfsync/errors.hpp"

namespace ccfsync {

// --- in-process channel ---

std::pair<std::unique_ptr<ChannelTransport>, std::unique_ptr<ChannelTransport>>
ChannelTransport::make_pair() {
    auto a_to_b = std::make_shared<Queue>();
    auto b_to_a = std::make_shared<Queue>();

    auto a = std::unique_ptr<ChannelTransport>(new ChannelTransport());
    a->outgoing_ = a_to_b;
    a->incoming_ = b_to_a;

    auto b = std::unique_ptr<ChannelTransport>(new ChannelTransport());
    b->outgoing_ = b_to_a;
    b->incoming_ = a_to_b;

    return {std::move(a), std::move(b)};
}

void ChannelTransport::send(const Frame& frame) {
    count_sent(frame.encoded_size());
    {
        std::lock_guard<std::mutex> lock(outgoing_->mu);
        if (outgoing_->closed) {
            throw transport_error("channel closed");
        }
        outgoing_->frames.push_back(frame);
    }
    outgoing_->cv.notify_one();
}

Frame ChannelTransport::recv() {
    std::unique_lock<std::mutex> lock(incoming_->mu);
    incoming_->cv.wait(lock, [this] {
        return !incoming_->frames.empty() || incoming_->closed;
    });
    if (incoming_->frames.empty()) {
        throw transport_error("channel closed by peer");
    }
    Frame frame = std::move(incoming_->frames.front());
    incoming_->frames.pop_front();
    count_received(frame.encoded_size());
    return frame;
}

void ChannelTransport::close() {
    for (const auto& q : {outgoing_, incoming_}) {
        if (q) {
            {
                std::lock_guard<std::mutex> lock(q->mu);
                q->closed = true;
            }
            q->cv.notify_all();
        }
    }
}

ChannelTransport::~ChannelTransport() { close(); }

// --- TCP ---

namespace {

void write_all(int fd, const uint8_t* data, size_t len) {
    while (len > 0) {
        ssize_t n = ::write(fd, data, len);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw transport_error(std::string("write: ") + std::strerror(errno));
        }
        data += n;
        len -= static_cast<size_t>(n);
    }
}

void read_all(int fd, uint8_t* data, size_t len) {
    while (len > 0) {
        ssize_t n = ::read(fd, data, len);
        if (n == 0) {
            throw transport_error("connection closed by peer");
        }
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw transport_error(std::string("read: ") + std::strerror(errno));
        }
        data += n;
        len -= static_cast<size_t>(n);
    }
}

}  // namespace

TcpTransport::~TcpTransport() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

TcpTransport TcpTransport::connect_to(const std::string& host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints,
                           &result);
    if (rc != 0) {
        throw transport_error(std::string("getaddrinfo: ") + gai_strerror(rc));
    }
    int fd = -1;
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            break;
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(result);
    if (fd < 0) {
        throw transport_error("could not connect to " + host + ":" +
                              std::to_string(port));
    }
    return TcpTransport(fd);
}

void TcpTransport::send(const Frame& frame) {
    std::vector<uint8_t> encoded = encode_frame(frame);
    write_all(fd_, encoded.data(), encoded.size());
    count_sent(encoded.size());
}

Frame TcpTransport::recv() {
    uint8_t header[5];
    read_all(fd_, header, sizeof header);
    Frame frame;
    frame.type = static_cast<FrameType>(header[0]);
    uint32_t len = (static_cast<uint32_t>(header[1]) << 24) |
                   (static_cast<uint32_t>(header[2]) << 16) |
                   (static_cast<uint32_t>(header[3]) << 8) |
                   static_cast<uint32_t>(header[4]);
    frame.payload.resize(len);
    if (len > 0) {
        read_all(fd_, frame.payload.data(), len);
    }
    count_received(frame.encoded_size());
    return frame;
}

TcpListener::TcpListener(uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) {
        throw transport_error(std::string("socket: ") + std::strerror(errno));
    }
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        throw transport_error(std::string("bind: ") + std::strerror(errno));
    }
    if (::listen(fd_, 1) < 0) {
        throw transport_error(std::string("listen: ") + std::strerror(errno));
    }
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
        throw transport_error(std::string("getsockname: ") +
                              std::strerror(errno));
    }
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

TcpTransport TcpListener::accept_one() {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        throw transport_error(std::string("accept: ") + std::strerror(errno));
    }
    return TcpTransport(fd);
}

}  // namespace ccfsync
