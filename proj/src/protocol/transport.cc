// Copyright 2026 The PrivFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "protocol/transport.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "common/error.h"
#include "protocol/message.h"

namespace privfusion::protocol {
namespace {

struct Channel {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> frames;
  bool closed = false;
};

class LoopbackTransport : public Transport {
 public:
  LoopbackTransport(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out,
                    TransportOptions options)
      : in_(std::move(in)), out_(std::move(out)), options_(options) {}
  ~LoopbackTransport() override { Close(); }

  void Send(const std::string& frame) override {
    std::lock_guard<std::mutex> lock(out_->mu);
    Require(!out_->closed, ErrorCode::kTransport, "loopback peer is closed");
    out_->frames.push_back(frame);
    out_->cv.notify_all();
  }

  std::string Receive() override {
    std::unique_lock<std::mutex> lock(in_->mu);
    const bool ready = in_->cv.wait_for(lock, options_.receive_timeout, [&] {
      return !in_->frames.empty() || in_->closed;
    });
    Require(ready, ErrorCode::kTransport, "receive timed out");
    Require(!in_->frames.empty(), ErrorCode::kTransport, "loopback peer closed the channel");
    std::string frame = std::move(in_->frames.front());
    in_->frames.pop_front();
    return frame;
  }

  void Close() override {
    for (auto* ch : {in_.get(), out_.get()}) {
      std::lock_guard<std::mutex> lock(ch->mu);
      ch->closed = true;
      ch->cv.notify_all();
    }
  }

  bool insecure() const override { return options_.insecure; }

 private:
  std::shared_ptr<Channel> in_;
  std::shared_ptr<Channel> out_;
  TransportOptions options_;
};

class StreamTransport : public Transport {
 public:
  StreamTransport(int fd, TransportOptions options) : fd_(fd), options_(options) {}
  ~StreamTransport() override { Close(); }

  void Send(const std::string& frame) override {
    Require(fd_ >= 0, ErrorCode::kTransport, "stream is closed");
    size_t off = 0;
    while (off < frame.size()) {
      const ssize_t n = ::send(fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      Require(n > 0, ErrorCode::kTransport, std::string("send failed: ") + std::strerror(errno));
      off += static_cast<size_t>(n);
    }
  }

  std::string Receive() override {
    unsigned char header[4];
    ReadExact(reinterpret_cast<char*>(header), 4);
    const uint32_t n = FrameBodyLength(header);
    std::string frame(4 + static_cast<size_t>(n), '\0');
    std::memcpy(frame.data(), header, 4);
    ReadExact(frame.data() + 4, n);
    return frame;
  }

  void Close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

  bool insecure() const override { return options_.insecure; }

 private:
  void ReadExact(char* dst, size_t count) {
    Require(fd_ >= 0, ErrorCode::kTransport, "stream is closed");
    size_t off = 0;
    while (off < count) {
      pollfd p{fd_, POLLIN, 0};
      const int ready = ::poll(&p, 1, static_cast<int>(options_.receive_timeout.count()));
      if (ready < 0 && errno == EINTR) continue;
      Require(ready > 0, ErrorCode::kTransport, "receive timed out");
      const ssize_t n = ::recv(fd_, dst + off, count - off, 0);
      if (n < 0 && errno == EINTR) continue;
      Require(n != 0, ErrorCode::kTransport, "peer closed the stream");
      Require(n > 0, ErrorCode::kTransport, std::string("recv failed: ") + std::strerror(errno));
      off += static_cast<size_t>(n);
    }
  }

  int fd_;
  TransportOptions options_;
};

addrinfo* Resolve(const std::string& host, uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  Require(rc == 0, ErrorCode::kTransport,
          "cannot resolve " + host + ": " + ::gai_strerror(rc));
  return res;
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> MakeLoopbackPair(
    const TransportOptions& options) {
  auto a_to_b = std::make_shared<Channel>();
  auto b_to_a = std::make_shared<Channel>();
  return {std::make_unique<LoopbackTransport>(b_to_a, a_to_b, options),
          std::make_unique<LoopbackTransport>(a_to_b, b_to_a, options)};
}

std::unique_ptr<Transport> MakeStreamTransport(int fd, const TransportOptions& options) {
  Require(fd >= 0, ErrorCode::kInvalidArgument, "invalid descriptor");
  return std::make_unique<StreamTransport>(fd, options);
}

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> MakeSocketPair(
    const TransportOptions& options) {
  int fds[2];
  Require(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0, ErrorCode::kTransport,
          std::string("socketpair failed: ") + std::strerror(errno));
  return {MakeStreamTransport(fds[0], options), MakeStreamTransport(fds[1], options)};
}

std::unique_ptr<Transport> TcpListen(const std::string& host, uint16_t port,
                                     const TransportOptions& options,
                                     void (*on_bound)(uint16_t, void*), void* context) {
  addrinfo* res = Resolve(host, port, true);
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  Require(fd >= 0, ErrorCode::kTransport,
          "cannot listen on " + host + ":" + std::to_string(port));
  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const uint16_t bound = ntohs(addr.ss_family == AF_INET6
                                   ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                                   : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  if (on_bound != nullptr) on_bound(bound, context);

  pollfd p{fd, POLLIN, 0};
  const int ready = ::poll(&p, 1, static_cast<int>(options.receive_timeout.count()));
  if (ready <= 0) {
    ::close(fd);
    Fail(ErrorCode::kTransport, "no connection before the timeout");
  }
  const int conn = ::accept(fd, nullptr, nullptr);
  ::close(fd);
  Require(conn >= 0, ErrorCode::kTransport, std::string("accept failed: ") + std::strerror(errno));
  return MakeStreamTransport(conn, options);
}

std::unique_ptr<Transport> TcpConnect(const std::string& host, uint16_t port,
                                      const TransportOptions& options,
                                      std::chrono::milliseconds connect_timeout) {
  const auto deadline = std::chrono::steady_clock::now() + connect_timeout;
  while (true) {
    addrinfo* res = Resolve(host, port, false);
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        ::freeaddrinfo(res);
        return MakeStreamTransport(fd, options);
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    Require(std::chrono::steady_clock::now() < deadline, ErrorCode::kTransport,
            "cannot connect to " + host + ":" + std::to_string(port));
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace privfusion::protocol
