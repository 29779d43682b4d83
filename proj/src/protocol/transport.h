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

#ifndef PRIVFUSION_PROTOCOL_TRANSPORT_H_
#define PRIVFUSION_PROTOCOL_TRANSPORT_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

namespace privfusion::protocol {

struct TransportOptions {
  // Marks the channel as acceptable for test-mode (unperturbed) sessions.
  bool insecure = false;
  std::chrono::milliseconds receive_timeout{60000};
};

// Reliable, ordered delivery of whole frames. Failures surface as
// Error(kTransport).
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void Send(const std::string& frame) = 0;
  virtual std::string Receive() = 0;
  virtual void Close() = 0;
  virtual bool insecure() const = 0;
};

// Two connected in-process endpoints backed by queues.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> MakeLoopbackPair(
    const TransportOptions& options = {});

// Frames over a connected stream socket or pipe-like descriptor; takes
// ownership of fd.
std::unique_ptr<Transport> MakeStreamTransport(int fd, const TransportOptions& options = {});

// Connected pair of stream transports over socketpair(2).
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> MakeSocketPair(
    const TransportOptions& options = {});

// Waits for one TCP connection on host:port (port 0 picks a free port, which
// is reported through on_bound before accepting).
std::unique_ptr<Transport> TcpListen(const std::string& host, uint16_t port,
                                     const TransportOptions& options = {},
                                     void (*on_bound)(uint16_t, void*) = nullptr,
                                     void* context = nullptr);

// Connects to host:port, retrying for up to connect_timeout.
std::unique_ptr<Transport> TcpConnect(const std::string& host, uint16_t port,
                                      const TransportOptions& options = {},
                                      std::chrono::milliseconds connect_timeout =
                                          std::chrono::milliseconds(10000));

}  // namespace privfusion::protocol

#endif  // PRIVFUSION_PROTOCOL_TRANSPORT_H_
