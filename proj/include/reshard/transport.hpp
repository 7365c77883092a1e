// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "reshard/shard_view.hpp"

namespace reshard {

/// One framed point-to-point message: a chunk of a transfer task.
struct Frame {
  std::uint32_t tensor_index = 0;
  int layer = 0;
  ShardView bounds;  // global coordinates of the chunk
  std::vector<std::uint8_t> data;
};

/// Point-to-point transport with per-link in-order delivery. Cross-link
/// ordering is unspecified.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual void send(int src, int dst, Frame frame) = 0;
  /// Next pending frame addressed to `dst`, lowest source rank first.
  virtual std::optional<std::pair<int, Frame>> receive(int dst) = 0;
  virtual void barrier() = 0;

  virtual std::int64_t bytes_sent() const = 0;
};

/// In-memory loopback transport for tests and the reference executor.
class LoopbackTransport : public Transport {
 public:
  void send(int src, int dst, Frame frame) override;
  std::optional<std::pair<int, Frame>> receive(int dst) override;
  void barrier() override {}
  std::int64_t bytes_sent() const override { return bytes_sent_; }

 private:
  std::map<std::pair<int, int>, std::deque<Frame>> queues_;  // (dst, src) -> FIFO
  std::int64_t bytes_sent_ = 0;
};

/// Records a per-event trace (layer, src, dst, bytes) of everything passing
/// through an inner transport; consumed by timing calibration checks.
class RecordingTransport : public Transport {
 public:
  struct Event {
    std::int64_t sequence = 0;
    int layer = 0;
    int src = 0;
    int dst = 0;
    std::int64_t bytes = 0;
  };

  explicit RecordingTransport(Transport& inner) : inner_(inner) {}

  void send(int src, int dst, Frame frame) override;
  std::optional<std::pair<int, Frame>> receive(int dst) override { return inner_.receive(dst); }
  void barrier() override { inner_.barrier(); }
  std::int64_t bytes_sent() const override { return inner_.bytes_sent(); }

  const std::vector<Event>& events() const { return events_; }

 private:
  Transport& inner_;
  std::vector<Event> events_;
  std::int64_t next_sequence_ = 0;
};

}  // namespace reshard
