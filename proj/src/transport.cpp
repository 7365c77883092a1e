// SPDX-License-Identifier: Apache-2.0
#include "reshard/transport.hpp"

namespace reshard {

void LoopbackTransport::send(int src, int dst, Frame frame) {
  bytes_sent_ += static_cast<std::int64_t>(frame.data.size());
  queues_[{dst, src}].push_back(std::move(frame));
}

std::optional<std::pair<int, Frame>> LoopbackTransport::receive(int dst) {
  for (auto& [key, q] : queues_) {
    if (key.first != dst || q.empty()) continue;
    Frame f = std::move(q.front());
    q.pop_front();
    return std::make_pair(key.second, std::move(f));
  }
  return std::nullopt;
}

void RecordingTransport::send(int src, int dst, Frame frame) {
  events_.push_back({next_sequence_++, frame.layer, src, dst,
                     static_cast<std::int64_t>(frame.data.size())});
  inner_.send(src, dst, std::move(frame));
}

}  // namespace reshard
