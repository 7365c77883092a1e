// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace reshard {

/// Half-open integer interval [lo, hi).
struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// An n-dimensional hyper-rectangle of tensor indices, one half-open
/// interval per dimension. Always non-empty by construction.
class ShardView {
 public:
  ShardView() = default;

  explicit ShardView(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
    for (const auto& iv : bounds_) {
      if (iv.lo < 0 || iv.lo >= iv.hi) {
        throw std::invalid_argument("ShardView: interval [" + std::to_string(iv.lo) +
                                    "," + std::to_string(iv.hi) + ") is empty or negative");
      }
    }
  }

  /// Full view over a tensor shape.
  static ShardView full(const std::vector<std::int64_t>& shape) {
    std::vector<Interval> b;
    b.reserve(shape.size());
    for (auto d : shape) b.push_back({0, d});
    return ShardView(std::move(b));
  }

  std::size_t ndims() const { return bounds_.size(); }
  const Interval& dim(std::size_t i) const { return bounds_.at(i); }
  const std::vector<Interval>& bounds() const { return bounds_; }

  std::int64_t element_count() const {
    std::int64_t n = 1;
    for (const auto& iv : bounds_) n *= iv.length();
    return n;
  }

  /// Extent per dimension.
  std::vector<std::int64_t> extents() const {
    std::vector<std::int64_t> e;
    e.reserve(bounds_.size());
    for (const auto& iv : bounds_) e.push_back(iv.length());
    return e;
  }

  bool contains(const ShardView& other) const {
    if (other.ndims() != ndims()) return false;
    for (std::size_t i = 0; i < ndims(); ++i) {
      if (other.bounds_[i].lo < bounds_[i].lo || other.bounds_[i].hi > bounds_[i].hi)
        return false;
    }
    return true;
  }

  bool contains_point(const std::vector<std::int64_t>& p) const {
    if (p.size() != ndims()) return false;
    for (std::size_t i = 0; i < ndims(); ++i) {
      if (p[i] < bounds_[i].lo || p[i] >= bounds_[i].hi) return false;
    }
    return true;
  }

  bool operator==(const ShardView&) const = default;

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < bounds_.size(); ++i) {
      if (i) os << "x";
      os << "[" << bounds_[i].lo << "," << bounds_[i].hi << ")";
    }
    return os.str();
  }

 private:
  std::vector<Interval> bounds_;
};

/// Per-dimension interval intersection; absent if empty along any axis.
/// Throws on dimensionality mismatch.
inline std::optional<ShardView> intersect(const ShardView& a, const ShardView& b) {
  if (a.ndims() != b.ndims()) {
    throw std::invalid_argument("intersect: dimensionality mismatch (" +
                                std::to_string(a.ndims()) + " vs " +
                                std::to_string(b.ndims()) + ")");
  }
  std::vector<Interval> out;
  out.reserve(a.ndims());
  for (std::size_t i = 0; i < a.ndims(); ++i) {
    Interval iv{std::max(a.dim(i).lo, b.dim(i).lo), std::min(a.dim(i).hi, b.dim(i).hi)};
    if (iv.lo >= iv.hi) return std::nullopt;
    out.push_back(iv);
  }
  return ShardView(std::move(out));
}

}  // namespace reshard
