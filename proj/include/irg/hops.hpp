#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace irg {

/// Hop count that can be infinite. Disconnected graphs report their
/// diameter through this type rather than a sentinel value.
class HopCount {
 public:
  constexpr HopCount() : v_(0) {}
  constexpr explicit HopCount(std::uint64_t v) : v_(v) {}

  static constexpr HopCount infinity() { return HopCount(kInf, Tag{}); }

  constexpr bool is_finite() const { return v_ != kInf; }
  constexpr bool is_infinite() const { return v_ == kInf; }

  constexpr std::uint64_t value() const {
    if (v_ == kInf) throw std::logic_error("HopCount: value() on infinity");
    return v_;
  }

  friend constexpr bool operator==(HopCount a, HopCount b) = default;
  friend constexpr auto operator<=>(HopCount a, HopCount b) { return a.v_ <=> b.v_; }

  friend constexpr HopCount operator+(HopCount a, std::uint64_t d) {
    return a.is_infinite() ? a : HopCount(a.v_ + d);
  }

  friend constexpr HopCount max(HopCount a, HopCount b) { return a < b ? b : a; }
  friend constexpr HopCount min(HopCount a, HopCount b) { return a < b ? a : b; }

  std::string str() const { return is_infinite() ? "inf" : std::to_string(v_); }

  friend std::ostream& operator<<(std::ostream& os, HopCount h) { return os << h.str(); }

 private:
  struct Tag {};
  constexpr HopCount(std::uint64_t v, Tag) : v_(v) {}
  static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t v_;
};

}  // namespace irg
