#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "f2erg/errors.hpp"
#include "f2erg/random.hpp"

namespace f2erg {

inline constexpr std::size_t kCarryLookahead = 64;

// Position of the digit that absorbs a base-3 carry (direction +1) or
// borrow (direction -1): the first digit that is not 2 (resp. not 0).
// `digit_at(i)` may extend a lazy stream. Throws LookaheadExceeded when the
// carry would run past `bound` digits.
template <class DigitAt>
std::size_t carry_position(DigitAt&& digit_at, int direction, std::size_t bound = kCarryLookahead) {
  const unsigned saturated = direction > 0 ? 2u : 0u;
  for (std::size_t i = 0; i < bound; ++i) {
    if (digit_at(i) != saturated) return i;
  }
  throw LookaheadExceeded("odometer carry ran past " + std::to_string(bound) + " digits");
}

// Base-3 digit sequence, least significant first. Digits past the known
// prefix come from a keyed stream (uniform digits) or are zero.
class DigitStream {
 public:
  DigitStream() = default;
  explicit DigitStream(std::vector<std::uint8_t> digits, std::optional<std::uint64_t> tail_key = std::nullopt)
      : digits_(std::move(digits)), tail_key_(tail_key) {}

  static DigitStream zeros() { return DigitStream(); }
  static DigitStream random(std::uint64_t key) { return DigitStream({}, key); }

  unsigned at(std::size_t i);
  void set(std::size_t i, unsigned d);
  std::size_t known() const noexcept { return digits_.size(); }

  // Equality on the first n digits.
  bool same_prefix(DigitStream& other, std::size_t n);

 private:
  void extend_to(std::size_t n);

  std::vector<std::uint8_t> digits_;
  std::optional<std::uint64_t> tail_key_;
};

// Base-3 add-one (direction +1) or subtract-one (direction -1) with carry.
void odometer_step(DigitStream& d, int direction, std::size_t bound = kCarryLookahead);

}  // namespace f2erg
