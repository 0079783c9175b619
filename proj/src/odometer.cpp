#include "f2erg/odometer.hpp"

namespace f2erg {

void DigitStream::extend_to(std::size_t n) {
  while (digits_.size() < n) {
    const std::uint8_t d = tail_key_ ? static_cast<std::uint8_t>(scale_below(keyed_draw(*tail_key_, digits_.size()), 3))
                                     : std::uint8_t{0};
    digits_.push_back(d);
  }
}

unsigned DigitStream::at(std::size_t i) {
  extend_to(i + 1);
  return digits_[i];
}

void DigitStream::set(std::size_t i, unsigned d) {
  extend_to(i + 1);
  digits_[i] = static_cast<std::uint8_t>(d);
}

bool DigitStream::same_prefix(DigitStream& other, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (at(i) != other.at(i)) return false;
  }
  return true;
}

void odometer_step(DigitStream& d, int direction, std::size_t bound) {
  const std::size_t k = carry_position([&](std::size_t i) { return d.at(i); }, direction, bound);
  const unsigned wrapped = direction > 0 ? 0u : 2u;
  for (std::size_t i = 0; i < k; ++i) d.set(i, wrapped);
  d.set(k, d.at(k) + (direction > 0 ? 1u : -1u));
}

}  // namespace f2erg
