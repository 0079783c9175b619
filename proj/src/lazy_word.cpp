#include "f2erg/lazy_word.hpp"

#include <stdexcept>
#include <vector>

namespace f2erg {

LazyWord LazyWord::sample(std::uint64_t tail_key) {
  LazyWord w(tail_key, 1);
  w.known_.push_back(from_code(scale_below(keyed_draw(tail_key, 0), 4)));
  return w;
}

LazyWord LazyWord::starting_with(Letter first, std::uint64_t tail_key) {
  LazyWord w(tail_key, 1);
  w.known_.push_back(first);
  return w;
}

LazyWord LazyWord::with_prefix(std::span<const Letter> prefix, std::uint64_t tail_key) {
  LazyWord w(tail_key, 1);
  for (Letter s : prefix) {
    if (!w.known_.empty() && w.known_.back() == inverse(s)) throw std::invalid_argument("prefix is not reduced");
    w.known_.push_back(s);
  }
  if (w.known_.empty()) throw std::invalid_argument("prefix must be non-empty");
  return w;
}

void LazyWord::extend_to(std::size_t n) {
  while (known_.size() < n) {
    const unsigned d = scale_below(keyed_draw(tail_key_, next_counter_++), 3);
    known_.push_back(successor(known_.back(), d));
  }
}

Letter LazyWord::at(std::size_t i) {
  extend_to(i + 1);
  return emit(known_[i]);
}

unsigned LazyWord::digit(std::size_t i) {
  extend_to(i + 2);
  return successor_digit(known_[i], known_[i + 1]);
}

void LazyWord::prepend(Letter s) {
  const Letter stored = reflect_ ? inverse(s) : s;
  if (stored == inverse(known_.front())) throw std::logic_error("prepend would cancel; use drop_front");
  known_.push_front(stored);
}

void LazyWord::drop_front() {
  extend_to(2);
  known_.pop_front();
}

void LazyWord::odometer(int direction, std::size_t bound) {
  const std::size_t k = carry_position([&](std::size_t i) { return digit(i); }, direction, bound);
  // digit(k) materialized letters 0..k+1; re-decode every known letter.
  std::vector<unsigned> digits(known_.size() - 1);
  for (std::size_t i = 0; i + 1 < known_.size(); ++i) digits[i] = successor_digit(known_[i], known_[i + 1]);
  const unsigned wrapped = direction > 0 ? 0u : 2u;
  for (std::size_t i = 0; i < k; ++i) digits[i] = wrapped;
  digits[k] = direction > 0 ? digits[k] + 1 : digits[k] - 1;
  for (std::size_t i = 0; i < digits.size(); ++i) known_[i + 1] = successor(known_[i], digits[i]);
}

bool LazyWord::same_as(LazyWord& other) {
  const std::size_t n = std::max(known_length(), other.known_length());
  extend_to(n);
  other.extend_to(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (emit(known_[i]) != other.emit(other.known_[i])) return false;
  }
  return tail_key_ == other.tail_key_ && next_counter_ == other.next_counter_;
}

std::string LazyWord::prefix_string(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(to_char(at(i)));
  return s;
}

}  // namespace f2erg
