#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <string>

#include "f2erg/letter.hpp"
#include "f2erg/odometer.hpp"
#include "f2erg/random.hpp"

namespace f2erg {

// Half-infinite reduced word, materialized on demand.
//
// Known letters are memoized; letter i+1 is drawn when first demanded as
// successor(letter i, digit) where the digit is a uniform draw from a keyed
// stream, so the whole word is a pure function of (tail key, counter).
// Letters are stored unreflected and inverted on read when the reflect flag
// is set; the successor numbering commutes with inversion, so the tail
// needs no adjustment under reflection.
//
// Invariant: at least one letter is known. Not thread-safe: reads extend.
class LazyWord {
 public:
  // Draws the first letter uniformly from the stream.
  static LazyWord sample(std::uint64_t tail_key);
  // Fixed first letter, random tail.
  static LazyWord starting_with(Letter first, std::uint64_t tail_key);
  // Fixed prefix (must be reduced and non-empty), random tail.
  static LazyWord with_prefix(std::span<const Letter> prefix, std::uint64_t tail_key);

  Letter at(std::size_t i);
  Letter front() const noexcept { return emit(known_.front()); }
  std::size_t known_length() const noexcept { return known_.size(); }
  bool reflected() const noexcept { return reflect_; }

  // Successor digit of letter i+1 after letter i.
  unsigned digit(std::size_t i);

  void prepend(Letter s);
  void drop_front();
  void reflect() noexcept { reflect_ = !reflect_; }

  // Base-3 odometer on the digit stream (letter 0 fixed).
  void odometer(int direction, std::size_t bound = kCarryLookahead);

  // Exact equality as infinite words.
  bool same_as(LazyWord& other);

  // First n emitted letters as "abAB" text.
  std::string prefix_string(std::size_t n);

  std::uint64_t tail_key() const noexcept { return tail_key_; }

 private:
  LazyWord(std::uint64_t key, std::uint64_t counter) : tail_key_(key), next_counter_(counter) {}

  Letter emit(Letter stored) const noexcept { return reflect_ ? inverse(stored) : stored; }
  void extend_to(std::size_t n);

  std::deque<Letter> known_;
  std::uint64_t tail_key_ = 0;
  std::uint64_t next_counter_ = 0;
  bool reflect_ = false;
};

}  // namespace f2erg
