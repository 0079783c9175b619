#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace f2erg {

// Generators and their inverses as 2-bit codes; inversion flips bit 1.
// Code order a < b < a^-1 < b^-1 is the global letter order.
enum class Letter : std::uint8_t { a = 0, b = 1, A = 2, B = 3 };

inline constexpr std::array<Letter, 4> kLetters{Letter::a, Letter::b, Letter::A, Letter::B};

constexpr std::uint8_t code(Letter s) noexcept { return static_cast<std::uint8_t>(s); }
constexpr Letter from_code(unsigned c) noexcept { return static_cast<Letter>(c & 3u); }
constexpr Letter inverse(Letter s) noexcept { return from_code(code(s) ^ 2u); }
constexpr bool is_positive(Letter s) noexcept { return code(s) < 2; }
// True for a and a^-1.
constexpr bool is_a_type(Letter s) noexcept { return (code(s) & 1u) == 0; }

constexpr char to_char(Letter s) noexcept { return "abAB"[code(s)]; }

constexpr Letter letter_from_char(char c) {
  switch (c) {
    case 'a': return Letter::a;
    case 'b': return Letter::b;
    case 'A': return Letter::A;
    case 'B': return Letter::B;
    default: throw std::invalid_argument(std::string("not a letter: ") + c);
  }
}

// Successor digits. The three letters allowed after `prev` are numbered
// 0, 1, 2. After a positive letter they follow the global order; after a
// negative letter the numbering is the letterwise inverse of the numbering
// after its positive partner, so that reflecting a word leaves its digits
// unchanged.
//
//   after a:  a b B      after a^-1:  A B b
//   after b:  a b A      after b^-1:  A B a
inline constexpr std::array<std::array<Letter, 3>, 4> kSuccessors{{
    {Letter::a, Letter::b, Letter::B},
    {Letter::a, Letter::b, Letter::A},
    {Letter::A, Letter::B, Letter::b},
    {Letter::A, Letter::B, Letter::a},
}};

constexpr Letter successor(Letter prev, unsigned digit) noexcept { return kSuccessors[code(prev)][digit]; }

// Inverse of successor(); returns 3 when `next` backtracks.
constexpr unsigned successor_digit(Letter prev, Letter next) noexcept {
  const auto& row = kSuccessors[code(prev)];
  for (unsigned d = 0; d < 3; ++d) {
    if (row[d] == next) return d;
  }
  return 3;
}

}  // namespace f2erg
