#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "f2erg/letter.hpp"
#include "f2erg/random.hpp"

namespace f2erg {

// Largest sphere radius for which exact enumeration is offered.
inline constexpr int kDefaultEnumerationCap = 12;

// An element of F2 as its reduced word.
class ReducedWord {
 public:
  ReducedWord() = default;

  // Reduces the given letters freely.
  static ReducedWord reduce(std::span<const Letter> letters);
  // Parses "abAB"-style text (capitals are inverses) and reduces it.
  static ReducedWord parse(std::string_view text);

  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const noexcept { return letters_[i]; }
  std::span<const Letter> letters() const noexcept { return letters_; }

  Letter front() const noexcept { return letters_.front(); }
  Letter back() const noexcept { return letters_.back(); }

  std::string str() const;

  friend bool operator==(const ReducedWord&, const ReducedWord&) = default;
  friend auto operator<=>(const ReducedWord& x, const ReducedWord& y) {
    return std::lexicographical_compare_three_way(x.letters_.begin(), x.letters_.end(), y.letters_.begin(),
                                                  y.letters_.end(),
                                                  [](Letter p, Letter q) { return code(p) <=> code(q); });
  }

 private:
  explicit ReducedWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  friend ReducedWord reduce_concat(const ReducedWord&, const ReducedWord&);
  friend ReducedWord invert(const ReducedWord&);
  friend void for_each_in_sphere(int, const std::function<void(const ReducedWord&)>&, int);

  std::vector<Letter> letters_;
};

ReducedWord reduce_concat(const ReducedWord& u, const ReducedWord& v);
ReducedWord invert(const ReducedWord& w);

// Number of reduced words of length n: 1, then 4 * 3^(n-1).
std::uint64_t sphere_size(int n);

// Visits each reduced word of length n once, depth-first in letter code
// order. Throws CapExceeded when n > cap.
void for_each_in_sphere(int n, const std::function<void(const ReducedWord&)>& visit,
                        int cap = kDefaultEnumerationCap);
std::vector<ReducedWord> enumerate_sphere(int n, int cap = kDefaultEnumerationCap);

// Non-backtracking step: uniform over the three letters other than inverse(last).
inline Letter nbw_step(Letter last, CounterRng& rng) { return successor(last, rng.below(3)); }

inline Letter uniform_letter(CounterRng& rng) { return from_code(rng.below(4)); }

// Uniform element of the sphere of radius n >= 1.
ReducedWord sample_uniform_sphere(int n, CounterRng& rng);

}  // namespace f2erg
