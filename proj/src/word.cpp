#include "f2erg/word.hpp"

#include "f2erg/errors.hpp"

namespace f2erg {

ReducedWord ReducedWord::reduce(std::span<const Letter> letters) {
  std::vector<Letter> out;
  out.reserve(letters.size());
  for (Letter s : letters) {
    if (!out.empty() && out.back() == inverse(s)) {
      out.pop_back();
    } else {
      out.push_back(s);
    }
  }
  return ReducedWord(std::move(out));
}

ReducedWord ReducedWord::parse(std::string_view text) {
  std::vector<Letter> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(letter_from_char(c));
  return reduce(letters);
}

std::string ReducedWord::str() const {
  std::string s;
  s.reserve(letters_.size());
  for (Letter l : letters_) s.push_back(to_char(l));
  return s;
}

ReducedWord reduce_concat(const ReducedWord& u, const ReducedWord& v) {
  std::size_t cancel = 0;
  const std::size_t limit = std::min(u.length(), v.length());
  while (cancel < limit && u.letters_[u.length() - 1 - cancel] == inverse(v.letters_[cancel])) ++cancel;
  std::vector<Letter> out;
  out.reserve(u.length() + v.length() - 2 * cancel);
  out.insert(out.end(), u.letters_.begin(), u.letters_.end() - static_cast<std::ptrdiff_t>(cancel));
  out.insert(out.end(), v.letters_.begin() + static_cast<std::ptrdiff_t>(cancel), v.letters_.end());
  return ReducedWord(std::move(out));
}

ReducedWord invert(const ReducedWord& w) {
  std::vector<Letter> out(w.letters_.rbegin(), w.letters_.rend());
  for (Letter& s : out) s = inverse(s);
  return ReducedWord(std::move(out));
}

std::uint64_t sphere_size(int n) {
  if (n < 0) throw DomainError("sphere radius must be non-negative");
  if (n == 0) return 1;
  std::uint64_t size = 4;
  for (int i = 1; i < n; ++i) size *= 3;
  return size;
}

void for_each_in_sphere(int n, const std::function<void(const ReducedWord&)>& visit, int cap) {
  if (n < 0) throw DomainError("sphere radius must be non-negative");
  if (n > cap) {
    throw CapExceeded("sphere of radius " + std::to_string(n) + " exceeds enumeration cap " +
                      std::to_string(cap));
  }
  std::vector<Letter> buf(static_cast<std::size_t>(n));
  ReducedWord word;
  // Iterative depth-first walk: choice[i] is the code tried at position i.
  std::vector<int> choice(static_cast<std::size_t>(n) + 1, -1);
  if (n == 0) {
    visit(word);
    return;
  }
  int depth = 0;
  while (depth >= 0) {
    int& c = choice[static_cast<std::size_t>(depth)];
    ++c;
    if (depth > 0) {
      while (c < 4 && from_code(static_cast<unsigned>(c)) == inverse(buf[static_cast<std::size_t>(depth) - 1])) ++c;
    }
    if (c >= 4) {
      c = -1;
      --depth;
      continue;
    }
    buf[static_cast<std::size_t>(depth)] = from_code(static_cast<unsigned>(c));
    if (depth + 1 == n) {
      word.letters_ = buf;
      visit(word);
    } else {
      ++depth;
    }
  }
}

std::vector<ReducedWord> enumerate_sphere(int n, int cap) {
  std::vector<ReducedWord> out;
  if (n <= cap && n >= 0) out.reserve(sphere_size(n));
  for_each_in_sphere(n, [&](const ReducedWord& w) { out.push_back(w); }, cap);
  return out;
}

ReducedWord sample_uniform_sphere(int n, CounterRng& rng) {
  if (n < 1) throw DomainError("sample_uniform_sphere needs n >= 1");
  std::vector<Letter> letters;
  letters.reserve(static_cast<std::size_t>(n));
  letters.push_back(uniform_letter(rng));
  for (int i = 1; i < n; ++i) letters.push_back(nbw_step(letters.back(), rng));
  return ReducedWord::reduce(letters);
}

}  // namespace f2erg
