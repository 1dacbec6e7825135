#include "multiren/word.hpp"

#include <algorithm>
#include <stdexcept>

#include "multiren/errors.hpp"

namespace multiren {

int letter_rank(Letter l) {
  switch (l) {
    case Letter::L:
      return 0;
    case Letter::C:
      return 1;
    case Letter::R:
      return 2;
  }
  return 1;
}

Word Word::parse(std::string_view text) {
  std::vector<Letter> out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case 'L':
        out.push_back(Letter::L);
        break;
      case 'C':
        out.push_back(Letter::C);
        break;
      case 'R':
        out.push_back(Letter::R);
        break;
      default:
        throw std::invalid_argument("word contains a letter outside {L, C, R}: '" +
                                    std::string(1, ch) + "'");
    }
  }
  return Word(std::move(out));
}

Word Word::prefix(std::size_t len) const {
  len = std::min(len, letters_.size());
  return Word(std::vector<Letter>(letters_.begin(), letters_.begin() + static_cast<long>(len)));
}

bool Word::is_pure() const {
  return std::none_of(letters_.begin(), letters_.end(),
                      [](Letter l) { return l == Letter::C; });
}

std::size_t Word::count(Letter l) const {
  return static_cast<std::size_t>(std::count(letters_.begin(), letters_.end(), l));
}

std::string Word::str() const {
  std::string s;
  s.reserve(letters_.size());
  for (Letter l : letters_) s.push_back(static_cast<char>(l));
  return s;
}

int sign_word(const Word& w) {
  if (!w.is_pure()) throw NotPureError("sign of a word containing C: " + w.str());
  return w.count(Letter::R) % 2 == 0 ? 1 : -1;
}

std::strong_ordering word_compare(const Word& a, const Word& b) {
  const std::size_t len = std::min(a.size(), b.size());
  int sign = 1;
  for (std::size_t j = 0; j < len; ++j) {
    if (a[j] == b[j]) {
      if (a[j] == Letter::C)
        throw NotPureError("common prefix contains C: " + a.prefix(j + 1).str());
      if (a[j] == Letter::R) sign = -sign;
      continue;
    }
    const int ra = letter_rank(a[j]);
    const int rb = letter_rank(b[j]);
    const bool a_smaller = sign > 0 ? ra < rb : ra > rb;
    return a_smaller ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

}  // namespace multiren
