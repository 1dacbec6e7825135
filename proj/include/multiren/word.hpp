#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace multiren {

/// Position of a point relative to the critical point of the factor that
/// acts on it. The enumerator order is the base order L < C < R.
enum class Letter : char { L = 'L', C = 'C', R = 'R' };

int letter_rank(Letter l);

/// Finite word over {L, C, R}.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  /// Parses a string over {L, C, R}; throws std::invalid_argument otherwise.
  static Word parse(std::string_view text);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const { return letters_; }

  void push_back(Letter l) { letters_.push_back(l); }
  Word prefix(std::size_t len) const;

  bool is_pure() const;
  std::size_t count(Letter l) const;
  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

/// +1 when the pure word has an even number of R letters, -1 otherwise.
/// Throws NotPureError if the word contains C.
int sign_word(const Word& w);

/// The signed order on words. At the first differing index the letters are
/// compared in the base order L < C < R when the common prefix has sign +1 and
/// in the reversed order when it has sign -1. Words equal on their common
/// length compare equal; callers pass equal lengths. Throws NotPureError when
/// the common prefix before the first difference contains C.
std::strong_ordering word_compare(const Word& a, const Word& b);

}  // namespace multiren
