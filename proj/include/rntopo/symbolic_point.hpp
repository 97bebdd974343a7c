#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rntopo {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

/// Finite ordered alphabet.  Digit alphabets print symbols as '0'..'9'; free-group
/// alphabets on d generators use codes 2g (letter 'a'+g) and 2g+1 (its inverse,
/// 'A'+g), so the inverse of a code is code ^ 1.
struct Alphabet {
  enum class Kind { digits, free_group };
  Kind kind = Kind::digits;
  int size = 2;

  static Alphabet digits(int k);
  static Alphabet free_group(int d);

  bool contains(Symbol s) const { return s < size; }
  static Symbol inverse(Symbol s) { return s ^ 1; }
  char render(Symbol s) const;
  Symbol parse_symbol(char c) const;
  std::string render(const Word& w) const;
  Word parse(std::string_view text) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

struct InvalidPointError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Eventually periodic sequence prefix·period^inf in canonical form: the period is
/// primitive and the prefix cannot be shortened by rotating the period.  Two values
/// compare equal exactly when they represent the same infinite sequence.
class SymbolicPoint {
 public:
  SymbolicPoint() = default;
  /// Throws InvalidPointError for an empty period or a symbol outside the alphabet.
  SymbolicPoint(Alphabet alphabet, Word prefix, Word period);
  static SymbolicPoint parse(Alphabet alphabet, std::string_view prefix, std::string_view period);

  const Alphabet& alphabet() const { return alphabet_; }
  const Word& prefix() const { return prefix_; }
  const Word& period() const { return period_; }
  std::size_t representation_length() const { return prefix_.size() + period_.size(); }

  Symbol at(std::size_t i) const;
  /// First n coordinates.
  Word head(std::size_t n) const;
  /// Index of the first occurrence of s, or npos if s never occurs.
  std::size_t find(Symbol s) const;

  SymbolicPoint with_coordinate(std::size_t i, Symbol s) const;
  /// Replaces coordinates 0..w.size()-1 by w.
  SymbolicPoint with_head(const Word& w) const;
  SymbolicPoint prepend(Symbol s) const;
  SymbolicPoint drop_first() const;

  /// "prefix(period)" using the alphabet's rendering.
  std::string to_string() const;

  friend bool operator==(const SymbolicPoint&, const SymbolicPoint&) = default;
  /// Lexicographic order of the infinite sequences (alphabet size first).
  friend std::strong_ordering operator<=>(const SymbolicPoint& a, const SymbolicPoint& b);

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void canonicalize();

  Alphabet alphabet_;
  Word prefix_;
  Word period_{0};
};

struct SymbolicPointHash {
  std::size_t operator()(const SymbolicPoint& p) const noexcept;
};

}  // namespace rntopo
