#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace symdyn {

using Symbol = int;
using Word = std::vector<Symbol>;

struct Alphabet {
  int size = 2;
  explicit Alphabet(int sz) : size(sz) {
    if (sz < 2) throw std::invalid_argument("alphabet size must be >= 2");
  }
};

inline Word word_from_string(const std::string& s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad symbol in word: " + s);
    w.push_back(c - '0');
  }
  if (w.empty()) throw std::invalid_argument("empty word");
  return w;
}

inline std::string word_to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Symbol a : w) s += static_cast<char>('0' + a);
  return s;
}

// Words of a fixed length are encoded as base-ell integers, most significant
// symbol first, so the encoding order is the lexicographic order.
inline std::uint64_t encode_word(const Word& w, int ell) {
  std::uint64_t code = 0;
  for (Symbol a : w) code = code * static_cast<std::uint64_t>(ell) + a;
  return code;
}

inline Word decode_word(std::uint64_t code, int len, int ell) {
  Word w(len);
  for (int i = len - 1; i >= 0; --i) {
    w[i] = static_cast<Symbol>(code % ell);
    code /= ell;
  }
  return w;
}

inline std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline Word subword(const Word& w, std::size_t pos, std::size_t len) {
  if (pos + len > w.size()) throw std::out_of_range("subword out of range");
  return Word(w.begin() + pos, w.begin() + pos + len);
}

// True if `needle` occurs in `hay` starting at position pos.
inline bool occurs_at(const Word& hay, const Word& needle, std::size_t pos) {
  if (pos + needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i)
    if (hay[pos + i] != needle[i]) return false;
  return true;
}

}  // namespace symdyn
