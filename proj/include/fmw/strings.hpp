#pragma once

// Small string utilities shared by the tree-sort and pairing-term modules.
//
// A DigitString indexes the nested set predicates of the tree signature: the
// empty string is the root sort, and "0,2,1" names the subset reached by the
// branches 0, 2, 1 in that order.  Digits are arbitrary non-negative decimal
// integers (models simply make out-of-range sorts empty).
//
// An FgString is a composition of the two unary functions of the pairing
// signature, written leftmost-outermost: "fg" applied to x means f(g(x)).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmw {

using DigitString = std::vector<int>;

// "0,2,1" <-> {0,2,1}; the empty string is the root sort.
inline std::string digitsToText(const DigitString& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out;
}

inline std::optional<DigitString> digitsFromText(const std::string& text) {
  DigitString out;
  if (text.empty()) return out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty()) return std::nullopt;
    for (char c : tok)
      if (c < '0' || c > '9') return std::nullopt;
    if (tok.size() > 9) return std::nullopt;
    out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline bool isPrefixOf(const DigitString& p, const DigitString& s) {
  if (p.size() > s.size()) return false;
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != s[i]) return false;
  return true;
}

inline bool prefixComparable(const DigitString& a, const DigitString& b) {
  return isPrefixOf(a, b) || isPrefixOf(b, a);
}

inline DigitString concat(const DigitString& a, const DigitString& b) {
  DigitString out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// The tail of s after removing the prefix p (pre: p is a prefix of s).
inline DigitString tailAfter(const DigitString& p, const DigitString& s) {
  return DigitString(s.begin() + static_cast<long>(p.size()), s.end());
}

// --- FG composition strings ------------------------------------------------

using FgString = std::string;  // letters 'f' and 'g' only

inline bool validFgString(const FgString& s) {
  for (char c : s)
    if (c != 'f' && c != 'g') return false;
  return true;
}

inline void requireFgString(const FgString& s) {
  if (!validFgString(s)) throw std::invalid_argument("composition string must use letters f,g: \"" + s + "\"");
}

// The innermost (rightmost) l letters of s; these are the only letters that
// act before an element deep in the chain reaches its cap.
inline FgString finalSegment(const FgString& s, size_t l) {
  if (l >= s.size()) return s;
  return s.substr(s.size() - l);
}

// All 2^l words over {f,g} of length exactly l, in lexicographic order.
inline std::vector<FgString> allFgWords(size_t l) {
  std::vector<FgString> out;
  out.reserve(size_t{1} << l);
  for (uint64_t code = 0; code < (uint64_t{1} << l); ++code) {
    FgString w(l, 'f');
    for (size_t i = 0; i < l; ++i)
      if ((code >> (l - 1 - i)) & 1) w[i] = 'g';
    out.push_back(w);
  }
  return out;
}

}  // namespace fmw
