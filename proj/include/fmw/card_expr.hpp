#pragma once

// Sparse multivariate polynomials with integer coefficients over named
// cardinality anchors ("X" for an anchor class size, "|U_0|" for a sort
// size, ...).  These are the values carried by cardinality definitions and
// polynomial-cardinality cases.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace fmw {

using Monomial = std::map<std::string, int>;  // anchor -> exponent (> 0)

struct CardExpr {
  std::map<Monomial, mpz_class> terms;  // monomial -> coefficient (nonzero)

  static CardExpr constant(mpz_class c) {
    CardExpr e;
    if (c != 0) e.terms[{}] = std::move(c);
    return e;
  }
  static CardExpr anchor(const std::string& name, int power = 1) {
    CardExpr e;
    if (power == 0) return constant(1);
    e.terms[{{name, power}}] = 1;
    return e;
  }

  bool isZero() const { return terms.empty(); }

  bool operator==(const CardExpr& o) const { return terms == o.terms; }

  CardExpr& operator+=(const CardExpr& o) {
    for (auto& [m, c] : o.terms) {
      auto it = terms.find(m);
      if (it == terms.end()) {
        terms[m] = c;
      } else {
        it->second += c;
        if (it->second == 0) terms.erase(it);
      }
    }
    return *this;
  }
  CardExpr operator+(const CardExpr& o) const {
    CardExpr r = *this;
    r += o;
    return r;
  }
  CardExpr operator-() const {
    CardExpr r = *this;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
  }
  CardExpr operator-(const CardExpr& o) const { return *this + (-o); }
  CardExpr& operator-=(const CardExpr& o) { return *this += -o; }

  CardExpr operator*(const CardExpr& o) const {
    CardExpr r;
    for (auto& [m1, c1] : terms)
      for (auto& [m2, c2] : o.terms) {
        Monomial m = m1;
        for (auto& [v, p] : m2) m[v] += p;
        auto it = r.terms.find(m);
        if (it == r.terms.end()) {
          mpz_class c = c1 * c2;
          if (c != 0) r.terms[m] = std::move(c);
        } else {
          it->second += c1 * c2;
          if (it->second == 0) r.terms.erase(it);
        }
      }
    return r;
  }
  CardExpr& operator*=(const CardExpr& o) { return *this = *this * o; }

  mpz_class evalAt(const std::map<std::string, mpz_class>& assign) const {
    mpz_class total = 0;
    for (auto& [m, c] : terms) {
      mpz_class t = c;
      for (auto& [v, p] : m) {
        auto it = assign.find(v);
        if (it == assign.end()) throw std::invalid_argument("no value for anchor \"" + v + "\"");
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), it->second.get_mpz_t(), p);
        t *= pw;
      }
      total += t;
    }
    return total;
  }

  int totalDegree() const {
    int d = 0;
    for (auto& [m, c] : terms) {
      int t = 0;
      for (auto& [v, p] : m) t += p;
      d = std::max(d, t);
    }
    return d;
  }

  mpz_class maxAbsCoeff() const {
    mpz_class best = 0;
    for (auto& [m, c] : terms) {
      mpz_class a = abs(c);
      if (a > best) best = a;
    }
    return best;
  }

  std::vector<std::string> anchorNames() const {
    std::vector<std::string> out;
    for (auto& [m, c] : terms)
      for (auto& [v, p] : m)
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }

  // Coefficients c0..cd of a polynomial in the single anchor `var`.
  std::vector<mpz_class> coeffList(const std::string& var) const {
    std::vector<mpz_class> out(1, 0);
    for (auto& [m, c] : terms) {
      int p = 0;
      for (auto& [v, q] : m) {
        if (v != var) throw std::logic_error("expression is not univariate in \"" + var + "\"");
        p = q;
      }
      if (static_cast<size_t>(p) >= out.size()) out.resize(p + 1, 0);
      out[p] += c;
    }
    while (out.size() > 1 && out.back() == 0) out.pop_back();
    return out;
  }

  std::string str() const {
    if (terms.empty()) return "0";
    // highest total degree first, then reverse monomial order for stability
    std::vector<std::pair<Monomial, mpz_class>> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      int da = 0, db = 0;
      for (auto& [v, p] : a.first) da += p;
      for (auto& [v, p] : b.first) db += p;
      if (da != db) return da > db;
      return a.first > b.first;
    });
    std::string out;
    bool first = true;
    for (auto& [m, c] : sorted) {
      mpz_class a = abs(c);
      bool negative = c < 0;
      std::string mono;
      for (auto& [v, p] : m) {
        if (!mono.empty()) mono += "*";
        mono += v;
        if (p > 1) mono += "^" + std::to_string(p);
      }
      std::string coef;
      if (mono.empty())
        coef = a.get_str();
      else if (a != 1)
        coef = a.get_str() + "*";
      if (first) {
        out += (negative ? "-" : "") + coef + mono;
        first = false;
      } else {
        out += (negative ? " - " : " + ") + coef + mono;
      }
    }
    return out;
  }
};

inline CardExpr operator*(const mpz_class& c, const CardExpr& e) { return CardExpr::constant(c) * e; }

}  // namespace fmw
