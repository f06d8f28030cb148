#pragma once

// Symbolic cardinality algebra: guarded cardinality definitions, the
// constant-fiber product rule, inclusion-exclusion over set systems, the
// tuple-lifting construction, and asymptotic growth-order comparison of
// parameterized cardinality families.

#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "card_expr.hpp"
#include "formula.hpp"

namespace fmw {

// ---------------------------------------------------------------------------
// Guarded cardinality definitions
// ---------------------------------------------------------------------------

struct CardCase {
  CardExpr value;
  FormulaPtr guard;
};

struct CardDefinition {
  std::vector<CardCase> cases;                   // pairwise-exclusive guards
  std::map<std::string, std::string> anchors;    // anchor name -> description
};

// Merge cases carrying the same value by disjoining their guards, and drop
// cases whose guard is syntactically false.
inline void mergeEqualValues(CardDefinition& def) {
  std::vector<CardCase> merged;
  for (auto& c : def.cases) {
    if (isFalse(c.guard)) continue;
    bool hit = false;
    for (auto& m : merged) {
      if (m.value == c.value) {
        m.guard = for_({m.guard, c.guard});
        hit = true;
        break;
      }
    }
    if (!hit) merged.push_back(c);
  }
  def.cases = std::move(merged);
}

// ---------------------------------------------------------------------------
// Constant-fiber product rule: if every nonempty fiber of a relation has the
// same size c, the relation's cardinality is c times the base count.
// ---------------------------------------------------------------------------

inline CardExpr fiber_count(const CardExpr& fiberSize, const CardExpr& baseCount) {
  return fiberSize * baseCount;
}

// ---------------------------------------------------------------------------
// Inclusion-exclusion: |A_1 ∪ ... ∪ A_n| from the cardinalities of all
// nonempty-subset intersections.  Key = bitmask over {0..n-1}.
// ---------------------------------------------------------------------------

inline CardExpr boolean_card(const std::map<unsigned, CardExpr>& intersectionCards, int n) {
  if (n < 0 || n > 20) throw std::invalid_argument("boolean_card: set count out of range");
  CardExpr total;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    auto it = intersectionCards.find(mask);
    if (it == intersectionCards.end())
      throw std::invalid_argument("boolean_card: missing intersection entry for subset mask " + std::to_string(mask));
    int bits = __builtin_popcount(mask);
    if (bits % 2 == 1)
      total += it->second;
    else
      total -= it->second;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Tuple lifting.  A layered definition describes the count of a tuple set:
// for each case i, `perPointValue` is the count contributed by the innermost
// variable at any point where the i-th guard holds, and `guardCount` is a
// guarded definition for the number of such points (over the remaining
// variables).  The lifted definition picks one inner case per layer
// (selector sigma), conjoins the chosen guards and sums value products.
// ---------------------------------------------------------------------------

struct LayeredCase {
  CardExpr perPointValue;
  CardDefinition guardCount;
};

inline CardDefinition lift_tuple_cardinalities(const std::vector<LayeredCase>& layers) {
  for (auto& l : layers)
    if (l.guardCount.cases.empty())
      throw std::invalid_argument("lift_tuple_cardinalities: layer with empty inner definition");
  CardDefinition out;
  for (auto& l : layers)
    for (auto& [name, desc] : l.guardCount.anchors) out.anchors[name] = desc;
  std::vector<size_t> sel(layers.size(), 0);
  for (;;) {
    std::vector<FormulaPtr> guards;
    CardExpr value;
    bool dead = false;
    for (size_t i = 0; i < layers.size(); ++i) {
      const CardCase& inner = layers[i].guardCount.cases[sel[i]];
      if (isFalse(inner.guard)) {
        dead = true;
        break;
      }
      guards.push_back(inner.guard);
      value += layers[i].perPointValue * inner.value;
    }
    if (!dead) out.cases.push_back({value, fand(guards)});
    // next selector
    size_t k = 0;
    while (k < layers.size()) {
      if (++sel[k] < layers[k].guardCount.cases.size()) break;
      sel[k] = 0;
      ++k;
    }
    if (k == layers.size()) break;
  }
  mergeEqualValues(out);
  return out;
}

// ---------------------------------------------------------------------------
// Growth-order comparison of cardinality families along a parameter sweep.
//
// A FamilyCard is a cardinality that depends on the family parameters
// (STRING/EQCLASS: n; PAIR: n fixed, m swept).  Its grade is a totally
// ordered key consistent with eventual ratio behavior: strictly smaller
// grade means the ratio tends to zero along the sweep.
//   STRING : count n^(n-d); grade major = -d (depth below the root).
//   PAIR   : count sum of c_j * m^(e_j); grade major = max exponent e_j,
//            minor = its coefficient (reported, not order-relevant).
//   EQCLASS: count with leading term n^(n-k); grade major = -k, the offset
//            of the leading degree from n.
// ---------------------------------------------------------------------------

enum class Family { STRING, PAIR, EQCLASS };

inline const char* familyName(Family f) {
  switch (f) {
    case Family::STRING: return "string";
    case Family::PAIR: return "pair";
    default: return "eqclass";
  }
}

struct FamilyCard {
  Family family = Family::STRING;
  std::string label;
  std::function<mpz_class(const std::vector<long>&)> evaluator;  // sweep point -> count
  std::vector<long> gradeMajor;  // lexicographic; equal majors = same growth order
  std::vector<long> gradeMinor;  // leading-coefficient data, informational
};

enum class DeltaVerdict { SAME_ORDER, FIRST_SMALLER, FIRST_LARGER, UNKNOWN };

inline const char* verdictName(DeltaVerdict v) {
  switch (v) {
    case DeltaVerdict::SAME_ORDER: return "SAME_ORDER";
    case DeltaVerdict::FIRST_SMALLER: return "FIRST_SMALLER";
    case DeltaVerdict::FIRST_LARGER: return "FIRST_LARGER";
    default: return "UNKNOWN";
  }
}

struct DeltaReport {
  DeltaVerdict verdict = DeltaVerdict::UNKNOWN;
  std::string detail;  // witness or counterexample, human-readable
};

inline DeltaReport delta_compare_symbolic(const FamilyCard& a, const FamilyCard& b) {
  if (a.family != b.family)
    throw std::invalid_argument("delta_compare: cards from different families");
  if (a.gradeMajor < b.gradeMajor) return {DeltaVerdict::FIRST_SMALLER, "grade below"};
  if (b.gradeMajor < a.gradeMajor) return {DeltaVerdict::FIRST_LARGER, "grade above"};
  return {DeltaVerdict::SAME_ORDER, "equal grade"};
}

// Empirical comparison along a finite sweep.  Verdicts are consistency
// statements about the observed window, not proofs.
//   FIRST_SMALLER: a < b at every point, ratios b/a strictly increase, and
//     for each N <= Nmax the failures of N*a < b form a prefix of the sweep.
//   SAME_ORDER: some N <= Nmax bounds the ratio both ways at every point.
//   otherwise UNKNOWN, with the first offending point reported.
inline DeltaReport delta_compare_empirical(const FamilyCard& a, const FamilyCard& b,
                                           const std::vector<std::vector<long>>& sweep,
                                           long nmax = 8) {
  if (a.family != b.family)
    throw std::invalid_argument("delta_compare: cards from different families");
  if (sweep.empty()) throw std::invalid_argument("delta_compare: empty sweep");
  std::vector<mpz_class> av, bv;
  for (auto& pt : sweep) {
    av.push_back(a.evaluator(pt));
    bv.push_back(b.evaluator(pt));
    if (av.back() <= 0 || bv.back() <= 0)
      throw std::invalid_argument("delta_compare: nonpositive count in sweep");
  }
  auto pointName = [&](size_t i) {
    std::ostringstream os;
    os << "(";
    for (size_t j = 0; j < sweep[i].size(); ++j) os << (j ? "," : "") << sweep[i][j];
    os << ")";
    return os.str();
  };
  auto dominates = [&](const std::vector<mpz_class>& lo, const std::vector<mpz_class>& hi) {
    // lo < hi everywhere
    for (size_t i = 0; i < lo.size(); ++i)
      if (lo[i] >= hi[i]) return false;
    // ratios hi/lo strictly increasing: hi[i+1]*lo[i] > hi[i]*lo[i+1]
    for (size_t i = 0; i + 1 < lo.size(); ++i)
      if (hi[i + 1] * lo[i] <= hi[i] * lo[i + 1]) return false;
    // for each N, failures of N*lo < hi form a prefix
    for (long N = 1; N <= nmax; ++N) {
      bool seenPass = false;
      for (size_t i = 0; i < lo.size(); ++i) {
        bool pass = N * lo[i] < hi[i];
        if (pass) seenPass = true;
        else if (seenPass) return false;
      }
    }
    return true;
  };
  if (dominates(av, bv)) return {DeltaVerdict::FIRST_SMALLER, "consistent-with: ratio diverges over sweep"};
  if (dominates(bv, av)) return {DeltaVerdict::FIRST_LARGER, "consistent-with: ratio diverges over sweep"};
  for (long N = 1; N <= nmax; ++N) {
    bool ok = true;
    for (size_t i = 0; i < av.size() && ok; ++i)
      if (av[i] > N * bv[i] || bv[i] > N * av[i]) ok = false;
    if (ok)
      return {DeltaVerdict::SAME_ORDER, "consistent-with: ratio within [1/" + std::to_string(N) + ", " + std::to_string(N) + "]"};
  }
  // report the sweep point with the most extreme ratio as the counterexample
  size_t worst = 0;
  for (size_t i = 1; i < av.size(); ++i)
    if (av[i] * bv[worst] > av[worst] * bv[i]) worst = i;
  return {DeltaVerdict::UNKNOWN,
          "no verdict at Nmax=" + std::to_string(nmax) + "; extreme point " + pointName(worst) +
              " counts " + av[worst].get_str() + " vs " + bv[worst].get_str()};
}

}  // namespace fmw
