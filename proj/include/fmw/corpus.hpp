#pragma once

// Seeded random formula corpora with ground-truth checking.  Each corpus
// pairs a generator (bounded so the checks stay exact and fast) with a
// verifier that compares symbolic output against brute-force enumeration.
//
//   TREE     existential elimination on string models, table comparison.
//   PAIR     existential elimination on pair models, gated per tuple by the
//            documented adequacy bounds (anchor-class size for the fiber
//            route; class-size and class-count floors for the trace route).
//   POLYCARD guarded polynomial cardinalities, full parameter space,
//            ungated: the case values must be exact wherever a guard holds.
//   STAR     capped-successor elimination on interval models, every length
//            from the tracked adequacy bound to 12.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fmw/bruteforce.hpp"
#include "fmw/formula.hpp"
#include "fmw/model.hpp"
#include "fmw/qe_pair.hpp"
#include "fmw/qe_star.hpp"
#include "fmw/qe_str.hpp"

namespace fmw {

struct CorpusOutcome {
  long items = 0;      // formulas generated and attempted
  long checked = 0;    // comparisons performed (tuples, assignments, tables)
  long gated = 0;      // comparisons skipped by documented adequacy bounds
  long failures = 0;
  std::vector<std::string> notes;  // first few failure descriptions
  bool pass() const { return failures == 0 && items > 0; }

  void fail(const std::string& note) {
    ++failures;
    if (notes.size() < 8) notes.push_back(note);
  }
};

// --- generators ----------------------------------------------------------------

// Conjunction of tree literals, each mentioning x and at most one parameter
// from {y, z}; sorts over {0,1,2} of length <= 2, at most two negated links
// and two negated sort literals.
inline std::vector<Literal> genTreeConjunction(std::mt19937& rng, int maxParams) {
  static const std::string pool[] = {"y", "z"};
  auto rsort = [&](size_t lo, size_t hi) {
    DigitString s(lo + rng() % (hi - lo + 1));
    for (auto& d : s) d = static_cast<int>(rng() % 3);
    return s;
  };
  std::vector<Literal> lits;
  int n = 1 + static_cast<int>(rng() % 4);
  int negLinks = 0, negSorts = 0;
  for (int i = 0; i < n; ++i) {
    std::string p = pool[rng() % static_cast<size_t>(maxParams)];
    bool neg = rng() % 3 == 0;
    switch (rng() % 4) {
      case 0: {  // sort membership of x
        if (neg && negSorts >= 2) neg = false;
        if (neg) ++negSorts;
        lits.push_back(lit(treeU(rsort(0, 2), "x"), neg));
        break;
      }
      case 1: {  // bijection link to a parameter
        if (neg && negLinks >= 2) neg = false;
        if (neg) ++negLinks;
        size_t len = 1 + rng() % 2;
        lits.push_back(lit(treeB(rsort(len, len), rsort(len, len), "x", p), neg));
        break;
      }
      case 2: {  // equality with a parameter (the depth-zero link)
        if (neg && negLinks >= 2) neg = false;
        if (neg) ++negLinks;
        lits.push_back(lit(varEq("x", p), neg));
        break;
      }
      default: {  // self link: sort membership in disguise
        size_t len = rng() % 3;
        lits.push_back(lit(treeB(rsort(len, len), rsort(len, len), "x", "x"), rng() % 2 == 0));
        break;
      }
    }
  }
  return lits;
}

// Conjunction of pair literals, each mentioning x; string length <= maxLen,
// at most two negated equalities.  forceLink demands a positive literal
// linking x to a parameter (the fiber-counting route); otherwise any such
// link is avoided (the class-trace route).
inline std::vector<Literal> genPairConjunction(std::mt19937& rng, size_t maxLen, bool forceLink) {
  static const std::string pool[] = {"y", "z"};
  auto rstr = [&](size_t hi) {
    FgString s(rng() % (hi + 1), 'f');
    for (auto& ch : s) ch = (rng() & 1) ? 'g' : 'f';
    return s;
  };
  for (;;) {
    std::vector<Literal> lits;
    int n = 1 + static_cast<int>(rng() % 4);
    int negEq = 0;
    bool hasLink = false;
    for (int i = 0; i < n; ++i) {
      std::string p = pool[rng() % 2];
      bool neg = rng() % 3 == 0;
      switch (rng() % 6) {
        case 0:  // equality link
          if (!forceLink) neg = true;
          if (neg && negEq >= 2) {
            if (forceLink)
              neg = false;
            else
              break;
          }
          if (neg) ++negEq;
          lits.push_back(lit(pairEq(rstr(maxLen), "x", rstr(maxLen), p), neg));
          hasLink = hasLink || !neg;
          break;
        case 1:  // class link
          if (!forceLink) neg = true;
          lits.push_back(lit(pairE(rstr(maxLen), "x", rstr(maxLen), p), neg));
          hasLink = hasLink || !neg;
          break;
        case 2:  // self equality
          if (neg && negEq >= 2) neg = false;
          if (neg) ++negEq;
          lits.push_back(lit(pairEq(rstr(maxLen), "x", rstr(maxLen), "x"), neg));
          break;
        case 3:  // self class link
          lits.push_back(lit(pairE(rstr(maxLen), "x", rstr(maxLen), "x"), neg));
          break;
        case 4:
          lits.push_back(lit(classInit(static_cast<int>(rng() % 3), rstr(maxLen), "x"), neg));
          break;
        default:
          lits.push_back(lit(classFin(static_cast<int>(rng() % 3), rstr(maxLen), "x"), neg));
          break;
      }
    }
    if (lits.empty() || hasLink != forceLink) continue;
    return lits;
  }
}

// Quantified successor-signature formula: one or two quantifiers over a
// boolean body with at most four atoms, powers <= 2, free parameters u, v.
inline FormulaPtr genStarFormula(std::mt19937& rng) {
  static const std::string vars[] = {"q0", "q1", "u", "v"};
  auto rterm = [&](bool allowBound) {
    int pow = static_cast<int>(rng() % 3);
    switch (rng() % 4) {
      case 0: return sInit(pow);
      case 1: return sFin(pow);
      default: return sVar(pow, vars[rng() % (allowBound ? 4 : 2) + (allowBound ? 0 : 2)]);
    }
  };
  int quants = 1 + static_cast<int>(rng() % 2);
  std::function<FormulaPtr(int)> body = [&](int depth) -> FormulaPtr {
    if (depth == 0 || rng() % 3 == 0) {
      StarTerm lhs = rterm(true);
      StarTerm rhs = rterm(true);
      return fatom(starEq(lhs, rhs));
    }
    switch (rng() % 3) {
      case 0: return fnot(body(depth - 1));
      case 1: {
        FormulaPtr a = body(depth - 1);
        FormulaPtr b = body(depth - 1);
        return fand({a, b});
      }
      default: {
        FormulaPtr a = body(depth - 1);
        FormulaPtr b = body(depth - 1);
        return for_({a, b});
      }
    }
  };
  FormulaPtr f = body(2);
  for (int q = 0; q < quants; ++q) {
    std::string v = q == 0 ? "q0" : "q1";
    f = rng() % 2 ? fexists(v, f) : fforall(v, f);
  }
  return f;
}

// --- checkers ------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> usedParams(const std::vector<Literal>& lits, const std::string& x) {
  std::set<std::string> vs;
  for (auto& l : lits) atomVars(l.atom, vs);
  vs.erase(x);
  std::vector<std::string> out(vs.begin(), vs.end());
  if (out.empty()) out.push_back("y");  // tables need at least one axis
  return out;
}

// Advance a parameter tuple in row-major order (last coordinate fastest,
// matching table row order); false once the space is exhausted.
inline bool nextTuple(std::vector<Elem>& t, uint64_t n) {
  size_t d = t.size();
  while (d > 0) {
    --d;
    if (++t[d] < n) return true;
    t[d] = 0;
  }
  return false;
}

}  // namespace detail

// TREE: eliminator output must agree with the witness table everywhere.
inline CorpusOutcome tree_qe_corpus(const std::vector<std::string>& modelSpecs, long count, uint32_t seed,
                                    std::vector<std::string>* rows = nullptr) {
  CorpusOutcome out;
  std::vector<Structure> models;
  for (auto& spec : modelSpecs) models.push_back(Structure::build(FamilySpec::parse(spec)));
  std::mt19937 rng(seed);
  for (long i = 0; i < count; ++i) {
    std::vector<Literal> lits = genTreeConjunction(rng, 2);
    ++out.items;
    FormulaPtr elim = eliminate_exists_str(lits, "x");
    auto params = detail::usedParams(lits, "x");
    bool ok = true;
    for (size_t mi = 0; mi < models.size(); ++mi) {
      BitTable lhs = existsTable(models[mi], lits, "x", params);
      BitTable rhs = formulaTable(models[mi], elim, params);
      ++out.checked;
      if (lhs.firstDiff(rhs)) {
        ok = false;
        out.fail("tree item " + std::to_string(i) + " on " + modelSpecs[mi] + ": " +
                 print(conjunctionFormula(lits)));
      }
    }
    if (rows)
      rows->push_back("tree," + std::to_string(i) + "," + (ok ? "ok" : "FAIL") + "," +
                      print(conjunctionFormula(lits)));
  }
  return out;
}

// PAIR: eliminator output must agree with the witness table at every
// parameter tuple within the adequacy bounds.
inline CorpusOutcome pair_qe_corpus(const std::string& modelSpec, long count, uint32_t seed,
                                    std::vector<std::string>* rows = nullptr) {
  CorpusOutcome out;
  Structure s = Structure::build(FamilySpec::parse(modelSpec));
  size_t maxLen = static_cast<size_t>(s.spec.n) - 2;
  std::mt19937 rng(seed);
  for (long i = 0; i < count; ++i) {
    bool forceLink = rng() % 10 < 7;
    std::vector<Literal> lits = genPairConjunction(rng, maxLen, forceLink);
    ++out.items;
    PairElimStats stats;
    FormulaPtr elim = eliminate_exists_pair(lits, "x", &stats);
    auto params = detail::usedParams(lits, "x");

    bool modelGated = false;
    if (stats.anchorVar.empty()) {
      // class-trace route: needs enough spare witnesses in every class and
      // enough classes for the successor mirror
      long m = static_cast<long>(s.classSize.back());
      modelGated = m <= stats.exclusions || s.numClasses() - 1 < stats.starLen;
    }
    if (modelGated) {
      ++out.gated;
      if (rows)
        rows->push_back("pair," + std::to_string(i) + ",gated," + print(conjunctionFormula(lits)));
      continue;
    }

    BitTable lhs = existsTable(s, lits, "x", params);
    BitTable rhs = formulaTable(s, elim, params);
    size_t anchorIdx = params.size();
    for (size_t pi = 0; pi < params.size(); ++pi)
      if (params[pi] == stats.anchorVar) anchorIdx = pi;

    std::vector<Elem> tuple(params.size(), 0);
    bool ok = true;
    do {
      if (anchorIdx < params.size()) {
        Elem a = s.applyFg(stats.anchorFg, tuple[anchorIdx]);
        if (static_cast<long>(s.classSize[s.classOf(a)]) <= stats.cauchyBound) {
          ++out.gated;
          continue;
        }
      }
      ++out.checked;
      if (lhs.get(tuple) != rhs.get(tuple)) {
        ok = false;
        out.fail("pair item " + std::to_string(i) + " on " + modelSpec + ": " +
                 print(conjunctionFormula(lits)));
        break;
      }
    } while (detail::nextTuple(tuple, s.size));
    if (rows)
      rows->push_back("pair," + std::to_string(i) + "," + (ok ? "ok" : "FAIL") + "," +
                      print(conjunctionFormula(lits)));
  }
  return out;
}

// Does a guarded polynomial-cardinality definition agree with brute force
// over the whole parameter space of one model?  At most one guard may fire
// per tuple, the fired value must equal the enumerated count, and no guard
// firing requires count zero.  Returns the first mismatch description.
inline std::optional<std::string> polycard_mismatch(const Structure& s, const std::vector<Literal>& lits,
                                                    const PolyCardDef& def, const std::string& x,
                                                    const std::vector<std::string>& params,
                                                    long* checked = nullptr) {
  FormulaPtr conj = conjunctionFormula(lits);
  std::vector<uint32_t> counts = countsPerTuple(s, conj, params, x);

  size_t anchorIdx = 0;
  for (size_t pi = 0; pi < params.size(); ++pi)
    if (params[pi] == def.anchorVar) anchorIdx = pi;

  Env env;
  for (auto& p : params) env.emplace_back(p, 0);
  std::vector<Elem> tuple(params.size(), 0);
  uint64_t row = 0;
  do {
    for (size_t pi = 0; pi < params.size(); ++pi) env[pi].second = tuple[pi];
    Elem anchorElem = s.applyFg(def.anchorFg, tuple[anchorIdx]);
    mpz_class X = static_cast<unsigned long>(s.classSize[s.classOf(anchorElem)]);
    int fired = 0;
    mpz_class val = 0;
    for (auto& c : def.cases)
      if (eval(s, c.guard, env)) {
        ++fired;
        val = c.value.evalAt({{"X", X}});
      }
    if (checked) ++*checked;
    uint32_t cnt = counts[row];
    ++row;
    if (fired > 1) return "more than one guard fired at row " + std::to_string(row - 1);
    if (fired == 1 && val != cnt)
      return "value " + val.get_str() + " vs count " + std::to_string(cnt) + " at row " + std::to_string(row - 1);
    if (fired == 0 && cnt != 0)
      return "no guard fired but count " + std::to_string(cnt) + " at row " + std::to_string(row - 1);
  } while (detail::nextTuple(tuple, s.size));
  return std::nullopt;
}

// POLYCARD: over the full parameter space, at most one guard fires, the
// fired value equals the brute count, and no guard firing means count zero.
inline CorpusOutcome polycard_corpus(const std::string& modelSpec, long count, int numParams, uint32_t seed,
                                     std::vector<std::string>* rows = nullptr) {
  CorpusOutcome out;
  Structure s = Structure::build(FamilySpec::parse(modelSpec));
  size_t maxLen = static_cast<size_t>(s.spec.n) - 2;
  std::mt19937 rng(seed);
  std::vector<std::string> params = {"y"};
  if (numParams > 1) params.push_back("z");
  for (long i = 0; i < count; ++i) {
    std::vector<Literal> lits;
    for (;;) {
      lits = genPairConjunction(rng, maxLen, true);
      bool fits = true;  // keep within the requested parameter set
      for (auto& l : lits) {
        std::set<std::string> vs;
        atomVars(l.atom, vs);
        for (auto& v : vs)
          if (v != "x" && std::find(params.begin(), params.end(), v) == params.end()) fits = false;
      }
      if (fits) break;
    }
    ++out.items;
    PolyCardDef def = polycard_literals(lits, "x");
    long checkedHere = 0;
    std::optional<std::string> bad = polycard_mismatch(s, lits, def, "x", params, &checkedHere);
    out.checked += checkedHere;
    if (bad)
      out.fail("polycard item " + std::to_string(i) + " on " + modelSpec + " (" + *bad +
               "): " + print(conjunctionFormula(lits)));
    if (rows)
      rows->push_back("polycard," + std::to_string(i) + "," + (bad ? "FAIL" : "ok") + "," +
                      print(conjunctionFormula(lits)));
  }
  return out;
}

// STAR: output must be quantifier-free and agree on every interval from the
// tracked adequacy bound through maxCheckLen.
inline CorpusOutcome star_qe_corpus(long count, uint32_t seed, long maxCheckLen = 12,
                                    std::vector<std::string>* rows = nullptr) {
  CorpusOutcome out;
  std::mt19937 rng(seed);
  std::function<bool(const FormulaPtr&)> qf = [&](const FormulaPtr& g) {
    if (g->kind == Formula::Kind::Exists || g->kind == Formula::Kind::Forall) return false;
    for (auto& kid : g->kids)
      if (!qf(kid)) return false;
    return true;
  };
  for (long i = 0; i < count; ++i) {
    FormulaPtr f;
    StarQeResult res;
    for (;;) {  // only formulas whose adequacy window reaches the sweep
      f = genStarFormula(rng);
      try {
        res = qe_star(f);
      } catch (const CapError&) {
        continue;  // normal-form blowup: outside the tractable window, redraw
      }
      if (res.adequateLen <= maxCheckLen) break;
    }
    ++out.items;
    bool ok = qf(res.formula);
    if (!ok) out.fail("star item " + std::to_string(i) + ": output not quantifier-free");
    std::set<std::string> fv = freeVars(f);
    std::vector<std::string> free(fv.begin(), fv.end());
    for (long len = res.adequateLen; ok && len <= maxCheckLen; ++len) {
      Structure s = Structure::build(FamilySpec::parse("interval:" + std::to_string(len)));
      Env env;
      for (auto& v : free) env.emplace_back(v, 0);
      std::vector<Elem> tuple(free.size(), 0);
      do {
        for (size_t pi = 0; pi < free.size(); ++pi) env[pi].second = tuple[pi];
        ++out.checked;
        if (eval(s, f, env) != eval(s, res.formula, env)) {
          ok = false;
          out.fail("star item " + std::to_string(i) + " at length " + std::to_string(len) + ": " + print(f));
          break;
        }
      } while (detail::nextTuple(tuple, s.size));
    }
    if (rows) rows->push_back("star," + std::to_string(i) + "," + (ok ? "ok" : "FAIL") + "," + print(f));
  }
  return out;
}

// --- CLI-facing dispatcher -------------------------------------------------------

enum class CorpusKind { TREE, PAIR, POLYCARD, STAR };

inline std::optional<CorpusKind> corpusKindFromName(const std::string& name) {
  if (name == "tree") return CorpusKind::TREE;
  if (name == "pair") return CorpusKind::PAIR;
  if (name == "polycard") return CorpusKind::POLYCARD;
  if (name == "star") return CorpusKind::STAR;
  return std::nullopt;
}

inline CorpusOutcome run_corpus(CorpusKind kind, long count, uint32_t seed,
                                std::vector<std::string>* rows = nullptr) {
  auto merge = [](CorpusOutcome& a, const CorpusOutcome& b) {
    a.items += b.items;
    a.checked += b.checked;
    a.gated += b.gated;
    a.failures += b.failures;
    for (auto& n : b.notes)
      if (a.notes.size() < 8) a.notes.push_back(n);
  };
  CorpusOutcome out;
  switch (kind) {
    case CorpusKind::TREE:
      return tree_qe_corpus({"string:4", "string:5"}, count, seed, rows);
    case CorpusKind::PAIR: {
      out = pair_qe_corpus("pair:3,3", (count + 1) / 2, seed, rows);
      merge(out, pair_qe_corpus("pair:4,2", count / 2, seed + 1, rows));
      return out;
    }
    case CorpusKind::POLYCARD: {
      out = polycard_corpus("pair:3,2", (count + 2) / 3, 2, seed, rows);
      merge(out, polycard_corpus("pair:3,3", (count + 1) / 3, 2, seed + 1, rows));
      merge(out, polycard_corpus("pair:4,2", count / 3, 1, seed + 2, rows));
      return out;
    }
    default:
      return star_qe_corpus(count, seed, 12, rows);
  }
}

}  // namespace fmw
