#pragma once

// Quantifier elimination for the capped-successor theory (one successor S,
// constants c_init and c_fin, S(c_fin) = c_fin), plus the two-way bridge
// between that theory and the class structure of the pair models: an
// equivalence formula about pair-model elements depends only on their
// classes, and the class order is a capped successor chain.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "formula.hpp"
#include "normal_form.hpp"
#include "qe.hpp"

namespace fmw {

// --- canonicalizing equality constructor -----------------------------------
// Folds equalities that are decided by the theory alone (for offsets small
// relative to the model length): same-variable comparisons become "reached
// the cap", c_init/c_fin positions are distinct, c_fin absorbs powers.
inline FormulaPtr mkStarEq(StarTerm a, StarTerm b) {
  using B = StarTerm::Base;
  if (a.base == B::CFin) a.pow = 0;
  if (b.base == B::CFin) b.pow = 0;
  if (a.base == b.base) {
    if (a.base == B::CInit) return a.pow == b.pow ? ftrue() : ffalse();
    if (a.base == B::CFin) return ftrue();
    if (a.var == b.var) {
      if (a.pow == b.pow) return ftrue();
      // S^p(x) = S^q(x) with p < q holds exactly when S^p(x) is the cap
      return fatom(starEq(sVar(std::min(a.pow, b.pow), a.var), sFin(0)));
    }
  }
  if ((a.base == B::CInit && b.base == B::CFin) || (a.base == B::CFin && b.base == B::CInit))
    return ffalse();
  // deterministic operand order: variables first, then c_init, then c_fin
  auto rank = [](const StarTerm& t) { return t.base == B::Var ? 0 : t.base == B::CInit ? 1 : 2; };
  if (rank(a) > rank(b) || (rank(a) == rank(b) && (a.var > b.var || (a.var == b.var && a.pow > b.pow))))
    std::swap(a, b);
  return fatom(starEq(a, b));
}

// --- point algebra ----------------------------------------------------------
// A point is a definable position: an offset from c_init (>= 0), from c_fin
// (<= 0, "exactly j before the cap"), or from a variable (negative offsets
// mean "the position from which the variable is first reached").
struct StarPoint {
  StarTerm::Base base = StarTerm::Base::CInit;
  std::string var;
  int off = 0;
};

inline StarPoint shiftPoint(StarPoint p, int a) {
  if (p.base == StarTerm::Base::CFin)
    p.off = std::min(0, p.off + a);
  else
    p.off += a;
  return p;
}

inline StarPoint termPoint(const StarTerm& t) {
  StarPoint p;
  p.base = t.base;
  if (t.base == StarTerm::Base::Var) {
    p.var = t.var;
    p.off = t.pow;
  } else if (t.base == StarTerm::Base::CInit) {
    p.off = t.pow;
  } else {
    p.off = 0;  // powers of the cap collapse
  }
  return p;
}

// Side condition for a point to denote an element: only "r positions before
// a variable" can fail, when the variable is within r of c_init.
inline FormulaPtr pointExists(const StarPoint& p) {
  if (p.base != StarTerm::Base::Var || p.off >= 0) return ftrue();
  std::vector<FormulaPtr> conj;
  for (int j = 0; j < -p.off; ++j) conj.push_back(fnot(mkStarEq(sVar(0, p.var), sInit(j))));
  return fand(conj);
}

// Quantifier-free formula expressing that two points denote the same
// element, assuming both are defined (callers conjoin pointExists).
inline FormulaPtr pointEq(StarPoint P, StarPoint Q) {
  using B = StarTerm::Base;
  auto rank = [](const StarPoint& p) { return p.base == B::Var ? 0 : p.base == B::CInit ? 1 : 2; };
  if (rank(P) > rank(Q)) std::swap(P, Q);
  if (P.base == B::Var && Q.base == B::Var) {
    if (P.off < 0 && Q.off >= 0) std::swap(P, Q);
    if (P.off >= 0 && Q.off >= 0) return mkStarEq(sVar(P.off, P.var), sVar(Q.off, Q.var));
    if (P.off >= 0) {
      // S^p(u) = (r before v): the walk from u reaches v exactly at step p+r
      int r = -Q.off;
      return fand({mkStarEq(sVar(P.off + r, P.var), sVar(0, Q.var)),
                   fnot(mkStarEq(sVar(P.off + r - 1, P.var), sVar(0, Q.var)))});
    }
    // both behind variables: u - r = v - s, with definedness of the deeper one
    int r = -P.off, s = -Q.off;
    if (r < s) {
      std::swap(P, Q);
      std::swap(r, s);
    }
    int d = r - s;
    std::vector<FormulaPtr> conj;
    if (d == 0) {
      conj.push_back(mkStarEq(sVar(0, P.var), sVar(0, Q.var)));
    } else {
      conj.push_back(mkStarEq(sVar(d, Q.var), sVar(0, P.var)));
      conj.push_back(fnot(mkStarEq(sVar(d - 1, Q.var), sVar(0, P.var))));
    }
    for (int j = 0; j < s; ++j) conj.push_back(fnot(mkStarEq(sVar(0, Q.var), sInit(j))));
    return fand(conj);
  }
  if (P.base == B::Var && Q.base == B::CInit) {
    if (P.off >= 0) return mkStarEq(sVar(P.off, P.var), sInit(Q.off));
    return mkStarEq(sVar(0, P.var), sInit(Q.off - P.off));  // u - r = a  <=>  u = a + r
  }
  if (P.base == B::Var && Q.base == B::CFin) {
    int p = P.off, r = -Q.off;
    if (p < 0) {
      int s = -p;
      if (r < s) return ffalse();  // u - s = len - r would push u past the cap
      p = 0;
      r = r - s;
    }
    if (r == 0) return mkStarEq(sVar(p, P.var), sFin(0));
    return fand({mkStarEq(sVar(p + r, P.var), sFin(0)), fnot(mkStarEq(sVar(p + r - 1, P.var), sFin(0)))});
  }
  if (P.base == B::CInit && Q.base == B::CInit) return P.off == Q.off ? ftrue() : ffalse();
  if (P.base == B::CInit && Q.base == B::CFin) return ffalse();
  return P.off == Q.off ? ftrue() : ffalse();  // both c_fin-based
}

// --- the conjunction eliminator ----------------------------------------------

struct StarElimStats {
  long requiredLen = 2;  // interval length from which the output is exact
};

namespace detail {

inline FormulaPtr substStarLiteral(const Literal& l, const std::string& x, const StarPoint& cand) {
  const Atom& a = l.atom;
  bool in1 = a.s1.base == StarTerm::Base::Var && a.s1.var == x;
  FormulaPtr eq = in1 ? pointEq(shiftPoint(cand, a.s1.pow), termPoint(a.s2))
                      : pointEq(shiftPoint(cand, a.s2.pow), termPoint(a.s1));
  return l.negated ? fnot(eq) : eq;
}

}  // namespace detail

// Eliminate ∃x from a conjunction of successor-equality literals mentioning
// x, by a finite menu of candidate witnesses: positions near c_init, near
// the cap, and near each parameter.  With no positive x-literal a witness
// far from every named position always exists (in sufficiently long
// intervals), so the result is ⊤.
inline ConjunctionEliminator starEliminator(StarElimStats* stats = nullptr) {
  return [stats](const std::vector<Literal>& lits, const std::string& x) -> FormulaPtr {
    std::vector<Literal> work;
    for (auto& l : lits) {
      if (l.atom.kind != AtomKind::StarEq)
        throw std::invalid_argument("successor eliminator: non-successor atom");
      const StarTerm &s1 = l.atom.s1, &s2 = l.atom.s2;
      bool in1 = s1.base == StarTerm::Base::Var && s1.var == x;
      bool in2 = s2.base == StarTerm::Base::Var && s2.var == x;
      if (in1 && in2) {
        // S^p(x) = S^q(x): trivial when p = q, otherwise "the smaller power
        // already reaches the cap"
        if (s1.pow == s2.pow) {
          if (l.negated) return ffalse();
          continue;
        }
        work.push_back(lit(starEq(sVar(std::min(s1.pow, s2.pow), x), sFin(0)), l.negated));
      } else if (!in1 && !in2) {
        throw std::logic_error("successor eliminator: literal does not mention the eliminated variable");
      } else {
        work.push_back(l);
      }
    }
    if (work.empty()) return ftrue();
    int J = 0;
    std::set<std::string> params;
    bool hasPositive = false;
    for (auto& l : work) {
      J = std::max({J, l.atom.s1.pow, l.atom.s2.pow});
      for (const StarTerm* t : {&l.atom.s1, &l.atom.s2})
        if (t->base == StarTerm::Base::Var && t->var != x) params.insert(t->var);
      if (!l.negated) hasPositive = true;
    }
    if (stats) {
      long need = 2L * J + 2;
      if (!hasPositive) need = std::max(need, static_cast<long>(J) + 1 + static_cast<long>(work.size()));
      stats->requiredLen = std::max(stats->requiredLen, need);
    }
    if (!hasPositive) return ftrue();  // finitely many excluded positions
    std::vector<StarPoint> cands;
    for (int j = 0; j <= J; ++j) {
      cands.push_back({StarTerm::Base::CInit, "", j});
      cands.push_back({StarTerm::Base::CFin, "", -j});
    }
    for (auto& y : params)
      for (int o = -J; o <= J; ++o) cands.push_back({StarTerm::Base::Var, y, o});
    std::vector<FormulaPtr> disj;
    for (auto& c : cands) {
      std::vector<FormulaPtr> parts = {pointExists(c)};
      for (auto& l : work) parts.push_back(detail::substStarLiteral(l, x, c));
      FormulaPtr d = fand(parts);
      bool dup = false;
      for (auto& seen : disj) dup = dup || equal(seen, d);
      if (!dup) disj.push_back(std::move(d));
    }
    return for_(disj);
  };
}

struct StarQeResult {
  FormulaPtr formula;
  long adequateLen = 2;  // exact on intervals at least this long
};

inline StarQeResult qe_star(const FormulaPtr& f, size_t dnfCap = 1000000) {
  StarElimStats stats;
  FormulaPtr out = eliminateQuantifiers(f, starEliminator(&stats), dnfCap);
  return {out, stats.requiredLen};
}

// --- bridge to the pair models ----------------------------------------------

// Translate an equivalence formula (E-links and class predicates only; no
// equality atoms) into the successor mirror: an element's class index plays
// the interval position, applying a length-d term advances it d capped
// steps.
inline FormulaPtr translate_to_star(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return f;
    case Formula::Kind::Atom: {
      const Atom& a = f->atom;
      switch (a.kind) {
        case AtomKind::PairE:
          return mkStarEq(sVar(static_cast<int>(a.fg1.size()), a.var1),
                          sVar(static_cast<int>(a.fg2.size()), a.var2));
        case AtomKind::ClassInit:
          return mkStarEq(sVar(static_cast<int>(a.fg1.size()), a.var1), sInit(a.k));
        case AtomKind::ClassFin: {
          int d = static_cast<int>(a.fg1.size());
          if (a.k == 0) return mkStarEq(sVar(d, a.var1), sFin(0));
          return fand({mkStarEq(sVar(d + a.k, a.var1), sFin(0)),
                       fnot(mkStarEq(sVar(d + a.k - 1, a.var1), sFin(0)))});
        }
        default:
          throw std::invalid_argument("translate_to_star: equality atom in equivalence formula");
      }
    }
    case Formula::Kind::Not:
      return fnot(translate_to_star(f->kids[0]));
    case Formula::Kind::And: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(translate_to_star(k));
      return fand(std::move(kids));
    }
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(translate_to_star(k));
      return for_(std::move(kids));
    }
    case Formula::Kind::Exists:
      return fexists(f->var, translate_to_star(f->kids[0]));
    case Formula::Kind::Forall:
      return fforall(f->var, translate_to_star(f->kids[0]));
  }
  return f;
}

// Pull a quantifier-free successor formula back to the pair signature along
// the same interpretation (variables stand for the classes of the like-named
// pair elements).
inline FormulaPtr pullback_star_to_pair(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return f;
    case Formula::Kind::Atom: {
      const Atom& a = f->atom;
      if (a.kind != AtomKind::StarEq) throw std::invalid_argument("pullback: non-successor atom");
      const StarTerm &s1 = a.s1, &s2 = a.s2;
      auto fgPow = [](int pow) { return FgString(static_cast<size_t>(pow), 'f'); };
      if (s1.base == StarTerm::Base::Var && s2.base == StarTerm::Base::Var)
        return fatom(pairE(fgPow(s1.pow), s1.var, fgPow(s2.pow), s2.var));
      const StarTerm* v = s1.base == StarTerm::Base::Var ? &s1 : &s2;
      const StarTerm* c = s1.base == StarTerm::Base::Var ? &s2 : &s1;
      if (v->base != StarTerm::Base::Var)
        throw std::invalid_argument("pullback: constant-only equality should have been folded");
      if (c->base == StarTerm::Base::CInit) return fatom(classInit(c->pow, fgPow(v->pow), v->var));
      return fatom(classFin(0, fgPow(v->pow), v->var));
    }
    case Formula::Kind::Not:
      return fnot(pullback_star_to_pair(f->kids[0]));
    case Formula::Kind::And: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(pullback_star_to_pair(k));
      return fand(std::move(kids));
    }
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(pullback_star_to_pair(k));
      return for_(std::move(kids));
    }
    default:
      throw std::invalid_argument("pullback: quantifier in eliminated formula");
  }
}

// Eliminate ∃x from a quantifier-free equivalence formula by translating to
// the successor mirror, eliminating there, and pulling back.  statsOut, if
// given, accumulates the interval length the mirror elimination needs; the
// pulled-back formula is exact on models with at least that many classes.
inline FormulaPtr eliminate_equiv_exists(const FormulaPtr& f, const std::string& x,
                                         size_t dnfCap = 1000000, StarElimStats* statsOut = nullptr) {
  FormulaPtr star = translate_to_star(f);
  StarElimStats stats;
  FormulaPtr out = eliminateExistsOnce(star, x, starEliminator(&stats), dnfCap);
  if (statsOut) statsOut->requiredLen = std::max(statsOut->requiredLen, stats.requiredLen);
  return pullback_star_to_pair(out);
}

}  // namespace fmw
