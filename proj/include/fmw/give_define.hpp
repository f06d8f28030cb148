#pragma once

// Guarded cardinality definitions for one-variable tree-signature formulas.
//
// give_and_define(f, x) computes |{x : f(x, params)}| as a finite list of
// (value, guard) cases over the parameters.  The guards partition the
// parameter space; values are polynomials in the sort-size anchors |U_sigma|
// plus integer corrections from pinned points.
//
// Method: put f in disjunctive normal form, apply inclusion-exclusion over
// disjunct subsets, and normalize each subset conjunction to branch form
// (base sort, refinement exclusions, positive/negative links).  A branch with
// a positive link pins x to at most one point, contributing an existential
// indicator; a branch without one contributes |U_base| minus an
// inclusion-exclusion over its excluded subsorts and negative-link pinned
// points, each pinned-point term guarded by quantifier-free sort/link
// conditions on the parameters.  Finally, every distinct guard condition is
// split by sign, giving mutually exclusive quantifier-free (or singleton
// existential) guards with a concrete value each.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fmw/card_expr.hpp"
#include "fmw/counting.hpp"
#include "fmw/formula.hpp"
#include "fmw/normal_form.hpp"
#include "fmw/qe_str.hpp"
#include "fmw/strings.hpp"

namespace fmw {

// Anchor name for the cardinality of a sort: "|U_01|", "|U_|" for the root.
inline std::string sortAnchorName(const DigitString& s) {
  std::string out = "|U_";
  for (int d : s) out += static_cast<char>('0' + d);
  out += '|';
  return out;
}

namespace detail {

// A weighted product of indicator conditions: contributes `weight` to the
// count exactly when every listed condition has the required truth value.
struct CountTerm {
  CardExpr weight;
  std::vector<std::pair<FormulaPtr, bool>> req;
};

// Returns false when the added requirement contradicts an existing one.
inline bool addRequirement(CountTerm& t, const FormulaPtr& cond, bool want) {
  for (auto& [c, w] : t.req)
    if (equal(c, cond)) return w == want;
  t.req.push_back({cond, want});
  return true;
}

// Terms contributed by one branch of a normalized conjunction.  `seed`
// already carries the branch's side-guard and parameter-literal conditions;
// `sign` is the inclusion-exclusion sign of the enclosing disjunct subset.
inline void branchTerms(const StrBranch& b, const std::string& x, int sign, const CountTerm& seed,
                        std::vector<CountTerm>& out) {
  if (!b.form.posLinks.empty()) {
    // a positive link pins x: the solution set is empty or a singleton
    CountTerm t = seed;
    t.weight *= CardExpr::constant(sign);
    std::vector<FormulaPtr> conds;
    conds.push_back(fatom(treeU(b.form.base, x)));
    for (auto& e : b.form.exclusions) conds.push_back(fnot(fatom(treeU(e, x))));
    for (auto& [rho, y] : b.form.posLinks) conds.push_back(fatom(treeB(b.form.base, rho, x, y)));
    for (auto& [theta, z] : b.form.negLinks) conds.push_back(fnot(fatom(treeB(b.form.base, theta, x, z))));
    if (!addRequirement(t, fexists(x, fand(conds)), true)) return;
    out.push_back(std::move(t));
    return;
  }
  const auto& E = b.form.exclusions;
  const auto& N = b.form.negLinks;
  size_t ne = E.size(), nn = N.size();
  if (ne + nn > 20) throw CapError("cardinality definition: too many removed sets in one branch");
  for (uint32_t mask = 0; mask < (1u << (ne + nn)); ++mask) {
    // the sorts selected from the exclusions must form a prefix chain with
    // the base, else the intersection is empty
    DigitString deepest = b.form.base;
    bool chain = true;
    for (size_t i = 0; i < ne && chain; ++i) {
      if (!(mask & (1u << i))) continue;
      if (isPrefixOf(deepest, E[i]))
        deepest = E[i];
      else if (!isPrefixOf(E[i], deepest))
        chain = false;
    }
    if (!chain) continue;
    int sgn = (__builtin_popcount(mask) % 2 == 0) ? sign : -sign;
    CountTerm t = seed;
    std::vector<size_t> sel;
    for (size_t j = 0; j < nn; ++j)
      if (mask & (1u << (ne + j))) sel.push_back(j);
    if (sel.empty()) {
      t.weight *= CardExpr::constant(sgn) * CardExpr::anchor(sortAnchorName(deepest));
      out.push_back(std::move(t));
      continue;
    }
    // selected negative links intersect to at most one point: the common
    // preimage of their targets, which exists inside the deepest sort iff
    // the first target lies in the correspondingly deepened sort and all
    // targets share the suffix
    t.weight *= CardExpr::constant(sgn);
    const auto& [th0, z0] = N[sel[0]];
    bool ok = addRequirement(t, fatom(treeU(concat(th0, tailAfter(b.form.base, deepest)), z0)), true);
    for (size_t k = 1; k < sel.size() && ok; ++k) {
      const auto& [thk, zk] = N[sel[k]];
      ok = addRequirement(t, fatom(treeB(th0, thk, z0, zk)), true);
    }
    if (ok) out.push_back(std::move(t));
  }
}

// Syntactic contradiction check for a signed assignment to conditions:
// positive sort facts (from true U conditions and both operands of true B
// conditions) against each other and against false U conditions.
inline bool signPatternContradictory(const std::vector<FormulaPtr>& conds, uint32_t pat) {
  std::vector<std::pair<std::string, DigitString>> pos, neg;
  for (size_t i = 0; i < conds.size(); ++i) {
    if (conds[i]->kind != Formula::Kind::Atom) continue;
    const Atom& a = conds[i]->atom;
    bool val = (pat >> i) & 1u;
    if (a.kind == AtomKind::TreeU) {
      (val ? pos : neg).push_back({a.var1, a.str1});
    } else if (a.kind == AtomKind::TreeB && val) {
      pos.push_back({a.var1, a.str1});
      pos.push_back({a.var2, a.str2});
    }
  }
  for (size_t i = 0; i < pos.size(); ++i)
    for (size_t j = i + 1; j < pos.size(); ++j)
      if (pos[i].first == pos[j].first && !isPrefixOf(pos[i].second, pos[j].second) &&
          !isPrefixOf(pos[j].second, pos[i].second))
        return true;  // one variable in two disjoint sorts
  for (auto& [v, s] : pos)
    for (auto& [w, u] : neg)
      if (v == w && isPrefixOf(u, s)) return true;  // in a sort but not its supersort
  return false;
}

inline void checkTreeQuantifierFree(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      if (f->atom.kind != AtomKind::TreeU && f->atom.kind != AtomKind::TreeB &&
          f->atom.kind != AtomKind::VarEq)
        throw std::invalid_argument("cardinality definition: non-tree atom");
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw std::invalid_argument("cardinality definition: input must be quantifier-free");
    default:
      for (auto& kid : f->kids) checkTreeQuantifierFree(kid);
  }
}

}  // namespace detail

// Guarded cardinality of {x : f(x, params)} for quantifier-free f over the
// tree signature.  Guards are mutually exclusive and cover every parameter
// tuple (a zero-value case is kept); values are exact whenever the guard
// holds.  `condCap` bounds the number of distinct guard conditions.
inline CardDefinition give_and_define(const FormulaPtr& f, const std::string& x,
                                      size_t dnfCap = 100000, size_t condCap = 16) {
  detail::checkTreeQuantifierFree(f);
  std::vector<std::vector<Literal>> disjuncts = dnf(nnf(f), dnfCap);
  if (disjuncts.size() > 12) throw CapError("cardinality definition: too many disjuncts");

  // inclusion-exclusion over disjunct subsets; each subset conjunction is
  // normalized to branches whose solution regions are disjoint
  std::vector<detail::CountTerm> terms;
  for (uint32_t sub = 1; sub < (1u << disjuncts.size()); ++sub) {
    std::vector<Literal> lits;
    for (size_t i = 0; i < disjuncts.size(); ++i)
      if (sub & (1u << i)) lits.insert(lits.end(), disjuncts[i].begin(), disjuncts[i].end());
    int sign = (__builtin_popcount(sub) % 2 == 1) ? 1 : -1;
    detail::CountTerm seed;
    seed.weight = CardExpr::constant(1);
    std::vector<Literal> xlits;
    bool dead = false;
    for (auto& l : lits) {
      std::set<std::string> vs;
      atomVars(l.atom, vs);
      if (vs.count(x))
        xlits.push_back(l);
      else if (!detail::addRequirement(seed, fatom(l.atom), !l.negated))
        dead = true;
    }
    if (dead) continue;
    StrNormalization norm = normalize_str_conjunction(xlits, x);
    for (auto& b : norm.branches) {
      detail::CountTerm bt = seed;
      bool ok = true;
      for (auto& g : b.sideGuards) ok = ok && detail::addRequirement(bt, fatom(g.atom), !g.negated);
      if (ok) detail::branchTerms(b, x, sign, bt, terms);
    }
  }

  // split the parameter space by the sign pattern of the distinct conditions
  std::vector<FormulaPtr> conds;
  auto condIndex = [&](const FormulaPtr& c) {
    for (size_t i = 0; i < conds.size(); ++i)
      if (equal(conds[i], c)) return i;
    conds.push_back(c);
    return conds.size() - 1;
  };
  struct IndexedTerm {
    CardExpr weight;
    uint32_t mask = 0, want = 0;
  };
  std::vector<IndexedTerm> indexed;
  for (auto& t : terms) {
    IndexedTerm it;
    it.weight = t.weight;
    for (auto& [c, w] : t.req) {
      size_t i = condIndex(c);
      if (conds.size() > condCap) throw CapError("cardinality definition: too many guard conditions");
      it.mask |= 1u << i;
      if (w) it.want |= 1u << i;
    }
    indexed.push_back(std::move(it));
  }

  CardDefinition def;
  for (uint32_t pat = 0; pat < (1u << conds.size()); ++pat) {
    if (detail::signPatternContradictory(conds, pat)) continue;
    CardExpr value;
    for (auto& t : indexed)
      if ((pat & t.mask) == t.want) value += t.weight;
    std::vector<FormulaPtr> parts;
    for (size_t i = 0; i < conds.size(); ++i)
      parts.push_back((pat >> i) & 1u ? conds[i] : fnot(conds[i]));
    def.cases.push_back({std::move(value), fand(parts)});
  }
  mergeEqualValues(def);

  // record the sort anchors the values mention
  for (auto& c : def.cases)
    for (auto& name : c.value.anchorNames())
      def.anchors[name] = "number of elements of the sort " + name.substr(1, name.size() - 2);
  return def;
}

}  // namespace fmw
