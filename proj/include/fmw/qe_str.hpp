#pragma once

// Quantifier elimination for the tree-of-bijections theory: normalize a
// literal conjunction about one variable x into branches of the canonical
// shape  U_base(x) ∧ refinement-exclusions ∧ B-links(x, params),  then emit
// the quantifier-free residual conditions on the parameters.

#include <stdexcept>
#include <string>
#include <vector>

#include "formula.hpp"
#include "normal_form.hpp"
#include "strings.hpp"

namespace fmw {

struct StrCanonicalForm {
  DigitString base;  // deepest positive sort constraint on x
  // full sort strings strictly extending base; each contributes ¬U_excl(x)
  std::vector<DigitString> exclusions;
  // positive / negative bijection links at the base sort:
  // (rho, y) stands for B_{base,rho}(x, y); all |rho| == |base|
  std::vector<std::pair<DigitString, std::string>> posLinks;
  std::vector<std::pair<DigitString, std::string>> negLinks;
};

// One disjunct of the normalization: the canonical form is equivalent to the
// input conjunction whenever the side-guard literals (about parameters only)
// hold.  An empty branch list means the conjunction is unsatisfiable.
struct StrBranch {
  StrCanonicalForm form;
  std::vector<Literal> sideGuards;
};

struct StrNormalization {
  std::vector<StrBranch> branches;
  bool unsat() const { return branches.empty(); }
};

namespace detail {

// Re-express a branch at a deeper base sort.  Positive links push down along
// the added tail; each negative link splits on whether its target lies in
// the correspondingly deepened sort.  Returns zero or more branches.
inline std::vector<StrBranch> deepenStrBranch(const StrBranch& b, const DigitString& newBase) {
  if (newBase.size() <= b.form.base.size()) return {b};
  DigitString tail = tailAfter(b.form.base, newBase);
  StrBranch seed;
  seed.form.base = newBase;
  seed.sideGuards = b.sideGuards;
  for (auto& e : b.form.exclusions) {
    if (isPrefixOf(e, newBase)) return {};  // x in U_newBase ⊆ U_e contradicts the exclusion
    if (isPrefixOf(newBase, e)) seed.form.exclusions.push_back(e);
    // incomparable exclusions are implied by disjointness: drop
  }
  for (auto& [rho, y] : b.form.posLinks) seed.form.posLinks.push_back({concat(rho, tail), y});
  std::vector<StrBranch> out = {seed};
  for (auto& [theta, y] : b.form.negLinks) {
    DigitString deepTheta = concat(theta, tail);
    std::vector<StrBranch> next;
    for (auto& cur : out) {
      StrBranch off = cur;  // target outside the deepened sort: link vacuous
      off.sideGuards.push_back(lit(treeU(deepTheta, y), true));
      next.push_back(std::move(off));
      StrBranch on = cur;
      on.sideGuards.push_back(lit(treeU(deepTheta, y), false));
      on.form.negLinks.push_back({deepTheta, y});
      next.push_back(std::move(on));
    }
    out = std::move(next);
  }
  return out;
}

// Items after rewriting self-literals and equalities.
struct StrItem {
  enum class Kind { PosU, NegU, PosB, NegB, Unsat } kind;
  DigitString sort;    // U sort or B source sort
  DigitString target;  // B target sort
  std::string var;     // B / equality partner
};

inline void pushDeduped(std::vector<std::pair<DigitString, std::string>>& links,
                        std::pair<DigitString, std::string> link) {
  for (auto& l : links)
    if (l == link) return;
  links.push_back(std::move(link));
}

inline void applyStrItem(const StrBranch& b, const StrItem& it, std::vector<StrBranch>& out) {
  const DigitString& base = b.form.base;
  switch (it.kind) {
    case StrItem::Kind::Unsat:
      return;
    case StrItem::Kind::PosU: {
      if (isPrefixOf(it.sort, base)) {
        out.push_back(b);
      } else if (isPrefixOf(base, it.sort)) {
        auto deep = deepenStrBranch(b, it.sort);
        out.insert(out.end(), deep.begin(), deep.end());
      }
      // incomparable: U-sorts disjoint, branch dies
      return;
    }
    case StrItem::Kind::NegU: {
      if (isPrefixOf(it.sort, base)) return;  // contradicts U_base(x)
      if (isPrefixOf(base, it.sort)) {
        StrBranch nb = b;
        for (auto& e : nb.form.exclusions)
          if (e == it.sort) {
            out.push_back(nb);
            return;
          }
        nb.form.exclusions.push_back(it.sort);
        out.push_back(std::move(nb));
      } else {
        out.push_back(b);  // disjoint sort: literal already true
      }
      return;
    }
    case StrItem::Kind::PosB: {
      std::vector<StrBranch> deepened;
      if (isPrefixOf(it.sort, base)) {
        deepened.push_back(b);
      } else if (isPrefixOf(base, it.sort)) {
        deepened = deepenStrBranch(b, it.sort);
      } else {
        return;  // x cannot lie in a sort disjoint from its base
      }
      for (auto& d : deepened) {
        DigitString gamma = tailAfter(it.sort, d.form.base);
        pushDeduped(d.form.posLinks, {concat(it.target, gamma), it.var});
        out.push_back(std::move(d));
      }
      return;
    }
    case StrItem::Kind::NegB: {
      if (isPrefixOf(it.sort, base)) {
        DigitString gamma = tailAfter(it.sort, base);
        DigitString theta = concat(it.target, gamma);
        if (gamma.empty()) {
          StrBranch nb = b;
          pushDeduped(nb.form.negLinks, {theta, it.var});
          out.push_back(std::move(nb));
        } else {
          // split on whether the target lies in the deepened sort
          StrBranch off = b;
          off.sideGuards.push_back(lit(treeU(theta, it.var), true));
          out.push_back(std::move(off));
          StrBranch on = b;
          on.sideGuards.push_back(lit(treeU(theta, it.var), false));
          pushDeduped(on.form.negLinks, {theta, it.var});
          out.push_back(std::move(on));
        }
      } else if (isPrefixOf(base, it.sort)) {
        // either x avoids the deeper source sort, or the base deepens to it
        StrBranch avoid = b;
        bool dup = false;
        for (auto& e : avoid.form.exclusions) dup = dup || (e == it.sort);
        if (!dup) avoid.form.exclusions.push_back(it.sort);
        out.push_back(std::move(avoid));
        for (auto& d : deepenStrBranch(b, it.sort)) {
          pushDeduped(d.form.negLinks, {it.target, it.var});
          out.push_back(std::move(d));
        }
      } else {
        out.push_back(b);  // disjoint source sort: literal already true
      }
      return;
    }
  }
}

// Rewrite one input literal into sequence items; x-free literals are the
// caller's responsibility and rejected here.
inline std::vector<StrItem> strItemsForLiteral(const Literal& l, const std::string& x) {
  const Atom& a = l.atom;
  auto item = [](StrItem::Kind k, DigitString s, DigitString t = {}, std::string v = {}) {
    StrItem it;
    it.kind = k;
    it.sort = std::move(s);
    it.target = std::move(t);
    it.var = std::move(v);
    return it;
  };
  switch (a.kind) {
    case AtomKind::TreeU:
      if (a.var1 != x) throw std::logic_error("tree eliminator: literal does not mention the eliminated variable");
      return {item(l.negated ? StrItem::Kind::NegU : StrItem::Kind::PosU, a.str1)};
    case AtomKind::TreeB: {
      bool first = a.var1 == x, second = a.var2 == x;
      if (!first && !second) throw std::logic_error("tree eliminator: literal does not mention the eliminated variable");
      if (a.str1.size() != a.str2.size())
        // bijections only relate sorts of equal depth: the atom is false
        return l.negated ? std::vector<StrItem>{} : std::vector<StrItem>{item(StrItem::Kind::Unsat, {})};
      if (first && second) {
        // self-link: B_{s,s}(x,x) is sort membership; distinct equal-length
        // sorts are disjoint, so B_{s,t}(x,x) with s != t is false
        if (a.str1 == a.str2)
          return {item(l.negated ? StrItem::Kind::NegU : StrItem::Kind::PosU, a.str1)};
        return l.negated ? std::vector<StrItem>{} : std::vector<StrItem>{item(StrItem::Kind::Unsat, {})};
      }
      if (first)
        return {item(l.negated ? StrItem::Kind::NegB : StrItem::Kind::PosB, a.str1, a.str2, a.var2)};
      // x is the target: B_{s,t}(y,x) ≡ B_{t,s}(x,y) by the inverse axiom
      return {item(l.negated ? StrItem::Kind::NegB : StrItem::Kind::PosB, a.str2, a.str1, a.var1)};
    }
    case AtomKind::VarEq: {
      bool first = a.var1 == x, second = a.var2 == x;
      if (!first && !second) throw std::logic_error("tree eliminator: literal does not mention the eliminated variable");
      if (first && second)
        return l.negated ? std::vector<StrItem>{item(StrItem::Kind::Unsat, {})} : std::vector<StrItem>{};
      // x = y is the empty-sort bijection B_{ε,ε}(x, y)
      std::string other = first ? a.var2 : a.var1;
      return {item(l.negated ? StrItem::Kind::NegB : StrItem::Kind::PosB, {}, {}, other)};
    }
    default:
      throw std::invalid_argument("tree eliminator: non-tree atom");
  }
}

}  // namespace detail

inline StrNormalization normalize_str_conjunction(const std::vector<Literal>& lits, const std::string& x) {
  std::vector<detail::StrItem> items;
  for (auto& l : lits) {
    auto its = detail::strItemsForLiteral(l, x);
    items.insert(items.end(), its.begin(), its.end());
  }
  std::vector<StrBranch> cur(1);
  for (auto& it : items) {
    std::vector<StrBranch> next;
    for (auto& b : cur) detail::applyStrItem(b, it, next);
    cur = std::move(next);
    if (cur.empty()) break;
  }
  return {std::move(cur)};
}

// The residual parameter conditions of one branch:
//   (i)   pairwise B-compatibility of positive-link targets,
//   (ii)  no positive-link target is linked to a negative-link target,
//   (iii) positive-link targets avoid the refinement exclusions,
//   (iv)  completion: each positive-link target lies in its sort
// plus the branch's side guards.  withCompletion=false omits (iv).
inline FormulaPtr strBranchConditions(const StrBranch& b, bool withCompletion) {
  std::vector<FormulaPtr> conj;
  for (auto& g : b.sideGuards) conj.push_back(literalFormula(g));
  const auto& P = b.form.posLinks;
  for (size_t i = 0; i < P.size(); ++i)
    for (size_t j = i + 1; j < P.size(); ++j)
      conj.push_back(fatom(treeB(P[i].first, P[j].first, P[i].second, P[j].second)));
  for (auto& [rho, yi] : P)
    for (auto& [theta, yj] : b.form.negLinks)
      conj.push_back(fnot(fatom(treeB(rho, theta, yi, yj))));
  for (auto& [rho, yi] : P)
    for (auto& e : b.form.exclusions)
      conj.push_back(fnot(fatom(treeU(concat(rho, tailAfter(b.form.base, e)), yi))));
  if (withCompletion)
    for (auto& [rho, yi] : P) conj.push_back(fatom(treeU(rho, yi)));
  return fand(conj);
}

struct StrElimVerbose {
  FormulaPtr minimal;    // conditions (i)-(iii) only
  FormulaPtr completed;  // with the sort-membership conjuncts (iv)
};

// Eliminate ∃x from a conjunction of tree literals, each mentioning x.
inline FormulaPtr eliminate_exists_str(const std::vector<Literal>& lits, const std::string& x,
                                       StrElimVerbose* verbose = nullptr) {
  StrNormalization norm = normalize_str_conjunction(lits, x);
  std::vector<FormulaPtr> full, minimal;
  for (auto& b : norm.branches) {
    full.push_back(strBranchConditions(b, true));
    if (verbose) minimal.push_back(strBranchConditions(b, false));
  }
  FormulaPtr result = for_(full);
  if (verbose) {
    verbose->minimal = for_(minimal);
    verbose->completed = result;
  }
  return result;
}

}  // namespace fmw
