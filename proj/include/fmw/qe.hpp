#pragma once

// Generic quantifier-elimination driver.  Works bottom-up over the formula
// tree: each ∃ is pushed through a disjunctive normal form of its (by then
// quantifier-free) body, literals not mentioning the bound variable are
// factored out of each disjunct, and a theory-specific eliminator handles
// the rest.  ∀ is reduced to ¬∃¬.

#include <functional>
#include <vector>

#include "formula.hpp"
#include "normal_form.hpp"
#include "qe_str.hpp"

namespace fmw {

// Eliminates ∃x from a conjunction of literals that all mention x; returns a
// quantifier-free formula over the remaining variables.
using ConjunctionEliminator = std::function<FormulaPtr(const std::vector<Literal>&, const std::string&)>;

inline FormulaPtr eliminateExistsOnce(const FormulaPtr& body, const std::string& x,
                                      const ConjunctionEliminator& elim, size_t dnfCap) {
  std::vector<std::vector<Literal>> disjuncts = dnf(nnf(body), dnfCap);
  std::vector<FormulaPtr> out;
  for (auto& d : disjuncts) {
    std::vector<Literal> withX;
    std::vector<FormulaPtr> parts;
    for (auto& l : d) {
      if (atomMentions(l.atom, x))
        withX.push_back(l);
      else
        parts.push_back(literalFormula(l));
    }
    parts.push_back(withX.empty() ? ftrue() : elim(withX, x));
    out.push_back(fand(parts));
  }
  return for_(out);
}

inline FormulaPtr eliminateQuantifiers(const FormulaPtr& f, const ConjunctionEliminator& elim,
                                       size_t dnfCap = 1000000) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Not:
      return fnot(eliminateQuantifiers(f->kids[0], elim, dnfCap));
    case Formula::Kind::And: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(eliminateQuantifiers(k, elim, dnfCap));
      return fand(std::move(kids));
    }
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(eliminateQuantifiers(k, elim, dnfCap));
      return for_(std::move(kids));
    }
    case Formula::Kind::Exists:
      return eliminateExistsOnce(eliminateQuantifiers(f->kids[0], elim, dnfCap), f->var, elim, dnfCap);
    case Formula::Kind::Forall:
      return fnot(eliminateExistsOnce(fnot(eliminateQuantifiers(f->kids[0], elim, dnfCap)), f->var,
                                      elim, dnfCap));
  }
  return f;  // unreachable
}

// Tree-theory eliminator; completion=false emits only the bare three
// condition families (for side-by-side display), completion=true the
// validated output.
inline ConjunctionEliminator treeEliminator(bool completion = true) {
  return [completion](const std::vector<Literal>& lits, const std::string& x) {
    StrNormalization n = normalize_str_conjunction(lits, x);
    std::vector<FormulaPtr> parts;
    for (auto& b : n.branches) parts.push_back(strBranchConditions(b, completion));
    return for_(parts);
  };
}

inline FormulaPtr qe_tree(const FormulaPtr& f, size_t dnfCap = 1000000) {
  return eliminateQuantifiers(f, treeEliminator(true), dnfCap);
}

}  // namespace fmw
