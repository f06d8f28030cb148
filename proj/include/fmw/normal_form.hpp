#pragma once

// Negation normal form, disjunctive normal form with an explicit size cap,
// and the literal-conjunction view used by the per-theory eliminators.

#include <stdexcept>
#include <string>
#include <vector>

#include "fmw/formula.hpp"

namespace fmw {

struct CapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Literal {
  Atom atom;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

inline Literal lit(Atom a, bool neg = false) { return Literal{std::move(a), neg}; }

inline std::string printLiteral(const Literal& l) {
  return l.negated ? "(not " + printAtom(l.atom) + ")" : printAtom(l.atom);
}

inline FormulaPtr literalFormula(const Literal& l) {
  FormulaPtr f = fatom(l.atom);
  return l.negated ? fnot(f) : f;
}

inline FormulaPtr conjunctionFormula(const std::vector<Literal>& lits) {
  std::vector<FormulaPtr> kids;
  kids.reserve(lits.size());
  for (auto& l : lits) kids.push_back(literalFormula(l));
  return fand(std::move(kids));
}

inline FormulaPtr nnf(const FormulaPtr& f, bool neg = false) {
  switch (f->kind) {
    case Formula::Kind::True: return neg ? ffalse() : ftrue();
    case Formula::Kind::False: return neg ? ftrue() : ffalse();
    case Formula::Kind::Atom: return neg ? fnot(f) : f;
    case Formula::Kind::Not: return nnf(f->kids[0], !neg);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      bool isAnd = (f->kind == Formula::Kind::And) != neg;
      std::vector<FormulaPtr> kids;
      kids.reserve(f->kids.size());
      for (auto& k : f->kids) kids.push_back(nnf(k, neg));
      return isAnd ? fand(std::move(kids)) : for_(std::move(kids));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool isExists = (f->kind == Formula::Kind::Exists) != neg;
      FormulaPtr body = nnf(f->kids[0], neg);
      return isExists ? fexists(f->var, body) : fforall(f->var, body);
    }
  }
  return f;
}

constexpr size_t kDefaultDnfCap = 1'000'000;

namespace detail {

inline bool conjConsistent(const std::vector<Literal>& lits) {
  for (size_t i = 0; i < lits.size(); ++i)
    for (size_t j = i + 1; j < lits.size(); ++j)
      if (lits[i].atom == lits[j].atom && lits[i].negated != lits[j].negated) return false;
  return true;
}

inline void pushUnique(std::vector<Literal>& lits, const Literal& l) {
  for (auto& e : lits)
    if (e == l) return;
  lits.push_back(l);
}

inline void dnfRec(const FormulaPtr& f, std::vector<std::vector<Literal>>& out, size_t cap) {
  switch (f->kind) {
    case Formula::Kind::True: out.push_back({}); return;
    case Formula::Kind::False: return;
    case Formula::Kind::Atom: out.push_back({lit(f->atom)}); return;
    case Formula::Kind::Not:
      if (f->kids[0]->kind != Formula::Kind::Atom)
        throw std::logic_error("dnf expects negation normal form");
      out.push_back({lit(f->kids[0]->atom, true)});
      return;
    case Formula::Kind::Or:
      for (auto& k : f->kids) {
        dnfRec(k, out, cap);
        if (out.size() > cap) throw CapError("disjunctive normal form exceeds the size cap");
      }
      return;
    case Formula::Kind::And: {
      std::vector<std::vector<Literal>> acc = {{}};
      for (auto& k : f->kids) {
        std::vector<std::vector<Literal>> kd;
        dnfRec(k, kd, cap);
        std::vector<std::vector<Literal>> next;
        if (acc.size() * kd.size() > cap) throw CapError("disjunctive normal form exceeds the size cap");
        for (auto& a : acc)
          for (auto& b : kd) {
            std::vector<Literal> merged = a;
            for (auto& l : b) pushUnique(merged, l);
            if (conjConsistent(merged)) next.push_back(std::move(merged));
          }
        acc = std::move(next);
        if (acc.empty()) return;
      }
      size_t total = out.size() + acc.size();
      if (total > cap) throw CapError("disjunctive normal form exceeds the size cap");
      for (auto& a : acc) out.push_back(std::move(a));
      return;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: throw std::logic_error("dnf expects a quantifier-free formula");
  }
}

}  // namespace detail

// Disjunctive normal form of a quantifier-free formula as a list of
// consistent literal conjunctions (empty list = falsity; a conjunction with
// no literals = truth).
inline std::vector<std::vector<Literal>> dnf(const FormulaPtr& f, size_t cap = kDefaultDnfCap) {
  std::vector<std::vector<Literal>> out;
  detail::dnfRec(nnf(f), out, cap);
  return out;
}

}  // namespace fmw
