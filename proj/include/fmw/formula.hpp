#pragma once

// First-order formulas over the three signatures handled by the workbench:
//
//   TREE : nested set predicates U_sigma and partial bijections B_{sigma,tau}
//          indexed by digit strings, plus equality of elements.
//   PAIR : two unary functions f,g, an equivalence relation E, equality of
//          f/g-terms, and the derived class predicates "k-th class from the
//          initial end" / "k-th class from the final end".
//   STAR : a capped successor S with constants cinit, cfin; the only atom is
//          equality of S-iterates.
//   EQ   : a bare equivalence relation with equality (the PAIR atoms with
//          empty composition strings).
//
// Formulas are immutable trees shared by pointer; builders perform only
// constant folding and flattening so printed shapes stay predictable.

#include <algorithm>
#include <cassert>
#include <compare>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fmw/strings.hpp"

namespace fmw {

enum class Sig { TREE, PAIR, STAR, EQ };

inline std::string sigName(Sig s) {
  switch (s) {
    case Sig::TREE: return "tree";
    case Sig::PAIR: return "pair";
    case Sig::STAR: return "star";
    case Sig::EQ: return "eq";
  }
  return "?";
}

// A term of the STAR signature: S^pow applied to a variable or endpoint.
struct StarTerm {
  enum class Base { Var, CInit, CFin };
  int pow = 0;
  Base base = Base::Var;
  std::string var;  // used when base == Var

  bool operator==(const StarTerm&) const = default;
};

enum class AtomKind {
  TreeU,      // U_str1(var1)
  TreeB,      // B_{str1,str2}(var1, var2)
  VarEq,      // var1 = var2                  (TREE and EQ)
  PairE,      // fg1(var1) E fg2(var2)        (PAIR; EQ with empty strings)
  PairEq,     // fg1(var1) = fg2(var2)        (PAIR)
  ClassInit,  // class of fg1(var1) is the k-th from the initial end
  ClassFin,   // class of fg1(var1) is the k-th from the final end
  StarEq,     // s1 = s2                       (STAR)
};

struct Atom {
  AtomKind kind{};
  DigitString str1, str2;
  FgString fg1, fg2;
  std::string var1, var2;
  int k = 0;
  StarTerm s1, s2;

  bool operator==(const Atom&) const = default;
};

// --- atom constructors -------------------------------------------------------

inline Atom treeU(DigitString s, std::string v) {
  Atom a;
  a.kind = AtomKind::TreeU;
  a.str1 = std::move(s);
  a.var1 = std::move(v);
  return a;
}
inline Atom treeB(DigitString s, DigitString t, std::string v, std::string w) {
  Atom a;
  a.kind = AtomKind::TreeB;
  a.str1 = std::move(s);
  a.str2 = std::move(t);
  a.var1 = std::move(v);
  a.var2 = std::move(w);
  return a;
}
inline Atom varEq(std::string v, std::string w) {
  Atom a;
  a.kind = AtomKind::VarEq;
  a.var1 = std::move(v);
  a.var2 = std::move(w);
  return a;
}
inline Atom pairE(FgString s, std::string v, FgString t, std::string w) {
  Atom a;
  a.kind = AtomKind::PairE;
  a.fg1 = std::move(s);
  a.var1 = std::move(v);
  a.fg2 = std::move(t);
  a.var2 = std::move(w);
  return a;
}
inline Atom pairEq(FgString s, std::string v, FgString t, std::string w) {
  Atom a;
  a.kind = AtomKind::PairEq;
  a.fg1 = std::move(s);
  a.var1 = std::move(v);
  a.fg2 = std::move(t);
  a.var2 = std::move(w);
  return a;
}
inline Atom classInit(int k, FgString t, std::string v) {
  Atom a;
  a.kind = AtomKind::ClassInit;
  a.k = k;
  a.fg1 = std::move(t);
  a.var1 = std::move(v);
  return a;
}
inline Atom classFin(int k, FgString t, std::string v) {
  Atom a;
  a.kind = AtomKind::ClassFin;
  a.k = k;
  a.fg1 = std::move(t);
  a.var1 = std::move(v);
  return a;
}
inline StarTerm sVar(int pow, std::string v) {
  StarTerm t;
  t.pow = pow;
  t.base = StarTerm::Base::Var;
  t.var = std::move(v);
  return t;
}
inline StarTerm sInit(int pow) {
  StarTerm t;
  t.pow = pow;
  t.base = StarTerm::Base::CInit;
  return t;
}
inline StarTerm sFin(int pow) {
  StarTerm t;
  t.pow = pow;
  t.base = StarTerm::Base::CFin;
  return t;
}
inline Atom starEq(StarTerm a, StarTerm b) {
  Atom at;
  at.kind = AtomKind::StarEq;
  at.s1 = std::move(a);
  at.s2 = std::move(b);
  return at;
}

// --- formula tree ------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { True, False, Atom, Not, And, Or, Exists, Forall };
  Kind kind = Kind::True;
  fmw::Atom atom;                 // Kind::Atom
  std::vector<FormulaPtr> kids;   // Not:1, And/Or:n, Exists/Forall:1
  std::string var;                // quantified variable
};

inline FormulaPtr ftrue() {
  static const FormulaPtr t = std::make_shared<Formula>(Formula{Formula::Kind::True, {}, {}, {}});
  return t;
}
inline FormulaPtr ffalse() {
  static const FormulaPtr f = std::make_shared<Formula>(Formula{Formula::Kind::False, {}, {}, {}});
  return f;
}
inline bool isTrue(const FormulaPtr& f) { return f->kind == Formula::Kind::True; }
inline bool isFalse(const FormulaPtr& f) { return f->kind == Formula::Kind::False; }

inline FormulaPtr fatom(Atom a) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->atom = std::move(a);
  return f;
}

inline FormulaPtr fnot(FormulaPtr f) {
  if (isTrue(f)) return ffalse();
  if (isFalse(f)) return ftrue();
  if (f->kind == Formula::Kind::Not) return f->kids[0];
  auto g = std::make_shared<Formula>();
  g->kind = Formula::Kind::Not;
  g->kids = {std::move(f)};
  return g;
}

inline FormulaPtr fand(std::vector<FormulaPtr> kids) {
  std::vector<FormulaPtr> flat;
  for (auto& k : kids) {
    if (isTrue(k)) continue;
    if (isFalse(k)) return ffalse();
    if (k->kind == Formula::Kind::And) {
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (flat.empty()) return ftrue();
  if (flat.size() == 1) return flat[0];
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::And;
  f->kids = std::move(flat);
  return f;
}

inline FormulaPtr for_(std::vector<FormulaPtr> kids) {
  std::vector<FormulaPtr> flat;
  for (auto& k : kids) {
    if (isFalse(k)) continue;
    if (isTrue(k)) return ftrue();
    if (k->kind == Formula::Kind::Or) {
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (flat.empty()) return ffalse();
  if (flat.size() == 1) return flat[0];
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Or;
  f->kids = std::move(flat);
  return f;
}

inline FormulaPtr fexists(std::string v, FormulaPtr body) {
  if (isTrue(body) || isFalse(body)) return body;
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Exists;
  f->var = std::move(v);
  f->kids = {std::move(body)};
  return f;
}

inline FormulaPtr fforall(std::string v, FormulaPtr body) {
  if (isTrue(body) || isFalse(body)) return body;
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Forall;
  f->var = std::move(v);
  f->kids = {std::move(body)};
  return f;
}

// --- structural equality -------------------------------------------------------

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Atom: return a->atom == b->atom;
    case Formula::Kind::Not: return equal(a->kids[0], b->kids[0]);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      if (a->kids.size() != b->kids.size()) return false;
      for (size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
      return true;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return a->var == b->var && equal(a->kids[0], b->kids[0]);
  }
  return false;
}

// --- variables ------------------------------------------------------------------

inline void atomVars(const Atom& a, std::set<std::string>& out) {
  switch (a.kind) {
    case AtomKind::TreeU:
    case AtomKind::ClassInit:
    case AtomKind::ClassFin: out.insert(a.var1); break;
    case AtomKind::TreeB:
    case AtomKind::VarEq:
    case AtomKind::PairE:
    case AtomKind::PairEq:
      out.insert(a.var1);
      out.insert(a.var2);
      break;
    case AtomKind::StarEq:
      if (a.s1.base == StarTerm::Base::Var) out.insert(a.s1.var);
      if (a.s2.base == StarTerm::Base::Var) out.insert(a.s2.var);
      break;
  }
}

inline bool atomMentions(const Atom& a, const std::string& v) {
  std::set<std::string> s;
  atomVars(a, s);
  return s.count(v) > 0;
}

inline void collectFreeVars(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return;
    case Formula::Kind::Atom: {
      std::set<std::string> vs;
      atomVars(f->atom, vs);
      for (auto& v : vs)
        if (!bound.count(v)) out.insert(v);
      return;
    }
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (auto& k : f->kids) collectFreeVars(k, bound, out);
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool fresh = bound.insert(f->var).second;
      collectFreeVars(f->kids[0], bound, out);
      if (fresh) bound.erase(f->var);
      return;
    }
  }
}

inline std::set<std::string> freeVars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  collectFreeVars(f, bound, out);
  return out;
}

inline std::set<std::string> allVars(const FormulaPtr& f) {
  std::set<std::string> out;
  struct Walk {
    std::set<std::string>& out;
    void operator()(const FormulaPtr& g) {
      if (g->kind == Formula::Kind::Atom) atomVars(g->atom, out);
      if (g->kind == Formula::Kind::Exists || g->kind == Formula::Kind::Forall) out.insert(g->var);
      for (auto& k : g->kids) (*this)(k);
    }
  } walk{out};
  walk(f);
  return out;
}

// Replace every free occurrence of variable `from` with variable `to`.
inline FormulaPtr renameFreeVar(const FormulaPtr& f, const std::string& from, const std::string& to) {
  if (from == to) return f;
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Atom: {
      Atom a = f->atom;
      auto sub = [&](std::string& v) {
        if (v == from) v = to;
      };
      sub(a.var1);
      sub(a.var2);
      if (a.s1.base == StarTerm::Base::Var) sub(a.s1.var);
      if (a.s2.base == StarTerm::Base::Var) sub(a.s2.var);
      return fatom(std::move(a));
    }
    case Formula::Kind::Not: return fnot(renameFreeVar(f->kids[0], from, to));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      kids.reserve(f->kids.size());
      for (auto& k : f->kids) kids.push_back(renameFreeVar(k, from, to));
      return f->kind == Formula::Kind::And ? fand(std::move(kids)) : for_(std::move(kids));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (f->var == from) return f;  // occurrence is bound below
      assert(f->var != to && "rename target captured by binder");
      auto body = renameFreeVar(f->kids[0], from, to);
      return f->kind == Formula::Kind::Exists ? fexists(f->var, body) : fforall(f->var, body);
    }
  }
  return f;
}

// --- printing --------------------------------------------------------------------

inline std::string printStarTermOperand(const StarTerm& t) {
  switch (t.base) {
    case StarTerm::Base::Var: return t.var;
    case StarTerm::Base::CInit: return "cinit";
    case StarTerm::Base::CFin: return "cfin";
  }
  return "?";
}

inline std::string printStarTerm(const StarTerm& t) {
  if (t.pow == 0) return printStarTermOperand(t);
  return "(S " + std::to_string(t.pow) + " " + printStarTermOperand(t) + ")";
}

inline std::string printFgTerm(const FgString& s, const std::string& v) {
  if (s.empty()) return v;
  return "(app \"" + s + "\" " + v + ")";
}

inline std::string printAtom(const Atom& a) {
  switch (a.kind) {
    case AtomKind::TreeU: return "(U \"" + digitsToText(a.str1) + "\" " + a.var1 + ")";
    case AtomKind::TreeB:
      return "(B \"" + digitsToText(a.str1) + "\" \"" + digitsToText(a.str2) + "\" " + a.var1 + " " + a.var2 + ")";
    case AtomKind::VarEq: return "(= " + a.var1 + " " + a.var2 + ")";
    case AtomKind::PairE: return "(E " + printFgTerm(a.fg1, a.var1) + " " + printFgTerm(a.fg2, a.var2) + ")";
    case AtomKind::PairEq: return "(= " + printFgTerm(a.fg1, a.var1) + " " + printFgTerm(a.fg2, a.var2) + ")";
    case AtomKind::ClassInit: return "(Cinit " + std::to_string(a.k) + " " + printFgTerm(a.fg1, a.var1) + ")";
    case AtomKind::ClassFin: return "(Cfin " + std::to_string(a.k) + " " + printFgTerm(a.fg1, a.var1) + ")";
    case AtomKind::StarEq: return "(= " + printStarTerm(a.s1) + " " + printStarTerm(a.s2) + ")";
  }
  return "?";
}

inline std::string print(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True: return "(and)";
    case Formula::Kind::False: return "(or)";
    case Formula::Kind::Atom: return printAtom(f->atom);
    case Formula::Kind::Not: return "(not " + print(f->kids[0]) + ")";
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string out = f->kind == Formula::Kind::And ? "(and" : "(or";
      for (auto& k : f->kids) out += " " + print(k);
      return out + ")";
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return std::string(f->kind == Formula::Kind::Exists ? "(exists " : "(forall ") + f->var + " " +
             print(f->kids[0]) + ")";
  }
  return "?";
}

// A fresh variable name not occurring in `used`.
inline std::string freshVar(const std::set<std::string>& used, const std::string& stem) {
  if (!used.count(stem)) return stem;
  for (int i = 0;; ++i) {
    std::string cand = stem + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

}  // namespace fmw
