#pragma once

// Brute-force ground truth.  Everything here works by enumerating elements
// and evaluating atoms directly; none of it consults the symbolic counting
// or elimination passes, so it can sit on the other side of every
// equivalence check.
//
// The workhorse is a bit table over k named axes (k <= 3), one bit per
// parameter tuple, with the last axis padded to whole words.  Quantifier-free
// formulas are evaluated bottom-up with word-parallel boolean operations;
// existential projections of literal conjunctions are accumulated per
// witness with a sparse representation of each axis section.

#include <algorithm>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmw/model.hpp"
#include "fmw/normal_form.hpp"

namespace fmw {

struct BitTable {
  uint64_t domain = 0;            // axis length (all axes equal)
  std::vector<std::string> axes;  // outermost first; last axis is bit-contiguous
  size_t rowWords = 0;
  uint64_t rows = 0;
  std::vector<uint64_t> bits;

  static BitTable make(uint64_t domain, std::vector<std::string> axes) {
    BitTable t;
    t.domain = domain;
    t.axes = std::move(axes);
    if (t.axes.empty()) throw std::logic_error("bit table needs at least one axis");
    t.rowWords = (domain + 63) / 64;
    t.rows = 1;
    for (size_t i = 0; i + 1 < t.axes.size(); ++i) t.rows *= domain;
    t.bits.assign(t.rows * t.rowWords, 0);
    return t;
  }

  uint64_t* row(uint64_t r) { return bits.data() + r * rowWords; }
  const uint64_t* row(uint64_t r) const { return bits.data() + r * rowWords; }

  bool get(const std::vector<Elem>& tuple) const {
    uint64_t r = 0;
    for (size_t i = 0; i + 1 < axes.size(); ++i) r = r * domain + tuple[i];
    Elem last = tuple.back();
    return (row(r)[last / 64] >> (last % 64)) & 1;
  }
  void set(const std::vector<Elem>& tuple) {
    uint64_t r = 0;
    for (size_t i = 0; i + 1 < axes.size(); ++i) r = r * domain + tuple[i];
    Elem last = tuple.back();
    row(r)[last / 64] |= uint64_t{1} << (last % 64);
  }

  void fillAll() {
    std::fill(bits.begin(), bits.end(), ~uint64_t{0});
    clearPad();
  }
  void clearPad() {
    if (domain % 64 == 0) return;
    uint64_t mask = (uint64_t{1} << (domain % 64)) - 1;
    for (uint64_t r = 0; r < rows; ++r) row(r)[rowWords - 1] &= mask;
  }
  void orWith(const BitTable& o) {
    for (size_t i = 0; i < bits.size(); ++i) bits[i] |= o.bits[i];
  }
  void andWith(const BitTable& o) {
    for (size_t i = 0; i < bits.size(); ++i) bits[i] &= o.bits[i];
  }
  void flip() {
    for (auto& w : bits) w = ~w;
    clearPad();
  }
  bool any() const {
    for (auto w : bits)
      if (w) return true;
    return false;
  }

  // First tuple where this table and o differ, if any.
  std::optional<std::vector<Elem>> firstDiff(const BitTable& o) const {
    for (size_t i = 0; i < bits.size(); ++i) {
      uint64_t d = bits[i] ^ o.bits[i];
      if (!d) continue;
      size_t bit = i * 64 + static_cast<size_t>(__builtin_ctzll(d));
      uint64_t r = bit / (rowWords * 64);
      std::vector<Elem> tuple(axes.size(), 0);
      tuple.back() = static_cast<Elem>(bit - r * rowWords * 64);
      for (size_t i2 = axes.size() - 1; i2-- > 0;) {
        tuple[i2] = r % domain;
        r /= domain;
      }
      return tuple;
    }
    return std::nullopt;
  }
};

namespace detail {

// Partner of element a across B_{sigma,tau}, if a lies in U_sigma.
inline std::optional<Elem> treePartner(const Structure& s, const DigitString& sigma, const DigitString& tau,
                                       Elem a) {
  if (!s.validSort(sigma) || !s.validSort(tau) || sigma.size() != tau.size()) return std::nullopt;
  if (!s.inU(sigma, a)) return std::nullopt;
  uint64_t rest = s.pow[s.spec.n - sigma.size()];
  return s.sortCode(tau) * rest + a % rest;
}

inline size_t axisIndex(const std::vector<std::string>& axes, const std::string& v) {
  for (size_t i = 0; i < axes.size(); ++i)
    if (axes[i] == v) return i;
  throw std::logic_error("variable \"" + v + "\" is not a table axis");
}

}  // namespace detail

// Truth table of a quantifier-free formula over the given axes (which must
// cover its free variables).
inline BitTable formulaTable(const Structure& s, const FormulaPtr& f, const std::vector<std::string>& axes) {
  uint64_t N = s.size;
  switch (f->kind) {
    case Formula::Kind::True: {
      BitTable t = BitTable::make(N, axes);
      t.fillAll();
      return t;
    }
    case Formula::Kind::False: return BitTable::make(N, axes);
    case Formula::Kind::Not: {
      BitTable t = formulaTable(s, f->kids[0], axes);
      t.flip();
      return t;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      BitTable t = formulaTable(s, f->kids[0], axes);
      for (size_t i = 1; i < f->kids.size(); ++i) {
        BitTable u = formulaTable(s, f->kids[i], axes);
        if (f->kind == Formula::Kind::And)
          t.andWith(u);
        else
          t.orWith(u);
      }
      return t;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: throw std::logic_error("formulaTable expects a quantifier-free formula");
    case Formula::Kind::Atom: break;
  }

  const Atom& a = f->atom;
  BitTable t = BitTable::make(N, axes);
  std::set<std::string> vs;
  atomVars(a, vs);
  std::vector<std::string> ownVars(vs.begin(), vs.end());
  if (ownVars.empty()) {  // closed atom: constant over the whole table
    if (evalAtom(s, a, {})) t.fillAll();
    return t;
  }
  size_t k = axes.size();
  size_t rowWords = t.rowWords;

  auto rowDigit = [&](uint64_t r, size_t axis) {  // axis < k-1
    for (size_t i = k - 1; i-- > axis + 1;) r /= N;
    return static_cast<Elem>(r % N);
  };

  if (ownVars.size() == 1) {
    // one variable: a membership row, broadcast along the other axes
    size_t ax = detail::axisIndex(axes, ownVars[0]);
    std::vector<uint64_t> sat(rowWords, 0);
    for (Elem v = 0; v < N; ++v)
      if (evalAtom(s, a, {{ownVars[0], v}})) sat[v / 64] |= uint64_t{1} << (v % 64);
    if (ax == k - 1) {
      for (uint64_t r = 0; r < t.rows; ++r) std::memcpy(t.row(r), sat.data(), rowWords * 8);
    } else {
      for (uint64_t r = 0; r < t.rows; ++r)
        if ((sat[rowDigit(r, ax) / 64] >> (rowDigit(r, ax) % 64)) & 1)
          std::memset(t.row(r), 0xff, rowWords * 8);
      t.clearPad();
    }
    return t;
  }

  // two variables: build the satisfaction matrix sparsely where possible,
  // then blit it row by row
  size_t axA = detail::axisIndex(axes, ownVars[0]);
  size_t axB = detail::axisIndex(axes, ownVars[1]);
  // matrix rows indexed by the variable on the *earlier* axis
  if (axA > axB) {
    std::swap(axA, axB);
    std::swap(ownVars[0], ownVars[1]);
  }
  std::vector<uint64_t> mat;  // N rows of rowWords, indexed by ownVars[0]
  mat.assign(static_cast<size_t>(N) * rowWords, 0);
  auto matSet = [&](Elem va, Elem vb) { mat[va * rowWords + vb / 64] |= uint64_t{1} << (vb % 64); };

  if (a.kind == AtomKind::TreeB) {
    const DigitString& sFrom = a.var1 == ownVars[0] ? a.str1 : a.str2;
    const DigitString& sTo = a.var1 == ownVars[0] ? a.str2 : a.str1;
    for (Elem va = 0; va < N; ++va) {
      auto vb = detail::treePartner(s, sFrom, sTo, va);
      if (vb) matSet(va, *vb);
    }
  } else if (a.kind == AtomKind::VarEq) {
    for (Elem v = 0; v < N; ++v) matSet(v, v);
  } else {
    if (N > 4096) throw std::logic_error("quadratic atom fill on a large domain");
    for (Elem va = 0; va < N; ++va)
      for (Elem vb = 0; vb < N; ++vb)
        if (evalAtom(s, a, {{ownVars[0], va}, {ownVars[1], vb}})) matSet(va, vb);
  }

  if (axB == k - 1) {
    // the second variable is bit-contiguous: copy matrix rows
    for (uint64_t r = 0; r < t.rows; ++r)
      std::memcpy(t.row(r), mat.data() + static_cast<size_t>(rowDigit(r, axA)) * rowWords, rowWords * 8);
  } else {
    // both variables are row axes: a row is all-ones iff the pair is set
    for (uint64_t r = 0; r < t.rows; ++r) {
      Elem va = rowDigit(r, axA), vb = rowDigit(r, axB);
      if ((mat[va * rowWords + vb / 64] >> (vb % 64)) & 1) std::memset(t.row(r), 0xff, rowWords * 8);
    }
    t.clearPad();
  }
  return t;
}

// --- existential projection of a literal conjunction --------------------------

// Table over `params` holding, for each parameter tuple, whether some witness
// x satisfies every literal.  Every literal must mention x.  Works for any
// signature; on string models the per-witness section of each axis is kept
// sparse (a pin, or a short removal list), so large domains stay cheap.
inline BitTable existsTable(const Structure& s, const std::vector<Literal>& lits, const std::string& x,
                            const std::vector<std::string>& params) {
  uint64_t N = s.size;
  BitTable acc = BitTable::make(N, params);
  size_t k = params.size();

  std::vector<const Literal*> gate;                    // literals mentioning only x
  std::vector<std::vector<const Literal*>> axisLits(k);  // literals mentioning x and params[i]
  for (auto& l : lits) {
    std::set<std::string> vs;
    atomVars(l.atom, vs);
    if (!vs.count(x)) throw std::logic_error("existsTable literal does not mention the witness variable");
    vs.erase(x);
    if (vs.empty()) {
      gate.push_back(&l);
    } else if (vs.size() == 1) {
      axisLits[detail::axisIndex(params, *vs.begin())].push_back(&l);
    } else {
      throw std::logic_error("existsTable literal mentions two parameters");
    }
  }

  struct Section {  // subset of the domain, as either a pin or a removal list
    bool pinned = false;
    bool empty = false;
    Elem pin = 0;
    std::vector<Elem> removed;

    void intersectSingleton(std::optional<Elem> v) {
      if (empty) return;
      if (!v) {
        empty = true;
        return;
      }
      if (pinned) {
        if (pin != *v) empty = true;
        return;
      }
      for (Elem r : removed)
        if (r == *v) {
          empty = true;
          return;
        }
      pinned = true;
      pin = *v;
    }
    void removeSingleton(std::optional<Elem> v) {
      if (empty || !v) return;
      if (pinned) {
        if (pin == *v) empty = true;
        return;
      }
      removed.push_back(*v);
    }
  };

  // The set {y : literal(x,y)} for fixed x is always a singleton or the
  // complement of at most a singleton, for every two-variable atom in the
  // supported signatures.
  auto column = [&](const Literal& l, Elem xv) -> std::pair<bool, std::optional<Elem>> {
    // returns (isSingletonSide, value); negation handled by caller
    const Atom& a = l.atom;
    switch (a.kind) {
      case AtomKind::VarEq: return {true, xv};
      case AtomKind::TreeB: {
        if (a.var1 == x) return {true, detail::treePartner(s, a.str1, a.str2, xv)};
        return {true, detail::treePartner(s, a.str2, a.str1, xv)};
      }
      case AtomKind::PairEq: {
        // s(x) = t(y): y is pinned only when t is empty; otherwise fall back
        // to an explicit scan (small pair domains only).
        if (a.var1 == x && a.fg2.empty()) return {true, s.applyFg(a.fg1, xv)};
        if (a.var2 == x && a.fg1.empty()) return {true, s.applyFg(a.fg2, xv)};
        return {false, std::nullopt};
      }
      default: return {false, std::nullopt};
    }
  };

  std::vector<Elem> tuple(k, 0);

  // Uncovered-tuple tracking for witnesses that leave every axis unpinned.
  bool haveFree = false;
  BitTable uncov = BitTable::make(N, params);

  for (Elem xv = 0; xv < N; ++xv) {
    bool ok = true;
    for (auto* l : gate) {
      bool v = evalAtom(s, l->atom, {{x, xv}});
      if (v == l->negated) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    std::vector<Section> sec(k);
    for (size_t i = 0; i < k && ok; ++i) {
      for (auto* l : axisLits[i]) {
        auto [fast, val] = column(*l, xv);
        if (fast) {
          if (!l->negated)
            sec[i].intersectSingleton(val);
          else
            sec[i].removeSingleton(val);
        } else {
          // explicit scan (pair-family term atoms; small domains only):
          // intersect the section with the literal's hit set by removing
          // the complement.
          if (N > 4096) throw std::logic_error("slow literal column on a large domain");
          Section& t0 = sec[i];
          for (Elem yv = 0; yv < N; ++yv) {
            bool v = evalAtom(s, l->atom, {{x, xv}, {params[i], yv}});
            if (v == l->negated) {
              if (t0.pinned) {
                if (t0.pin == yv) {
                  t0.empty = true;
                  break;
                }
              } else {
                t0.removed.push_back(yv);
              }
            }
          }
        }
        if (sec[i].empty) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    for (auto& t0 : sec)
      if (t0.empty) ok = false;
    if (!ok) continue;

    std::vector<size_t> freeAxes, pinAxes;
    for (size_t i = 0; i < k; ++i)
      (sec[i].pinned ? pinAxes : freeAxes).push_back(i);

    if (freeAxes.empty()) {
      for (size_t i = 0; i < k; ++i) tuple[i] = sec[i].pin;
      acc.set(tuple);
      continue;
    }

    if (freeAxes.size() == k) {
      // contributes everything except the removal crosses; fold into uncov
      if (!haveFree) {
        haveFree = true;
        uncov.fillAll();
      }
      // uncov &= cross(x): keep only tuples hit on some axis
      BitTable nxt = BitTable::make(N, params);
      for (uint64_t r = 0; r < uncov.rows; ++r) {
        // decode row digits (axes 0..k-2)
        bool rowHit = false;
        uint64_t rr = r;
        for (size_t i = k - 1; i-- > 0;) {
          Elem digit = rr % N;
          rr /= N;
          for (Elem rem : sec[i].removed)
            if (rem == digit) rowHit = true;
        }
        if (rowHit) {
          std::memcpy(nxt.row(r), uncov.row(r), uncov.rowWords * 8);
        } else {
          for (Elem rem : sec[k - 1].removed) {
            uint64_t w = uncov.row(r)[rem / 64] & (uint64_t{1} << (rem % 64));
            nxt.row(r)[rem / 64] |= w;
          }
        }
      }
      uncov = std::move(nxt);
      continue;
    }

    // mixed: some axes pinned, one/two free -> mark the product directly
    if (freeAxes.size() == 1 && k <= 3) {
      size_t fa = freeAxes[0];
      if (fa == k - 1) {
        // free axis is the contiguous one: whole row minus removals
        uint64_t r = 0;
        for (size_t i = 0; i + 1 < k; ++i) r = r * N + sec[i].pin;
        std::vector<uint64_t> rowMask(acc.rowWords, ~uint64_t{0});
        for (Elem rem : sec[fa].removed) rowMask[rem / 64] &= ~(uint64_t{1} << (rem % 64));
        uint64_t* dst = acc.row(r);
        for (size_t wIdx = 0; wIdx < acc.rowWords; ++wIdx) dst[wIdx] |= rowMask[wIdx];
        acc.clearPad();
      } else {
        std::vector<char> rm(N, 0);
        for (Elem rem : sec[fa].removed) rm[rem] = 1;
        for (Elem v = 0; v < N; ++v) {
          if (rm[v]) continue;
          for (size_t i = 0; i < k; ++i) tuple[i] = (i == fa) ? v : sec[i].pin;
          acc.set(tuple);
        }
      }
      continue;
    }

    // two free axes plus a pin (k == 3)
    std::vector<char> rmA(N, 0), rmB(N, 0);
    size_t fa = freeAxes[0], fb = freeAxes[1];
    for (Elem rem : sec[fa].removed) rmA[rem] = 1;
    for (Elem rem : sec[fb].removed) rmB[rem] = 1;
    for (Elem va = 0; va < N; ++va) {
      if (rmA[va]) continue;
      for (Elem vb = 0; vb < N; ++vb) {
        if (rmB[vb]) continue;
        tuple[fa] = va;
        tuple[fb] = vb;
        tuple[pinAxes[0]] = sec[pinAxes[0]].pin;
        acc.set(tuple);
      }
    }
  }

  if (haveFree) {
    uncov.flip();  // covered by some fully-free witness
    acc.orWith(uncov);
  }
  return acc;
}

// Per-tuple witness counts: result[tupleIndex] = |{x : f(x, params)}|.
// Builds the full table over params + x and popcounts the x-rows.
inline std::vector<uint32_t> countsPerTuple(const Structure& s, const FormulaPtr& f,
                                            const std::vector<std::string>& params, const std::string& x) {
  std::vector<std::string> axes = params;
  axes.push_back(x);
  BitTable t = formulaTable(s, f, axes);
  std::vector<uint32_t> out(t.rows, 0);
  for (uint64_t r = 0; r < t.rows; ++r) {
    uint32_t c = 0;
    const uint64_t* w = t.row(r);
    for (size_t i = 0; i < t.rowWords; ++i) c += static_cast<uint32_t>(__builtin_popcountll(w[i]));
    out[r] = c;
  }
  return out;
}

}  // namespace fmw
