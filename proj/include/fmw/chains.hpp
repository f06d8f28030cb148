#pragma once

// Descending growth-order chains: three schemes of definable sets whose
// cardinalities drop by a full growth order at every level, verified
// extensionally on concrete models and order-theoretically by the symbolic
// and empirical comparators.
//
//   SA_TREE   level j: x lies in the depth-j sort along a fixed branch.
//   A_PAIR    level j: x avoids the classes 0..j (via parameters a_i picked
//             from the i-th class); count D_{n-j-2,m}.
//   A_EQCLASS level j: x avoids the j largest classes (via parameters c^i);
//             count sum_{i=1..n-j} n^i.  Level 0 is the whole domain.

#include <gmpxx.h>

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmw/counting.hpp"
#include "fmw/formula.hpp"
#include "fmw/model.hpp"

namespace fmw {

enum class ChainKind { SA_TREE, A_PAIR, A_EQCLASS };

inline const char* chainKindName(ChainKind k) {
  switch (k) {
    case ChainKind::SA_TREE: return "sa_tree";
    case ChainKind::A_PAIR: return "a_pair";
    default: return "a_eqclass";
  }
}

struct Chain {
  ChainKind kind = ChainKind::SA_TREE;
  int depth = 0;                          // levels run 0..depth
  std::vector<std::vector<long>> sweep;   // {n} points, or {n,m} for A_PAIR
  DigitString branch;                     // SA_TREE: the descending branch
};

// The level-j formula, in the free variable "x" and the parameter variables
// reported by levelParamNames.
inline FormulaPtr chainLevelFormula(const Chain& c, int j) {
  std::vector<FormulaPtr> parts;
  switch (c.kind) {
    case ChainKind::SA_TREE: {
      DigitString prefix(c.branch.begin(), c.branch.begin() + j);
      return fatom(treeU(prefix, "x"));
    }
    case ChainKind::A_PAIR:
      for (int i = 0; i <= j; ++i)
        parts.push_back(fnot(fatom(pairE("", "x", "", "a" + std::to_string(i)))));
      return fand(parts);
    default:
      for (int i = 1; i <= j; ++i)
        parts.push_back(fnot(fatom(pairE("", "x", "", "c" + std::to_string(i)))));
      return fand(parts);
  }
}

inline std::vector<std::string> chainLevelParamNames(const Chain& c, int j) {
  std::vector<std::string> out;
  if (c.kind == ChainKind::A_PAIR)
    for (int i = 0; i <= j; ++i) out.push_back("a" + std::to_string(i));
  if (c.kind == ChainKind::A_EQCLASS)
    for (int i = 1; i <= j; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

// Deterministic parameter choice on a concrete model: the least element of
// the class each parameter must come from (i-th class from the bottom for
// A_PAIR, i-th largest class for A_EQCLASS).
inline Env chainLevelParams(const Chain& c, int j, const Structure& s) {
  Env env;
  if (c.kind == ChainKind::A_PAIR)
    for (int i = 0; i <= j; ++i)
      env.emplace_back("a" + std::to_string(i), s.classOffset[i]);
  if (c.kind == ChainKind::A_EQCLASS)
    for (int i = 1; i <= j; ++i)
      env.emplace_back("c" + std::to_string(i), s.classOffset[s.numClasses() - i]);
  return env;
}

inline FamilySpec chainSweepSpec(const Chain& c, const std::vector<long>& pt) {
  std::ostringstream os;
  switch (c.kind) {
    case ChainKind::SA_TREE: os << "string:" << pt[0]; break;
    case ChainKind::A_PAIR: os << "pair:" << pt[0] << "," << pt[1]; break;
    default: os << "eqclass:" << pt[0]; break;
  }
  return FamilySpec::parse(os.str());
}

// Closed-form level count, checked against the model count during
// verification.
inline mpz_class chainExpectedCount(const Chain& c, int j, const std::vector<long>& pt) {
  mpz_class total = 0, t;
  long n = pt[0];
  switch (c.kind) {
    case ChainKind::SA_TREE:
      mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(n - j));
      return total;
    case ChainKind::A_PAIR:
      for (long i = 0; i <= n - j - 2; ++i) {
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(pt[1]), 1ul << i);
        total += t;
      }
      return total;
    default:
      for (long i = 1; i <= n - j; ++i) {
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(i));
        total += t;
      }
      return total;
  }
}

inline Chain build_chain(ChainKind kind, int depth, std::vector<std::vector<long>> sweep,
                         DigitString branch = {}) {
  if (depth < 1) throw std::invalid_argument("chain: depth must be positive");
  if (sweep.empty()) throw std::invalid_argument("chain: empty sweep");
  size_t arity = kind == ChainKind::A_PAIR ? 2 : 1;
  long minN = 0;
  for (auto& pt : sweep) {
    if (pt.size() != arity) throw std::invalid_argument("chain: sweep point has the wrong arity");
    if (pt[0] < 2 || (arity == 2 && pt[1] < 2))
      throw std::invalid_argument("chain: sweep parameters must be at least 2");
    if (minN == 0 || pt[0] < minN) minN = pt[0];
  }
  for (size_t i = 1; i < sweep.size(); ++i)
    if (!(sweep[i - 1] < sweep[i]))
      throw std::invalid_argument("chain: sweep must be strictly increasing");
  // the deepest level must still be nonempty: sorts exist to depth n, the
  // eqclass scheme needs a surviving class, the pair scheme needs D_{0,m}
  long maxDepth = kind == ChainKind::SA_TREE ? minN : kind == ChainKind::A_EQCLASS ? minN - 1 : minN - 2;
  if (depth > maxDepth) throw std::invalid_argument("chain: depth too large for the sweep");
  if (kind == ChainKind::A_PAIR)
    for (auto& pt : sweep)
      if (pt[0] != sweep[0][0])
        throw std::invalid_argument("chain: the pair sweep varies m with n fixed");
  Chain c;
  c.kind = kind;
  c.depth = depth;
  c.sweep = std::move(sweep);
  if (kind == ChainKind::SA_TREE) {
    if (branch.empty()) branch.assign(static_cast<size_t>(depth), 0);
    if (static_cast<int>(branch.size()) < depth)
      throw std::invalid_argument("chain: branch shorter than the depth");
    for (int d : branch)
      if (d < 0 || d >= minN) throw std::invalid_argument("chain: branch digit outside the alphabet");
    c.branch = std::move(branch);
  }
  return c;
}

struct ChainAdjacent {
  DeltaReport symbolic;
  DeltaReport empirical;
};

struct ChainReport {
  // counts[i][j]: exact count of level j on sweep point i
  std::vector<std::vector<mpz_class>> counts;
  // adjacent[j]: verdicts comparing level j+1 against level j
  std::vector<ChainAdjacent> adjacent;
  std::vector<std::string> problems;  // nesting/count-formula counterexamples
  bool pass = false;
};

inline ChainReport verify_chain(const Chain& c, long nmax = 8) {
  ChainReport rep;
  auto pointName = [&](size_t i) {
    std::string s = "(";
    for (size_t j = 0; j < c.sweep[i].size(); ++j)
      s += (j ? "," : "") + std::to_string(c.sweep[i][j]);
    return s + ")";
  };

  // exact model counts and extensional strict nesting
  for (size_t i = 0; i < c.sweep.size(); ++i) {
    Structure s = Structure::build(chainSweepSpec(c, c.sweep[i]));
    std::vector<mpz_class> levelCounts;
    std::vector<char> prev(s.size, 1);
    for (int j = 0; j <= c.depth; ++j) {
      FormulaPtr f = chainLevelFormula(c, j);
      Env env = chainLevelParams(c, j, s);
      env.emplace_back("x", 0);
      std::vector<char> cur(s.size, 0);
      uint64_t cnt = 0;
      for (Elem e = 0; e < s.size; ++e) {
        env.back().second = e;
        if (eval(s, f, env)) {
          cur[e] = 1;
          ++cnt;
        }
      }
      for (Elem e = 0; e < s.size; ++e)
        if (cur[e] && !prev[e]) {
          rep.problems.push_back("level " + std::to_string(j) + " is not nested in level " +
                                 std::to_string(j - 1) + " at " + pointName(i));
          break;
        }
      if (j > 0 && cnt >= levelCounts.back())
        rep.problems.push_back("level " + std::to_string(j) + " does not strictly shrink at " + pointName(i));
      mpz_class expect = chainExpectedCount(c, j, c.sweep[i]);
      if (expect != static_cast<unsigned long>(cnt))
        rep.problems.push_back("level " + std::to_string(j) + " count " + std::to_string(cnt) +
                               " differs from the closed form " + expect.get_str() + " at " + pointName(i));
      levelCounts.push_back(mpz_class(static_cast<unsigned long>(cnt)));
      prev = std::move(cur);
    }
    rep.counts.push_back(std::move(levelCounts));
  }

  // growth-order cards per level, evaluated from the stored model counts
  Family fam = c.kind == ChainKind::SA_TREE  ? Family::STRING
               : c.kind == ChainKind::A_PAIR ? Family::PAIR
                                             : Family::EQCLASS;
  auto card = [&](int j) {
    FamilyCard fc;
    fc.family = fam;
    fc.label = print(chainLevelFormula(c, j));
    std::map<std::vector<long>, mpz_class> table;
    for (size_t i = 0; i < c.sweep.size(); ++i) table[c.sweep[i]] = rep.counts[i][j];
    fc.evaluator = [table](const std::vector<long>& pt) {
      auto it = table.find(pt);
      if (it == table.end()) throw std::invalid_argument("chain card: sweep point was not verified");
      return it->second;
    };
    if (c.kind == ChainKind::A_PAIR) {
      long n = c.sweep[0][0];
      fc.gradeMajor = {1l << (n - j - 2)};
      fc.gradeMinor = {1};
    } else {
      fc.gradeMajor = {-j};
      fc.gradeMinor = {1};
    }
    return fc;
  };

  bool allSmaller = true;
  for (int j = 0; j < c.depth; ++j) {
    FamilyCard upper = card(j), lower = card(j + 1);
    ChainAdjacent adj;
    adj.symbolic = delta_compare_symbolic(lower, upper);
    adj.empirical = delta_compare_empirical(lower, upper, c.sweep, nmax);
    allSmaller = allSmaller && adj.symbolic.verdict == DeltaVerdict::FIRST_SMALLER &&
                 adj.empirical.verdict == DeltaVerdict::FIRST_SMALLER;
    rep.adjacent.push_back(std::move(adj));
  }
  rep.pass = allSmaller && rep.problems.empty();
  return rep;
}

// CSV rendering: one row per (sweep point, level); the verdict columns
// describe the transition from the previous level and are blank on level 0.
inline std::string chainReportCsv(const Chain& c, const ChainReport& rep) {
  std::ostringstream os;
  os << "kind,level,param,count,ratio_prev,symbolic,empirical\n";
  for (size_t i = 0; i < c.sweep.size(); ++i) {
    std::string pt = "(";
    for (size_t k = 0; k < c.sweep[i].size(); ++k)
      pt += (k ? ";" : "") + std::to_string(c.sweep[i][k]);
    pt += ")";
    for (int j = 0; j <= c.depth; ++j) {
      os << chainKindName(c.kind) << "," << j << "," << pt << "," << rep.counts[i][j].get_str() << ",";
      if (j > 0) {
        mpq_class ratio(rep.counts[i][j], rep.counts[i][j - 1]);
        ratio.canonicalize();
        os << ratio.get_str() << "," << verdictName(rep.adjacent[j - 1].symbolic.verdict) << ","
           << verdictName(rep.adjacent[j - 1].empirical.verdict);
      } else {
        os << ",,";
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace fmw
