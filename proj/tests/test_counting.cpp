#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fmw/counting.hpp"
#include "fmw/give_define.hpp"
#include "fmw/model.hpp"
#include "fmw/parser.hpp"

using namespace fmw;

namespace {

// Bind every sort anchor |U_sigma| to its exact size n^(n-|sigma|).
std::map<std::string, mpz_class> sortBindings(const Structure& s, const CardDefinition& def) {
  std::map<std::string, mpz_class> b;
  for (auto& [name, desc] : def.anchors) {
    REQUIRE(name.size() >= 4);
    REQUIRE(name.rfind("|U_", 0) == 0);
    // anchor names concatenate the sort's digits: |U_01| is the sort 0,1
    std::string digits = name.substr(3, name.size() - 4);
    mpz_class v = 1;
    for (long i = 0; i < static_cast<long>(s.spec.n) - static_cast<long>(digits.size()); ++i)
      v *= static_cast<long>(s.spec.n);
    b[name] = v;
  }
  return b;
}

// Exactly one guard fires per parameter assignment and its value matches the
// brute count of x-witnesses.
void checkDefinitionOn(const Structure& s, const FormulaPtr& f, const std::string& x,
                       const CardDefinition& def, const std::vector<std::string>& params) {
  auto bindings = sortBindings(s, def);
  std::vector<Elem> tuple(params.size(), 0);
  bool more = true;
  while (more) {
    Env env;
    for (size_t i = 0; i < params.size(); ++i) env.emplace_back(params[i], tuple[i]);
    long brute = 0;
    env.emplace_back(x, 0);
    for (Elem a = 0; a < s.size; ++a) {
      env.back().second = a;
      if (eval(s, f, env)) ++brute;
    }
    env.pop_back();
    int fired = 0;
    mpz_class val = 0;
    for (auto& c : def.cases)
      if (eval(s, c.guard, env)) {
        ++fired;
        val = c.value.evalAt(bindings);
      }
    REQUIRE(fired <= 1);
    if (fired == 1)
      REQUIRE(val == brute);
    else
      REQUIRE(brute == 0);
    more = false;
    size_t d = tuple.size();
    while (d > 0) {
      --d;
      if (++tuple[d] < s.size) {
        more = true;
        break;
      }
      tuple[d] = 0;
    }
  }
}

}  // namespace

TEST_CASE("cardinality expressions evaluate exactly") {
  CardExpr X = CardExpr::anchor("X");
  CHECK((X * X - X).evalAt({{"X", 4}}) == 12);
  CHECK(CardExpr::constant(1).evalAt({}) == 1);
  CHECK((CardExpr::anchor("X") * CardExpr::anchor("Y")).evalAt({{"X", 9}, {"Y", 3}}) == 27);
}

TEST_CASE("constant-fiber counting is the product rule") {
  CHECK(fiber_count(CardExpr::constant(3), CardExpr::constant(5)).evalAt({}) == 15);
  CardExpr X = CardExpr::anchor("X");
  CHECK(fiber_count(X, X).str() == "X^2");
  CardExpr e = CardExpr::anchor("e");
  CHECK(fiber_count(CardExpr::constant(1), e) == e);

  // brute force: relations with constant fiber size, counted by enumeration
  std::mt19937 rng(31337);
  for (int it = 0; it < 300; ++it) {
    long base = 1 + rng() % 12, fiber = 1 + rng() % 12;
    long brute = 0;
    for (long i = 0; i < base; ++i)
      for (long j = 0; j < fiber; ++j) ++brute;
    CHECK(fiber_count(CardExpr::constant(fiber), CardExpr::constant(base)).evalAt({}) == brute);
  }
}

TEST_CASE("union cardinality by inclusion-exclusion matches enumeration") {
  std::map<unsigned, CardExpr> two = {
      {1, CardExpr::constant(5)}, {2, CardExpr::constant(4)}, {3, CardExpr::constant(2)}};
  CHECK(boolean_card(two, 2).evalAt({}) == 7);

  std::map<unsigned, CardExpr> zero;
  for (unsigned m = 1; m < 8; ++m) zero[m] = CardExpr::constant(0);
  CHECK(boolean_card(zero, 3).isZero());

  CHECK_THROWS(boolean_card({{1, CardExpr::constant(1)}}, 2));  // missing mask 2,3

  std::mt19937 rng(9001);
  for (int it = 0; it < 300; ++it) {
    int n = 2 + static_cast<int>(rng() % 3);
    int universe = 30;
    std::vector<uint32_t> sets(n, 0);
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < universe; ++e)
        if (rng() % 2) sets[i] |= 1u << e;
    std::map<unsigned, CardExpr> cards;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      uint32_t inter = 0xFFFFFFFFu >> (32 - universe);
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) inter &= sets[i];
      cards[mask] = CardExpr::constant(__builtin_popcount(inter));
    }
    uint32_t uni = 0;
    for (auto s : sets) uni |= s;
    CHECK(boolean_card(cards, n).evalAt({}) == __builtin_popcount(uni));
  }
}

TEST_CASE("a single bijection link gives an existentially guarded singleton") {
  FormulaPtr f = parseFormula("(B \"0\" \"1\" x y)", Sig::TREE);
  CardDefinition def = give_and_define(f, "x");
  bool sawSingleton = false;
  for (auto& c : def.cases)
    if (c.value == CardExpr::constant(1)) {
      sawSingleton = true;
      CHECK(c.guard->kind == Formula::Kind::Exists);
    }
  CHECK(sawSingleton);
  Structure s = Structure::build(FamilySpec::parse("string:3"));
  checkDefinitionOn(s, f, "x", def, {"y"});
}

TEST_CASE("a bare sort constraint counts the whole sort unconditionally") {
  FormulaPtr f = parseFormula("(U \"0\" x)", Sig::TREE);
  CardDefinition def = give_and_define(f, "x");
  REQUIRE(def.cases.size() == 1);
  CHECK(def.cases[0].value == CardExpr::anchor("|U_0|"));
  CHECK(isTrue(def.cases[0].guard));
  CHECK(def.anchors.count("|U_0|") == 1);
}

TEST_CASE("excluding one linked partner splits on the parameter's sort") {
  FormulaPtr f = parseFormula("(and (U \"0\" x) (not (B \"0\" \"1\" x y)))", Sig::TREE);
  CardDefinition def = give_and_define(f, "x");
  Structure s = Structure::build(FamilySpec::parse("string:3"));
  checkDefinitionOn(s, f, "x", def, {"y"});
  // the two case values are |U_0| - 1 (partner removed) and |U_0| (no partner)
  auto bindings = sortBindings(s, def);
  std::set<std::string> values;
  for (auto& c : def.cases) values.insert(c.value.evalAt(bindings).get_str());
  CHECK(values == std::set<std::string>{"8", "9"});
}

TEST_CASE("definitions stay exact across a random formula sweep") {
  Structure s = Structure::build(FamilySpec::parse("string:3"));
  std::mt19937 rng(2025);
  auto rsort = [&](size_t lo, size_t hi) {
    DigitString d(lo + rng() % (hi - lo + 1));
    for (auto& v : d) v = static_cast<int>(rng() % 3);
    return d;
  };
  int done = 0;
  while (done < 60) {
    // boolean combination of depth <= 2 over U/B/equality atoms in x, y
    std::function<FormulaPtr(int)> gen = [&](int depth) -> FormulaPtr {
      if (depth == 0 || rng() % 3 == 0) {
        switch (rng() % 3) {
          case 0: return fatom(treeU(rsort(0, 2), rng() % 2 ? "x" : "y"));
          case 1: {
            size_t len = 1 + rng() % 2;
            return fatom(treeB(rsort(len, len), rsort(len, len), "x", "y"));
          }
          default: return fatom(varEq("x", "y"));
        }
      }
      switch (rng() % 3) {
        case 0: return fnot(gen(depth - 1));
        case 1: {
          FormulaPtr a = gen(depth - 1), b = gen(depth - 1);
          return fand({a, b});
        }
        default: {
          FormulaPtr a = gen(depth - 1), b = gen(depth - 1);
          return for_({a, b});
        }
      }
    };
    FormulaPtr f = gen(2);
    if (!freeVars(f).count("x")) continue;
    CardDefinition def;
    try {
      def = give_and_define(f, "x");
    } catch (const CapError&) {
      continue;  // oversized sign-pattern space; regenerate
    }
    checkDefinitionOn(s, f, "x", def, {"y"});
    ++done;
  }
}

TEST_CASE("give_and_define rejects quantified and foreign input") {
  CHECK_THROWS_AS(give_and_define(parseFormula("(exists y (B \"0\" \"1\" x y))", Sig::TREE), "x"),
                  std::invalid_argument);
  CHECK_THROWS_AS(give_and_define(parseFormula("(E x y)", Sig::PAIR), "x"), std::invalid_argument);
}

TEST_CASE("layered lifting multiplies per-point counts into outer cases") {
  // independent product: count(x1 in U_0) times per-point count |U_1|
  CardDefinition inner;
  inner.cases.push_back({CardExpr::anchor("|U_0|"), fand({})});
  inner.anchors["|U_0|"] = "size of the 0-sort";
  CardDefinition lifted = lift_tuple_cardinalities({{CardExpr::anchor("|U_1|"), inner}});
  REQUIRE(lifted.cases.size() == 1);
  CHECK(lifted.cases[0].value == CardExpr::anchor("|U_0|") * CardExpr::anchor("|U_1|"));
  CHECK(lifted.cases[0].value.evalAt({{"|U_0|", 9}, {"|U_1|", 9}}) == 81);

  // one partner per base point: B_{0,1} pairs number |U_1| = 9 on the 3-model
  CardDefinition base;
  base.cases.push_back({CardExpr::anchor("|U_1|"), fand({})});
  CardDefinition pairs = lift_tuple_cardinalities({{CardExpr::constant(1), base}});
  REQUIRE(pairs.cases.size() == 1);
  CHECK(pairs.cases[0].value.evalAt({{"|U_1|", 9}}) == 9);

  // unreachable inner cases are dropped
  CardDefinition gapped;
  gapped.cases.push_back({CardExpr::constant(2), fand({})});
  gapped.cases.push_back({CardExpr::constant(7), for_({})});  // guard never holds
  CardDefinition clean = lift_tuple_cardinalities({{CardExpr::constant(1), gapped}});
  CHECK(clean.cases.size() == 1);
  CHECK(clean.cases[0].value == CardExpr::constant(2));

  CHECK_THROWS(lift_tuple_cardinalities({{CardExpr::constant(1), CardDefinition{}}}));
}

TEST_CASE("equal case values merge into a single disjunctive guard") {
  CardDefinition def;
  FormulaPtr theta = fatom(treeU({0}, "y"));
  def.cases.push_back({CardExpr::constant(2), theta});
  def.cases.push_back({CardExpr::constant(2), fnot(theta)});
  def.cases.push_back({CardExpr::constant(0), fatom(treeU({1}, "y"))});
  mergeEqualValues(def);
  REQUIRE(def.cases.size() == 2);
  CHECK(def.cases[0].guard->kind == Formula::Kind::Or);
}

namespace {

FamilyCard stringSortCard(int depth) {
  FamilyCard c;
  c.family = Family::STRING;
  c.label = "depth-" + std::to_string(depth) + " sort";
  c.evaluator = [depth](const std::vector<long>& pt) {
    mpz_class v = 1;
    for (long i = 0; i < pt[0] - depth; ++i) v *= pt[0];
    return v;
  };
  c.gradeMajor = {-depth};
  return c;
}

FamilyCard pairLevelCard(long n, int k) {
  FamilyCard c;
  c.family = Family::PAIR;
  c.label = "level-" + std::to_string(k);
  c.evaluator = [n, k](const std::vector<long>& pt) {
    mpz_class total = 0;
    for (long i = 0; i <= n - k - 2; ++i) {
      mpz_class term;
      mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(pt[0]),
                    static_cast<unsigned long>(1L << i));
      total += term;
    }
    return total;
  };
  c.gradeMajor = {1L << (n - k - 2)};
  return c;
}

}  // namespace

TEST_CASE("growth comparison: equal-depth sorts are the same order") {
  std::vector<std::vector<long>> sweep = {{3}, {4}, {5}, {6}, {7}, {8}};
  FamilyCard u0 = stringSortCard(1), u1 = stringSortCard(1);
  CHECK(delta_compare_symbolic(u0, u1).verdict == DeltaVerdict::SAME_ORDER);
  CHECK(delta_compare_empirical(u0, u1, sweep).verdict == DeltaVerdict::SAME_ORDER);
}

TEST_CASE("growth comparison: deeper sorts are strictly smaller") {
  std::vector<std::vector<long>> sweep = {{3}, {4}, {5}, {6}, {7}, {8}};
  FamilyCard u00 = stringSortCard(2), u0 = stringSortCard(1);
  CHECK(delta_compare_symbolic(u00, u0).verdict == DeltaVerdict::FIRST_SMALLER);
  CHECK(delta_compare_empirical(u00, u0, sweep).verdict == DeltaVerdict::FIRST_SMALLER);
  CHECK(delta_compare_symbolic(u0, u00).verdict == DeltaVerdict::FIRST_LARGER);
  CHECK(delta_compare_empirical(u0, u00, sweep).verdict == DeltaVerdict::FIRST_LARGER);
}

TEST_CASE("growth comparison: pair levels drop doubly exponentially") {
  std::vector<std::vector<long>> sweep = {{3}, {4}, {5}, {6}, {7}, {8}};
  FamilyCard phi1 = pairLevelCard(4, 1), phi0 = pairLevelCard(4, 0);
  CHECK(delta_compare_symbolic(phi1, phi0).verdict == DeltaVerdict::FIRST_SMALLER);
  CHECK(delta_compare_empirical(phi1, phi0, sweep).verdict == DeltaVerdict::FIRST_SMALLER);
}

TEST_CASE("symbolic growth order is transitive along sort depth") {
  FamilyCard a = stringSortCard(3), b = stringSortCard(2), c = stringSortCard(1);
  CHECK(delta_compare_symbolic(a, b).verdict == DeltaVerdict::FIRST_SMALLER);
  CHECK(delta_compare_symbolic(b, c).verdict == DeltaVerdict::FIRST_SMALLER);
  CHECK(delta_compare_symbolic(a, c).verdict == DeltaVerdict::FIRST_SMALLER);
}

TEST_CASE("growth comparison degrades to UNKNOWN with a counterexample") {
  FamilyCard wild = stringSortCard(0), tame = stringSortCard(0);
  wild.evaluator = [](const std::vector<long>& pt) { return mpz_class(pt[0] % 2 ? 1 : 1000); };
  tame.evaluator = [](const std::vector<long>&) { return mpz_class(10); };
  std::vector<std::vector<long>> sweep = {{3}, {4}, {5}, {6}};
  DeltaReport r = delta_compare_empirical(wild, tame, sweep);
  CHECK(r.verdict == DeltaVerdict::UNKNOWN);
  CHECK(r.detail.find("extreme point") != std::string::npos);
}

TEST_CASE("growth comparison rejects mixed families and empty sweeps") {
  FamilyCard a = stringSortCard(0), b = pairLevelCard(4, 0);
  CHECK_THROWS(delta_compare_symbolic(a, b));
  CHECK_THROWS(delta_compare_empirical(a, a, {}));
}
