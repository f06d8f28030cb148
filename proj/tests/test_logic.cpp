#include <catch2/catch_amalgamated.hpp>

#include "fmw/card_expr.hpp"
#include "fmw/formula.hpp"
#include "fmw/model.hpp"
#include "fmw/normal_form.hpp"
#include "fmw/parser.hpp"
#include "fmw/strings.hpp"

using namespace fmw;

namespace {

// Semantic equivalence on every assignment over a small concrete model.
bool equivalentOn(const Structure& s, const FormulaPtr& a, const FormulaPtr& b) {
  std::set<std::string> fv = freeVars(a);
  for (auto& v : freeVars(b)) fv.insert(v);
  std::vector<std::string> vars(fv.begin(), fv.end());
  std::vector<Elem> tuple(vars.size(), 0);
  bool more = true;
  while (more) {
    Env env;
    for (size_t i = 0; i < vars.size(); ++i) env.emplace_back(vars[i], tuple[i]);
    if (eval(s, a, env) != eval(s, b, env)) return false;
    more = false;
    size_t d = vars.size();
    while (d > 0) {
      --d;
      if (++tuple[d] < s.size) {
        more = true;
        break;
      }
      tuple[d] = 0;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("digit strings render comma-separated and tokens may span characters") {
  DigitString s{0, 1, 2};
  CHECK(digitsToText(s) == "0,1,2");
  CHECK(digitsFromText("0,1,2") == s);
  CHECK(digitsFromText("12") == DigitString{12});   // one two-character token
  CHECK(digitsFromText("012") == DigitString{12});  // leading zeros collapse
  CHECK(digitsFromText("") == DigitString{});
  CHECK_FALSE(digitsFromText("0,x").has_value());
  CHECK_FALSE(digitsFromText("0,,1").has_value());
  CHECK(isPrefixOf({0, 1}, {0, 1, 2}));
  CHECK_FALSE(isPrefixOf({1}, {0, 1}));
  CHECK(tailAfter({0}, {0, 1, 2}) == DigitString{1, 2});
  CHECK(concat({0}, {1}) == DigitString{0, 1});
}

TEST_CASE("fg words validate and enumerate") {
  CHECK(validFgString("fgf"));
  CHECK_FALSE(validFgString("fxg"));
  CHECK(allFgWords(2).size() == 4);
  CHECK(finalSegment("fgf", 2) == "gf");
}

TEST_CASE("formulas print to s-expressions and parse back") {
  for (auto& [text, sig] : std::vector<std::pair<std::string, Sig>>{
           {"(and (U \"0,1\" x) (not (B \"0\" \"1\" x y)))", Sig::TREE},
           {"(exists x (or (= x y) (not (E (app \"fg\" x) y))))", Sig::PAIR},
           {"(forall q (= (S 2 q) cfin))", Sig::STAR},
           {"(and (E x c1) (not (= x y)))", Sig::EQ},
       }) {
    FormulaPtr f = parseFormula(text, sig);
    FormulaPtr g = parseFormula(print(f), sig);
    CHECK(equal(f, g));
  }
}

TEST_CASE("digit tokens normalize and the empty junctions are the constants") {
  FormulaPtr a = parseFormula("(U \"01\" x)", Sig::TREE);
  FormulaPtr b = parseFormula("(U \"1\" x)", Sig::TREE);
  CHECK(equal(a, b));
  CHECK(print(ftrue()) == "(and)");
  CHECK(print(ffalse()) == "(or)");
  CHECK(isTrue(parseFormula("(and)", Sig::TREE)));
  CHECK(isFalse(parseFormula("(or)", Sig::TREE)));
}

TEST_CASE("parser rejects malformed input and foreign-signature atoms") {
  CHECK_THROWS(parseFormula("(and (U \"0\" x)", Sig::TREE));        // unbalanced
  CHECK_THROWS(parseFormula("(E x y)", Sig::TREE));                 // wrong signature
  CHECK_THROWS(parseFormula("(U \"0\" x)", Sig::PAIR));             // wrong signature
  CHECK_THROWS(parseFormula("(= (S x q) cfin)", Sig::STAR));        // power must be a number
}

TEST_CASE("free variables respect quantifier binding") {
  FormulaPtr f = parseFormula("(exists x (and (= x y) (not (= z x))))", Sig::PAIR);
  std::set<std::string> fv = freeVars(f);
  CHECK(fv == std::set<std::string>{"y", "z"});
}

TEST_CASE("negation normal form and disjunctive normal form are equivalences") {
  Structure s = Structure::build(FamilySpec::parse("string:2"));
  for (auto& text : {
           "(not (and (U \"0\" x) (not (U \"1\" y))))",
           "(not (or (B \"0\" \"1\" x y) (and (U \"\" x) (U \"0\" y))))",
           "(and (or (U \"0\" x) (U \"1\" x)) (not (B \"1\" \"1\" x y)))",
       }) {
    FormulaPtr f = parseFormula(text, Sig::TREE);
    CHECK(equivalentOn(s, f, nnf(f)));
    std::vector<FormulaPtr> parts;
    for (auto& cube : dnf(f)) parts.push_back(conjunctionFormula(cube));
    CHECK(equivalentOn(s, f, for_(parts)));
  }
}

TEST_CASE("negation normal form pushes through quantifiers") {
  FormulaPtr f = parseFormula("(not (exists x (U \"0\" x)))", Sig::TREE);
  FormulaPtr n = nnf(f);
  CHECK(n->kind == Formula::Kind::Forall);
  CHECK(n->kids[0]->kind == Formula::Kind::Not);
}

TEST_CASE("disjunct budgets abort oversized normal forms") {
  // (a1 or b1) and ... and (a12 or b12) needs 4096 disjuncts
  std::vector<FormulaPtr> parts;
  for (int i = 0; i < 12; ++i) {
    DigitString d{i % 2};
    parts.push_back(for_({fatom(treeU(d, "v" + std::to_string(i))),
                          fatom(treeU(d, "w" + std::to_string(i)))}));
  }
  CHECK_THROWS_AS(dnf(fand(parts), 1000), CapError);
  CHECK(dnf(fand(parts), 5000).size() == 4096);
}

TEST_CASE("inconsistent cubes are pruned from normal forms") {
  FormulaPtr f = parseFormula("(and (U \"0\" x) (not (U \"0\" x)))", Sig::TREE);
  CHECK(dnf(f).empty());
}

TEST_CASE("cardinality expressions form a commutative ring with named anchors") {
  CardExpr x = CardExpr::anchor("X");
  CardExpr one = CardExpr::constant(1);
  CardExpr p = (x + one) * (x - one);
  CHECK(p.str() == "X^2 - 1");
  CHECK(p.evalAt({{"X", 7}}) == 48);
  CHECK((x * x - x).totalDegree() == 2);
  CHECK(p.coeffList("X") == std::vector<mpz_class>{-1, 0, 1});
  CHECK((x + x) == CardExpr::constant(2) * x);
  CHECK((x - x).isZero());
  CHECK(CardExpr::anchor("A").anchorNames() == std::vector<std::string>{"A"});
  CHECK_THROWS(p.evalAt({}));  // unbound anchor
  CardExpr two = CardExpr::anchor("X") * CardExpr::anchor("Y");
  CHECK_THROWS(two.coeffList("X"));  // not univariate
}

TEST_CASE("equality of formulas is syntactic") {
  FormulaPtr a = parseFormula("(and (U \"0\" x) (U \"1\" y))", Sig::TREE);
  FormulaPtr b = parseFormula("(and (U \"1\" y) (U \"0\" x))", Sig::TREE);
  CHECK_FALSE(equal(a, b));
  CHECK(equal(a, a));
}
