#include <catch2/catch_amalgamated.hpp>

#include "fmw/model.hpp"
#include "fmw/parser.hpp"

using namespace fmw;

namespace {

long countWhere(const Structure& s, const FormulaPtr& f, const std::string& v) {
  long n = 0;
  for (Elem a = 0; a < s.size; ++a)
    if (eval(s, f, {{v, a}})) ++n;
  return n;
}

}  // namespace

TEST_CASE("family specs parse and reject malformed input") {
  CHECK(FamilySpec::parse("string:4").n == 4);
  CHECK(FamilySpec::parse("pair:3,2").m == 2);
  CHECK(FamilySpec::parse("eqclass:5").n == 5);
  CHECK(FamilySpec::parse("interval:7").len == 7);
  CHECK_THROWS(FamilySpec::parse("string:0"));
  CHECK_THROWS(FamilySpec::parse("pair:1,2"));
  CHECK_THROWS(FamilySpec::parse("nonsense:3"));
  CHECK_THROWS(FamilySpec::parse("pair:3"));
  CHECK(FamilySpec::parse("pair:4,3").str() == "pair:4,3");
}

TEST_CASE("string models have n^n elements and n^(n-len) per sort") {
  const long expected[] = {0, 0, 4, 27, 256, 3125};
  for (long n = 2; n <= 5; ++n) {
    Structure s = Structure::build(FamilySpec::parse("string:" + std::to_string(n)));
    CHECK(static_cast<long>(s.size) == expected[n]);
  }
  Structure s3 = Structure::build(FamilySpec::parse("string:3"));
  CHECK(countWhere(s3, parseFormula("(U \"0\" x)", Sig::TREE), "x") == 9);
  CHECK(countWhere(s3, parseFormula("(U \"2,1\" x)", Sig::TREE), "x") == 3);
  CHECK(countWhere(s3, parseFormula("(U \"\" x)", Sig::TREE), "x") == 27);
  // out-of-range digits give empty sorts, not errors
  CHECK(countWhere(s3, parseFormula("(U \"7\" x)", Sig::TREE), "x") == 0);
}

TEST_CASE("string bijections relate prefix-sorts and preserve suffixes") {
  Structure s = Structure::build(FamilySpec::parse("string:3"));
  // B_{0,1} maps the 0-sort onto the 1-sort changing only the sorted prefix
  FormulaPtr b = parseFormula("(B \"0\" \"1\" x y)", Sig::TREE);
  long pairs = 0;
  for (Elem x = 0; x < s.size; ++x)
    for (Elem y = 0; y < s.size; ++y)
      if (eval(s, b, {{"x", x}, {"y", y}})) {
        ++pairs;
        CHECK(s.inU(DigitString{0}, x));
        CHECK(s.inU(DigitString{1}, y));
        CHECK(x % 9 == y % 9);  // big-endian codes: equal suffixes mod n^(n-1)
      }
  CHECK(pairs == 9);  // a bijection between two 9-element sorts
  // mismatched sort lengths never hold (the parser refuses to even build them)
  CHECK_THROWS(parseFormula("(B \"0\" \"1,2\" x y)", Sig::TREE));
  FormulaPtr bad = fatom(treeB({0}, {1, 2}, "x", "y"));
  for (Elem x = 0; x < s.size; ++x)
    for (Elem y = 0; y < s.size; ++y)
      CHECK_FALSE(eval(s, bad, {{"x", x}, {"y", y}}));
}

TEST_CASE("pair models realize the doubly-exponential class ladder") {
  struct Row {
    const char* spec;
    long size;
    std::vector<uint64_t> classes;
  };
  for (auto& r : std::vector<Row>{
           {"pair:3,2", 22, {16, 4, 2}},
           {"pair:3,3", 93, {81, 9, 3}},
           {"pair:4,2", 278, {256, 16, 4, 2}},
           {"pair:4,3", 6654, {6561, 81, 9, 3}},
       }) {
    Structure s = Structure::build(FamilySpec::parse(r.spec));
    CHECK(static_cast<long>(s.size) == r.size);
    CHECK(s.classSize == r.classes);
  }
}

TEST_CASE("pair maps step one class down and fix exactly the final class") {
  Structure s = Structure::build(FamilySpec::parse("pair:3,2"));
  for (Elem a = 0; a < s.size; ++a) {
    uint32_t c = s.classOf(a);
    Elem fa = s.applyFg("f", a), ga = s.applyFg("g", a);
    if (c + 1 < s.numClasses()) {
      CHECK(s.classOf(fa) == c + 1);
      CHECK(s.classOf(ga) == c + 1);
    } else {
      CHECK(fa == a);
      CHECK(ga == a);
    }
  }
  // below the final class, a |-> (f(a), g(a)) is injective
  std::set<std::pair<Elem, Elem>> images;
  for (Elem a = 0; a < s.size; ++a) {
    if (s.classOf(a) + 1 >= s.numClasses()) continue;
    CHECK(images.insert({s.applyFg("f", a), s.applyFg("g", a)}).second);
  }
  // fg-words compose left to right innermost-first
  Elem a = 0;
  CHECK(s.applyFg("gf", a) == s.applyFg("g", s.applyFg("f", a)));
}

TEST_CASE("equivalence-class models grow geometrically") {
  Structure s = Structure::build(FamilySpec::parse("eqclass:4"));
  CHECK(s.size == 340);  // 4 + 16 + 64 + 256
  CHECK(s.classSize == std::vector<uint64_t>{4, 16, 64, 256});
  FormulaPtr f = parseFormula("(not (E x c))", Sig::EQ);
  long n = 0;
  Elem rep = s.classOffset[s.numClasses() - 1];  // a representative of the largest class
  for (Elem x = 0; x < s.size; ++x)
    if (eval(s, f, {{"x", x}, {"c", rep}})) ++n;
  CHECK(n == 84);  // 4 + 16 + 64
}

TEST_CASE("interval models implement the capped successor") {
  Structure s = Structure::build(FamilySpec::parse("interval:5"));
  CHECK(s.size == 6);
  CHECK(eval(s, parseFormula("(= (S 1 cinit) u)", Sig::STAR), {{"u", 1}}));
  CHECK(eval(s, parseFormula("(= (S 3 u) cfin)", Sig::STAR), {{"u", 4}}));  // capped at the top
  CHECK(eval(s, parseFormula("(= (S 2 cfin) cfin)", Sig::STAR), {}));
  CHECK_FALSE(eval(s, parseFormula("(= cinit cfin)", Sig::STAR), {}));
}

TEST_CASE("axiom audits pass exhaustively at small sizes and sampled above") {
  for (long n : {2, 3}) {
    Structure s = Structure::build(FamilySpec::parse("string:" + std::to_string(n)));
    CHECK(auditTree(s, true).empty());
  }
  for (long n : {4, 5}) {
    Structure s = Structure::build(FamilySpec::parse("string:" + std::to_string(n)));
    CHECK(auditTree(s, false, 7, 50).empty());
  }
  for (const char* spec : {"pair:3,2", "pair:3,3", "pair:4,2"}) {
    Structure s = Structure::build(FamilySpec::parse(spec));
    CHECK(auditPair(s).empty());
  }
}
