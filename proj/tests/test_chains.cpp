#include <catch2/catch_amalgamated.hpp>

#include <gmpxx.h>

#include <string>
#include <vector>

#include "fmw/chains.hpp"

using namespace fmw;

namespace {

bool hasLine(const std::string& text, const std::string& line) {
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    if (text.compare(pos, nl - pos, line) == 0) return true;
    pos = nl + 1;
  }
  return false;
}

}  // namespace

TEST_CASE("sort chains shrink by exactly one growth order per level") {
  Chain c = build_chain(ChainKind::SA_TREE, 3, {{3}, {4}, {5}});
  ChainReport rep = verify_chain(c);
  for (auto& p : rep.problems) UNSCOPED_INFO(p);
  REQUIRE(rep.pass);
  REQUIRE(rep.counts.size() == 3);
  for (size_t i = 0; i < c.sweep.size(); ++i) {
    long n = c.sweep[i][0];
    for (int j = 0; j <= 3; ++j) {
      mpz_class expect;
      mpz_ui_pow_ui(expect.get_mpz_t(), static_cast<unsigned long>(n),
                    static_cast<unsigned long>(n - j));
      CHECK(rep.counts[i][static_cast<size_t>(j)] == expect);
    }
    for (int j = 1; j <= 3; ++j) {
      mpq_class ratio(rep.counts[i][static_cast<size_t>(j)], rep.counts[i][static_cast<size_t>(j) - 1]);
      ratio.canonicalize();
      CHECK(ratio == mpq_class(1, n));
    }
  }
  REQUIRE(rep.adjacent.size() == 3);
  for (auto& adj : rep.adjacent) {
    CHECK(adj.symbolic.verdict == DeltaVerdict::FIRST_SMALLER);
    CHECK(adj.empirical.verdict == DeltaVerdict::FIRST_SMALLER);
  }
}

TEST_CASE("class-avoidance chains on the two-function models verify end to end") {
  Chain c = build_chain(ChainKind::A_PAIR, 2, {{4, 2}, {4, 3}, {4, 4}});
  ChainReport rep = verify_chain(c);
  for (auto& p : rep.problems) UNSCOPED_INFO(p);
  REQUIRE(rep.pass);
  CHECK(rep.counts[0] == std::vector<mpz_class>({22, 6, 2}));
  CHECK(rep.counts[1][0] == 93);
  CHECK(rep.counts[2][0] == 276);
  for (auto& adj : rep.adjacent) {
    CHECK(adj.symbolic.verdict == DeltaVerdict::FIRST_SMALLER);
    CHECK(adj.empirical.verdict == DeltaVerdict::FIRST_SMALLER);
  }
}

TEST_CASE("largest-class-avoidance chains verify on the geometric models") {
  Chain c = build_chain(ChainKind::A_EQCLASS, 2, {{4}, {5}, {6}});
  ChainReport rep = verify_chain(c);
  for (auto& p : rep.problems) UNSCOPED_INFO(p);
  REQUIRE(rep.pass);
  CHECK(rep.counts[0] == std::vector<mpz_class>({340, 84, 20}));
}

TEST_CASE("a custom branch steers the sort chain") {
  Chain c = build_chain(ChainKind::SA_TREE, 2, {{3}, {4}}, {1, 2});
  CHECK(print(chainLevelFormula(c, 2)) == "(U \"1,2\" x)");
  CHECK(print(chainLevelFormula(c, 1)) == "(U \"1\" x)");
  ChainReport rep = verify_chain(c);
  for (auto& p : rep.problems) UNSCOPED_INFO(p);
  CHECK(rep.pass);
}

TEST_CASE("chain construction rejects impossible shapes") {
  CHECK_THROWS_AS(build_chain(ChainKind::SA_TREE, 0, {{3}}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::SA_TREE, 4, {{3}}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::A_PAIR, 3, {{4, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::A_EQCLASS, 4, {{4}}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::SA_TREE, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::SA_TREE, 1, {{4}, {3}}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::A_PAIR, 1, {{3}}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::A_PAIR, 1, {{3, 2}, {4, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(ChainKind::SA_TREE, 1, {{3}}, {5}), std::invalid_argument);
}

TEST_CASE("reports render as a fixed-schema table") {
  Chain c = build_chain(ChainKind::SA_TREE, 3, {{3}, {4}, {5}});
  std::string csv = chainReportCsv(c, verify_chain(c));
  CHECK(csv.rfind("kind,level,param,count,ratio_prev,symbolic,empirical\n", 0) == 0);
  CHECK(hasLine(csv, "sa_tree,1,(3),9,1/3,FIRST_SMALLER,FIRST_SMALLER"));
  CHECK(hasLine(csv, "sa_tree,0,(3),27,,,"));

  Chain p = build_chain(ChainKind::A_PAIR, 2, {{4, 2}, {4, 3}, {4, 4}});
  std::string pcsv = chainReportCsv(p, verify_chain(p));
  CHECK(hasLine(pcsv, "a_pair,0,(4;3),93,,,"));
  CHECK(hasLine(pcsv, "a_pair,1,(4;2),6,3/11,FIRST_SMALLER,FIRST_SMALLER"));
}
