#pragma once

// Command-line front end: batch experiment runner binding the model builder,
// counters, eliminators, chain verifier and corpora behind subcommands with
// machine-readable CSV/JSON output.
//
// Exit status: 0 success, 1 verification failure, 2 usage/budget error.
// A JSON file passed with --config supplies default flag values for the
// invoked subcommand (explicit flags win; unknown keys are rejected).

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fmw/chains.hpp"
#include "fmw/corpus.hpp"
#include "fmw/formula.hpp"
#include "fmw/model.hpp"
#include "fmw/parser.hpp"
#include "fmw/qe.hpp"
#include "fmw/qe_pair.hpp"
#include "fmw/qe_star.hpp"

namespace fmw::cli {

constexpr uint32_t kDefaultSeed = 1729;

namespace detail {

inline Sig sigForFamily(FamilySpec::Kind k) {
  switch (k) {
    case FamilySpec::Kind::STRING: return Sig::TREE;
    case FamilySpec::Kind::PAIR: return Sig::PAIR;
    case FamilySpec::Kind::EQCLASS: return Sig::EQ;
    default: return Sig::STAR;
  }
}

inline bool collectLiterals(const FormulaPtr& f, std::vector<Literal>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      out.push_back(lit(f->atom));
      return true;
    case Formula::Kind::Not:
      if (f->kids[0]->kind != Formula::Kind::Atom) return false;
      out.push_back(lit(f->kids[0]->atom, true));
      return true;
    case Formula::Kind::And:
      for (auto& kid : f->kids)
        if (!collectLiterals(kid, out)) return false;
      return true;
    default:
      return false;
  }
}

inline std::vector<std::string> splitOn(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Number of free-variable assignments, or nullopt when it exceeds the cap.
inline std::optional<uint64_t> assignmentSpace(uint64_t size, size_t vars, uint64_t cap = 20000000) {
  uint64_t total = 1;
  for (size_t i = 0; i < vars; ++i) {
    if (total > cap / (size == 0 ? 1 : size)) return std::nullopt;
    total *= size;
  }
  return total;
}

struct CheckResult {
  long assignments = 0;
  std::optional<std::string> mismatch;  // description of the first disagreement
};

// Extensional comparison of two formulas over all assignments to their
// combined free variables.
inline CheckResult compareFormulas(const Structure& s, const FormulaPtr& a, const FormulaPtr& b) {
  std::set<std::string> fv = freeVars(a);
  for (auto& v : freeVars(b)) fv.insert(v);
  std::vector<std::string> vars(fv.begin(), fv.end());
  CheckResult r;
  Env env;
  for (auto& v : vars) env.emplace_back(v, 0);
  std::vector<Elem> tuple(vars.size(), 0);
  do {
    for (size_t i = 0; i < vars.size(); ++i) env[i].second = tuple[i];
    ++r.assignments;
    if (eval(s, a, env) != eval(s, b, env)) {
      std::string at;
      for (size_t i = 0; i < vars.size(); ++i)
        at += (i ? ", " : "") + vars[i] + "=" + std::to_string(tuple[i]);
      r.mismatch = "(" + at + ")";
      return r;
    }
  } while (fmw::detail::nextTuple(tuple, s.size));
  return r;
}

// Model-level adequacy gate for pair-theory elimination results.
inline bool pairModelAdequate(const Structure& s, const PairElimStats& st) {
  uint64_t minClass = s.classSize[0];
  for (auto c : s.classSize) minClass = std::min(minClass, c);
  return static_cast<long>(minClass) > st.cauchyBound &&
         static_cast<long>(s.classSize.back()) > st.exclusions && s.numClasses() - 1 >= st.starLen;
}

inline int usageError(std::ostream& err, const std::string& msg) {
  err << "error: " << msg << "\n";
  return 2;
}

}  // namespace detail

struct Args {
  // build
  std::string model;
  bool audit = false;
  int samples = 200;
  uint32_t seed = kDefaultSeed;
  // count / qe / polycard / star
  std::string formula;
  std::string theory;
  std::vector<std::string> models;
  bool check = true;
  bool verbose = false;
  long budget = 1000000;
  std::string var = "x";
  std::string outPath;
  // chain
  std::string kind;
  int depth = 0;
  std::string sweep;
  std::string branch;
  long nmax = 8;
  // star / corpus
  long maxlen = 12;
  long count = 0;
};

inline int runBuild(const Args& a, std::ostream& out, std::ostream& err) {
  Structure s = Structure::build(FamilySpec::parse(a.model));
  out << "model " << a.model << ": size=" << s.size;
  if (s.spec.kind == FamilySpec::Kind::PAIR || s.spec.kind == FamilySpec::Kind::EQCLASS) {
    out << " classes=";
    for (size_t c = 0; c < s.classSize.size(); ++c) out << (c ? "," : "") << s.classSize[c];
  }
  out << "\n";
  if (!a.audit) return 0;

  std::vector<std::string> failures;
  bool exhaustive = true;
  if (s.spec.kind == FamilySpec::Kind::STRING) {
    exhaustive = s.spec.n <= 3;
    failures = auditTree(s, exhaustive, a.seed, a.samples);
  } else if (s.spec.kind == FamilySpec::Kind::PAIR) {
    failures = auditPair(s);
  } else {
    return detail::usageError(err, "no axiom audit is defined for this family");
  }
  if (failures.empty()) {
    out << "audit: ok (" << (exhaustive ? "exhaustive" : "sampled") << ")\n";
    return 0;
  }
  for (auto& f : failures) out << "audit FAIL: " << f << "\n";
  return 1;
}

inline int runCount(const Args& a, std::ostream& out, std::ostream& err) {
  Structure s = Structure::build(FamilySpec::parse(a.model));
  FormulaPtr f = parseFormula(a.formula, detail::sigForFamily(s.spec.kind));
  std::set<std::string> fv = freeVars(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  if (!detail::assignmentSpace(s.size, vars.size()))
    return detail::usageError(err, "parameter space too large to enumerate");
  Env env;
  for (auto& v : vars) env.emplace_back(v, 0);
  std::vector<Elem> tuple(vars.size(), 0);
  unsigned long long count = 0;
  do {
    for (size_t i = 0; i < vars.size(); ++i) env[i].second = tuple[i];
    if (eval(s, f, env)) ++count;
  } while (fmw::detail::nextTuple(tuple, s.size));
  out << count << "\n";
  return 0;
}

inline int runQe(const Args& a, std::ostream& out, std::ostream& err) {
  FormulaPtr f;
  FormulaPtr result;
  PairElimStats pstats;
  long adequate = 0;
  if (a.theory == "tree") {
    f = parseFormula(a.formula, Sig::TREE);
    result = qe_tree(f, static_cast<size_t>(a.budget));
    if (a.verbose) {
      FormulaPtr minimal = eliminateQuantifiers(f, treeEliminator(false), static_cast<size_t>(a.budget));
      out << "conditions: " << print(minimal) << "\n";
    }
  } else if (a.theory == "pair") {
    f = parseFormula(a.formula, Sig::PAIR);
    PairQeResult r = qe_pair(f, static_cast<size_t>(a.budget));
    result = r.formula;
    pstats = r.stats;
  } else if (a.theory == "star") {
    f = parseFormula(a.formula, Sig::STAR);
    StarQeResult r = qe_star(f, static_cast<size_t>(a.budget));
    result = r.formula;
    adequate = r.adequateLen;
  } else {
    return detail::usageError(err, "--theory must be tree, pair or star");
  }
  out << "result: " << print(result) << "\n";
  if (a.theory == "pair")
    out << "adequacy: anchor class > " << pstats.cauchyBound << ", spare witnesses > " << pstats.exclusions
        << ", classes >= " << (pstats.starLen + 1) << "\n";
  if (a.theory == "star") out << "adequate_len: " << adequate << "\n";
  if (!a.check) return 0;

  std::vector<std::string> specs = a.models;
  if (specs.empty()) {
    if (a.theory == "tree") specs = {"string:3", "string:4"};
    if (a.theory == "pair") specs = {"pair:3,2", "pair:3,3"};
    if (a.theory == "star")
      for (long len = adequate; len <= 12; ++len) specs.push_back("interval:" + std::to_string(len));
  }
  bool failed = false;
  for (auto& spec : specs) {
    Structure s = Structure::build(FamilySpec::parse(spec));
    if (a.theory == "pair" && !detail::pairModelAdequate(s, pstats)) {
      out << "check " << spec << ": skipped (adequacy bounds not met)\n";
      continue;
    }
    std::set<std::string> fv = freeVars(f);
    if (!detail::assignmentSpace(s.size, fv.size())) {
      out << "check " << spec << ": skipped (parameter space too large)\n";
      continue;
    }
    detail::CheckResult r = detail::compareFormulas(s, f, result);
    if (r.mismatch) {
      out << "check " << spec << ": MISMATCH at " << *r.mismatch << "\n";
      failed = true;
    } else {
      out << "check " << spec << ": " << r.assignments << " assignments agree\n";
    }
  }
  return failed ? 1 : 0;
}

inline int runPolycard(const Args& a, std::ostream& out, std::ostream& err) {
  FormulaPtr f = parseFormula(a.formula, Sig::PAIR);
  std::vector<Literal> lits;
  if (!detail::collectLiterals(f, lits))
    return detail::usageError(err, "--formula must be a conjunction of literals");
  for (auto& l : lits) {
    std::set<std::string> vs;
    atomVars(l.atom, vs);
    if (!vs.count(a.var))
      return detail::usageError(err, "every literal must mention the counted variable " + a.var);
  }
  PolyCardDef def;
  try {
    def = polycard_literals(lits, a.var);
  } catch (const std::invalid_argument& e) {
    return detail::usageError(err, e.what());
  }

  nlohmann::json j;
  j["schema"] = 1;
  j["anchor"] = printFgTerm(def.anchorFg, def.anchorVar);
  j["cauchy_bound"] = def.cauchyBound;
  j["cases"] = nlohmann::json::array();
  for (auto& c : def.cases) {
    nlohmann::json jc;
    jc["guard"] = print(c.guard);
    jc["poly"] = nlohmann::json::array();
    for (auto& coeff : c.value.coeffList("X")) {
      if (coeff.fits_slong_p())
        jc["poly"].push_back(static_cast<long>(coeff.get_si()));
      else
        jc["poly"].push_back(coeff.get_str());
    }
    j["cases"].push_back(jc);
  }
  if (!a.outPath.empty()) {
    std::ofstream file(a.outPath);
    if (!file) return detail::usageError(err, "cannot open output path " + a.outPath);
    file << j.dump(2) << "\n";
  } else {
    out << j.dump(2) << "\n";
  }
  if (!a.check) return 0;

  std::vector<std::string> specs = a.models.empty() ? std::vector<std::string>{"pair:3,2", "pair:3,3"} : a.models;
  auto params = fmw::detail::usedParams(lits, a.var);
  bool failed = false;
  for (auto& spec : specs) {
    Structure s = Structure::build(FamilySpec::parse(spec));
    long checked = 0;
    std::optional<std::string> bad = polycard_mismatch(s, lits, def, a.var, params, &checked);
    if (bad) {
      out << "check " << spec << ": MISMATCH (" << *bad << ")\n";
      failed = true;
    } else {
      out << "check " << spec << ": " << checked << " parameter tuples agree\n";
    }
  }
  return failed ? 1 : 0;
}

inline int runChain(const Args& a, std::ostream& out, std::ostream& err) {
  ChainKind kind;
  if (a.kind == "sa_tree")
    kind = ChainKind::SA_TREE;
  else if (a.kind == "a_pair")
    kind = ChainKind::A_PAIR;
  else if (a.kind == "a_eqclass")
    kind = ChainKind::A_EQCLASS;
  else
    return detail::usageError(err, "--kind must be sa_tree, a_pair or a_eqclass");

  std::vector<std::vector<long>> sweep;
  for (auto& entry : detail::splitOn(a.sweep, ',')) {
    std::vector<long> point;
    for (auto& part : detail::splitOn(entry, ':')) point.push_back(std::stol(part));
    sweep.push_back(point);
  }
  DigitString branch;
  if (!a.branch.empty()) {
    std::optional<DigitString> parsed = digitsFromText(a.branch);
    if (!parsed) return detail::usageError(err, "cannot parse --branch digits");
    branch = *parsed;
  }

  Chain c = build_chain(kind, a.depth, sweep, branch);
  ChainReport rep = verify_chain(c, a.nmax);
  for (int j = 1; j <= a.depth; ++j)
    out << "level " << j << " vs " << j - 1 << ": symbolic=" << verdictName(rep.adjacent[j - 1].symbolic.verdict)
        << " empirical=" << verdictName(rep.adjacent[j - 1].empirical.verdict) << "\n";
  for (auto& p : rep.problems) out << "problem: " << p << "\n";
  out << (rep.pass ? "PASS" : "FAIL") << "\n";
  if (!a.outPath.empty()) {
    std::ofstream file(a.outPath);
    if (!file) return detail::usageError(err, "cannot open output path " + a.outPath);
    file << chainReportCsv(c, rep);
  }
  return rep.pass ? 0 : 1;
}

inline int runStar(const Args& a, std::ostream& out, std::ostream&) {
  FormulaPtr f = parseFormula(a.formula, Sig::STAR);
  StarQeResult r = qe_star(f, static_cast<size_t>(a.budget));
  out << "result: " << print(r.formula) << "\n";
  out << "adequate_len: " << r.adequateLen << "\n";
  if (!a.check) return 0;
  if (r.adequateLen > a.maxlen) {
    out << "check: skipped (adequacy bound exceeds --maxlen)\n";
    return 0;
  }
  bool failed = false;
  for (long len = r.adequateLen; len <= a.maxlen; ++len) {
    std::string spec = "interval:" + std::to_string(len);
    Structure s = Structure::build(FamilySpec::parse(spec));
    detail::CheckResult res = detail::compareFormulas(s, f, r.formula);
    if (res.mismatch) {
      out << "check " << spec << ": MISMATCH at " << *res.mismatch << "\n";
      failed = true;
    } else {
      out << "check " << spec << ": " << res.assignments << " assignments agree\n";
    }
  }
  return failed ? 1 : 0;
}

inline int runCorpus(const Args& a, std::ostream& out, std::ostream& err) {
  std::optional<CorpusKind> kind = corpusKindFromName(a.kind);
  if (!kind) return detail::usageError(err, "--kind must be tree, pair, polycard or star");
  long count = a.count;
  if (count <= 0) count = (*kind == CorpusKind::TREE || *kind == CorpusKind::PAIR) ? 200 : 100;

  std::vector<std::string> rows;
  CorpusOutcome o = run_corpus(*kind, count, a.seed, a.outPath.empty() ? nullptr : &rows);
  out << "items=" << o.items << " checked=" << o.checked << " gated=" << o.gated << " failures=" << o.failures
      << "\n";
  for (auto& n : o.notes) out << "note: " << n << "\n";
  out << (o.pass() ? "PASS" : "FAIL") << "\n";
  if (!a.outPath.empty()) {
    std::ofstream file(a.outPath);
    if (!file) return detail::usageError(err, "cannot open output path " + a.outPath);
    file << "kind,index,result,formula\n";
    for (auto& r : rows) file << r << "\n";
  }
  return o.pass() ? 0 : 1;
}

// Build the CLI11 command tree over an Args record.
inline void setupApp(CLI::App& app, Args& a) {
  app.require_subcommand(1);
  auto last = [](CLI::Option* o) { o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };

  CLI::App* build = app.add_subcommand("build", "construct a model and optionally audit its axioms");
  last(build->add_option("--model", a.model, "family spec, e.g. pair:3,2")->required());
  build->add_flag("--audit", a.audit, "run the axiom audit");
  last(build->add_option("--samples", a.samples, "random instances per sampled audit law"));
  last(build->add_option("--seed", a.seed, "sampling seed"));

  CLI::App* count = app.add_subcommand("count", "count satisfying assignments of a formula");
  last(count->add_option("--model", a.model, "family spec")->required());
  last(count->add_option("--formula", a.formula, "s-expression formula")->required());

  CLI::App* qe = app.add_subcommand("qe", "eliminate quantifiers and cross-check extensionally");
  last(qe->add_option("--theory", a.theory, "tree, pair or star")->required());
  last(qe->add_option("--formula", a.formula, "s-expression formula")->required());
  qe->add_option("--model", a.models, "models to check on (repeatable)");
  qe->add_flag("--check,!--no-check", a.check, "verify against enumeration (default on)");
  qe->add_flag("--verbose", a.verbose, "also print the pre-completion condition families (tree)");
  last(qe->add_option("--budget", a.budget, "disjunct budget for normal forms"));

  CLI::App* polycard = app.add_subcommand("polycard", "guarded polynomial cardinality of a link conjunction");
  last(polycard->add_option("--formula", a.formula, "conjunction of literals, each mentioning the counted variable")
           ->required());
  last(polycard->add_option("--var", a.var, "counted variable (default x)"));
  polycard->add_option("--model", a.models, "models to check on (repeatable)");
  last(polycard->add_option("--out", a.outPath, "write the JSON report here"));
  polycard->add_flag("--check,!--no-check", a.check, "verify against enumeration (default on)");

  CLI::App* chain = app.add_subcommand("chain", "verify a strictly descending definable chain");
  last(chain->add_option("--kind", a.kind, "sa_tree, a_pair or a_eqclass")->required());
  last(chain->add_option("--depth", a.depth, "number of strict steps")->required());
  last(chain->add_option("--sweep", a.sweep, "comma-separated points; pair points as n:m")->required());
  last(chain->add_option("--branch", a.branch, "descending branch digits (sa_tree)"));
  last(chain->add_option("--nmax", a.nmax, "ratio multiplier bound for empirical verdicts"));
  last(chain->add_option("--out", a.outPath, "write the CSV report here"));

  CLI::App* star = app.add_subcommand("star", "eliminate capped-successor quantifiers with adequacy bound");
  last(star->add_option("--formula", a.formula, "s-expression formula")->required());
  last(star->add_option("--maxlen", a.maxlen, "largest interval length to check"));
  last(star->add_option("--budget", a.budget, "disjunct budget for normal forms"));
  star->add_flag("--check,!--no-check", a.check, "verify against enumeration (default on)");

  CLI::App* corpus = app.add_subcommand("corpus", "run a seeded random corpus against brute force");
  last(corpus->add_option("--kind", a.kind, "tree, pair, polycard or star")->required());
  last(corpus->add_option("--count", a.count, "number of items (0 = kind default)"));
  last(corpus->add_option("--seed", a.seed, "generator seed"));
  last(corpus->add_option("--out", a.outPath, "write per-item CSV rows here"));
}

// Merge --config JSON defaults into the argument list: injected right after
// the subcommand name so explicit flags (parsed later, TakeLast) win.
inline int injectConfig(CLI::App& app, std::vector<std::string>& args, std::ostream& err) {
  std::string configPath;
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) return detail::usageError(err, "--config needs a file path");
      configPath = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      configPath = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  args = rest;
  if (configPath.empty()) return 0;
  if (args.empty()) return detail::usageError(err, "--config requires a subcommand");

  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[0]);
  } catch (const CLI::OptionNotFound&) {
    return detail::usageError(err, "unknown subcommand " + args[0]);
  }

  std::ifstream file(configPath);
  if (!file) return detail::usageError(err, "cannot read config file " + configPath);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    return detail::usageError(err, std::string("config parse: ") + e.what());
  }
  if (!j.is_object()) return detail::usageError(err, "config must be a JSON object of flag values");

  std::vector<std::string> injected;
  for (auto& [key, value] : j.items()) {
    try {
      sub->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      return detail::usageError(err, "unknown config key \"" + key + "\" for subcommand " + args[0]);
    }
    auto render = [](const nlohmann::json& v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (value.is_array()) {
      for (auto& v : value) injected.push_back("--" + key + "=" + render(v));
    } else {
      injected.push_back("--" + key + "=" + render(value));
    }
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return 0;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"finite family workbench: models, counting, elimination, chains"};
  app.add_option("--config", "JSON file of default flag values for the subcommand")->expected(1);
  setupApp(app, a);

  if (int rc = injectConfig(app, args, err)) return rc;

  std::vector<const char*> argv;
  argv.push_back("fmw");
  for (auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("build")) return runBuild(a, out, err);
    if (app.got_subcommand("count")) return runCount(a, out, err);
    if (app.got_subcommand("qe")) return runQe(a, out, err);
    if (app.got_subcommand("polycard")) return runPolycard(a, out, err);
    if (app.got_subcommand("chain")) return runChain(a, out, err);
    if (app.got_subcommand("star")) return runStar(a, out, err);
    if (app.got_subcommand("corpus")) return runCorpus(a, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), std::cout, std::cerr);
}

}  // namespace fmw::cli
