#pragma once

// S-expression reader for formulas.
//
// Grammar (shared connectives):
//   formula := (and f ...) | (or f ...) | (not f)
//            | (exists v f) | (forall v f) | atom
// Atoms by signature:
//   tree : (U "<digits>" v) | (B "<digits>" "<digits>" v w) | (= v w)
//   pair : (E t1 t2) | (= t1 t2) | (Cinit k t) | (Cfin k t)
//          with t := v | (app "<fg letters>" v)
//   star : (= s1 s2) with s := v | cinit | cfin | (S k <v|cinit|cfin>)
//   eq   : (E v w) | (= v w)
//
// (and) parses as truth and (or) as falsity.  After reading, binders are
// rectified: a quantified variable that collides with any other variable in
// the formula is renamed to a fresh name, so downstream passes can assume
// distinct binders.

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmw/formula.hpp"

namespace fmw {

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(size_t p, const std::string& msg)
      : std::runtime_error("parse error at offset " + std::to_string(p) + ": " + msg), pos(p) {}
};

namespace detail {

struct Token {
  enum class Kind { LParen, RParen, Symbol, String, End } kind;
  std::string text;
  size_t pos;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({Token::Kind::LParen, "(", i++});
    } else if (c == ')') {
      out.push_back({Token::Kind::RParen, ")", i++});
    } else if (c == '"') {
      size_t start = i++;
      std::string text;
      while (i < src.size() && src[i] != '"') text += src[i++];
      if (i == src.size()) throw ParseError(start, "unterminated string literal");
      ++i;
      out.push_back({Token::Kind::String, text, start});
    } else {
      size_t start = i;
      std::string text;
      while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i])) && src[i] != '(' &&
             src[i] != ')' && src[i] != '"')
        text += src[i++];
      out.push_back({Token::Kind::Symbol, text, start});
    }
  }
  out.push_back({Token::Kind::End, "", src.size()});
  return out;
}

class Reader {
 public:
  Reader(const std::string& src, Sig sig) : toks_(tokenize(src)), sig_(sig) {}

  FormulaPtr readAll() {
    FormulaPtr f = readFormula();
    expect(Token::Kind::End, "trailing input after formula");
    return f;
  }

 private:
  std::vector<Token> toks_;
  size_t at_ = 0;
  Sig sig_;

  const Token& peek() const { return toks_[at_]; }
  const Token& next() { return toks_[at_++]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().pos, msg); }
  void expect(Token::Kind k, const std::string& msg) {
    if (peek().kind != k) fail(msg);
    ++at_;
  }

  std::string readSymbol(const std::string& what) {
    if (peek().kind != Token::Kind::Symbol) fail("expected " + what);
    return next().text;
  }

  std::string readVarName() {
    std::string v = readSymbol("a variable name");
    if (v.empty() || std::isdigit(static_cast<unsigned char>(v[0])))
      fail("invalid variable name \"" + v + "\"");
    if (v == "cinit" || v == "cfin") fail("\"" + v + "\" is a constant, not a variable");
    return v;
  }

  int readInt(const std::string& what) {
    std::string s = readSymbol(what);
    if (s.empty()) fail("expected " + what);
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected " + what + ", got \"" + s + "\"");
    if (s.size() > 9) fail(what + " out of range");
    return std::stoi(s);
  }

  DigitString readDigitString() {
    if (peek().kind != Token::Kind::String) fail("expected a quoted digit string");
    size_t pos = peek().pos;
    auto ds = digitsFromText(next().text);
    if (!ds) throw ParseError(pos, "malformed digit string (expected comma-separated decimals)");
    return *ds;
  }

  FgString readFgLiteral() {
    if (peek().kind != Token::Kind::String) fail("expected a quoted composition string");
    size_t pos = peek().pos;
    FgString s = next().text;
    if (!validFgString(s)) throw ParseError(pos, "composition string must use letters f,g only");
    return s;
  }

  // pair term: v | (app "<fg>" v); returns (fg, var)
  std::pair<FgString, std::string> readPairTerm() {
    if (peek().kind == Token::Kind::Symbol) return {FgString{}, readVarName()};
    expect(Token::Kind::LParen, "expected a term");
    std::string head = readSymbol("\"app\"");
    if (head != "app") fail("expected (app \"..\" v) term");
    FgString s = readFgLiteral();
    std::string v = readVarName();
    expect(Token::Kind::RParen, "expected ) after term");
    return {s, v};
  }

  StarTerm readStarTerm() {
    if (peek().kind == Token::Kind::Symbol) {
      std::string s = next().text;
      if (s == "cinit") return sInit(0);
      if (s == "cfin") return sFin(0);
      if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])))
        fail("invalid operand \"" + s + "\"");
      return sVar(0, s);
    }
    expect(Token::Kind::LParen, "expected a successor term");
    std::string head = readSymbol("\"S\"");
    if (head != "S") fail("expected (S k <operand>) term");
    int k = readInt("an iteration count");
    StarTerm t;
    std::string s = readSymbol("an operand");
    if (s == "cinit")
      t = sInit(k);
    else if (s == "cfin")
      t = sFin(k);
    else if (!s.empty() && !std::isdigit(static_cast<unsigned char>(s[0])))
      t = sVar(k, s);
    else
      fail("invalid operand \"" + s + "\"");
    expect(Token::Kind::RParen, "expected ) after successor term");
    return t;
  }

  FormulaPtr readFormula() {
    if (peek().kind != Token::Kind::LParen) fail("expected (");
    size_t open = peek().pos;
    ++at_;
    if (peek().kind != Token::Kind::Symbol) fail("expected an operator symbol");
    std::string head = next().text;

    auto finish = [&](FormulaPtr f) {
      expect(Token::Kind::RParen, "expected )");
      return f;
    };

    if (head == "and" || head == "or") {
      std::vector<FormulaPtr> kids;
      while (peek().kind != Token::Kind::RParen) {
        if (peek().kind == Token::Kind::End) throw ParseError(open, "unclosed (" + head);
        kids.push_back(readFormula());
      }
      ++at_;
      return head == "and" ? fand(std::move(kids)) : for_(std::move(kids));
    }
    if (head == "not") return finish(fnot(readFormula()));
    if (head == "exists" || head == "forall") {
      std::string v = readVarName();
      FormulaPtr body = readFormula();
      return finish(head == "exists" ? fexists(v, body) : fforall(v, body));
    }

    // atoms
    if (head == "U") {
      if (sig_ != Sig::TREE) fail("U atoms belong to the tree signature");
      DigitString s = readDigitString();
      std::string v = readVarName();
      return finish(fatom(treeU(std::move(s), std::move(v))));
    }
    if (head == "B") {
      if (sig_ != Sig::TREE) fail("B atoms belong to the tree signature");
      DigitString s = readDigitString();
      DigitString t = readDigitString();
      if (s.size() != t.size()) throw ParseError(open, "B requires index strings of equal length");
      std::string v = readVarName();
      std::string w = readVarName();
      return finish(fatom(treeB(std::move(s), std::move(t), std::move(v), std::move(w))));
    }
    if (head == "E") {
      if (sig_ == Sig::PAIR) {
        auto [s, v] = readPairTerm();
        auto [t, w] = readPairTerm();
        return finish(fatom(pairE(std::move(s), std::move(v), std::move(t), std::move(w))));
      }
      if (sig_ == Sig::EQ) {
        std::string v = readVarName();
        std::string w = readVarName();
        return finish(fatom(pairE({}, std::move(v), {}, std::move(w))));
      }
      fail("E atoms belong to the pair/eq signatures");
    }
    if (head == "=") {
      switch (sig_) {
        case Sig::TREE:
        case Sig::EQ: {
          std::string v = readVarName();
          std::string w = readVarName();
          return finish(fatom(varEq(std::move(v), std::move(w))));
        }
        case Sig::PAIR: {
          auto [s, v] = readPairTerm();
          auto [t, w] = readPairTerm();
          return finish(fatom(pairEq(std::move(s), std::move(v), std::move(t), std::move(w))));
        }
        case Sig::STAR: {
          StarTerm a = readStarTerm();
          StarTerm b = readStarTerm();
          return finish(fatom(starEq(std::move(a), std::move(b))));
        }
      }
    }
    if (head == "Cinit" || head == "Cfin") {
      if (sig_ != Sig::PAIR) fail(head + " atoms belong to the pair signature");
      int k = readInt("a class index");
      auto [t, v] = readPairTerm();
      Atom a = head == "Cinit" ? classInit(k, std::move(t), std::move(v)) : classFin(k, std::move(t), std::move(v));
      return finish(fatom(std::move(a)));
    }
    throw ParseError(open, "unknown operator \"" + head + "\"");
  }
};

// Rename any binder whose variable collides with a name already used
// elsewhere (free or bound) so that all binders are pairwise distinct.
inline FormulaPtr rectify(const FormulaPtr& f, std::set<std::string>& used) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Atom: return f;
    case Formula::Kind::Not: return fnot(rectify(f->kids[0], used));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f->kids) kids.push_back(rectify(k, used));
      return f->kind == Formula::Kind::And ? fand(std::move(kids)) : for_(std::move(kids));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::string v = f->var;
      FormulaPtr body = f->kids[0];
      if (used.count(v)) {
        std::string nv = freshVar(used, v + "_");
        body = renameFreeVar(body, v, nv);
        v = nv;
      }
      used.insert(v);
      body = rectify(body, used);
      return f->kind == Formula::Kind::Exists ? fexists(v, body) : fforall(v, body);
    }
  }
  return f;
}

}  // namespace detail

inline FormulaPtr parseFormula(const std::string& src, Sig sig) {
  detail::Reader r(src, sig);
  FormulaPtr f = r.readAll();
  std::set<std::string> used = freeVars(f);
  return detail::rectify(f, used);
}

}  // namespace fmw
