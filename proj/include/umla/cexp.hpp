#ifndef UMLA_CEXP_HPP
#define UMLA_CEXP_HPP

#include <cctype>
#include <functional>
#include <memory>
#include <optional>
#include <set>

#include "distribution.hpp"

namespace umla::cexp {

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class NK { Num, Var, Add, Sub, Neg, Mul, Div, Pow, QPow, Ord, Ac, Psi, Lift, Sum, SumRF, Ind, Cmp, And, Or, Not, True, False };
enum class Op { Eq, Ne, Lt, Le, Gt, Ge };

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
  NK k = NK::Num;
  mpz_class num;     // Num (non-negative)
  std::string name;  // Var, and the bound variable of Sum / SumRF
  long m = 0;        // level of Ac / SumRF
  Op op = Op::Eq;
  std::vector<NodeP> kids;
};

inline NodeP mk(NK k, std::vector<NodeP> kids = {}) {
  auto n = std::make_shared<Node>();
  n->k = k;
  n->kids = std::move(kids);
  return n;
}
inline NodeP num(const mpz_class& v) {
  auto n = std::make_shared<Node>();
  n->num = v;
  return n;
}
inline NodeP var(const std::string& s) {
  auto n = std::make_shared<Node>();
  n->k = NK::Var;
  n->name = s;
  return n;
}
inline NodeP cmp(Op op, NodeP a, NodeP b) {
  auto n = std::make_shared<Node>();
  n->k = NK::Cmp;
  n->op = op;
  n->kids = {std::move(a), std::move(b)};
  return n;
}
inline NodeP ac(long m, NodeP e) {
  auto n = std::make_shared<Node>();
  n->k = NK::Ac;
  n->m = m;
  n->kids = {std::move(e)};
  return n;
}
inline NodeP sum(const std::string& i, NodeP a, NodeP b, NodeP body) {
  auto n = std::make_shared<Node>();
  n->k = NK::Sum;
  n->name = i;
  n->kids = {std::move(a), std::move(b), std::move(body)};
  return n;
}
inline NodeP sumrf(const std::string& r, long m, NodeP body) {
  auto n = std::make_shared<Node>();
  n->k = NK::SumRF;
  n->name = r;
  n->m = m;
  n->kids = {std::move(body)};
  return n;
}

inline bool same(const NodeP& a, const NodeP& b) {
  if (a->k != b->k || a->num != b->num || a->name != b->name || a->m != b->m || a->op != b->op) return false;
  if (a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!same(a->kids[i], b->kids[i])) return false;
  return true;
}

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> kw{"q", "ord", "ac", "psi", "lift", "sum", "sumrf", "and", "or", "not", "true", "false"};
  return kw;
}

/// Errors carry a kind (SyntaxError, SortError, EvalError), an input offset
/// for syntax errors and a node path for sort errors.
struct CexpError : std::runtime_error {
  std::string kind;
  long offset = -1;
  std::string path;
  CexpError(std::string k, const std::string& what, long off = -1, std::string p = "")
      : std::runtime_error(what), kind(std::move(k)), offset(off), path(std::move(p)) {}
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

inline const char* op_str(Op o) {
  switch (o) {
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
  }
  return "?";
}

namespace detail {

inline int prec(const Node& n) {
  switch (n.k) {
    case NK::Add:
    case NK::Sub: return 1;
    case NK::Mul:
    case NK::Div: return 2;
    case NK::Neg: return 3;
    case NK::Pow: return 4;
    case NK::Or: return 1;
    case NK::And: return 2;
    case NK::Not: return 3;
    default: return 5;
  }
}

inline std::string pr(const NodeP& n, int ctx) {
  auto wrap = [&](std::string s) { return prec(*n) < ctx ? "(" + s + ")" : s; };
  const auto& k = n->kids;
  switch (n->k) {
    case NK::Num: return n->num.get_str();
    case NK::Var: return n->name;
    case NK::Add: return wrap(pr(k[0], 1) + " + " + pr(k[1], 2));
    case NK::Sub: return wrap(pr(k[0], 1) + " - " + pr(k[1], 2));
    case NK::Mul: return wrap(pr(k[0], 2) + "*" + pr(k[1], 3));
    case NK::Div: return wrap(pr(k[0], 2) + "/" + pr(k[1], 3));
    case NK::Neg: return wrap("-" + pr(k[0], 3));
    case NK::Pow: return wrap(pr(k[0], 5) + "^" + pr(k[1], 5));
    case NK::QPow: return "q^(" + pr(k[0], 0) + ")";
    case NK::Ord: return "ord(" + pr(k[0], 0) + ")";
    case NK::Ac: return "ac[" + std::to_string(n->m) + "](" + pr(k[0], 0) + ")";
    case NK::Psi: return "psi(" + pr(k[0], 0) + ")";
    case NK::Lift: return "lift(" + pr(k[0], 0) + ")";
    case NK::Sum: return "sum(" + n->name + ", " + pr(k[0], 0) + ".." + pr(k[1], 0) + ", " + pr(k[2], 0) + ")";
    case NK::SumRF: return "sumrf(" + n->name + ", " + std::to_string(n->m) + ", " + pr(k[0], 0) + ")";
    case NK::Ind: return "[" + pr(k[0], 0) + "]";
    case NK::Cmp: return pr(k[0], 0) + " " + op_str(n->op) + " " + pr(k[1], 0);
    case NK::And: return wrap(pr(k[0], 2) + " and " + pr(k[1], 3));
    case NK::Or: return wrap(pr(k[0], 1) + " or " + pr(k[1], 2));
    case NK::Not: return wrap("not " + pr(k[0], 3));
    case NK::True: return "true";
    case NK::False: return "false";
  }
  return "?";
}

}  // namespace detail

/// Canonical text form; parse(print(t)) reproduces t node for node.
inline std::string print(const NodeP& n) { return detail::pr(n, 0); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

struct Tok {
  enum T { Num, Id, Sym, End } t = End;
  std::string s;
  long off = 0;
};

inline std::vector<Tok> lex(const std::string& src) {
  std::vector<Tok> out;
  size_t i = 0;
  static const char* two[] = {"..", "==", "!=", "<=", ">="};
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    Tok t;
    t.off = static_cast<long>(i);
    if (std::isdigit(c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.t = Tok::Num;
      t.s = src.substr(i, j - i);
      i = j;
    } else if (std::isalpha(c) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.t = Tok::Id;
      t.s = src.substr(i, j - i);
      i = j;
    } else {
      t.t = Tok::Sym;
      bool done = false;
      for (const char* s2 : two)
        if (src.compare(i, 2, s2) == 0) {
          t.s = s2;
          i += 2;
          done = true;
          break;
        }
      if (!done) {
        if (std::string("+-*/^()[],<>=").find(static_cast<char>(c)) == std::string::npos)
          throw CexpError("SyntaxError", "syntax error at offset " + std::to_string(i) + ": unexpected character '" + std::string(1, static_cast<char>(c)) + "'", static_cast<long>(i));
        t.s = std::string(1, static_cast<char>(c));
        ++i;
      }
    }
    out.push_back(t);
  }
  Tok e;
  e.off = static_cast<long>(src.size());
  out.push_back(e);
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : tk_(lex(src)) {}

  NodeP whole() {
    NodeP e = expr();
    if (cur().t != Tok::End) fail("unexpected '" + cur().s + "'");
    return e;
  }

 private:
  std::vector<Tok> tk_;
  size_t i_ = 0;

  const Tok& cur() const { return tk_[i_]; }
  bool is(const char* s) const { return cur().t == Tok::Sym && cur().s == s; }
  bool is_id(const char* s) const { return cur().t == Tok::Id && cur().s == s; }
  [[noreturn]] void fail(const std::string& why) const {
    throw CexpError("SyntaxError", "syntax error at offset " + std::to_string(cur().off) + ": " + why, cur().off);
  }
  void expect(const char* s) {
    if (!is(s)) fail(std::string("expected '") + s + "'" + (cur().t == Tok::End ? " before end of input" : ""));
    ++i_;
  }
  long nat() {
    if (cur().t != Tok::Num) fail("expected a natural number");
    if (cur().s.size() > 6) fail("level too large");
    long v = std::stol(cur().s);
    ++i_;
    return v;
  }
  std::string ident() {
    if (cur().t != Tok::Id || keywords().count(cur().s)) fail("expected a variable name");
    return tk_[i_++].s;
  }

  NodeP expr() {
    NodeP l = term();
    while (is("+") || is("-")) {
      NK k = is("+") ? NK::Add : NK::Sub;
      ++i_;
      l = mk(k, {l, term()});
    }
    return l;
  }
  NodeP term() {
    NodeP l = unary();
    while (is("*") || is("/")) {
      NK k = is("*") ? NK::Mul : NK::Div;
      ++i_;
      l = mk(k, {l, unary()});
    }
    return l;
  }
  NodeP unary() {
    if (is("-")) {
      ++i_;
      return mk(NK::Neg, {unary()});
    }
    return power();
  }
  NodeP power() {
    NodeP b = primary();
    if (is("^")) {
      ++i_;
      long at = cur().off;
      NodeP e = primary();
      if (e->k != NK::Num) throw CexpError("SyntaxError", "syntax error at offset " + std::to_string(at) + ": exponent must be a natural number", at);
      b = mk(NK::Pow, {b, e});
    }
    return b;
  }
  NodeP call1(NK k) {
    ++i_;
    expect("(");
    NodeP e = expr();
    expect(")");
    return mk(k, {e});
  }
  NodeP primary() {
    const Tok& t = cur();
    if (t.t == Tok::Num) {
      ++i_;
      return num(mpz_class(t.s));
    }
    if (is("(")) {
      ++i_;
      NodeP e = expr();
      expect(")");
      return e;
    }
    if (is("[")) {
      ++i_;
      NodeP c = cond();
      expect("]");
      return mk(NK::Ind, {c});
    }
    if (t.t != Tok::Id) fail(t.t == Tok::End ? "unexpected end of input" : "unexpected '" + t.s + "'");
    if (t.s == "q") {
      ++i_;
      if (!is("^")) return mk(NK::QPow, {num(1)});
      ++i_;
      return mk(NK::QPow, {primary()});
    }
    if (t.s == "ord") return call1(NK::Ord);
    if (t.s == "psi") return call1(NK::Psi);
    if (t.s == "lift") return call1(NK::Lift);
    if (t.s == "ac") {
      ++i_;
      expect("[");
      long m = nat();
      if (m < 1) fail("ac level must be at least 1");
      expect("]");
      expect("(");
      NodeP e = expr();
      expect(")");
      return ac(m, e);
    }
    if (t.s == "sum") {
      ++i_;
      expect("(");
      std::string v = ident();
      expect(",");
      NodeP a = expr();
      expect("..");
      NodeP b = expr();
      expect(",");
      NodeP body = expr();
      expect(")");
      return sum(v, a, b, body);
    }
    if (t.s == "sumrf") {
      ++i_;
      expect("(");
      std::string v = ident();
      expect(",");
      long m = nat();
      if (m < 1) fail("residue level must be at least 1");
      expect(",");
      NodeP body = expr();
      expect(")");
      return sumrf(v, m, body);
    }
    if (keywords().count(t.s)) fail("unexpected keyword '" + t.s + "'");
    ++i_;
    return var(t.s);
  }

  NodeP cond() {
    NodeP l = conj();
    while (is_id("or")) {
      ++i_;
      l = mk(NK::Or, {l, conj()});
    }
    return l;
  }
  NodeP conj() {
    NodeP l = neg();
    while (is_id("and")) {
      ++i_;
      l = mk(NK::And, {l, neg()});
    }
    return l;
  }
  NodeP neg() {
    if (is_id("not")) {
      ++i_;
      return mk(NK::Not, {neg()});
    }
    return atom();
  }
  NodeP atom() {
    if (is_id("true")) {
      ++i_;
      return mk(NK::True);
    }
    if (is_id("false")) {
      ++i_;
      return mk(NK::False);
    }
    if (is("(")) {
      // Either a parenthesized condition or a comparison whose left side
      // starts with a parenthesis.
      size_t save = i_;
      try {
        ++i_;
        NodeP c = cond();
        expect(")");
        if (!(is("==") || is("!=") || is("<") || is("<=") || is(">") || is(">=") || is("=") || is("+") || is("-") ||
              is("*") || is("/") || is("^")))
          return c;
      } catch (const CexpError&) {
      }
      i_ = save;
    }
    NodeP l = expr();
    Op op;
    if (is("==") || is("="))
      op = Op::Eq;
    else if (is("!="))
      op = Op::Ne;
    else if (is("<"))
      op = Op::Lt;
    else if (is("<="))
      op = Op::Le;
    else if (is(">"))
      op = Op::Gt;
    else if (is(">="))
      op = Op::Ge;
    else
      fail("expected a comparison operator");
    ++i_;
    return cmp(op, l, expr());
  }
};

}  // namespace detail

inline NodeP parse(const std::string& src) { return detail::Parser(src).whole(); }

// ---------------------------------------------------------------------------
// Sorts
// ---------------------------------------------------------------------------

enum class S { Unknown, VF, Z, RF, C, B };

struct Sort {
  S s = S::Unknown;
  long m = -1;  // residue level for RF; -1 if not yet known
  bool operator==(const Sort& o) const { return s == o.s && m == o.m; }
};

inline std::string sort_name(const Sort& s) {
  switch (s.s) {
    case S::VF: return "VF";
    case S::Z: return "Z";
    case S::RF: return s.m < 0 ? "RF" : "RF_" + std::to_string(s.m);
    case S::C: return "C";
    case S::B: return "condition";
    default: return "?";
  }
}

struct Checked {
  NodeP root;
  std::map<const Node*, Sort> sorts;
  std::map<std::string, Sort> free;
};

namespace detail {

inline bool is_const(const Node& n) {
  switch (n.k) {
    case NK::Num: return true;
    case NK::Add:
    case NK::Sub:
    case NK::Mul:
    case NK::Div:
    case NK::Neg:
    case NK::Pow:
      for (auto& c : n.kids)
        if (!is_const(*c)) return false;
      return true;
    default: return false;
  }
}

class Checker {
 public:
  std::map<std::string, Sort> free;
  std::map<const Node*, Sort> ann;
  bool final = false;
  bool changed = false;

  Sort go(const NodeP& n, Sort want, const std::string& path) {
    Sort r = infer(n, want, path);
    if (!compat(r, want)) err(path, "expected " + sort_name(want) + ", found " + sort_name(r));
    if (r.s != S::Unknown) ann[n.get()] = r;
    return r;
  }

 private:
  std::vector<std::pair<std::string, Sort>> scope_;

  [[noreturn]] static void err(const std::string& path, const std::string& why) {
    throw CexpError("SortError", "sort error at " + path + ": " + why, -1, path);
  }
  static bool compat(const Sort& a, const Sort& w) {
    if (w.s == S::Unknown || a.s == S::Unknown) return true;
    if (a.s == S::Z && w.s == S::C) return true;
    if (a.s != w.s) return false;
    return a.s != S::RF || w.m < 0 || a.m == w.m;
  }
  static Sort join(const Sort& a, const Sort& b) {
    if (a.s == S::Unknown) return b;
    if (b.s == S::Unknown) return a;
    if ((a.s == S::Z && b.s == S::C) || (a.s == S::C && b.s == S::Z)) return {S::C};
    return a;
  }
  std::optional<Sort> lookup(const std::string& v) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == v) return it->second;
    auto f = free.find(v);
    if (f != free.end()) return f->second;
    return std::nullopt;
  }

  Sort arith(const NodeP& n, Sort want, const std::string& path, bool z_ok, bool needs_const_rhs) {
    const auto& k = n->kids;
    Sort s = want;
    if (s.s == S::Unknown) {
      Sort acc;
      for (size_t i = 0; i < k.size(); ++i) acc = join(acc, go(k[i], {}, path + "/" + std::to_string(i)));
      s = acc;
    }
    if (s.s == S::Unknown) return s;
    if (s.s != S::VF && s.s != S::C && !(s.s == S::Z && z_ok))
      err(path, "arithmetic is not available in sort " + sort_name(s));
    if (needs_const_rhs && !is_const(*k.back())) err(path + "/1", "divisor must be a constant");
    if (s.s == S::Z && n->k == NK::Mul && !is_const(*k[0]) && !is_const(*k[1]))
      err(path, "integer terms must be linear (one factor constant)");
    Sort res = s;
    for (size_t i = 0; i < k.size(); ++i) {
      Sort r = go(k[i], s, path + "/" + std::to_string(i));
      if (s.s == S::C && r.s == S::Z && n->k != NK::Pow) continue;
      if (r.s == S::Unknown && final) err(path + "/" + std::to_string(i), "could not infer a sort");
    }
    return res;
  }

  Sort infer(const NodeP& n, Sort want, const std::string& path) {
    const auto& k = n->kids;
    switch (n->k) {
      case NK::Num:
        if (want.s == S::B) err(path, "a number is not a condition");
        if (want.s == S::RF && want.m < 0) return final ? (err(path, "residue level unknown"), want) : Sort{};
        return want;
      case NK::Var: {
        if (auto s = lookup(n->name)) return *s;
        if (want.s == S::Unknown) return want;
        if (want.s == S::B) err(path, "boolean variables are not supported");
        Sort s = want;
        if (s.s == S::C) {
          if (!final) return {};
          s = {S::Z};
        }
        if (s.s == S::RF && s.m < 0) {
          if (!final) return {};
          err(path, "cannot infer the residue level of " + n->name);
        }
        free[n->name] = s;
        changed = true;
        return s;
      }
      case NK::Add:
      case NK::Sub:
      case NK::Neg: return arith(n, want, path, true, false);
      case NK::Mul: return arith(n, want, path, true, false);
      case NK::Div: return arith(n, want, path, true, true);
      case NK::Pow: {
        Sort s = want.s == S::Unknown ? go(k[0], {}, path + "/0") : want;
        if (s.s == S::Unknown) return s;
        if (s.s == S::Z && !is_const(*k[0])) err(path, "integer terms must be linear");
        if (s.s != S::VF && s.s != S::C && s.s != S::Z) err(path, "powers are not available in sort " + sort_name(s));
        Sort b = go(k[0], s, path + "/0");
        go(k[1], {S::Z}, path + "/1");
        return s.s == S::C && b.s == S::Z ? Sort{S::C} : s;
      }
      case NK::QPow:
        go(k[0], {S::Z}, path + "/0");
        return {S::C};
      case NK::Ord:
        go(k[0], {S::VF}, path + "/0");
        return {S::Z};
      case NK::Ac:
        go(k[0], {S::VF}, path + "/0");
        return {S::RF, n->m};
      case NK::Psi:
        go(k[0], {S::VF}, path + "/0");
        return {S::C};
      case NK::Lift: {
        Sort r = go(k[0], {S::RF, -1}, path + "/0");
        if (final && r.s != S::RF) err(path + "/0", "lift needs a residue argument");
        return {S::VF};
      }
      case NK::Sum: {
        go(k[0], {S::Z}, path + "/0");
        go(k[1], {S::Z}, path + "/1");
        scope_.push_back({n->name, {S::Z}});
        go(k[2], {S::C}, path + "/2");
        scope_.pop_back();
        return {S::C};
      }
      case NK::SumRF: {
        scope_.push_back({n->name, {S::RF, n->m}});
        go(k[0], {S::C}, path + "/0");
        scope_.pop_back();
        return {S::C};
      }
      case NK::Ind:
        go(k[0], {S::B}, path + "/0");
        return {S::C};
      case NK::Cmp: {
        Sort s = join(go(k[0], {}, path + "/0"), go(k[1], {}, path + "/1"));
        if (s.s == S::Unknown) {
          if (!final) return {S::B};
          s = n->op == Op::Eq || n->op == Op::Ne ? Sort{S::VF} : Sort{S::Z};
        }
        if (s.s == S::C || s.s == S::B) err(path, "cannot compare values of sort " + sort_name(s));
        if (s.s != S::Z && n->op != Op::Eq && n->op != Op::Ne) err(path, "order comparisons need integer sort, found " + sort_name(s));
        go(k[0], s, path + "/0");
        go(k[1], s, path + "/1");
        return {S::B};
      }
      case NK::And:
      case NK::Or:
        go(k[0], {S::B}, path + "/0");
        go(k[1], {S::B}, path + "/1");
        return {S::B};
      case NK::Not:
        go(k[0], {S::B}, path + "/0");
        return {S::B};
      case NK::True:
      case NK::False: return {S::B};
    }
    return {};
  }
};

}  // namespace detail

/// Infers sorts for every node. `decl` pins free variables; the rest are
/// inferred from use, with order comparisons defaulting to Z and equalities
/// to VF.
inline Checked typecheck(const NodeP& root, const std::map<std::string, Sort>& decl = {}) {
  detail::Checker c;
  c.free = decl;
  for (int it = 0; it < 32; ++it) {
    c.changed = false;
    c.ann.clear();
    c.go(root, {S::C}, "$");
    if (!c.changed) break;
  }
  // Defaults chosen late can settle earlier variables, so run the final pass twice.
  c.final = true;
  for (int it = 0; it < 2; ++it) {
    c.ann.clear();
    c.go(root, {S::C}, "$");
  }
  return Checked{root, c.ann, c.free};
}

inline Checked compile(const std::string& src, const std::map<std::string, Sort>& decl = {}) {
  return typecheck(parse(src), decl);
}

/// Replaces free occurrences of `name` by `value`.
inline NodeP substitute(const NodeP& n, const std::string& name, const NodeP& value) {
  if (n->k == NK::Var) return n->name == name ? value : n;
  if ((n->k == NK::Sum || n->k == NK::SumRF) && n->name == name) {
    if (n->k == NK::SumRF) return n;
    auto r = std::make_shared<Node>(*n);
    r->kids[0] = substitute(n->kids[0], name, value);
    r->kids[1] = substitute(n->kids[1], name, value);
    return r;
  }
  auto r = std::make_shared<Node>(*n);
  for (auto& c : r->kids) c = substitute(c, name, value);
  return r;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Integer value with +-infinity (ord 0 = +infinity).
struct ZV {
  mpq_class v = 0;
  int inf = 0;
  bool operator<(const ZV& o) const {
    if (inf != o.inf) return inf < o.inf;
    return inf == 0 && v < o.v;
  }
  bool operator==(const ZV& o) const { return inf == o.inf && (inf != 0 || v == o.v); }
};

template <class F>
struct Env {
  std::map<std::string, typename F::elem> vf;
  std::map<std::string, ZV> z;
  std::map<std::string, long> rf;
};

/// Residue code of x in O / p^m.
template <class F>
long rf_code(const F& K, const typename F::elem& x, long m) {
  if (x == K.zero()) return 0;
  long v = K.ord(x);
  if (v < 0) throw CexpError("EvalError", "residue of a non-integral element");
  if (v >= m) return 0;
  return K.ac(x, m - v) * static_cast<long>(ipow(K.p, v));
}

namespace detail {

template <class F>
class Evaluator {
 public:
  using E = typename F::elem;
  Evaluator(const F& K, const Checked& C, Env<F> env) : K_(K), C_(C), env_(std::move(env)) {}

  struct Val {
    S s = S::C;
    E vf{};
    ZV z;
    long rf = 0;
    Cyclo c;
    bool b = false;
  };

  Val ev(const NodeP& n) {
    auto it = C_.sorts.find(n.get());
    if (it == C_.sorts.end()) fail("node without a sort");
    const Sort so = it->second;
    const auto& k = n->kids;
    Val v;
    v.s = so.s;
    switch (n->k) {
      case NK::Num:
        if (so.s == S::VF) v.vf = vconst(n->num);
        if (so.s == S::Z) v.z = ZV{mpq_class(n->num)};
        if (so.s == S::RF) v.rf = rf_code(K_, vconst(n->num), so.m);
        if (so.s == S::C) v.c = Cyclo(K_.p, mpq_class(n->num));
        return v;
      case NK::Var: {
        if (so.s == S::VF) {
          auto f = env_.vf.find(n->name);
          if (f == env_.vf.end()) fail("unbound variable " + n->name);
          v.vf = f->second;
        } else if (so.s == S::Z) {
          auto f = env_.z.find(n->name);
          if (f == env_.z.end()) fail("unbound variable " + n->name);
          v.z = f->second;
        } else {
          auto f = env_.rf.find(n->name);
          if (f == env_.rf.end()) fail("unbound variable " + n->name);
          v.rf = f->second % static_cast<long>(ipow(K_.p, so.m));
        }
        return v;
      }
      case NK::Add:
      case NK::Sub: {
        Val a = ev(k[0]), b = ev(k[1]);
        bool sub = n->k == NK::Sub;
        if (so.s == S::VF) v.vf = sub ? E(a.vf - b.vf) : E(a.vf + b.vf);
        if (so.s == S::Z) v.z = sub ? zadd(a.z, zneg(b.z)) : zadd(a.z, b.z);
        if (so.s == S::C) v.c = sub ? to_c(a) - to_c(b) : to_c(a) + to_c(b);
        return v;
      }
      case NK::Neg: {
        Val a = ev(k[0]);
        if (so.s == S::VF) v.vf = K_.zero() - a.vf;
        if (so.s == S::Z) v.z = zneg(a.z);
        if (so.s == S::C) v.c = -to_c(a);
        return v;
      }
      case NK::Mul: {
        Val a = ev(k[0]), b = ev(k[1]);
        if (so.s == S::VF) v.vf = a.vf * b.vf;
        if (so.s == S::Z) v.z = zmul(a.z, b.z);
        if (so.s == S::C) v.c = to_c(a) * to_c(b);
        return v;
      }
      case NK::Div: {
        Val a = ev(k[0]), b = ev(k[1]);
        if (so.s == S::VF) {
          if (b.vf == K_.zero()) fail("division by zero");
          v.vf = K_.div(a.vf, b.vf);
        }
        if (so.s == S::Z) {
          if (b.z.inf || b.z.v == 0) fail("division by zero");
          v.z = zmul(a.z, ZV{mpq_class(1 / b.z.v)});
        }
        if (so.s == S::C) {
          Cyclo d = to_c(b);
          if (!d.is_rational() || d.is_zero()) fail("division by a non-rational or zero constant");
          v.c = to_c(a).scaled(mpq_class(1 / d.rational()));
        }
        return v;
      }
      case NK::Pow: {
        Val a = ev(k[0]);
        long e = k[1]->num.get_si();
        if (so.s == S::VF) {
          v.vf = K_.one();
          for (long i = 0; i < e; ++i) v.vf = v.vf * a.vf;
        } else if (so.s == S::Z) {
          if (a.z.inf) fail("power of an infinite value");
          mpq_class r = 1;
          for (long i = 0; i < e; ++i) r *= a.z.v;
          v.z = ZV{r};
        } else {
          Cyclo b = to_c(a), r(K_.p, 1);
          for (long i = 0; i < e; ++i) r *= b;
          v.c = r;
        }
        return v;
      }
      case NK::QPow: {
        ZV L = ev(k[0]).z;
        if (L.inf < 0) {
          v.c = Cyclo(K_.p, 0);
          return v;
        }
        if (L.inf > 0) fail("q raised to +infinity");
        mpq_class t = 2 * L.v;
        if (t.get_den() != 1) fail("exponent of q must be a half-integer");
        v.c = Cyclo::qhalf(K_.p, t.get_num().get_si());
        return v;
      }
      case NK::Ord: {
        long o = K_.ord(ev(k[0]).vf);
        v.z = is_inf(o) ? ZV{0, 1} : ZV{mpq_class(o)};
        return v;
      }
      case NK::Ac: {
        E x = ev(k[0]).vf;
        if (x == K_.zero()) throw CexpError("EvalError", "AcOfZero: ac of zero is undefined");
        v.rf = K_.ac(x, n->m);
        return v;
      }
      case NK::Psi:
        v.c = K_.psi(ev(k[0]).vf);
        return v;
      case NK::Lift:
        v.vf = K_.lift(ev(k[0]).rf);
        return v;
      case NK::Sum: {
        long a = zint(ev(k[0]).z), b = zint(ev(k[1]).z);
        v.c = Cyclo(K_.p, 0);
        if (b < a) return v;
        if (b - a > 1000000) fail("summation range too long");
        auto saved = env_.z.find(n->name) != env_.z.end() ? std::optional<ZV>(env_.z[n->name]) : std::nullopt;
        for (long i = a; i <= b; ++i) {
          env_.z[n->name] = ZV{mpq_class(i)};
          v.c += to_c(ev(k[2]));
        }
        if (saved)
          env_.z[n->name] = *saved;
        else
          env_.z.erase(n->name);
        return v;
      }
      case NK::SumRF: {
        int64_t N = ipow(K_.p, n->m);
        if (N > 1000000) fail("residue ring too large");
        auto saved = env_.rf.find(n->name) != env_.rf.end() ? std::optional<long>(env_.rf[n->name]) : std::nullopt;
        v.c = Cyclo(K_.p, 0);
        for (int64_t i = 0; i < N; ++i) {
          env_.rf[n->name] = static_cast<long>(i);
          v.c += to_c(ev(k[0]));
        }
        if (saved)
          env_.rf[n->name] = *saved;
        else
          env_.rf.erase(n->name);
        return v;
      }
      case NK::Ind:
        v.c = Cyclo(K_.p, ev(k[0]).b ? 1 : 0);
        return v;
      case NK::Cmp: {
        Val a = ev(k[0]), b = ev(k[1]);
        bool r = false;
        switch (a.s) {
          case S::VF: r = a.vf == b.vf; break;
          case S::RF: r = a.rf == b.rf; break;
          default: break;
        }
        if (a.s == S::Z) {
          switch (n->op) {
            case Op::Eq: r = a.z == b.z; break;
            case Op::Ne: r = !(a.z == b.z); break;
            case Op::Lt: r = a.z < b.z; break;
            case Op::Le: r = !(b.z < a.z); break;
            case Op::Gt: r = b.z < a.z; break;
            case Op::Ge: r = !(a.z < b.z); break;
          }
        } else if (n->op == Op::Ne) {
          r = !r;
        }
        v.b = r;
        return v;
      }
      case NK::And: v.b = ev(k[0]).b && ev(k[1]).b; return v;
      case NK::Or: v.b = ev(k[0]).b || ev(k[1]).b; return v;
      case NK::Not: v.b = !ev(k[0]).b; return v;
      case NK::True: v.b = true; return v;
      case NK::False: v.b = false; return v;
    }
    return v;
  }

  Cyclo to_c(const Val& v) const {
    if (v.s == S::C) return v.c;
    if (v.s == S::Z) {
      if (v.z.inf) fail("infinite integer used as a value");
      return Cyclo(K_.p, v.z.v);
    }
    fail("value of sort " + sort_name({v.s}) + " used as a scalar");
  }

 private:
  const F& K_;
  const Checked& C_;
  Env<F> env_;

  [[noreturn]] static void fail(const std::string& why) { throw CexpError("EvalError", why); }

  E vconst(const mpz_class& z) const {
    if constexpr (std::is_same_v<E, mpq_class>) {
      return mpq_class(z);
    } else {
      mpz_class r = z % static_cast<unsigned long>(K_.p);
      return K_.from_int(r.get_si());
    }
  }
  static ZV zneg(const ZV& a) { return ZV{-a.v, -a.inf}; }
  static ZV zadd(const ZV& a, const ZV& b) {
    if (a.inf && b.inf && a.inf != b.inf) fail("infinity minus infinity");
    if (a.inf) return a;
    if (b.inf) return b;
    return ZV{a.v + b.v};
  }
  static ZV zmul(const ZV& a, const ZV& b) {
    if (!a.inf && !b.inf) return ZV{a.v * b.v};
    const ZV& f = a.inf ? b : a;
    int s = a.inf ? a.inf : b.inf;
    if (f.inf) return ZV{0, s * f.inf};
    if (f.v == 0) fail("zero times infinity");
    return ZV{0, f.v > 0 ? s : -s};
  }
  static long zint(const ZV& a) {
    if (a.inf) fail("infinite summation bound");
    if (a.v.get_den() != 1 || !a.v.get_num().fits_slong_p()) fail("summation bound is not an integer");
    return a.v.get_num().get_si();
  }
};

}  // namespace detail

template <class F>
Cyclo eval(const Checked& C, const F& K, const Env<F>& env) {
  detail::Evaluator<F> e(K, C, env);
  return e.to_c(e.ev(C.root));
}

/// Reads an environment from "name=value" strings; values are parsed per the
/// inferred sort of the variable.
template <class F>
Env<F> parse_env(const F& K, const Checked& C, const std::vector<std::string>& binds) {
  Env<F> env;
  for (auto& b : binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("binding must be name=value: " + b);
    std::string name = b.substr(0, eq), val = b.substr(eq + 1);
    auto it = C.free.find(name);
    Sort s = it == C.free.end() ? Sort{S::VF} : it->second;
    if (s.s == S::Z) {
      if (val == "inf")
        env.z[name] = ZV{0, 1};
      else
        env.z[name] = ZV{mpq_class(std::stol(val))};
    } else if (s.s == S::RF) {
      env.rf[name] = std::stol(val);
    } else {
      env.vf[name] = K.parse(val);
    }
  }
  return env;
}

// ---------------------------------------------------------------------------
// Families of B-functions
// ---------------------------------------------------------------------------

struct Family {
  Checked E;
  std::vector<std::string> x;  // point block
  std::string r = "r";         // radius variable
  std::vector<std::string> y;  // parameters
};

inline Family make_family(const std::string& src, std::vector<std::string> x = {"x"}, std::string r = "r",
                          std::vector<std::string> y = {}) {
  std::map<std::string, Sort> decl;
  for (auto& v : x) decl[v] = {S::VF};
  for (auto& v : y) decl[v] = {S::VF};
  decl[r] = {S::Z};
  return Family{compile(src, decl), std::move(x), std::move(r), std::move(y)};
}

/// Text form:
///   # comment
///   point: x1, x2
///   radius: r
///   params: y
///   <expression, possibly over several lines>
inline Family parse_family_file(const std::string& text) {
  std::vector<std::string> x{"x"}, y;
  std::string r = "r", body;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s + ",") {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else if (!std::isspace(static_cast<unsigned char>(c))) {
        cur += c;
      }
    }
    return out;
  };
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    size_t h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    auto head = [&](const char* key) { return line.rfind(key, 0) == 0; };
    if (head("point:"))
      x = split(line.substr(6));
    else if (head("radius:"))
      r = split(line.substr(7)).at(0);
    else if (head("params:"))
      y = split(line.substr(7));
    else
      body += line + " ";
  }
  return make_family(body, x, r, y);
}

template <class F>
BFun<F> instantiate_b_function(const Family& fam, const F& K, const Vec<F>& yval = {}) {
  if (yval.size() != fam.y.size()) throw std::invalid_argument("parameter count mismatch");
  Env<F> base;
  for (size_t i = 0; i < fam.y.size(); ++i) base.vf[fam.y[i]] = yval[i];
  auto E = fam.E;
  auto names = fam.x;
  auto r = fam.r;
  return BFun<F>{K, names.size(), [E, names, r, base, K](const Vec<F>& x, long rad) {
                   Env<F> env = base;
                   for (size_t i = 0; i < names.size(); ++i) env.vf[names[i]] = x[i];
                   env.z[r] = ZV{mpq_class(rad)};
                   return eval(E, K, env);
                 }};
}

struct DisRow {
  std::string field;
  std::string y;
  long trials = 0;
  long additivity_failures = 0;
  long welldef_failures = 0;
  long eval_errors = 0;
  bool pass = true;
  std::string witness;
};

/// Samples additivity over children and independence of the chosen center
/// on random balls. A pass is evidence, not a proof.
template <class F, class Rng>
DisRow dis_sample(const Family& fam, const F& K, const Vec<F>& yval, long trials, Rng& g, long lo = -2, long hi = 3) {
  DisRow row;
  row.field = K.name();
  for (size_t i = 0; i < yval.size(); ++i) row.y += (i ? "," : "") + K.str(yval[i]);
  auto D = instantiate_b_function(fam, K, yval);
  const size_t n = fam.x.size();
  std::uniform_int_distribution<long> rad(lo, hi);
  std::uniform_int_distribution<int> coin(0, 3);
  auto show = [&](const Vec<F>& x, long r) {
    std::string s = "x=(";
    for (size_t i = 0; i < n; ++i) s += (i ? "," : "") + K.str(x[i]);
    return s + "), r=" + std::to_string(r);
  };
  for (long t = 0; t < trials; ++t) {
    long r = rad(g);
    Vec<F> x(n), x2(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = coin(g) == 0 ? K.zero() : K.random(g, lo, r + 1);
      x2[i] = x[i] + K.random(g, r, r + 2);
    }
    ++row.trials;
    try {
      if (!D.additive_at(x, r)) {
        ++row.additivity_failures;
        if (row.witness.empty()) row.witness = "additivity fails at " + show(x, r);
      }
      if (D.D(x, r) != D.D(x2, r)) {
        ++row.welldef_failures;
        if (row.witness.empty()) row.witness = "value depends on the center at " + show(x, r);
      }
    } catch (const CexpError& e) {
      ++row.eval_errors;
      if (row.witness.empty()) row.witness = std::string("evaluation failed at ") + show(x, r) + ": " + e.what();
    }
  }
  row.pass = row.additivity_failures == 0 && row.welldef_failures == 0 && row.eval_errors == 0;
  return row;
}

// ---------------------------------------------------------------------------
// Random ASTs (syntax only; sorts are not respected).
// ---------------------------------------------------------------------------

template <class Rng>
NodeP random_ast(Rng& g, int depth, bool as_cond = false) {
  static const char* names[] = {"x", "y", "r", "i", "u1", "t_2"};
  std::uniform_int_distribution<int> pick(0, 100);
  auto name = [&] { return std::string(names[pick(g) % 6]); };
  auto sub = [&](bool c) { return random_ast(g, depth - 1, c); };
  if (as_cond) {
    int c = depth <= 0 ? pick(g) % 3 : pick(g) % 7;
    switch (c) {
      case 0: return mk(NK::True);
      case 1: return mk(NK::False);
      case 2:
      case 3: return cmp(static_cast<Op>(pick(g) % 6), random_ast(g, depth - 1), random_ast(g, depth - 1));
      case 4: return mk(NK::And, {sub(true), sub(true)});
      case 5: return mk(NK::Or, {sub(true), sub(true)});
      default: return mk(NK::Not, {sub(true)});
    }
  }
  if (depth <= 0) return pick(g) % 2 ? num(pick(g) % 20) : var(name());
  switch (pick(g) % 17) {
    case 0: return num(pick(g));
    case 1: return var(name());
    case 2: return mk(NK::Add, {sub(false), sub(false)});
    case 3: return mk(NK::Sub, {sub(false), sub(false)});
    case 4: return mk(NK::Neg, {sub(false)});
    case 5: return mk(NK::Mul, {sub(false), sub(false)});
    case 6: return mk(NK::Div, {sub(false), sub(false)});
    case 7: return mk(NK::Pow, {sub(false), num(pick(g) % 5)});
    case 8: return mk(NK::QPow, {sub(false)});
    case 9: return mk(NK::Ord, {sub(false)});
    case 10: return ac(1 + pick(g) % 3, sub(false));
    case 11: return mk(NK::Psi, {sub(false)});
    case 12: return mk(NK::Lift, {sub(false)});
    case 13: return sum(name(), sub(false), sub(false), sub(false));
    case 14: return sumrf(name(), 1 + pick(g) % 2, sub(false));
    default: return mk(NK::Ind, {sub(true)});
  }
}

}  // namespace umla::cexp

#endif
