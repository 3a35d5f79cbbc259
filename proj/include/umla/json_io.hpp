#ifndef UMLA_JSON_IO_HPP
#define UMLA_JSON_IO_HPP

#include <json.hpp>

#include "cexp.hpp"
#include "fibers.hpp"
#include "maps.hpp"
#include "phase.hpp"

namespace umla::io {

using json = nlohmann::json;

/// Malformed input: bad JSON shape, field mismatch, unparsable values.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline long as_long(const json& j) {
  if (j.is_number_integer()) return j.get<long>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == s.size() && pos > 0) return v;
  }
  throw FormatError("expected an integer, got " + j.dump());
}

// Fields -------------------------------------------------------------------

template <class F>
json field_json(const F& K) {
  return json{{"kind", F::kind}, {"p", K.p}};
}

inline AnyField field_from_json(const json& j) {
  try {
    if (j.is_string()) return parse_field(j.get<std::string>());
    return parse_field(need(j, "kind").get<std::string>() + ":" + std::to_string(as_long(need(j, "p"))));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
}

template <class F>
void check_field(const F& K, const json& doc) {
  if (!doc.is_object() || !doc.contains("field")) return;
  AnyField G = field_from_json(doc["field"]);
  if (field_name(G) != K.name()) throw FormatError("field mismatch: input is over " + field_name(G) + ", expected " + K.name());
}

// Elements -----------------------------------------------------------------

inline json elem_json(const Qp&, const mpq_class& x) { return x.get_str(); }

inline json elem_json(const Fpt&, const Laurent& x) {
  json c = json::object();
  for (auto& [e, a] : x.c) c[std::to_string(e)] = a;
  return json{{"coeffs", c}};
}

template <class F>
typename F::elem elem_from(const F& K, const json& j) {
  try {
    if (j.is_number_integer()) return K.from_int(j.get<long>());
    if (j.is_string()) return K.parse(j.get<std::string>());
    if constexpr (std::is_same_v<F, Fpt>) {
      if (j.is_object() && j.contains("coeffs")) {
        Laurent r = K.zero();
        for (auto& [e, a] : j["coeffs"].items()) {
          long res = as_long(a) % static_cast<long>(K.p);
          if (res < 0) res += static_cast<long>(K.p);
          r = r + Laurent::mono(K.p, std::stol(e), static_cast<unsigned long>(res));
        }
        return r;
      }
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad field element ") + j.dump() + ": " + e.what());
  }
  throw FormatError("bad field element " + j.dump());
}

template <class F>
json vec_json(const F& K, const Vec<F>& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(elem_json(K, x));
  return a;
}

template <class F>
Vec<F> vec_from(const F& K, const json& j, size_t n = 0) {
  Vec<F> out;
  if (!j.is_array()) {
    out.push_back(elem_from(K, j));
  } else {
    for (auto& x : j) out.push_back(elem_from(K, x));
  }
  if (n && out.size() != n) throw FormatError("expected a vector of length " + std::to_string(n) + ", got " + j.dump());
  return out;
}

/// Comma separated elements, as typed on the command line.
template <class F>
Vec<F> vec_from_text(const F& K, const std::string& s) {
  Vec<F> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (cur.empty()) throw FormatError("empty coordinate in '" + s + "'");
      try {
        out.push_back(K.parse(cur));
      } catch (const std::exception& e) {
        throw FormatError("bad field element '" + cur + "': " + e.what());
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

// Scalars ------------------------------------------------------------------

inline json cyclo_json(const Cyclo& c) {
  json a = json::array();
  for (auto& [k, v] : c.terms()) {
    mpz_class den = k.level ? zpow(c.p(), static_cast<unsigned long>(k.level)) : mpz_class(1);
    a.push_back({{"qpow", k.half ? "1/2" : "0"}, {"angle", std::to_string(k.num) + "/" + den.get_str()}, {"coef", v.get_str()}});
  }
  return a;
}

inline mpq_class rational_from(const json& j) {
  try {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    mpq_class r(j.get<std::string>());
    r.canonicalize();
    return r;
  } catch (const std::exception&) {
    throw FormatError("bad rational " + j.dump());
  }
}

/// "a/p^l" -> (a, l).
inline std::pair<int64_t, int> angle_from(unsigned long p, const std::string& s) {
  auto slash = s.find('/');
  long a = std::stol(s.substr(0, slash));
  mpz_class b = slash == std::string::npos ? mpz_class(1) : mpz_class(s.substr(slash + 1));
  int l = 0;
  while (b % p == 0 && b > 1) {
    b /= p;
    ++l;
  }
  if (b != 1) throw FormatError("angle denominator is not a power of p: " + s);
  return {a, l};
}

inline Cyclo cyclo_from(unsigned long p, const json& j) {
  if (!j.is_array()) return Cyclo(p, rational_from(j));
  Cyclo s(p, 0);
  for (auto& t : j) {
    mpq_class qp = t.contains("qpow") ? rational_from(t["qpow"]) : mpq_class(0);
    mpq_class twice = qp * 2;
    if (twice.get_den() != 1) throw FormatError("qpow must be a multiple of 1/2");
    std::pair<int64_t, int> ang{0, 0};
    try {
      if (t.contains("angle")) ang = angle_from(p, t["angle"].get<std::string>());
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError("bad angle " + t["angle"].dump());
    }
    Cyclo term = Cyclo::qhalf(p, twice.get_num().get_si()) * Cyclo::root(p, ang.first, ang.second);
    s += term * Cyclo(p, rational_from(need(t, "coef")));
  }
  return s;
}

// Balls --------------------------------------------------------------------

template <class F>
json ball_json(const F& K, const Polyball<F>& b) {
  return json{{"center", vec_json(K, b.c)}, {"radius", b.r}};
}

template <class F>
Polyball<F> ball_from(const F& K, const json& j, size_t n = 0) {
  Vec<F> c = vec_from(K, need(j, "center"), n);
  std::vector<long> r;
  const json& rj = need(j, "radius");
  if (rj.is_array()) {
    for (auto& x : rj) r.push_back(as_long(x));
  } else {
    r.assign(c.size(), as_long(rj));
  }
  if (r.size() != c.size()) throw FormatError("center and radius lengths differ");
  return Polyball<F>(K, c, r);
}

// Schwartz-Bruhat functions -----------------------------------------------

template <class F>
json sb_json(const SB<F>& a) {
  SB<F> m = a.normalized();
  json cells = json::array();
  for (auto& [c, v] : m.cells)
    cells.push_back({{"center", vec_json(a.K, c)}, {"radius", std::vector<long>(a.n, m.aplus)}, {"coef", cyclo_json(v)}});
  return json{{"field", field_json(a.K)}, {"n", a.n}, {"alpha_minus", m.cells.empty() ? 0 : m.amin},
              {"alpha_plus", m.cells.empty() ? 0 : m.aplus}, {"cells", cells}};
}

/// Overlapping cells add up.
template <class F>
SB<F> sb_from(const F& K, const json& j) {
  check_field(K, j);
  size_t n = static_cast<size_t>(as_long(need(j, "n")));
  if (n == 0) throw FormatError("dimension must be positive");
  std::vector<std::pair<Polyball<F>, Cyclo>> parts;
  for (auto& c : need(j, "cells")) parts.push_back({ball_from(K, c, n), cyclo_from(K.p, need(c, "coef"))});
  return make_sb(K, n, parts);
}

// Distributions ------------------------------------------------------------

template <class F>
json dist_json(const Dist<F>& u) {
  json terms = json::array();
  for (auto& t : u.terms) {
    json fs = json::array();
    for (auto& f : t.f) {
      if (f.kind == FK::Ball)
        fs.push_back({{"type", "ball"}, {"center", elem_json(u.K, f.pt)}, {"radius", f.r}});
      else if (f.kind == FK::Delta)
        fs.push_back({{"type", "delta"}, {"point", elem_json(u.K, f.pt)}});
      else
        fs.push_back({{"type", "full"}});
    }
    terms.push_back({{"coef", cyclo_json(t.c)}, {"mod", vec_json(u.K, t.a)}, {"factors", fs}});
  }
  return json{{"field", field_json(u.K)}, {"n", u.n}, {"terms", terms}};
}

template <class F>
Dist<F> dist_from(const F& K, const json& j) {
  check_field(K, j);
  size_t n = static_cast<size_t>(as_long(need(j, "n")));
  if (n == 0) throw FormatError("dimension must be positive");
  Dist<F> u(K, n);
  for (auto& t : need(j, "terms")) {
    Term<F> term{cyclo_from(K.p, need(t, "coef")), t.contains("mod") ? vec_from(K, t["mod"], n) : Vec<F>(n, K.zero()), {}};
    const json& fs = need(t, "factors");
    if (!fs.is_array() || fs.size() != n) throw FormatError("a term needs one factor per coordinate");
    for (auto& f : fs) {
      std::string ty = need(f, "type").get<std::string>();
      if (ty == "ball")
        term.f.push_back(Factor<F>::ball(elem_from(K, need(f, "center")), as_long(need(f, "radius"))));
      else if (ty == "delta")
        term.f.push_back(Factor<F>::delta(elem_from(K, need(f, "point"))));
      else if (ty == "full")
        term.f.push_back(Factor<F>::full(K));
      else
        throw FormatError("unknown factor type '" + ty + "'");
    }
    u.terms.push_back(term);
  }
  return u.canon();
}

// Lambda subgroups ---------------------------------------------------------

/// "full" or "d,m[,o:u,...]" with generators given as (ord mod d):(unit code).
template <class F>
LambdaSubgroup<F> lambda_from_text(const F& K, const std::string& s) {
  if (s == "full" || s.empty()) return LambdaSubgroup<F>::full(K);
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (parts.size() < 2) throw FormatError("lambda must be 'full' or 'd,m[,o:u...]'");
  try {
    long d = std::stol(parts[0]), m = std::stol(parts[1]);
    std::vector<std::pair<long, long>> gens;
    for (size_t i = 2; i < parts.size(); ++i) {
      auto c = parts[i].find(':');
      if (c == std::string::npos) throw FormatError("generator must be ord:unit, got '" + parts[i] + "'");
      gens.push_back({std::stol(parts[i].substr(0, c)), std::stol(parts[i].substr(c + 1))});
    }
    return LambdaSubgroup<F>::make(K, d, m, gens);
  } catch (const FormatError&) {
    throw;
  } catch (const MathError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError("bad lambda '" + s + "': " + e.what());
  }
}

template <class F>
json lambda_json(const LambdaSubgroup<F>& L) {
  json H = json::array();
  for (auto& [o, u] : L.H) H.push_back({o, u});
  json G = json::array();
  for (auto& [o, u] : L.gens) G.push_back({o, u});
  return json{{"d", L.d}, {"m", L.m}, {"elements", H}, {"gens", G}};
}

// Cones --------------------------------------------------------------------

template <class F>
json region_json(const F& K, const Region<F>& R) {
  json a = json::array();
  for (auto& c : R) {
    if (c.kind == RK::Point)
      a.push_back({{"kind", "point"}, {"c", elem_json(K, c.c)}});
    else if (c.kind == RK::Ball)
      a.push_back({{"kind", "ball"}, {"c", elem_json(K, c.c)}, {"r", c.r}});
    else
      a.push_back({{"kind", "full"}});
  }
  return a;
}

template <class F>
Region<F> region_from(const F& K, const json& j) {
  Region<F> R;
  for (auto& c : j) {
    std::string k = need(c, "kind").get<std::string>();
    RCoord<F> x;
    if (k == "point") {
      x.kind = RK::Point;
      x.c = elem_from(K, need(c, "c"));
    } else if (k == "ball") {
      x.kind = RK::Ball;
      x.r = as_long(need(c, "r"));
      x.c = K.truncate(elem_from(K, need(c, "c")), x.r);
    } else if (k != "full") {
      throw FormatError("unknown region kind '" + k + "'");
    }
    R.push_back(x);
  }
  return R;
}

template <class F>
json cone_json(const LambdaCone<F>& G) {
  json cells = json::array();
  for (auto& c : G.cells) {
    json fib;
    if (c.orbit) {
      fib = {{"type", "orbit"}, {"ball", ball_json(G.K, c.P)}};
    } else {
      std::vector<bool> z(c.zero.begin(), c.zero.end());
      fib = {{"type", "linear"}, {"zero", z}};
    }
    cells.push_back({{"base", region_json(G.K, c.base)}, {"fiber", fib}});
  }
  return json{{"field", field_json(G.K)}, {"n", G.n}, {"exact", G.exact}, {"cells", cells}};
}

template <class F>
LambdaCone<F> cone_from(const F& K, const json& j) {
  check_field(K, j);
  LambdaCone<F> G(K, static_cast<size_t>(as_long(need(j, "n"))));
  if (j.contains("exact")) G.exact = j["exact"].get<bool>();
  for (auto& c : need(j, "cells")) {
    ConeCell<F> cell;
    cell.base = region_from(K, need(c, "base"));
    if (cell.base.size() != G.n) throw FormatError("cone base has the wrong dimension");
    const json& fib = need(c, "fiber");
    if (need(fib, "type").get<std::string>() == "orbit") {
      cell.orbit = true;
      cell.P = ball_from(K, need(fib, "ball"), G.n);
    } else {
      for (auto& z : need(fib, "zero")) cell.zero.push_back(z.get<bool>());
      if (cell.zero.size() != G.n) throw FormatError("cone fiber has the wrong dimension");
    }
    G.cells.push_back(cell);
  }
  return G;
}

// Verdicts and reports -----------------------------------------------------

inline json ord_json(long v) { return is_inf(v) ? json("inf") : is_inf(-v) ? json("-inf") : json(v); }

template <class F>
json verdict_json(const F& K, const SmoothnessVerdict<F>& v) {
  json j{{"verdict", verdict_name(v.tag)}, {"x0", vec_json(K, v.x0)}, {"xi0", vec_json(K, v.xi0)}, {"searched", v.searched}, {"note", v.note}};
  if (v.tag == Verdict::Smooth) {
    j["certificate"] = {{"r", v.r}, {"N", ord_json(v.N)}, {"R", v.R}};
  } else if (v.tag == Verdict::NotSmooth) {
    j["witness"] = {{"r", v.r}, {"lambda", elem_json(K, v.lambda)}, {"xi", vec_json(K, v.xi)}, {"value", cyclo_json(v.value)}};
  }
  return j;
}

template <class F>
json map_json(const AffineMap<F>& f) {
  json A = json::array();
  for (auto& r : f.A) A.push_back(vec_json(f.K, r));
  return json{{"field", field_json(f.K)}, {"A", A}, {"b", vec_json(f.K, f.b)}};
}

template <class F>
AffineMap<F> map_from(const F& K, const json& j) {
  check_field(K, j);
  std::vector<Vec<F>> A;
  for (auto& r : need(j, "A")) A.push_back(vec_from(K, r));
  Vec<F> b = j.contains("b") ? vec_from(K, j["b"]) : Vec<F>(A.size(), K.zero());
  try {
    return AffineMap<F>(K, A, b);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

inline json level_report_json(const LevelReport& rep) {
  json rows = json::array();
  for (auto& r : rep.rows)
    rows.push_back({{"eps", r.eps}, {"m", r.m}, {"mu", r.mu}, {"resolution", r.resolution}, {"cells", r.cells}, {"resolved", r.resolved}});
  json j{{"field", rep.field}, {"f", rep.f}, {"rows", rows}, {"fitted", rep.fitted}};
  if (rep.fitted) j["fit"] = {{"a", rep.a}, {"b", rep.b}, {"c", rep.c}};
  return j;
}

// cexp ASTs ----------------------------------------------------------------

inline const char* nk_name(cexp::NK k) {
  using cexp::NK;
  switch (k) {
    case NK::Num: return "num";
    case NK::Var: return "var";
    case NK::Add: return "add";
    case NK::Sub: return "sub";
    case NK::Neg: return "neg";
    case NK::Mul: return "mul";
    case NK::Div: return "div";
    case NK::Pow: return "pow";
    case NK::QPow: return "qpow";
    case NK::Ord: return "ord";
    case NK::Ac: return "ac";
    case NK::Psi: return "psi";
    case NK::Lift: return "lift";
    case NK::Sum: return "sum";
    case NK::SumRF: return "sumrf";
    case NK::Ind: return "ind";
    case NK::Cmp: return "cmp";
    case NK::And: return "and";
    case NK::Or: return "or";
    case NK::Not: return "not";
    case NK::True: return "true";
    case NK::False: return "false";
  }
  return "?";
}

inline json ast_json(const cexp::NodeP& n) {
  using cexp::NK;
  json j{{"node", nk_name(n->k)}};
  if (n->k == NK::Num) j["value"] = n->num.get_str();
  if (n->k == NK::Var || n->k == NK::Sum || n->k == NK::SumRF) j["name"] = n->name;
  if (n->k == NK::Ac || n->k == NK::SumRF) j["m"] = n->m;
  if (n->k == NK::Cmp) j["op"] = cexp::op_str(n->op);
  if (!n->kids.empty()) {
    json a = json::array();
    for (auto& k : n->kids) a.push_back(ast_json(k));
    j["args"] = a;
  }
  return j;
}

/// Inverse of ast_json; arities are checked here, sorts by typecheck.
inline cexp::NodeP ast_from(const json& j) {
  using cexp::NK;
  static const std::map<std::string, std::pair<NK, int>> kinds{
      {"num", {NK::Num, 0}},   {"var", {NK::Var, 0}},     {"add", {NK::Add, 2}},   {"sub", {NK::Sub, 2}},
      {"neg", {NK::Neg, 1}},   {"mul", {NK::Mul, 2}},     {"div", {NK::Div, 2}},   {"pow", {NK::Pow, 2}},
      {"qpow", {NK::QPow, 1}}, {"ord", {NK::Ord, 1}},     {"ac", {NK::Ac, 1}},     {"psi", {NK::Psi, 1}},
      {"lift", {NK::Lift, 1}}, {"sum", {NK::Sum, 3}},     {"sumrf", {NK::SumRF, 1}}, {"ind", {NK::Ind, 1}},
      {"cmp", {NK::Cmp, 2}},   {"and", {NK::And, 2}},     {"or", {NK::Or, 2}},     {"not", {NK::Not, 1}},
      {"true", {NK::True, 0}}, {"false", {NK::False, 0}}};
  static const std::map<std::string, cexp::Op> ops{{"==", cexp::Op::Eq}, {"!=", cexp::Op::Ne}, {"<", cexp::Op::Lt},
                                                   {"<=", cexp::Op::Le}, {">", cexp::Op::Gt},  {">=", cexp::Op::Ge}};
  try {
    auto it = kinds.find(need(j, "node").get<std::string>());
    if (it == kinds.end()) throw FormatError("unknown AST node " + j["node"].dump());
    auto n = std::make_shared<cexp::Node>();
    n->k = it->second.first;
    if (j.contains("args"))
      for (auto& a : j["args"]) n->kids.push_back(ast_from(a));
    if (static_cast<int>(n->kids.size()) != it->second.second) throw FormatError(std::string("wrong arity for ") + it->first);
    if (n->k == NK::Num) {
      n->num = mpz_class(need(j, "value").get<std::string>());
      if (n->num < 0) throw FormatError("numerals are non-negative");
    }
    if (n->k == NK::Var || n->k == NK::Sum || n->k == NK::SumRF) n->name = need(j, "name").get<std::string>();
    if (n->k == NK::Ac || n->k == NK::SumRF) n->m = as_long(need(j, "m"));
    if (n->k == NK::Cmp) {
      auto o = ops.find(need(j, "op").get<std::string>());
      if (o == ops.end()) throw FormatError("unknown comparison " + j["op"].dump());
      n->op = o->second;
    }
    if (n->k == NK::Pow && n->kids[1]->k != NK::Num) throw FormatError("exponent must be a numeral");
    return n;
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

}  // namespace umla::io

#endif
