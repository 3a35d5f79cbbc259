#ifndef UMLA_POLY_HPP
#define UMLA_POLY_HPP

#include <cctype>

#include "localfield.hpp"

namespace umla {

/// Multivariate polynomial with coefficients in the field.
template <class F>
struct MPoly {
  using E = typename F::elem;
  size_t nv = 0;
  std::map<std::vector<int>, E> t;

  MPoly() = default;
  explicit MPoly(size_t n) : nv(n) {}

  static MPoly constant(const F& K, size_t n, const E& c) {
    MPoly r(n);
    if (!(c == K.zero())) r.t[std::vector<int>(n, 0)] = c;
    return r;
  }
  static MPoly var(const F& K, size_t n, size_t i) {
    MPoly r(n);
    std::vector<int> e(n, 0);
    e[i] = 1;
    r.t[e] = K.one();
    return r;
  }

  int degree() const {
    int d = 0;
    for (auto& [e, c] : t) {
      int s = 0;
      for (int x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  void add_term(const F& K, const std::vector<int>& e, const E& c) {
    E s = t.count(e) ? E(t[e] + c) : E(c);
    if (s == K.zero())
      t.erase(e);
    else
      t[e] = s;
  }

  MPoly plus(const F& K, const MPoly& o) const {
    MPoly r = *this;
    for (auto& [e, c] : o.t) r.add_term(K, e, c);
    return r;
  }
  MPoly times(const F& K, const MPoly& o) const {
    MPoly r(nv);
    for (auto& [e1, c1] : t)
      for (auto& [e2, c2] : o.t) {
        std::vector<int> e(nv);
        for (size_t i = 0; i < nv; ++i) e[i] = e1[i] + e2[i];
        r.add_term(K, e, c1 * c2);
      }
    return r;
  }
  MPoly scaled(const F& K, const E& s) const {
    MPoly r(nv);
    for (auto& [e, c] : t) r.add_term(K, e, c * s);
    return r;
  }

  E eval(const F& K, const Vec<F>& x) const {
    E s = K.zero();
    for (auto& [e, c] : t) {
      E m = c;
      for (size_t i = 0; i < nv; ++i)
        for (int k = 0; k < e[i]; ++k) m = m * x[i];
      s = s + m;
    }
    return s;
  }

  /// Substitute variable i -> sub[i], each sub[i] a polynomial in `out_nv` variables.
  MPoly compose(const F& K, const std::vector<MPoly>& sub, size_t out_nv) const {
    MPoly r(out_nv);
    std::vector<std::vector<MPoly>> pw(nv);
    for (auto& [e, c] : t) {
      MPoly m = constant(K, out_nv, c);
      for (size_t i = 0; i < nv; ++i) {
        if (pw[i].empty()) pw[i].push_back(constant(K, out_nv, K.one()));
        while (static_cast<int>(pw[i].size()) <= e[i]) pw[i].push_back(pw[i].back().times(K, sub[i]));
        m = m.times(K, pw[i][e[i]]);
      }
      r = r.plus(K, m);
    }
    return r;
  }

  /// Hasse derivative-free partial derivative (characteristic-safe only for
  /// first order).
  MPoly deriv(const F& K, size_t i) const {
    MPoly r(nv);
    for (auto& [e, c] : t) {
      if (e[i] == 0) continue;
      std::vector<int> f = e;
      f[i] -= 1;
      r.add_term(K, f, c * K.from_int(e[i]));
    }
    return r;
  }

  /// Lower bound for ord over the polyball sum_i B_{rad[i]}: min over
  /// monomials of ord(c) + sum e_i rad_i. Constant term included.
  long ord_lower(const F& K, const std::vector<long>& rad) const {
    long best = kInf;
    for (auto& [e, c] : t) {
      long v = K.ord(c);
      for (size_t i = 0; i < nv; ++i) v += e[i] * rad[i];
      best = std::min(best, v);
    }
    return best;
  }

  E const_term(const F& K) const {
    auto it = t.find(std::vector<int>(nv, 0));
    return it == t.end() ? K.zero() : it->second;
  }
  MPoly without_const() const {
    MPoly r = *this;
    r.t.erase(std::vector<int>(nv, 0));
    return r;
  }
};

/// Parses sums of products such as "x1*e1 + 3*x1^2 - x2/2" over the named
/// variables. Coefficients go through F::parse.
template <class F>
MPoly<F> parse_poly(const F& K, const std::string& src, const std::vector<std::string>& names) {
  size_t i = 0;
  const size_t nv = names.size();
  auto skip = [&] {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
  };
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("polynomial parse error at offset " + std::to_string(i) + ": " + why);
  };
  std::function<MPoly<F>()> expr, term, factor;
  factor = [&]() -> MPoly<F> {
    skip();
    if (i >= src.size()) fail("unexpected end");
    MPoly<F> base;
    if (src[i] == '(') {
      ++i;
      base = expr();
      skip();
      if (i >= src.size() || src[i] != ')') fail("expected )");
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(src[i]))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      base = MPoly<F>::constant(K, nv, K.from_int(std::stol(src.substr(i, j - i))));
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(src[i]))) {
      size_t j = i;
      while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
      std::string nm = src.substr(i, j - i);
      auto it = std::find(names.begin(), names.end(), nm);
      if (it == names.end()) fail("unknown variable " + nm);
      base = MPoly<F>::var(K, nv, static_cast<size_t>(it - names.begin()));
      i = j;
    } else {
      fail(std::string("unexpected '") + src[i] + "'");
    }
    skip();
    if (i < src.size() && src[i] == '^') {
      ++i;
      skip();
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j == i) fail("expected exponent");
      int k = std::stoi(src.substr(i, j - i));
      i = j;
      MPoly<F> r = MPoly<F>::constant(K, nv, K.one());
      for (int s = 0; s < k; ++s) r = r.times(K, base);
      base = r;
    }
    return base;
  };
  term = [&]() -> MPoly<F> {
    MPoly<F> r = factor();
    while (true) {
      skip();
      if (i < src.size() && src[i] == '*') {
        ++i;
        r = r.times(K, factor());
      } else if (i < src.size() && src[i] == '/') {
        ++i;
        MPoly<F> d = factor();
        if (d.degree() != 0 || d.t.empty()) fail("division by a non-constant");
        r = r.scaled(K, K.inv(d.const_term(K)));
      } else {
        return r;
      }
    }
  };
  expr = [&]() -> MPoly<F> {
    skip();
    bool neg = false;
    if (i < src.size() && (src[i] == '-' || src[i] == '+')) neg = src[i++] == '-';
    MPoly<F> r = term();
    if (neg) r = r.scaled(K, K.from_int(-1));
    while (true) {
      skip();
      if (i < src.size() && (src[i] == '+' || src[i] == '-')) {
        bool minus = src[i++] == '-';
        MPoly<F> s = term();
        r = r.plus(K, minus ? s.scaled(K, K.from_int(-1)) : s);
      } else {
        return r;
      }
    }
  };
  MPoly<F> r = expr();
  skip();
  if (i != src.size()) fail("trailing input");
  r.nv = nv;
  return r;
}

}  // namespace umla

#endif
