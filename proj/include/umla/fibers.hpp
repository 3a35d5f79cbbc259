#ifndef UMLA_FIBERS_HPP
#define UMLA_FIBERS_HPP

#include <set>
#include <thread>

#include "poly.hpp"
#include "schwartz.hpp"

namespace umla {

/// Polynomial in one variable over Z; c[i] is the coefficient of x^i.
struct ZPoly {
  std::vector<mpz_class> c;

  ZPoly() = default;
  explicit ZPoly(std::vector<mpz_class> v) : c(std::move(v)) { trim(); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }

  ZPoly deriv() const {
    std::vector<mpz_class> d;
    for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<unsigned long>(i));
    return ZPoly(d);
  }

  static ZPoly parse(const std::string& src, const std::string& var = "x") {
    Qp K(2);
    auto P = parse_poly(K, src, {var});
    std::vector<mpz_class> v;
    for (auto& [e, co] : P.t) {
      if (co.get_den() != 1) throw std::invalid_argument("polynomial must have integer coefficients: " + src);
      if (v.size() <= static_cast<size_t>(e[0])) v.resize(static_cast<size_t>(e[0]) + 1, 0);
      v[static_cast<size_t>(e[0])] = co.get_num();
    }
    return ZPoly(v);
  }

  std::string str(const std::string& var = "x") const {
    if (c.empty()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
      const mpz_class& a = c[static_cast<size_t>(i)];
      if (a == 0) continue;
      mpz_class m = abs(a);
      if (s.empty())
        s += a < 0 ? "-" : "";
      else
        s += a < 0 ? " - " : " + ";
      bool unit = m == 1 && i > 0;
      if (!unit) s += m.get_str();
      if (i > 0) s += (unit ? "" : "*") + var + (i > 1 ? "^" + std::to_string(i) : "");
    }
    return s;
  }
};

template <class F>
typename F::elem from_mpz(const F& K, const mpz_class& z) {
  if constexpr (std::is_same_v<typename F::elem, mpq_class>) {
    return mpq_class(z);
  } else {
    mpz_class r = z % static_cast<unsigned long>(K.p);
    return K.from_int(r.get_si());
  }
}

template <class F>
Vec<F> to_field(const F& K, const ZPoly& f) {
  Vec<F> out;
  for (auto& a : f.c) out.push_back(from_mpz(K, a));
  while (!out.empty() && out.back() == K.zero()) out.pop_back();
  return out;
}

template <class F>
typename F::elem poly_eval(const F& K, const Vec<F>& g, const typename F::elem& x) {
  typename F::elem r = K.zero();
  for (size_t i = g.size(); i-- > 0;) r = r * x + g[i];
  return r;
}

/// Coefficients b_i of z -> g(a + pi^j z).
template <class F>
Vec<F> taylor_at(const F& K, const Vec<F>& g, const typename F::elem& a, long j) {
  using E = typename F::elem;
  const E s = K.unif_pow(j);
  Vec<F> r;
  for (size_t i = g.size(); i-- > 0;) {
    Vec<F> nr(r.size() + 1, K.zero());
    for (size_t k = 0; k < r.size(); ++k) {
      nr[k] = nr[k] + a * r[k];
      nr[k + 1] = nr[k + 1] + s * r[k];
    }
    nr[0] = nr[0] + g[i];
    r = std::move(nr);
  }
  return r;
}

/// Number of zeros in O (with multiplicity, over an algebraic closure) of
/// sum b_i z^i: the largest index attaining min ord b_i.
template <class F>
int weierstrass_degree(const F& K, const Vec<F>& b) {
  long best = kInf;
  int at = -1;
  for (size_t i = 0; i < b.size(); ++i) {
    long o = K.ord(b[i]);
    if (is_inf(o)) continue;
    if (o <= best) {
      best = o;
      at = static_cast<int>(i);
    }
  }
  if (at < 0) throw std::invalid_argument("zero polynomial");
  return at;
}

// ---------------------------------------------------------------------------
// Root trees
// ---------------------------------------------------------------------------

template <class F>
struct RootCell {
  typename F::elem center;
  long level = 0;
  long fprime_ord = 0;  // ord g' on the whole cell
  size_t origin = 0;    // index of the start cell
};

template <class F>
struct CellRef {
  typename F::elem center;
  long level = 0;
};

template <class F>
struct RootTree {
  std::vector<RootCell<F>> roots;
  std::vector<CellRef<F>> clusters;
  long stable = -kInf;  // perturbing g(0) by pi^s, s >= stable, changes no decision
  long nodes = 0;
};

/// Exhaustive cell search: a cell is discarded (no zero), certified (exactly
/// one simple zero) or split, by the Weierstrass degree of the shifted
/// polynomial. Cells still ambiguous at max_depth are clusters.
template <class F>
RootTree<F> root_search(const F& K, const Vec<F>& g, const std::vector<CellRef<F>>& start, long max_depth) {
  if (g.empty()) throw std::invalid_argument("root search for the zero polynomial");
  RootTree<F> T;
  struct Job {
    typename F::elem a;
    long j;
    size_t origin;
  };
  std::vector<Job> st;
  for (size_t i = start.size(); i-- > 0;) st.push_back({start[i].center, start[i].level, i});
  while (!st.empty()) {
    Job J = st.back();
    st.pop_back();
    ++T.nodes;
    Vec<F> b = taylor_at(K, g, J.a, J.j);
    int w = weierstrass_degree(K, b);
    if (w == 0) {
      T.stable = std::max(T.stable, K.ord(b[0]) + 1);
    } else if (w == 1) {
      long o1 = K.ord(b[1]);
      T.roots.push_back({J.a, J.j, o1 - J.j, J.origin});
      T.stable = std::max(T.stable, o1);
    } else if (J.j >= max_depth) {
      T.clusters.push_back({J.a, J.j});
      T.stable = kInf;
    } else {
      for (long d = static_cast<long>(K.p) - 1; d >= 0; --d) st.push_back({J.a + K.lift(d) * K.unif_pow(J.j), J.j + 1, J.origin});
    }
  }
  return T;
}

/// Narrows a certified cell to level k by choosing the unique child that
/// keeps the zero.
template <class F>
typename F::elem refine_root(const F& K, const Vec<F>& g, const RootCell<F>& c, long k) {
  typename F::elem a = c.center;
  for (long j = c.level; j < k; ++j) {
    bool found = false;
    for (long d = 0; d < static_cast<long>(K.p) && !found; ++d) {
      typename F::elem ch = a + K.lift(d) * K.unif_pow(j);
      if (weierstrass_degree(K, taylor_at(K, g, ch, j + 1)) == 1) {
        a = ch;
        found = true;
      }
    }
    if (!found) throw std::logic_error("certified cell lost its zero");
  }
  return K.truncate(a, k);
}

template <class F>
std::string cell_text(const F& K, const typename F::elem& c, long r) {
  return "B_" + std::to_string(r) + "(" + K.str(c) + ")";
}

/// Zeros of g in O to precision pi^k (each listed once per zero).
template <class F>
std::vector<typename F::elem> padic_roots(const F& K, const ZPoly& g, long k, long extra_depth = 16) {
  Vec<F> gk = to_field(K, g);
  if (gk.empty()) throw std::invalid_argument("padic_roots needs a nonzero polynomial");
  auto T = root_search(K, gk, {{K.zero(), 0}}, k + extra_depth);
  if (!T.clusters.empty())
    throw MathError("ClusterUnresolved", "zeros not separated in " + cell_text(K, T.clusters[0].center, T.clusters[0].level));
  std::vector<typename F::elem> out;
  for (auto& c : T.roots) out.push_back(c.level >= k ? K.truncate(c.center, k) : refine_root(K, gk, c, k));
  return out;
}

// ---------------------------------------------------------------------------
// Discriminant
// ---------------------------------------------------------------------------

/// Determinant over Q by elimination.
inline mpq_class det_q(std::vector<std::vector<mpq_class>> M) {
  const size_t n = M.size();
  mpq_class d = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && M[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(M[piv], M[c]);
      d = -d;
    }
    d *= M[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (M[r][c] == 0) continue;
      mpq_class f = M[r][c] / M[c][c];
      for (size_t k = c; k < n; ++k) M[r][k] -= f * M[c][k];
    }
  }
  return d;
}

/// Sylvester resultant of a (degree m) and b (degree n), coefficients low to high.
inline mpq_class resultant(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
  const size_t m = a.size() - 1, n = b.size() - 1, N = m + n;
  if (N == 0) return 1;
  std::vector<std::vector<mpq_class>> S(N, std::vector<mpq_class>(N, 0));
  for (size_t r = 0; r < n; ++r)
    for (size_t i = 0; i <= m; ++i) S[r][r + i] = a[m - i];
  for (size_t r = 0; r < m; ++r)
    for (size_t i = 0; i <= n; ++i) S[n + r][r + i] = b[n - i];
  return det_q(S);
}

/// D(y) = Res_x(f(x) - y, f'(x)); its zeros are the critical values of f.
inline ZPoly disc_poly(const ZPoly& f) {
  if (f.degree() < 1) throw std::invalid_argument("discriminant needs degree at least 1");
  const int n = f.degree();
  ZPoly fp = f.deriv();
  std::vector<mpq_class> b(fp.c.begin(), fp.c.end());
  // D has degree at most n - 1 in y: interpolate through y = 0..n-1.
  std::vector<mpq_class> ys, vs;
  for (int t = 0; t < n; ++t) {
    std::vector<mpq_class> a(f.c.begin(), f.c.end());
    a[0] -= t;
    ys.push_back(t);
    vs.push_back(resultant(a, b));
  }
  std::vector<mpq_class> coef(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    std::vector<mpq_class> basis{1};
    mpq_class den = 1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<mpq_class> nb(basis.size() + 1, 0);
      for (size_t k = 0; k < basis.size(); ++k) {
        nb[k] -= basis[k] * ys[static_cast<size_t>(j)];
        nb[k + 1] += basis[k];
      }
      basis = nb;
      den *= ys[static_cast<size_t>(i)] - ys[static_cast<size_t>(j)];
    }
    for (size_t k = 0; k < basis.size(); ++k) coef[k] += vs[static_cast<size_t>(i)] * basis[k] / den;
  }
  std::vector<mpz_class> out;
  for (auto& c : coef) {
    if (c.get_den() != 1) throw std::logic_error("non-integral discriminant coefficient");
    out.push_back(c.get_num());
  }
  return ZPoly(out);
}

// ---------------------------------------------------------------------------
// Fiber integration
// ---------------------------------------------------------------------------

template <class F>
struct FiberValue {
  Cyclo value;
  std::vector<RootCell<F>> points;
  long stable = -kInf;  // the value is constant on B_stable(y)
};

template <class F>
struct FiberProblem {
  F K;
  ZPoly f;
  Vec<F> fk;
  ZPoly disc;
  Vec<F> disck;  // empty when every fiber is singular (inseparable f)

  FiberProblem(F k, ZPoly poly) : K(std::move(k)), f(std::move(poly)) {
    fk = to_field(K, f);
    if (static_cast<int>(fk.size()) - 1 != f.degree()) throw std::invalid_argument("leading coefficient vanishes in the field");
    disc = disc_poly(f);
    disck = to_field(K, disc);
  }

  bool on_discriminant(const typename F::elem& y) const { return disck.empty() || poly_eval(K, disck, y) == K.zero(); }
};

/// f_!(phi)(y) = sum over f(x) = y of phi(x) |f'(x)|^-1.
template <class F>
FiberValue<F> fiber_integrate(const FiberProblem<F>& P, const SB<F>& phi, const typename F::elem& y, long max_depth_extra = 64) {
  const F& K = P.K;
  if (P.on_discriminant(y)) throw MathError("OnDiscriminant", "y = " + K.str(y) + " is a critical value");
  FiberValue<F> out;
  out.value = Cyclo(K.p, 0);
  if (phi.is_zero()) return out;
  Vec<F> g = P.fk;
  g[0] = g[0] - y;
  std::vector<CellRef<F>> start;
  std::vector<Cyclo> vals;
  for (auto& [c, v] : phi.cells) {
    start.push_back({c[0], phi.aplus});
    vals.push_back(v);
  }
  auto T = root_search(K, g, start, phi.aplus + max_depth_extra);
  if (!T.clusters.empty())
    throw MathError("ClusterUnresolved", "fiber over " + K.str(y) + " not separated in " + cell_text(K, T.clusters[0].center, T.clusters[0].level));
  for (auto& r : T.roots) out.value += vals[r.origin] * Cyclo::qint(K.p, r.fprime_ord);
  out.points = T.roots;
  out.stable = T.stable;
  return out;
}

/// f(B_amin(0)) lies in B_R(0).
template <class F>
long image_radius(const FiberProblem<F>& P, long amin) {
  long R = kInf;
  for (auto& b : taylor_at(P.K, P.fk, P.K.zero(), amin)) R = std::min(R, P.K.ord(b));
  return R;
}

/// Exact integral of phi * (g o f) by refining until f maps each cell into one
/// level cell of g.
template <class F>
Cyclo pullback_integral(const FiberProblem<F>& P, const SB<F>& phi, const SB<F>& g) {
  const F& K = P.K;
  Cyclo s(K.p, 0);
  struct Job {
    typename F::elem a;
    long j;
    Cyclo v;
  };
  std::vector<Job> st;
  for (auto& [c, v] : phi.cells) st.push_back({c[0], phi.aplus, v});
  while (!st.empty()) {
    Job J = st.back();
    st.pop_back();
    Vec<F> b = taylor_at(K, P.fk, J.a, J.j);
    long o = kInf;
    for (size_t i = 1; i < b.size(); ++i) o = std::min(o, K.ord(b[i]));
    if (o >= g.aplus) {
      s += J.v * g.at({b[0]}) * Cyclo::qint(K.p, -J.j);
      continue;
    }
    for (long d = 0; d < static_cast<long>(K.p); ++d) st.push_back({J.a + K.lift(d) * K.unif_pow(J.j), J.j + 1, J.v});
  }
  return s;
}

/// Exact integral of f_!(phi) * g, refining y-cells until the fiber value is
/// certified constant. g must vanish near the discriminant.
template <class F>
Cyclo pushforward_integral(const FiberProblem<F>& P, const SB<F>& phi, const SB<F>& g, long max_level = 200) {
  const F& K = P.K;
  Cyclo s(K.p, 0);
  struct Job {
    typename F::elem y;
    long j;
    Cyclo v;
  };
  std::vector<Job> st;
  for (auto& [c, v] : g.cells) st.push_back({c[0], g.aplus, v});
  while (!st.empty()) {
    Job J = st.back();
    st.pop_back();
    if (!P.on_discriminant(J.y)) {
      auto fv = fiber_integrate(P, phi, J.y);
      if (fv.stable <= J.j) {
        s += J.v * fv.value * Cyclo::qint(K.p, -J.j);
        continue;
      }
    }
    if (J.j >= max_level) throw MathError("OnDiscriminant", "test function meets the discriminant near " + K.str(J.y));
    for (long d = 0; d < static_cast<long>(K.p); ++d) st.push_back({J.y + K.lift(d) * K.unif_pow(J.j), J.j + 1, J.v});
  }
  return s;
}

// ---------------------------------------------------------------------------
// Local-constancy levels against distance to the discriminant
// ---------------------------------------------------------------------------

/// Level-m probe: psi(pi^(1-m) x) on O for m >= 1, and 1_O for m = 0.
template <class F>
SB<F> level_probe(const F& K, long m) {
  SB<F> one = indicator(K, Polyball<F>::equal(K, Vec<F>{K.zero()}, 0));
  if (m == 0) return one;
  return modulate(one, Vec<F>{K.unif_pow(1 - m)});
}

struct LevelEntry {
  long eps = 0, m = 0;
  long mu = -1;          // minimal constancy level on the region
  long resolution = 0;   // level of the scanned y-cells
  long cells = 0;
  bool resolved = false;
};

struct LevelReport {
  std::string field, f;
  std::vector<LevelEntry> rows;
  bool fitted = false;
  long a = 0, b = 0, c = 0;
};

/// Level-L cells (by truncation) which may contain a critical value.
template <class F>
std::set<typename F::elem> discriminant_cells(const FiberProblem<F>& P, long R, long L) {
  const F& K = P.K;
  std::set<typename F::elem> out;
  if (P.disck.empty()) return out;
  if (P.disck.size() == 1) return out;  // nonzero constant
  auto T = root_search(K, P.disck, {{K.zero(), R}}, L);
  for (auto& c : T.clusters) out.insert(K.truncate(c.center, L));
  for (auto& r : T.roots) out.insert(r.level >= L ? K.truncate(r.center, L) : refine_root(K, P.disck, r, L));
  return out;
}

/// Scans the y-cells of B_R(0) at valuative distance <= eps from the
/// critical values. The resolution grows until every scanned fiber value is
/// certified constant on its cell, so the returned mu is exact on the region.
template <class F>
LevelEntry measure_level(const FiberProblem<F>& P, const SB<F>& phi, long eps, long max_resolution = 14, int jobs = 1) {
  const F& K = P.K;
  LevelEntry E;
  E.eps = eps;
  long R = image_radius(P, phi.amin);
  if (P.disck.empty()) return E;
  auto bad = discriminant_cells(P, R, eps + 1);
  long W = std::max(eps + 1, R);
  std::vector<typename F::elem> ys;
  std::vector<Cyclo> vals;
  while (true) {
    ys.clear();
    for (auto& y : cells_1d(K, R, W))
      if (!bad.count(K.truncate(y, eps + 1))) ys.push_back(y);
    vals.assign(ys.size(), Cyclo(K.p, 0));
    std::vector<long> st(ys.size(), -kInf);
    auto work = [&](size_t lo, size_t step) {
      for (size_t i = lo; i < ys.size(); i += step) {
        auto fv = fiber_integrate(P, phi, ys[i]);
        vals[i] = fv.value;
        st[i] = fv.stable;
      }
    };
    if (jobs <= 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < jobs; ++t) pool.emplace_back(work, static_cast<size_t>(t), static_cast<size_t>(jobs));
      for (auto& th : pool) th.join();
    }
    long need = W;
    for (long s : st) need = std::max(need, s);
    if (need <= W) break;
    if (need > max_resolution) {
      E.resolution = W;
      E.cells = static_cast<long>(ys.size());
      return E;
    }
    W = need;
  }
  E.resolution = W;
  E.cells = static_cast<long>(ys.size());
  E.resolved = true;
  for (long l = R; l <= W; ++l) {
    std::map<typename F::elem, Cyclo> seen;
    bool ok = true;
    for (size_t i = 0; i < ys.size() && ok; ++i) {
      auto key = K.truncate(ys[i], l);
      auto it = seen.find(key);
      if (it == seen.end())
        seen.emplace(key, vals[i]);
      else
        ok = it->second == vals[i];
    }
    if (ok) {
      E.mu = l;
      break;
    }
  }
  return E;
}

/// Smallest dominating mu <= a eps + b m + c with 0 <= a, b, c <= cap,
/// preferring the tightest value at the far corner of the grid.
inline void fit_affine(LevelReport& rep, long cap = 2) {
  rep.fitted = false;
  long best = kInf, emax = 0, mmax = 0;
  for (auto& r : rep.rows) {
    emax = std::max(emax, r.eps);
    mmax = std::max(mmax, r.m);
  }
  for (long a = 0; a <= cap; ++a)
    for (long b = 0; b <= cap; ++b)
      for (long c = 0; c <= cap; ++c) {
        bool ok = true;
        for (auto& r : rep.rows) ok = ok && r.resolved && r.mu <= a * r.eps + b * r.m + c;
        long corner = a * emax + b * mmax + c;
        if (ok && corner < best) {
          best = corner;
          rep.a = a;
          rep.b = b;
          rep.c = c;
          rep.fitted = true;
        }
      }
}

template <class F>
LevelReport level_measure(const FiberProblem<F>& P, const std::vector<long>& eps, const std::vector<long>& ms, long cap = 2,
                          long max_resolution = 14, int jobs = 1) {
  LevelReport rep;
  rep.field = P.K.name();
  rep.f = P.f.str();
  for (long m : ms) {
    auto phi = level_probe(P.K, m);
    for (long e : eps) {
      auto row = measure_level(P, phi, e, max_resolution, jobs);
      row.m = m;
      rep.rows.push_back(row);
    }
  }
  fit_affine(rep, cap);
  return rep;
}

}  // namespace umla

#endif
