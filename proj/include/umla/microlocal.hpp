#ifndef UMLA_MICROLOCAL_HPP
#define UMLA_MICROLOCAL_HPP

#include <random>
#include <set>

#include "distribution.hpp"

namespace umla {

inline long floor_mod(long a, long d) {
  long r = a % d;
  return r < 0 ? r + d : r;
}

// ---------------------------------------------------------------------------
// Lambda subgroups.
// ---------------------------------------------------------------------------

/// Open finite-index subgroup of K^x cut out by (ord mod d, ac_m) in H.
template <class F>
struct LambdaSubgroup {
  using E = typename F::elem;
  F K;
  long d = 1, m = 1;
  std::set<std::pair<long, long>> H;
  std::vector<std::pair<long, long>> gens;

  LambdaSubgroup(F k) : K(std::move(k)) {}

  /// Subgroup generated by the given (ord mod d, residue) pairs.
  static LambdaSubgroup make(const F& K, long d, long m, std::vector<std::pair<long, long>> gens) {
    LambdaSubgroup L(K);
    L.d = d;
    L.m = m;
    L.check_params();
    for (auto& g : gens) {
      g.first = floor_mod(g.first, d);
      L.check_unit(g.second);
    }
    L.gens = gens;
    L.H.insert({0, 1});
    std::vector<std::pair<long, long>> todo{{0, 1}};
    while (!todo.empty()) {
      auto h = todo.back();
      todo.pop_back();
      for (auto& g : gens) {
        std::pair<long, long> x{(h.first + g.first) % d, K.res_mul(h.second, g.second, m)};
        if (L.H.insert(x).second) todo.push_back(x);
      }
    }
    return L;
  }

  /// Subgroup given by its full element list; rejects sets not closed under
  /// multiplication.
  static LambdaSubgroup from_set(const F& K, long d, long m, const std::set<std::pair<long, long>>& S) {
    LambdaSubgroup L(K);
    L.d = d;
    L.m = m;
    L.check_params();
    if (!S.count({0, 1})) throw MathError("LambdaNotClosed", "identity missing from H");
    for (auto& a : S) {
      L.check_unit(a.second);
      if (a.first < 0 || a.first >= d) throw MathError("LambdaNotClosed", "ord class out of range");
      for (auto& b : S)
        if (!S.count({(a.first + b.first) % d, K.res_mul(a.second, b.second, m)}))
          throw MathError("LambdaNotClosed", "H not closed under multiplication");
    }
    L.H = S;
    L.gens.assign(S.begin(), S.end());
    return L;
  }

  static LambdaSubgroup full(const F& K) {
    std::vector<std::pair<long, long>> g;
    for (unsigned long u = 1; u < K.p; ++u) g.push_back({0, static_cast<long>(u)});
    g.push_back({0, 1});
    return make(K, 1, 1, g);
  }

  long unit_count() const { return static_cast<long>((K.p - 1) * ipow(K.p, m - 1)); }
  long index() const { return d * unit_count() / static_cast<long>(H.size()); }

  bool contains(const E& x) const {
    if (x == K.zero()) return false;
    return H.count({floor_mod(K.ord(x), d), K.ac(x, m)}) > 0;
  }

  /// Representatives of Lambda / (1 + p^m O) at valuation e.
  std::vector<E> reps(long e) const {
    std::vector<E> out;
    for (auto& [o, u] : H)
      if (o == floor_mod(e, d)) out.push_back(K.unif_pow(e) * K.lift(u));
    return out;
  }

  long min_pos_ord() const {
    for (long e = 1; e <= d; ++e)
      if (!reps(e).empty()) return e;
    return d;
  }

  /// Element of minimal positive ord with the smallest residue code.
  E min_pos_element() const { return reps(min_pos_ord()).front(); }

  std::vector<E> generators() const {
    std::vector<E> out;
    for (auto& [o, u] : gens) out.push_back(K.unif_pow(o) * K.lift(u));
    out.push_back(min_pos_element());
    return out;
  }

  std::string str() const {
    std::string s = std::to_string(d) + "," + std::to_string(m);
    for (auto& [o, u] : gens) s += "," + std::to_string(o) + ":" + std::to_string(u);
    return s;
  }

 private:
  void check_params() const {
    if (d < 1 || m < 1) throw MathError("BadLambda", "need d >= 1 and m >= 1");
  }
  void check_unit(long u) const {
    if (u <= 0 || u >= ipow(K.p, m) || u % static_cast<long>(K.p) == 0)
      throw MathError("BadLambda", "residue " + std::to_string(u) + " is not a unit mod p^m");
  }
};

// ---------------------------------------------------------------------------
// Cones.
// ---------------------------------------------------------------------------

/// base x fiber. A linear fiber is {xi : xi_i = 0 where zero[i]} minus 0; an
/// orbit fiber is Lambda * P with P a polyball avoiding 0.
template <class F>
struct ConeCell {
  Region<F> base;
  bool orbit = false;
  std::vector<bool> zero;
  Polyball<F> P;
};

template <class F>
struct LambdaCone {
  F K;
  size_t n = 1;
  std::vector<ConeCell<F>> cells;
  /// False when some base over-approximates (unbounded support pieces).
  bool exact = true;

  LambdaCone(F k, size_t dim) : K(std::move(k)), n(dim) {}
};

template <class F>
bool fiber_contains(const F& K, const LambdaSubgroup<F>& L, const ConeCell<F>& c, const Vec<F>& xi) {
  if (ord_vec(K, xi) >= kInf) return false;
  if (!c.orbit) {
    for (size_t i = 0; i < xi.size(); ++i)
      if (c.zero[i] && !(xi[i] == K.zero())) return false;
    return true;
  }
  size_t j = 0;
  while (j < c.P.dim() && K.ord(c.P.c[j]) >= c.P.r[j]) ++j;
  if (xi[j] == K.zero()) return false;
  long e = K.ord(xi[j]) - K.ord(c.P.c[j]);
  // Lambda P = union of lam (1 + p^m z) P; z matters only modulo the
  // precision of P relative to its centers.
  long prec = L.m;
  for (size_t i = 0; i < c.P.dim(); ++i) {
    long o = K.ord(c.P.c[i]);
    if (o < c.P.r[i]) prec = std::max(prec, c.P.r[i] - o);
  }
  auto zs = cells_1d(K, 0, prec - L.m);
  for (auto& lam0 : L.reps(e))
    for (auto& z : zs) {
      typename F::elem lam = lam0 * (K.one() + K.unif_pow(L.m) * z);
      bool in = true;
      for (size_t i = 0; i < xi.size() && in; ++i)
        if (K.ord(xi[i] - lam * c.P.c[i]) < c.P.r[i] + e) in = false;
      if (in) return true;
    }
  return false;
}

template <class F>
bool cone_contains(const LambdaCone<F>& G, const LambdaSubgroup<F>& L, const Vec<F>& x, const Vec<F>& xi) {
  for (auto& c : G.cells)
    if (region_contains(G.K, c.base, x) && fiber_contains(G.K, L, c, xi)) return true;
  return false;
}

template <class F>
bool coord_meets(const F& K, const RCoord<F>& a, const RCoord<F>& b) {
  if (a.kind == RK::Full || b.kind == RK::Full) return true;
  if (a.kind == RK::Point && b.kind == RK::Point) return a.c == b.c;
  if (a.kind == RK::Point) return K.ord(a.c - b.c) >= b.r;
  if (b.kind == RK::Point) return K.ord(b.c - a.c) >= a.r;
  return K.ord(a.c - b.c) >= std::min(a.r, b.r);
}

/// a inside b.
template <class F>
bool coord_within(const F& K, const RCoord<F>& a, const RCoord<F>& b) {
  if (b.kind == RK::Full) return true;
  if (a.kind == RK::Full) return false;
  if (b.kind == RK::Point) return a.kind == RK::Point && a.c == b.c;
  if (a.kind == RK::Point) return K.ord(a.c - b.c) >= b.r;
  return a.r >= b.r && K.ord(a.c - b.c) >= b.r;
}

template <class F>
bool region_meets(const F& K, const Region<F>& a, const Region<F>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (!coord_meets(K, a[i], b[i])) return false;
  return true;
}

/// Exact test R subset of the union of L.
template <class F>
bool region_covered(const F& K, const Region<F>& R, const std::vector<Region<F>>& L0) {
  std::vector<Region<F>> L;
  for (auto& x : L0)
    if (region_meets(K, R, x)) L.push_back(x);
  if (L.empty()) return false;
  for (size_t i = 0; i < R.size(); ++i) {
    bool all = true;
    for (auto& x : L) all = all && coord_within(K, R[i], x[i]);
    if (all || R[i].kind == RK::Point) continue;
    // Points cannot cover an open set.
    std::vector<Region<F>> L2;
    for (auto& x : L)
      if (x[i].kind != RK::Point) L2.push_back(x);
    if (L2.empty()) return false;
    if (R[i].kind == RK::Full) {
      long S = kInf;
      std::vector<Region<F>> fulls;
      for (auto& x : L2) {
        if (x[i].kind == RK::Full)
          fulls.push_back(x);
        else
          S = std::min({S, x[i].r, K.ord(x[i].c)});
      }
      if (is_inf(S)) {
        L = L2;
        continue;
      }
      Region<F> near = R;
      near[i] = RCoord<F>{RK::Ball, K.zero(), S};
      if (!region_covered(K, near, L2)) return false;
      return !fulls.empty() && region_covered(K, R, fulls);
    }
    bool finer = false;
    for (auto& x : L2)
      if (x[i].kind == RK::Ball && x[i].r > R[i].r) finer = true;
    if (finer) {
      for (auto& ch : Polyball<F>::equal(K, {R[i].c}, R[i].r).children(K)) {
        Region<F> sub = R;
        sub[i] = RCoord<F>{RK::Ball, ch.c[0], ch.r[0]};
        if (!region_covered(K, sub, L2)) return false;
      }
      return true;
    }
    L = L2;
  }
  return true;
}

/// Exact for linear cells of A; orbit cells of A are checked by sampling.
template <class F, class Rng>
bool cone_subset(const LambdaCone<F>& A, const LambdaCone<F>& B, const LambdaSubgroup<F>& L, Rng& g) {
  const F& K = A.K;
  for (auto& a : A.cells) {
    if (!a.orbit) {
      std::vector<Region<F>> bases;
      for (auto& b : B.cells) {
        if (b.orbit) continue;
        bool sub = true;
        for (size_t i = 0; i < A.n; ++i)
          if (b.zero[i] && !a.zero[i]) sub = false;
        if (sub) bases.push_back(b.base);
      }
      bool any_free = false;
      for (size_t i = 0; i < A.n; ++i) any_free = any_free || !a.zero[i];
      if (!any_free) continue;  // empty fiber
      if (!region_covered(K, a.base, bases)) return false;
    } else {
      for (int s = 0; s < 50; ++s) {
        Vec<F> x(A.n), xi(A.n);
        for (size_t i = 0; i < A.n; ++i) {
          const auto& c = a.base[i];
          x[i] = c.kind == RK::Point ? c.c : (c.kind == RK::Ball ? c.c + K.random(g, c.r, c.r + 3) : K.random(g, -2, 2));
        }
        auto reps = L.reps(0);
        auto lam = reps[static_cast<size_t>(s) % reps.size()];
        for (size_t i = 0; i < A.n; ++i) xi[i] = lam * (a.P.c[i] + K.random(g, a.P.r[i], a.P.r[i] + 3));
        if (!cone_contains(B, L, x, xi)) return false;
      }
    }
  }
  return true;
}

template <class F>
LambdaCone<F> cone_union(const LambdaCone<F>& a, const LambdaCone<F>& b) {
  LambdaCone<F> r = a;
  r.cells.insert(r.cells.end(), b.cells.begin(), b.cells.end());
  r.exact = a.exact && b.exact;
  return r;
}

// ---------------------------------------------------------------------------
// Wave front sets on the class.
// ---------------------------------------------------------------------------

/// Union over delta groups of {d} x supp(h) x {xi_E = 0}.
template <class F>
LambdaCone<F> wavefront_exact(const Dist<F>& u) {
  LambdaCone<F> G(u.K, u.n);
  auto info = support_and_ss(u);
  G.exact = info.exact;
  for (auto& sp : info.singular) {
    ConeCell<F> c;
    c.base = sp.base;
    c.zero.assign(u.n, true);
    for (size_t i : sp.D) c.zero[i] = false;
    G.cells.push_back(c);
  }
  return G;
}

/// WF^0 = WF together with the support over the zero section; the zero
/// section is encoded by an all-zero mask.
template <class F>
LambdaCone<F> wavefront0(const Dist<F>& u) {
  LambdaCone<F> G = wavefront_exact(u);
  auto info = support_and_ss(u);
  for (auto& sp : info.support) G.cells.push_back(ConeCell<F>{sp.base, false, std::vector<bool>(u.n, true), {}});
  return G;
}

/// Product bound WF^0(u1) x WF^0(u2) minus the zero section.
template <class F>
LambdaCone<F> tensor_wf_bound(const Dist<F>& u1, const Dist<F>& u2) {
  auto A = wavefront0(u1), B = wavefront0(u2);
  LambdaCone<F> G(u1.K, u1.n + u2.n);
  G.exact = A.exact && B.exact;
  for (auto& a : A.cells)
    for (auto& b : B.cells) {
      ConeCell<F> c;
      c.base = a.base;
      c.base.insert(c.base.end(), b.base.begin(), b.base.end());
      c.zero = a.zero;
      c.zero.insert(c.zero.end(), b.zero.begin(), b.zero.end());
      bool free = false;
      for (bool z : c.zero) free = free || !z;
      if (free) G.cells.push_back(c);
    }
  return G;
}

template <class F, class Rng>
bool tensor_bound_holds(const Dist<F>& u1, const Dist<F>& u2, const LambdaSubgroup<F>& L, Rng& g) {
  return cone_subset(wavefront_exact(tensor(u1, u2)), tensor_wf_bound(u1, u2), L, g);
}

/// Checks (x, g xi) stays in the cone for sampled members and generators.
template <class F, class Rng>
bool cone_is_stable(const LambdaCone<F>& G, const LambdaSubgroup<F>& L, Rng& g, int samples = 20) {
  const F& K = G.K;
  for (auto& c : G.cells)
    for (int s = 0; s < samples; ++s) {
      Vec<F> x(G.n), xi(G.n);
      for (size_t i = 0; i < G.n; ++i) {
        const auto& b = c.base[i];
        x[i] = b.kind == RK::Point ? b.c : (b.kind == RK::Ball ? b.c + K.random(g, b.r, b.r + 3) : K.random(g, -2, 2));
        if (c.orbit)
          xi[i] = c.P.c[i] + K.random(g, c.P.r[i], c.P.r[i] + 2);
        else
          xi[i] = c.zero[i] ? K.zero() : K.random(g, -2, 2);
      }
      if (!fiber_contains(K, L, c, xi)) continue;
      for (auto& lam : L.generators()) {
        Vec<F> y(G.n);
        for (size_t i = 0; i < G.n; ++i) y[i] = lam * xi[i];
        if (!cone_contains(G, L, x, y)) return false;
      }
    }
  return true;
}

// ---------------------------------------------------------------------------
// Smoothness verdicts.
// ---------------------------------------------------------------------------

enum class Verdict { Smooth, NotSmooth, Undecided };

inline const char* verdict_name(Verdict v) {
  return v == Verdict::Smooth ? "Smooth" : v == Verdict::NotSmooth ? "NotSmooth" : "Undecided";
}

/// Smooth: F(1_{B_r(x0)} u)(lambda eta) = 0 for lambda in Lambda with
/// ord lambda < N and eta in B_R(xi0). NotSmooth: that transform is nonzero at
/// lambda * xi.
template <class F>
struct SmoothnessVerdict {
  using E = typename F::elem;
  Verdict tag = Verdict::Undecided;
  Vec<F> x0, xi0;
  long r = 0;
  long N = kInf;
  long R = 0;
  E lambda{};
  Vec<F> xi;
  Cyclo value;
  long searched = 0;
  std::string note;
};

/// Radius separating x0 from every feature of u.
template <class F>
long separation_radius(const Dist<F>& u, const Vec<F>& x0) {
  long r = 0;
  for (auto& t : u.terms)
    for (size_t i = 0; i < u.n; ++i) {
      const auto& f = t.f[i];
      if (f.kind == FK::Full) continue;
      if (f.kind == FK::Ball) r = std::max(r, f.r);
      long o = u.K.ord(x0[i] - f.pt);
      if (!is_inf(o)) r = std::max(r, o);
    }
  return r + 1;
}

/// Per-term vanishing threshold of a delta-free term along lambda * eta,
/// eta near xi0: vanishes once ord lambda < threshold. nullopt: persists.
template <class F>
std::optional<long> ray_threshold(const F& K, const Term<F>& t, const Vec<F>& xi0) {
  std::optional<long> best;
  for (size_t i = 0; i < xi0.size(); ++i) {
    if (xi0[i] == K.zero() || t.f[i].kind != FK::Ball) continue;
    long v = std::min(t.f[i].r, K.ord(t.f[i].pt)) - K.ord(xi0[i]);
    best = best ? std::max(*best, v) : v;
  }
  return best;
}

template <class F>
Vec<F> scaled_vec(const typename F::elem& s, const Vec<F>& v) {
  Vec<F> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

template <class F>
SmoothnessVerdict<F> is_smooth_at(const Dist<F>& u, const Vec<F>& x0, const Vec<F>& xi0, const LambdaSubgroup<F>& L, long budget = 6) {
  const F& K = u.K;
  if (ord_vec(K, xi0) >= kInf) throw MathError("ZeroCovector", "xi0 must be nonzero");
  SmoothnessVerdict<F> v;
  v.x0 = x0;
  v.xi0 = xi0;
  v.r = separation_radius(u, x0);
  v.R = 1;
  for (auto& c : xi0)
    if (!(c == K.zero())) v.R = std::max(v.R, K.ord(c) + 1);
  auto chi = indicator(K, Polyball<F>::equal(K, x0, v.r));
  Dist<F> w = mul_by_sb(u, chi);
  if (is_zero(w)) {
    v.tag = Verdict::Smooth;
    v.N = kInf;
    v.note = "localized distribution vanishes";
    return v;
  }
  Dist<F> Fw = fourier_dist(w);
  Dist<F> persist(K, u.n);
  long NT = kInf;
  for (auto& t : Fw.terms) {
    auto th = ray_threshold(K, t, xi0);
    if (th)
      NT = std::min(NT, *th);
    else
      persist.terms.push_back(t);
  }
  if (is_zero(persist)) {
    v.tag = Verdict::Smooth;
    v.N = NT;
    v.note = "every surviving term has bounded frequency support along the ray";
    return v;
  }
  // Witness search, deterministic order: ord lambda descending, residues ascending.
  long start = std::min(NT, 0L);
  std::vector<Vec<F>> etas{xi0};
  for (size_t i = 0; i < u.n; ++i)
    for (long s = 0; s < 2; ++s) {
      Vec<F> e = xi0;
      e[i] = e[i] + K.unif_pow(v.R + s);
      etas.push_back(e);
    }
  for (long e = start - 1; e >= start - budget; --e)
    for (auto& lam : L.reps(e))
      for (auto& eta : etas) {
        ++v.searched;
        Cyclo val = density_value(Fw, scaled_vec<F>(lam, eta));
        if (!val.is_zero()) {
          v.tag = Verdict::NotSmooth;
          v.lambda = lam;
          v.xi = eta;
          v.value = val;
          v.N = NT;
          return v;
        }
      }
  v.tag = Verdict::Undecided;
  v.N = NT;
  v.note = "persistent frequencies did not produce a nonzero value in the window";
  return v;
}

/// Re-checks a verdict by direct evaluation of the localized transform.
template <class F, class Rng>
bool recheck_verdict(const Dist<F>& u, const SmoothnessVerdict<F>& v, const LambdaSubgroup<F>& L, Rng& g, int samples = 100) {
  const F& K = u.K;
  Dist<F> Fw = fourier_dist(mul_by_sb(u, indicator(K, Polyball<F>::equal(K, v.x0, v.r))));
  if (v.tag == Verdict::NotSmooth) return !density_value(Fw, scaled_vec<F>(v.lambda, v.xi)).is_zero() && L.contains(v.lambda);
  if (v.tag != Verdict::Smooth) return true;
  long top = is_inf(v.N) ? 0 : v.N;
  std::uniform_int_distribution<long> de(top - 8, top - 1);
  for (int s = 0; s < samples; ++s) {
    long e = de(g);
    auto reps = L.reps(e);
    if (reps.empty()) continue;
    std::uniform_int_distribution<size_t> pick(0, reps.size() - 1);
    typename F::elem lam = reps[pick(g)] * (K.one() + K.random(g, L.m, L.m + 3));
    Vec<F> eta = v.xi0;
    for (auto& c : eta) c = c + K.random(g, v.R, v.R + 3);
    if (!density_value(Fw, scaled_vec<F>(lam, eta)).is_zero()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Prescribed wave front.
// ---------------------------------------------------------------------------

template <class F>
struct PrescribePoint {
  Vec<F> x, theta;
};

template <class F>
struct IdentityCheck {
  long k = 0;
  Cyclo value, stated, derived;
};

template <class F>
struct ProbeCheck {
  Vec<F> x, xi;
  long gamma = 0;  // c = q^-gamma
  bool resolved = true;
  long checked = 0, violations = 0;
};

template <class F>
struct Prescribed {
  using E = typename F::elem;
  F K;
  size_t d = 1;
  E lambda{};
  long e = 1;
  long m = 0;
  std::vector<PrescribePoint<F>> points;

  const PrescribePoint<F>& point(long k) const { return points[static_cast<size_t>((k - 1) % static_cast<long>(points.size()))]; }

  /// |lambda^k| 1_{B_{ke}(x_k)} psi(-lambda^{-3k} theta_k . x).
  Dist<F> term(long k) const {
    Dist<F> u(K, d);
    if (points.empty()) return u;
    const auto& P = point(k);
    E li = K.inv(lambda), l3 = K.one();
    for (long s = 0; s < 3 * k; ++s) l3 = l3 * li;
    Term<F> t{Cyclo::qint(K.p, -k * e), {}, {}};
    for (size_t i = 0; i < d; ++i) {
      t.a.push_back(-(l3 * P.theta[i]));
      t.f.push_back(Factor<F>::ball(P.x[i], k * e));
    }
    u.terms.push_back(t);
    return u.canon();
  }

  Dist<F> truncated(long M) const {
    Dist<F> u(K, d);
    for (long k = 1; k <= M; ++k) u = u + term(k);
    return u;
  }

  Series<F> series() const {
    Series<F> s{K, d, {}, {}, {}, m};
    auto self = *this;
    s.term = [self](long k) { return self.term(k); };
    double q = static_cast<double>(K.p), de = static_cast<double>(e) * static_cast<double>(d + 1);
    s.tail = [q, de](long k) { return std::pow(q, -static_cast<double>(k + 1) * de) / (1 - std::pow(q, -de)); };
    s.finite_after = [self](const SB<F>& phi) -> std::optional<long> {
      if (self.points.empty()) return 0L;
      for (auto& P : self.points)
        if (!phi.at(P.x).is_zero()) return std::nullopt;
      long j0 = (phi.aplus + self.e - 1) / self.e - 1;
      return std::max(0L, j0);
    };
    return s;
  }
};

template <class F>
Prescribed<F> prescribe_wavefront(const F& K, const LambdaSubgroup<F>& L, size_t d, const std::vector<PrescribePoint<F>>& pts, long m) {
  if (d < 1) throw MathError("BadDimension", "d must be at least 1");
  for (auto& P : pts) {
    if (P.x.size() != d || P.theta.size() != d) throw MathError("BadDimension", "point dimension mismatch");
    if (ord_vec(K, P.theta) != 0) throw MathError("NonUnitTheta", "theta must have norm 1");
  }
  Prescribed<F> u{K, d, L.min_pos_element(), L.min_pos_ord(), m, pts};
  return u;
}

template <class F>
Cyclo localized_transform(const Dist<F>& u, const Vec<F>& x0, long r, const Vec<F>& xi) {
  auto chi = indicator(u.K, Polyball<F>::equal(u.K, x0, r));
  return density_value(fourier_dist(mul_by_sb(u, chi)), xi);
}

/// Value of F(chi u)(lambda^{-3k} theta_k) with chi = 1_{B_0(x_k)}, together
/// with |lambda|^{(d+2)k} and |lambda|^{(d+1)k}. Terms past m vanish at this
/// frequency individually, so the value is exact.
template <class F>
std::vector<IdentityCheck<F>> identity_checks(const Prescribed<F>& u) {
  std::vector<IdentityCheck<F>> out;
  if (u.points.empty()) return out;
  const F& K = u.K;
  Dist<F> um = u.truncated(u.m);
  auto li = K.inv(u.lambda);
  for (long k = 1; k <= u.m; ++k) {
    const auto& P = u.point(k);
    typename F::elem l3 = K.one();
    for (long s = 0; s < 3 * k; ++s) l3 = l3 * li;
    IdentityCheck<F> c;
    c.k = k;
    c.value = localized_transform(um, P.x, 0, scaled_vec<F>(l3, P.theta));
    long dd = static_cast<long>(u.d);
    c.stated = Cyclo::qint(K.p, -(dd + 2) * k * u.e);
    c.derived = Cyclo::qint(K.p, -(dd + 1) * k * u.e);
    out.push_back(c);
  }
  return out;
}

/// Check that F(chi u)(eta) = 0 whenever c |eta|^{2/3} > q^-1, for eta on the
/// Lambda-orbit of xi with |ord| <= window.
template <class F>
ProbeCheck<F> probe_check(const Prescribed<F>& u, const LambdaSubgroup<F>& L, const Vec<F>& x0, const Vec<F>& xi, long window = 4) {
  const F& K = u.K;
  ProbeCheck<F> pc;
  pc.x = x0;
  pc.xi = xi;
  long oxi = ord_vec(K, xi);
  long gamma = 0;
  for (auto& P : u.points) {
    bool near = true;
    for (size_t i = 0; i < u.d; ++i) near = near && K.ord(P.x[i] - x0[i]) >= 0;
    if (!near) continue;
    for (auto& mu : L.reps(-oxi)) {
      long o = kInf;
      for (size_t i = 0; i < u.d; ++i) o = std::min(o, K.ord(mu * xi[i] - P.theta[i]));
      if (o >= L.m) pc.resolved = false;
      gamma = std::max(gamma, std::min(o, L.m));
    }
  }
  pc.gamma = gamma;
  if (!pc.resolved) return pc;
  for (long s = -window; s <= window; ++s)
    for (auto& mu : L.reps(s)) {
      Vec<F> eta = scaled_vec<F>(mu, xi);
      long oe = ord_vec(K, eta);
      if (3 * gamma + 2 * oe >= 3) continue;
      long M = std::max(u.m, (-oe) / (3 * u.e) + 2);
      ++pc.checked;
      if (!localized_transform(u.truncated(M), x0, 0, eta).is_zero()) ++pc.violations;
    }
  return pc;
}

// ---------------------------------------------------------------------------
// S'_Gamma convergence.
// ---------------------------------------------------------------------------

template <class F>
struct SGammaProbe {
  SB<F> chi;
  Vec<F> eta;
};

struct SGammaReport {
  bool s_prime = true;
  bool condition2 = true;
  std::vector<std::vector<double>> gaps;        // per test function, |<u_j - u, phi>|
  std::vector<std::vector<long>> thresholds;    // per probe, N_j (kInf = never nonzero)
  std::string detail;
};

/// Vanishing threshold of F(chi v)(lambda eta') along the ray, as a lower bound
/// valid for ord lambda < N; -kInf when a nonzero term persists.
template <class F>
long ray_vanishing_threshold(const Dist<F>& v, const SB<F>& chi, const Vec<F>& eta) {
  Dist<F> w = mul_by_sb(v, chi);
  if (is_zero(w)) return kInf;
  Dist<F> Fw = fourier_dist(w);
  Dist<F> persist(v.K, v.n);
  long N = kInf;
  for (auto& t : Fw.terms) {
    auto th = ray_threshold(v.K, t, eta);
    if (th)
      N = std::min(N, *th);
    else
      persist.terms.push_back(t);
  }
  if (!is_zero(persist)) return -kInf;
  return N;
}

template <class F>
SGammaReport sgamma_convergence_check(const std::vector<Dist<F>>& seq, const Dist<F>& limit, const LambdaCone<F>& Gamma,
                                      const LambdaSubgroup<F>& L, const std::vector<SB<F>>& tests,
                                      const std::vector<SGammaProbe<F>>& probes, double tol = 1.0 / 16) {
  SGammaReport rep;
  for (auto& phi : tests) {
    std::vector<double> g;
    Cyclo lim = evaluate(limit, phi);
    for (auto& u : seq) g.push_back(std::abs((evaluate(u, phi) - lim).approx()));
    bool ok = !g.empty() && g.back() <= tol;
    size_t tail = g.size() / 2;
    for (size_t j = tail + 1; j < g.size(); ++j) ok = ok && g[j] <= g[j - 1] + 1e-12;
    rep.s_prime = rep.s_prime && ok;
    rep.gaps.push_back(g);
  }
  for (auto& pr : probes) {
    std::vector<long> th;
    for (auto& c : pr.chi.cells)
      if (cone_contains(Gamma, L, c.first, pr.eta)) rep.detail += "probe direction lies in the cone; ";
    for (auto& u : seq) th.push_back(ray_vanishing_threshold(u, pr.chi, pr.eta));
    bool ok = true;
    size_t tail = th.size() / 2;
    bool decreasing = th.size() >= 2;
    for (size_t j = 0; j < th.size(); ++j) ok = ok && th[j] > -kInf;
    for (size_t j = tail + 1; j < th.size(); ++j) decreasing = decreasing && th[j] < th[j - 1];
    if (decreasing) ok = false;
    rep.condition2 = rep.condition2 && ok;
    rep.thresholds.push_back(th);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Products.
// ---------------------------------------------------------------------------

/// u * v when the wave fronts allow it; WFCollision otherwise.
template <class F>
Dist<F> product_dist(const Dist<F>& u, const Dist<F>& v) {
  const F& K = u.K;
  if (u.n != v.n) throw std::invalid_argument("dimension mismatch");
  auto A = wavefront_exact(u), B = wavefront_exact(v);
  for (auto& a : A.cells)
    for (auto& b : B.cells) {
      bool free = false;
      for (size_t i = 0; i < u.n; ++i) free = free || (!a.zero[i] && !b.zero[i]);
      if (free && region_meets(K, a.base, b.base)) throw MathError("WFCollision", "wave fronts meet antipodally");
    }
  Dist<F> w(K, u.n);
  for (auto& s : u.terms)
    for (auto& t : v.terms) {
      Term<F> x{s.c * t.c, Vec<F>(u.n, K.zero()), std::vector<Factor<F>>(u.n)};
      bool alive = true, clash = false;
      for (size_t i = 0; i < u.n && alive; ++i) {
        const auto &f = s.f[i], &h = t.f[i];
        x.a[i] = s.a[i] + t.a[i];
        if (f.kind == FK::Delta && h.kind == FK::Delta) {
          if (f.pt == h.pt)
            clash = true;
          else
            alive = false;
          x.f[i] = f;
        } else if (f.kind == FK::Delta || h.kind == FK::Delta) {
          const auto& dl = f.kind == FK::Delta ? f : h;
          const auto& ot = f.kind == FK::Delta ? h : f;
          if (ot.kind == FK::Ball && K.ord(dl.pt - ot.pt) < ot.r) alive = false;
          x.f[i] = dl;
        } else if (f.kind == FK::Full) {
          x.f[i] = h;
        } else if (h.kind == FK::Full) {
          x.f[i] = f;
        } else {
          if (K.ord(f.pt - h.pt) < std::min(f.r, h.r)) alive = false;
          x.f[i] = f.r >= h.r ? f : h;
        }
      }
      if (!alive) continue;
      if (clash) throw MathError("WFCollision", "delta factors share a point");
      w.terms.push_back(x);
    }
  return w.canon();
}

}  // namespace umla

#endif
