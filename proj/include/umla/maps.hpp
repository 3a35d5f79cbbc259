#ifndef UMLA_MAPS_HPP
#define UMLA_MAPS_HPP

#include "microlocal.hpp"

namespace umla {

enum class MapShape { Isomorphism, Projection, Inclusion, Constant, Other };

inline const char* shape_name(MapShape s) {
  switch (s) {
    case MapShape::Isomorphism: return "isomorphism";
    case MapShape::Projection: return "projection";
    case MapShape::Inclusion: return "inclusion";
    case MapShape::Constant: return "constant";
    default: return "other";
  }
}

/// f(x) = A x + b with A an m x n matrix (rows index the target).
template <class F>
struct AffineMap {
  using E = typename F::elem;
  F K;
  size_t m = 1, n = 1;
  std::vector<Vec<F>> A;
  Vec<F> b;

  AffineMap(F k, std::vector<Vec<F>> a, Vec<F> bb) : K(std::move(k)), A(std::move(a)), b(std::move(bb)) {
    m = A.size();
    n = m ? A[0].size() : 0;
    if (b.size() != m) throw std::invalid_argument("offset dimension mismatch");
    for (auto& r : A)
      if (r.size() != n) throw std::invalid_argument("ragged matrix");
  }

  bool nz(size_t i, size_t j) const { return !(A[i][j] == K.zero()); }

  Vec<F> apply(const Vec<F>& x) const {
    Vec<F> y = b;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) y[i] = y[i] + A[i][j] * x[j];
    return y;
  }

  /// For every target row, the unique nonzero column; nullopt unless the
  /// linear part is a monomial (permutation times diagonal) matrix.
  std::optional<std::vector<size_t>> monomial() const {
    if (m != n) return std::nullopt;
    std::vector<size_t> col(m);
    std::vector<bool> used(n, false);
    for (size_t i = 0; i < m; ++i) {
      int cnt = 0;
      for (size_t j = 0; j < n; ++j)
        if (nz(i, j)) {
          ++cnt;
          col[i] = j;
        }
      if (cnt != 1 || used[col[i]]) return std::nullopt;
      used[col[i]] = true;
    }
    return col;
  }

  E det() const {
    if (m != n) throw std::invalid_argument("det of a non-square matrix");
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    E s = K.zero();
    do {
      E t = K.one();
      for (size_t i = 0; i < n; ++i) t = t * A[i][perm[i]];
      size_t inv = 0;
      for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) inv += perm[i] > perm[j];
      s = (inv % 2) ? E(s - t) : E(s + t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return s;
  }

  MapShape shape() const {
    bool zero = true;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) zero = zero && !nz(i, j);
    if (zero) return MapShape::Constant;
    if (m == n) return det() == K.zero() ? MapShape::Other : MapShape::Isomorphism;
    auto unit_rows = [&](bool by_row) {
      size_t outer = by_row ? m : n, inner = by_row ? n : m;
      std::vector<bool> used(inner, false);
      for (size_t i = 0; i < outer; ++i) {
        int cnt = 0;
        for (size_t j = 0; j < inner; ++j) {
          const E& a = by_row ? A[i][j] : A[j][i];
          if (a == K.zero()) continue;
          if (!(a == K.one()) || used[j]) return false;
          used[j] = true;
          ++cnt;
        }
        if (cnt != 1) return false;
      }
      return true;
    };
    if (m < n && unit_rows(true)) return MapShape::Projection;
    if (m > n && unit_rows(false)) return MapShape::Inclusion;
    return MapShape::Other;
  }

  /// Projection: source column kept by each target row. Inclusion: target
  /// row hit by each source column.
  std::vector<size_t> selection() const {
    std::vector<size_t> s;
    if (m < n) {
      for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j)
          if (nz(i, j)) s.push_back(j);
    } else {
      for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < m; ++i)
          if (nz(i, j)) s.push_back(i);
    }
    return s;
  }

  /// Inverse of an isomorphism; Fpt requires a monomial determinant.
  AffineMap inverse() const {
    if (shape() != MapShape::Isomorphism) throw MathError("UnsupportedMap", "inverse of a non-isomorphism");
    E D = det();
    E Di = K.inv(D);
    std::vector<Vec<F>> B(n, Vec<F>(n, K.zero()));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        std::vector<Vec<F>> minor;
        for (size_t r = 0; r < n; ++r) {
          if (r == j) continue;
          Vec<F> row;
          for (size_t c = 0; c < n; ++c)
            if (c != i) row.push_back(A[r][c]);
          minor.push_back(row);
        }
        E c = n == 1 ? K.one() : AffineMap(K, minor, Vec<F>(n - 1, K.zero())).det();
        if ((i + j) % 2) c = -c;
        B[i][j] = c * Di;
      }
    AffineMap inv(K, B, Vec<F>(n, K.zero()));
    Vec<F> nb = inv.apply(b);
    for (auto& x : nb) x = -x;
    inv.b = nb;
    return inv;
  }
};

/// g o f.
template <class F>
AffineMap<F> compose(const AffineMap<F>& g, const AffineMap<F>& f) {
  const F& K = f.K;
  if (g.n != f.m) throw std::invalid_argument("maps not composable");
  std::vector<Vec<F>> C(g.m, Vec<F>(f.n, K.zero()));
  for (size_t i = 0; i < g.m; ++i)
    for (size_t j = 0; j < f.n; ++j)
      for (size_t k = 0; k < g.n; ++k) C[i][j] = C[i][j] + g.A[i][k] * f.A[k][j];
  AffineMap<F> gl(K, g.A, Vec<F>(g.m, K.zero()));
  Vec<F> c = gl.apply(f.b);
  for (size_t i = 0; i < g.m; ++i) c[i] = c[i] + g.b[i];
  return AffineMap<F>(K, C, c);
}

/// phi o f for an isomorphism f with monomial linear part.
template <class F>
SB<F> compose_sb(const SB<F>& phi, const AffineMap<F>& f) {
  auto col = f.monomial();
  if (!col) throw MathError("UnsupportedMap", "test-function pull-back needs a monomial matrix");
  const F& K = phi.K;
  std::vector<std::pair<Polyball<F>, Cyclo>> parts;
  for (auto& [c, v] : phi.cells) {
    Vec<F> x(f.n);
    std::vector<long> r(f.n);
    for (size_t i = 0; i < f.m; ++i) {
      const auto& a = f.A[i][(*col)[i]];
      x[(*col)[i]] = K.div(c[i] - f.b[i], a);
      r[(*col)[i]] = phi.aplus - K.ord(a);
    }
    parts.push_back({Polyball<F>(K, x, r), v});
  }
  return make_sb(K, f.n, parts);
}

// ---------------------------------------------------------------------------
// Pull-back.
// ---------------------------------------------------------------------------

/// Removes delta groups whose density part is identically zero.
template <class F>
Dist<F> prune(const Dist<F>& u) {
  Dist<F> w(u.K, u.n);
  auto groups = delta_groups(u);
  std::set<std::pair<std::vector<bool>, Vec<F>>> dead;
  for (auto& G : groups)
    if (density_is_zero(u.K, G.h, G.E.size())) {
      std::vector<bool> mask(u.n, false);
      for (size_t i : G.D) mask[i] = true;
      dead.insert({mask, G.d});
    }
  for (auto& t : u.terms) {
    std::vector<bool> mask(u.n);
    Vec<F> pts;
    for (size_t i = 0; i < u.n; ++i) {
      mask[i] = t.f[i].kind == FK::Delta;
      if (mask[i]) pts.push_back(t.f[i].pt);
    }
    if (!dead.count({mask, pts})) w.terms.push_back(t);
  }
  return w;
}

template <class F>
Vec<F> region_sample(const F& K, const Region<F>& R) {
  Vec<F> x;
  for (auto& c : R) x.push_back(c.kind == RK::Full ? K.zero() : c.c);
  return x;
}

template <class F>
Dist<F> pull_monomial(const Dist<F>& u, const AffineMap<F>& f, const std::vector<size_t>& col) {
  const F& K = u.K;
  Dist<F> w(K, f.n);
  for (auto& t : u.terms) {
    Term<F> s{t.c * psi_dot(K, t.a, f.b), Vec<F>(f.n, K.zero()), std::vector<Factor<F>>(f.n)};
    for (size_t i = 0; i < f.m; ++i) {
      size_t j = col[i];
      const auto& a = f.A[i][j];
      s.a[j] = a * t.a[i];
      const auto& fi = t.f[i];
      if (fi.kind == FK::Full) {
        s.f[j] = Factor<F>::full(K);
      } else if (fi.kind == FK::Ball) {
        s.f[j] = Factor<F>::ball(K.div(fi.pt - f.b[i], a), fi.r - K.ord(a));
      } else {
        s.f[j] = Factor<F>::delta(K.div(fi.pt - f.b[i], a));
        s.c *= Cyclo::qint(K.p, K.ord(a));
      }
    }
    w.terms.push_back(s);
  }
  return w.canon();
}

/// Pull-back of single terms by a general isomorphism, for the term shapes
/// whose preimage stays in the class.
template <class F>
Dist<F> pull_general(const Dist<F>& u, const AffineMap<F>& f) {
  const F& K = u.K;
  AffineMap<F> g = f.inverse();
  AffineMap<F> lin(K, f.A, Vec<F>(f.m, K.zero()));
  size_t n = f.n;
  long k = kInf;
  for (auto& r : f.A)
    for (auto& a : r) k = std::min(k, K.ord(a));
  Dist<F> w(K, n);
  for (auto& t : u.terms) {
    bool all_delta = true, all_full = true, balls = true;
    for (auto& x : t.f) {
      all_delta = all_delta && x.kind == FK::Delta;
      all_full = all_full && x.kind == FK::Full;
      balls = balls && x.kind == FK::Ball && x.r == t.f[0].r;
    }
    Vec<F> at(n, K.zero());
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i < f.m; ++i) at[j] = at[j] + f.A[i][j] * t.a[i];
    Term<F> s{t.c * psi_dot(K, t.a, f.b), at, std::vector<Factor<F>>(n)};
    if (all_full) {
      for (auto& x : s.f) x = Factor<F>::full(K);
    } else if (all_delta) {
      Vec<F> c;
      for (auto& x : t.f) c.push_back(x.pt);
      Vec<F> pre = g.apply(c);
      for (size_t j = 0; j < n; ++j) s.f[j] = Factor<F>::delta(pre[j]);
      s.c *= Cyclo::qint(K.p, K.ord(f.det()));
    } else if (balls && K.ord(f.det()) == k * static_cast<long>(n)) {
      Vec<F> c;
      for (auto& x : t.f) c.push_back(x.pt);
      Vec<F> pre = g.apply(c);
      for (size_t j = 0; j < n; ++j) s.f[j] = Factor<F>::ball(pre[j], t.f[0].r - k);
    } else {
      throw MathError("UnsupportedMap", "term shape not preserved by this linear map");
    }
    w.terms.push_back(s);
  }
  return w.canon();
}

template <class F>
Dist<F> pullback(const Dist<F>& u0, const AffineMap<F>& f) {
  const F& K = u0.K;
  if (u0.n != f.m) throw std::invalid_argument("map target dimension mismatch");
  MapShape sh = f.shape();
  if (sh == MapShape::Other) throw MathError("UnsupportedMap", "map is not an isomorphism, projection, inclusion or constant");
  if (sh == MapShape::Isomorphism) {
    auto col = f.monomial();
    return col ? pull_monomial(u0, f, *col) : pull_general(u0, f);
  }
  Dist<F> u = prune(u0);
  auto WF = wavefront_exact(u);
  if (sh == MapShape::Projection) {
    auto s = f.selection();
    Dist<F> w(K, f.n);
    for (auto& t : u.terms) {
      Term<F> x{t.c * psi_dot(K, t.a, f.b), Vec<F>(f.n, K.zero()), std::vector<Factor<F>>(f.n, Factor<F>::full(K))};
      for (size_t i = 0; i < f.m; ++i) {
        x.a[s[i]] = t.a[i];
        x.f[s[i]] = t.f[i];
        if (t.f[i].kind != FK::Full) x.f[s[i]].pt = t.f[i].pt - f.b[i];
      }
      w.terms.push_back(x);
    }
    return w.canon();
  }
  if (sh == MapShape::Constant) {
    for (auto& c : WF.cells)
      if (region_contains(K, c.base, f.b)) throw MathError("NfIntersectsWF", "image point lies in the singular support");
    Cyclo val(K.p, 0);
    for (auto& t : u.terms) {
      if (t.has_delta()) continue;
      Dist<F> one(K, u.n);
      one.terms.push_back(t);
      val += density_value(one, f.b);
    }
    Dist<F> w(K, f.n);
    w.terms.push_back(Term<F>{val, Vec<F>(f.n, K.zero()), std::vector<Factor<F>>(f.n, Factor<F>::full(K))});
    return w.canon();
  }
  // Inclusion: restriction to the slice.
  auto rows = f.selection();
  std::vector<bool> hit(f.m, false);
  for (size_t r : rows) hit[r] = true;
  for (auto& c : WF.cells) {
    bool meets = true, killed_free = false;
    size_t kk = 0;
    for (size_t k = 0; k < f.m; ++k)
      if (!hit[k]) {
        meets = meets && coord_contains(K, c.base[k], f.b[k]);
        if (!c.zero[k]) {
          killed_free = true;
          kk = k;
        }
      }
    if (meets && killed_free) {
      Vec<F> pt = region_sample(K, c.base), eta(f.m, K.zero());
      for (size_t k = 0; k < f.m; ++k)
        if (!hit[k]) pt[k] = f.b[k];
      eta[kk] = K.one();
      std::string w = "(";
      for (size_t k = 0; k < f.m; ++k) w += (k ? "," : "") + K.str(pt[k]);
      w += ") with covector e_" + std::to_string(kk);
      throw MathError("NfIntersectsWF", "conormal of the slice meets the wave front at " + w);
    }
  }
  Dist<F> w(K, f.n);
  for (auto& t : u.terms) {
    Term<F> x{t.c, Vec<F>(f.n, K.zero()), std::vector<Factor<F>>(f.n)};
    bool alive = true;
    for (size_t k = 0; k < f.m && alive; ++k) {
      if (hit[k]) continue;
      const auto& fk = t.f[k];
      if (fk.kind == FK::Delta) {
        if (fk.pt == f.b[k]) throw MathError("NfIntersectsWF", "delta factor on the slice");
        alive = false;
      } else if (fk.kind == FK::Ball && K.ord(f.b[k] - fk.pt) < fk.r) {
        alive = false;
      } else {
        x.c *= K.psi(t.a[k] * f.b[k]);
      }
    }
    if (!alive) continue;
    for (size_t j = 0; j < f.n; ++j) {
      size_t r = rows[j];
      x.a[j] = t.a[r];
      x.c *= K.psi(t.a[r] * f.b[r]);
      x.f[j] = t.f[r];
      if (t.f[r].kind != FK::Full) x.f[j].pt = t.f[r].pt - f.b[r];
    }
    w.terms.push_back(x);
  }
  return w.canon();
}

// ---------------------------------------------------------------------------
// Push-forward.
// ---------------------------------------------------------------------------

/// Integral of one factor with modulation a over B_S(0).
template <class F>
Cyclo integrate_factor(const F& K, const Factor<F>& f, const typename F::elem& a, long S) {
  auto ok = [&](long rho) { return rho >= 1 - K.ord(a); };
  if (f.kind == FK::Delta) return K.ord(f.pt) >= S ? K.psi(a * f.pt) : Cyclo(K.p, 0);
  if (f.kind == FK::Full) return ok(S) ? Cyclo::qint(K.p, -S) : Cyclo(K.p, 0);
  if (f.r >= S) {
    if (K.ord(f.pt) < S || !ok(f.r)) return Cyclo(K.p, 0);
    return Cyclo::qint(K.p, -f.r) * K.psi(a * f.pt);
  }
  if (K.ord(f.pt) < f.r || !ok(S)) return Cyclo(K.p, 0);
  return Cyclo::qint(K.p, -S);
}

/// Integrates out the listed coordinates, keeping `keep` in order.
template <class F>
Dist<F> integrate_out(const Dist<F>& u, const std::vector<size_t>& keep, const std::vector<size_t>& kill) {
  const F& K = u.K;
  if (!compact_in(u, kill)) throw MathError("NotProperOnSupport", "support not compact in the integrated coordinates");
  long S = support_radius(u, kill);
  Dist<F> w(K, keep.size());
  for (auto& t : u.terms) {
    Cyclo c = t.c;
    for (size_t k : kill) c *= integrate_factor(K, t.f[k], t.a[k], S);
    if (c.is_zero()) continue;
    Term<F> x{c, {}, {}};
    for (size_t j : keep) {
      x.a.push_back(t.a[j]);
      x.f.push_back(t.f[j]);
    }
    w.terms.push_back(x);
  }
  return w.canon();
}

template <class F>
Cyclo total_integral(const Dist<F>& u) {
  std::vector<size_t> all(u.n);
  for (size_t i = 0; i < u.n; ++i) all[i] = i;
  Dist<F> w = integrate_out(u, {}, all);
  Cyclo s(u.K.p, 0);
  for (auto& t : w.terms) s += t.c;
  return s;
}

template <class F>
Dist<F> pushforward(const Dist<F>& u, const AffineMap<F>& f) {
  const F& K = u.K;
  if (u.n != f.n) throw std::invalid_argument("map source dimension mismatch");
  MapShape sh = f.shape();
  if (sh == MapShape::Other) throw MathError("UnsupportedMap", "map is not an isomorphism, projection, inclusion or constant");
  if (sh == MapShape::Isomorphism) {
    Dist<F> w = pullback(u, f.inverse());
    return scale(w, Cyclo::qint(K.p, K.ord(f.det())));
  }
  if (sh == MapShape::Constant) {
    Dist<F> w = delta(K, f.b);
    return scale(w, total_integral(u));
  }
  if (sh == MapShape::Projection) {
    auto keep = f.selection();
    std::vector<size_t> kill;
    for (size_t j = 0; j < f.n; ++j)
      if (std::find(keep.begin(), keep.end(), j) == keep.end()) kill.push_back(j);
    return translate(integrate_out(u, keep, kill), f.b);
  }
  auto rows = f.selection();
  Dist<F> w(K, f.m);
  for (auto& t : u.terms) {
    Term<F> x{t.c, Vec<F>(f.m, K.zero()), std::vector<Factor<F>>(f.m, Factor<F>::delta(K.zero()))};
    for (size_t j = 0; j < f.n; ++j) {
      x.a[rows[j]] = t.a[j];
      x.f[rows[j]] = t.f[j];
    }
    w.terms.push_back(x);
  }
  return translate(w.canon(), f.b);
}

// ---------------------------------------------------------------------------
// Cones under maps (linear cells only).
// ---------------------------------------------------------------------------

template <class F>
RCoord<F> map_coord(const F& K, const RCoord<F>& c, const typename F::elem& a, const typename F::elem& b) {
  if (c.kind == RK::Full) return c;
  if (c.kind == RK::Point) return RCoord<F>{RK::Point, a * c.c + b, 0};
  return RCoord<F>{RK::Ball, K.truncate(a * c.c + b, c.r + K.ord(a)), c.r + K.ord(a)};
}

/// f^* Gamma; nullopt when the image is not a union of product cells.
template <class F>
std::optional<LambdaCone<F>> cone_pull(const LambdaCone<F>& G, const AffineMap<F>& f) {
  const F& K = G.K;
  LambdaCone<F> out(K, f.n);
  out.exact = G.exact;
  MapShape sh = f.shape();
  for (auto& c : G.cells)
    if (c.orbit) return std::nullopt;
  if (sh == MapShape::Isomorphism) {
    auto col = f.monomial();
    if (!col) return std::nullopt;
    for (auto& c : G.cells) {
      ConeCell<F> x;
      x.base.resize(f.n);
      x.zero.assign(f.n, false);
      for (size_t i = 0; i < f.m; ++i) {
        size_t j = (*col)[i];
        auto ai = K.inv(f.A[i][j]);
        x.base[j] = map_coord(K, c.base[i], ai, -(ai * f.b[i]));
        x.zero[j] = c.zero[i];
      }
      out.cells.push_back(x);
    }
    return out;
  }
  if (sh == MapShape::Projection) {
    auto s = f.selection();
    for (auto& c : G.cells) {
      ConeCell<F> x;
      x.base.assign(f.n, RCoord<F>{RK::Full, K.zero(), 0});
      x.zero.assign(f.n, true);
      for (size_t i = 0; i < f.m; ++i) {
        x.base[s[i]] = map_coord(K, c.base[i], K.one(), -f.b[i]);
        x.zero[s[i]] = c.zero[i];
      }
      out.cells.push_back(x);
    }
    return out;
  }
  if (sh == MapShape::Inclusion) {
    auto rows = f.selection();
    std::vector<bool> hit(f.m, false);
    for (size_t r : rows) hit[r] = true;
    for (auto& c : G.cells) {
      bool meets = true;
      for (size_t k = 0; k < f.m; ++k)
        if (!hit[k]) meets = meets && coord_contains(K, c.base[k], f.b[k]);
      if (!meets) continue;
      ConeCell<F> x;
      bool free = false;
      for (size_t j = 0; j < f.n; ++j) {
        x.base.push_back(map_coord(K, c.base[rows[j]], K.one(), -f.b[rows[j]]));
        x.zero.push_back(c.zero[rows[j]]);
        free = free || !c.zero[rows[j]];
      }
      if (free) out.cells.push_back(x);
    }
    return out;
  }
  return out;  // constant maps pull every cone back to the zero section
}

/// f_* Gamma together with N_f (the second component), linear cells only.
template <class F>
std::optional<std::pair<LambdaCone<F>, LambdaCone<F>>> cone_push(const LambdaCone<F>& G, const AffineMap<F>& f) {
  const F& K = G.K;
  LambdaCone<F> img(K, f.m), Nf(K, f.m);
  img.exact = G.exact;
  for (auto& c : G.cells)
    if (c.orbit) return std::nullopt;
  MapShape sh = f.shape();
  if (sh == MapShape::Isomorphism) {
    auto col = f.monomial();
    if (!col) return std::nullopt;
    auto P = cone_pull(G, f.inverse());
    if (!P) return std::nullopt;
    return std::make_pair(*P, Nf);
  }
  if (sh == MapShape::Projection) {
    auto s = f.selection();
    for (auto& c : G.cells) {
      // Covectors in the image of the transpose vanish on killed coordinates;
      // the cell contributes where its fiber meets that subspace.
      ConeCell<F> x;
      bool free = false;
      for (size_t i = 0; i < f.m; ++i) {
        x.base.push_back(map_coord(K, c.base[s[i]], K.one(), f.b[i]));
        x.zero.push_back(c.zero[s[i]]);
        free = free || !c.zero[s[i]];
      }
      if (free) img.cells.push_back(x);
    }
    return std::make_pair(img, Nf);
  }
  if (sh == MapShape::Inclusion) {
    auto rows = f.selection();
    for (auto& c : G.cells) {
      ConeCell<F> x;
      x.base.resize(f.m);
      x.zero.assign(f.m, false);
      for (size_t k = 0; k < f.m; ++k) x.base[k] = RCoord<F>{RK::Point, f.b[k], 0};
      for (size_t j = 0; j < f.n; ++j) {
        x.base[rows[j]] = map_coord(K, c.base[j], K.one(), f.b[rows[j]]);
        x.zero[rows[j]] = c.zero[j];
      }
      img.cells.push_back(x);
    }
    ConeCell<F> nf;
    nf.base.resize(f.m);
    nf.zero.assign(f.m, false);
    for (size_t k = 0; k < f.m; ++k) nf.base[k] = RCoord<F>{RK::Point, f.b[k], 0};
    for (size_t j = 0; j < f.n; ++j) {
      nf.base[rows[j]] = RCoord<F>{RK::Full, K.zero(), 0};
      nf.zero[rows[j]] = true;
    }
    Nf.cells.push_back(nf);
    return std::make_pair(img, Nf);
  }
  if (sh == MapShape::Constant) {
    ConeCell<F> nf;
    for (size_t k = 0; k < f.m; ++k) nf.base.push_back(RCoord<F>{RK::Point, f.b[k], 0});
    nf.zero.assign(f.m, false);
    Nf.cells.push_back(nf);
    return std::make_pair(img, Nf);
  }
  return std::nullopt;
}

}  // namespace umla

#endif
