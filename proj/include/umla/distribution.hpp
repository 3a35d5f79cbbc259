#ifndef UMLA_DISTRIBUTION_HPP
#define UMLA_DISTRIBUTION_HPP

#include <functional>
#include <optional>

#include "schwartz.hpp"

namespace umla {

enum class FK { Ball, Full, Delta };

template <class F>
struct Factor {
  FK kind = FK::Full;
  typename F::elem pt{};
  long r = 0;

  static Factor ball(typename F::elem c, long r) { return Factor{FK::Ball, std::move(c), r}; }
  static Factor full(const F& K) { return Factor{FK::Full, K.zero(), 0}; }
  static Factor delta(typename F::elem c) { return Factor{FK::Delta, std::move(c), 0}; }

  bool operator<(const Factor& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (r != o.r) return r < o.r;
    return pt < o.pt;
  }
  bool operator==(const Factor& o) const { return kind == o.kind && r == o.r && pt == o.pt; }
};

/// c * psi(a.x) * prod_i factor_i(x_i).
template <class F>
struct Term {
  Cyclo c;
  Vec<F> a;
  std::vector<Factor<F>> f;

  bool has_delta() const {
    for (auto& x : f)
      if (x.kind == FK::Delta) return true;
    return false;
  }
};

template <class F>
struct Dist {
  F K;
  size_t n = 1;
  std::vector<Term<F>> terms;

  Dist(F k, size_t dim) : K(std::move(k)), n(dim) {}

  /// Canonical centers and modulations, merged terms, zero terms dropped.
  Dist& canon() {
    std::map<std::pair<Vec<F>, std::vector<Factor<F>>>, Cyclo> acc;
    for (auto t : terms) {
      if (t.c.is_zero()) continue;
      if (t.a.size() != n || t.f.size() != n) throw std::invalid_argument("term dimension mismatch");
      for (size_t i = 0; i < n; ++i) {
        auto& fi = t.f[i];
        if (fi.kind == FK::Ball) {
          fi.pt = K.truncate(fi.pt, fi.r);
          typename F::elem keep = K.truncate(t.a[i], 1 - fi.r);
          t.c *= K.psi((t.a[i] - keep) * fi.pt);
          t.a[i] = keep;
        } else if (fi.kind == FK::Delta) {
          t.c *= K.psi(t.a[i] * fi.pt);
          t.a[i] = K.zero();
        } else {
          fi.pt = K.zero();
          fi.r = 0;
        }
      }
      auto& slot = acc[{t.a, t.f}];
      slot += t.c;
    }
    terms.clear();
    for (auto& [k, c] : acc)
      if (!c.is_zero()) terms.push_back(Term<F>{c, k.first, k.second});
    return *this;
  }

  bool same_terms(const Dist& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (size_t i = 0; i < terms.size(); ++i)
      if (terms[i].c != o.terms[i].c || terms[i].a != o.terms[i].a || !(terms[i].f == o.terms[i].f)) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Constructors.
// ---------------------------------------------------------------------------

template <class F>
Dist<F> delta(const F& K, const Vec<F>& pt) {
  Dist<F> u(K, pt.size());
  Term<F> t{Cyclo(K.p, 1), Vec<F>(pt.size(), K.zero()), {}};
  for (auto& x : pt) t.f.push_back(Factor<F>::delta(x));
  u.terms.push_back(t);
  return u.canon();
}

/// The function x -> psi(a.x) as a distribution.
template <class F>
Dist<F> modulated_constant(const F& K, const Vec<F>& a) {
  Dist<F> u(K, a.size());
  Term<F> t{Cyclo(K.p, 1), a, std::vector<Factor<F>>(a.size(), Factor<F>::full(K))};
  u.terms.push_back(t);
  return u.canon();
}

template <class F>
Dist<F> from_density(const SB<F>& phi) {
  Dist<F> u(phi.K, phi.n);
  for (auto& [c, v] : phi.cells) {
    Term<F> t{v, Vec<F>(phi.n, phi.K.zero()), {}};
    for (auto& x : c) t.f.push_back(Factor<F>::ball(x, phi.aplus));
    u.terms.push_back(t);
  }
  return u.canon();
}

template <class F>
Dist<F> operator+(const Dist<F>& u, const Dist<F>& v) {
  if (u.n != v.n) throw std::invalid_argument("dimension mismatch");
  Dist<F> w = u;
  w.terms.insert(w.terms.end(), v.terms.begin(), v.terms.end());
  return w.canon();
}

template <class F>
Dist<F> scale(const Dist<F>& u, const Cyclo& s) {
  Dist<F> w = u;
  for (auto& t : w.terms) t.c *= s;
  return w.canon();
}

template <class F>
Dist<F> operator-(const Dist<F>& u, const Dist<F>& v) {
  return u + scale(v, Cyclo(u.K.p, -1));
}

// ---------------------------------------------------------------------------
// Pairings.
// ---------------------------------------------------------------------------

/// <t, 1_B> for one term and one polyball.
template <class F>
Cyclo pair_term(const F& K, const Term<F>& t, const Polyball<F>& B) {
  Cyclo v = t.c;
  for (size_t i = 0; i < B.dim() && !v.is_zero(); ++i) {
    const auto& fi = t.f[i];
    const auto& a = t.a[i];
    long s = B.r[i];
    const auto& w = B.c[i];
    if (fi.kind == FK::Delta) {
      if (K.ord(fi.pt - w) < s) return Cyclo(K.p, 0);
    } else if (fi.kind == FK::Full) {
      if (s < 1 - K.ord(a)) return Cyclo(K.p, 0);
      v *= Cyclo::qint(K.p, -s) * K.psi(a * w);
    } else {
      if (K.ord(fi.pt - w) < std::min(s, fi.r)) return Cyclo(K.p, 0);
      long tt = std::max(s, fi.r);
      const auto& c = s >= fi.r ? w : fi.pt;
      if (tt < 1 - K.ord(a)) return Cyclo(K.p, 0);
      v *= Cyclo::qint(K.p, -tt) * K.psi(a * c);
    }
  }
  return v;
}

template <class F>
Cyclo pair_ball(const Dist<F>& u, const Polyball<F>& B) {
  Cyclo s(u.K.p, 0);
  for (auto& t : u.terms) s += pair_term(u.K, t, B);
  return s;
}

/// D_u(x, r) = u(1_{B_r(x)}).
template <class F>
Cyclo b_function(const Dist<F>& u, const Vec<F>& x, long r) {
  return pair_ball(u, Polyball<F>::equal(u.K, x, r));
}

template <class F>
Cyclo wavelet(const Dist<F>& u, const Vec<F>& x, long r) {
  return Cyclo::qint(u.K.p, r * static_cast<long>(u.n)) * b_function(u, x, r);
}

template <class F>
Cyclo evaluate(const Dist<F>& u, const SB<F>& phi) {
  if (u.n != phi.n) throw std::invalid_argument("dimension mismatch");
  Cyclo s(u.K.p, 0);
  for (auto& [c, v] : phi.cells) s += v * pair_ball(u, Polyball<F>::equal(u.K, c, phi.aplus));
  return s;
}

/// D(B) against the sum over the children of B.
template <class F>
bool additivity_check(const Dist<F>& u, const Polyball<F>& B) {
  Cyclo s(u.K.p, 0);
  for (auto& ch : B.children(u.K)) s += pair_ball(u, ch);
  return s == pair_ball(u, B);
}

/// Pointwise value of a distribution without delta factors.
template <class F>
Cyclo density_value(const Dist<F>& u, const Vec<F>& x) {
  Cyclo s(u.K.p, 0);
  for (auto& t : u.terms) {
    bool in = true;
    for (size_t i = 0; i < u.n && in; ++i) {
      if (t.f[i].kind == FK::Delta) throw std::domain_error("density_value of a distribution with delta factors");
      if (t.f[i].kind == FK::Ball && u.K.ord(x[i] - t.f[i].pt) < t.f[i].r) in = false;
    }
    if (in) s += t.c * psi_dot(u.K, t.a, x);
  }
  return s;
}

template <class F>
bool is_density(const Dist<F>& u) {
  for (auto& t : u.terms)
    if (t.has_delta()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Transforms and products.
// ---------------------------------------------------------------------------

template <class F>
Dist<F> fourier_dist(const Dist<F>& u) {
  const F& K = u.K;
  Dist<F> w(K, u.n);
  for (auto& t : u.terms) {
    Term<F> s{t.c, Vec<F>(u.n, K.zero()), std::vector<Factor<F>>(u.n)};
    for (size_t i = 0; i < u.n; ++i) {
      const auto& fi = t.f[i];
      const auto& a = t.a[i];
      if (fi.kind == FK::Ball) {
        s.c *= Cyclo::qint(K.p, -fi.r) * K.psi(a * fi.pt);
        s.a[i] = fi.pt;
        s.f[i] = Factor<F>::ball(-a, 1 - fi.r);
      } else if (fi.kind == FK::Delta) {
        s.c *= K.psi(a * fi.pt);
        s.a[i] = fi.pt;
        s.f[i] = Factor<F>::full(K);
      } else {
        s.c *= Cyclo::qint(K.p, -1);
        s.f[i] = Factor<F>::delta(-a);
      }
    }
    w.terms.push_back(s);
  }
  return w.canon();
}

/// x -> -x.
template <class F>
Dist<F> reflect(const Dist<F>& u) {
  Dist<F> w = u;
  for (auto& t : w.terms) {
    for (size_t i = 0; i < u.n; ++i) {
      t.a[i] = -t.a[i];
      t.f[i].pt = -t.f[i].pt;
    }
  }
  return w.canon();
}

template <class F>
Dist<F> tensor(const Dist<F>& u, const Dist<F>& v) {
  Dist<F> w(u.K, u.n + v.n);
  for (auto& s : u.terms)
    for (auto& t : v.terms) {
      Term<F> x{s.c * t.c, s.a, s.f};
      x.a.insert(x.a.end(), t.a.begin(), t.a.end());
      x.f.insert(x.f.end(), t.f.begin(), t.f.end());
      w.terms.push_back(x);
    }
  return w.canon();
}

/// Term restricted to a polyball; nullopt when the product vanishes.
template <class F>
std::optional<Term<F>> restrict_term(const F& K, const Term<F>& t, const Polyball<F>& B) {
  Term<F> s = t;
  for (size_t i = 0; i < B.dim(); ++i) {
    auto& fi = s.f[i];
    if (fi.kind == FK::Delta) {
      if (K.ord(fi.pt - B.c[i]) < B.r[i]) return std::nullopt;
    } else if (fi.kind == FK::Full) {
      fi = Factor<F>::ball(B.c[i], B.r[i]);
    } else {
      if (K.ord(fi.pt - B.c[i]) < std::min(fi.r, B.r[i])) return std::nullopt;
      if (B.r[i] > fi.r) fi = Factor<F>::ball(B.c[i], B.r[i]);
    }
  }
  return s;
}

template <class F>
Dist<F> mul_by_sb(const Dist<F>& u, const SB<F>& phi) {
  if (u.n != phi.n) throw std::invalid_argument("dimension mismatch");
  Dist<F> w(u.K, u.n);
  for (auto& [c, v] : phi.cells) {
    Polyball<F> B = Polyball<F>::equal(u.K, c, phi.aplus);
    for (auto& t : u.terms) {
      auto s = restrict_term(u.K, t, B);
      if (!s) continue;
      s->c *= v;
      w.terms.push_back(*s);
    }
  }
  return w.canon();
}

/// (u*phi)(x) = <u, phi(x - .)>, returned as a delta-free class element.
template <class F>
Dist<F> convolve_dist(const Dist<F>& u, const SB<F>& phi) {
  if (u.n != phi.n) throw std::invalid_argument("dimension mismatch");
  const F& K = u.K;
  long L = phi.aplus;
  Dist<F> w(K, u.n);
  for (auto& [z, v] : phi.cells) {
    for (auto& t : u.terms) {
      Term<F> s{t.c * v, Vec<F>(u.n, K.zero()), std::vector<Factor<F>>(u.n)};
      bool alive = true;
      for (size_t i = 0; i < u.n && alive; ++i) {
        const auto& fi = t.f[i];
        const auto& a = t.a[i];
        if (fi.kind == FK::Delta) {
          s.f[i] = Factor<F>::ball(z[i] + fi.pt, L);
        } else if (fi.kind == FK::Full) {
          if (L < 1 - K.ord(a)) {
            alive = false;
            break;
          }
          s.c *= Cyclo::qint(K.p, -L) * K.psi(-(a * z[i]));
          s.a[i] = a;
          s.f[i] = Factor<F>::full(K);
        } else if (L >= fi.r) {
          if (L < 1 - K.ord(a)) {
            alive = false;
            break;
          }
          s.c *= Cyclo::qint(K.p, -L) * K.psi(-(a * z[i]));
          s.a[i] = a;
          s.f[i] = Factor<F>::ball(fi.pt + z[i], fi.r);
        } else {
          if (fi.r < 1 - K.ord(a)) {
            alive = false;
            break;
          }
          s.c *= Cyclo::qint(K.p, -fi.r) * K.psi(a * fi.pt);
          s.f[i] = Factor<F>::ball(fi.pt + z[i], L);
        }
      }
      if (alive) w.terms.push_back(s);
    }
  }
  return w.canon();
}

/// Phi_l = q^(l n) 1_{B_l(0)}.
template <class F>
SB<F> approx_identity(const F& K, size_t n, long l) {
  return scale(indicator(K, Polyball<F>::equal(K, Vec<F>(n, K.zero()), l)), Cyclo::qint(K.p, l * static_cast<long>(n)));
}

/// Translate a distribution: (tau_b u)(x) = u(x - b).
template <class F>
Dist<F> translate(const Dist<F>& u, const Vec<F>& b) {
  Dist<F> w = u;
  for (auto& t : w.terms) {
    t.c *= u.K.psi(-dot<F>(t.a, b));
    for (size_t i = 0; i < u.n; ++i)
      if (t.f[i].kind != FK::Full) t.f[i].pt = t.f[i].pt + b[i];
  }
  return w.canon();
}

// ---------------------------------------------------------------------------
// Regions, zero testing and supports.
// ---------------------------------------------------------------------------

enum class RK { Point, Ball, Full };

template <class F>
struct RCoord {
  RK kind = RK::Full;
  typename F::elem c{};
  long r = 0;
  bool operator<(const RCoord& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (r != o.r) return r < o.r;
    return c < o.c;
  }
  bool operator==(const RCoord& o) const { return kind == o.kind && r == o.r && c == o.c; }
};

template <class F>
using Region = std::vector<RCoord<F>>;

template <class F>
bool coord_contains(const F& K, const RCoord<F>& R, const typename F::elem& x) {
  if (R.kind == RK::Full) return true;
  if (R.kind == RK::Point) return R.c == x;
  return K.ord(x - R.c) >= R.r;
}

template <class F>
bool region_contains(const F& K, const Region<F>& R, const Vec<F>& x) {
  for (size_t i = 0; i < R.size(); ++i)
    if (!coord_contains(K, R[i], x[i])) return false;
  return true;
}

/// Delta-free term on a subset of coordinates.
template <class F>
struct DTerm {
  Cyclo c;
  Vec<F> a;
  std::vector<Factor<F>> f;
};

enum class ZState { Zero, Whole, Partial };

/// Exact zero test and support computation for finite sums of terms
/// c psi(a.x) prod(ball or full) on a product region.
template <class F>
struct ZeroTester {
  const F& K;
  bool want_support = true;
  bool exact = true;

  ZState run(const std::vector<DTerm<F>>& T0, const Region<F>& R, std::vector<bool> done, std::vector<Region<F>>& out) {
    const size_t m = R.size();
    std::vector<DTerm<F>> T;
    for (auto& t : T0) {
      bool keep = !t.c.is_zero();
      for (size_t i = 0; i < m && keep; ++i)
        if (t.f[i].kind == FK::Ball && R[i].kind == RK::Ball && K.ord(t.f[i].pt - R[i].c) < std::min(t.f[i].r, R[i].r)) keep = false;
      if (keep) T.push_back(t);
    }
    if (T.empty()) return ZState::Zero;

    for (size_t i = 0; i < m; ++i) {
      if (done[i] || R[i].kind != RK::Full) continue;
      bool all_full = true;
      long S = kInf;
      for (auto& t : T)
        if (t.f[i].kind == FK::Ball) {
          all_full = false;
          S = std::min({S, t.f[i].r, K.ord(t.f[i].pt)});
        }
      std::vector<DTerm<F>> far;
      for (auto& t : T)
        if (t.f[i].kind == FK::Full) far.push_back(t);
      if (all_full) return by_frequency(far, R, done, i, out, /*whole_region=*/true);
      Region<F> near = R;
      near[i] = RCoord<F>{RK::Ball, K.zero(), S};
      std::vector<Region<F>> near_out;
      ZState zn = run(T, near, done, near_out);
      if (zn != ZState::Zero && !want_support) return ZState::Partial;
      std::vector<Region<F>> far_out;
      ZState zf = far.empty() ? ZState::Zero : by_frequency(far, R, done, i, far_out, false);
      if (zn == ZState::Zero && zf == ZState::Zero) return ZState::Zero;
      if (zn == ZState::Whole) out.push_back(near);
      out.insert(out.end(), near_out.begin(), near_out.end());
      if (zf != ZState::Zero) {
        exact = false;
        out.insert(out.end(), far_out.begin(), far_out.end());
      }
      return ZState::Partial;
    }

    for (size_t i = 0; i < m; ++i) {
      if (done[i]) continue;
      for (auto& t : T)
        if (t.f[i].kind == FK::Ball && t.f[i].r > R[i].r) return split(T, R, done, i, out);
    }

    std::map<Vec<F>, Cyclo> groups;
    for (auto& t : T) {
      Vec<F> key(m, K.zero());
      typename F::elem phase = K.zero();
      for (size_t i = 0; i < m; ++i) {
        if (done[i]) continue;
        key[i] = K.truncate(t.a[i], 1 - R[i].r);
        phase = phase + t.a[i] * R[i].c;
      }
      groups[key] += t.c * K.psi(phase);
    }
    bool nonzero = false, only_const = true;
    size_t split_at = m;
    for (auto& [key, c] : groups) {
      if (c.is_zero()) continue;
      nonzero = true;
      for (size_t i = 0; i < m; ++i)
        if (!done[i] && !(key[i] == K.zero())) {
          only_const = false;
          split_at = std::min(split_at, i);
        }
    }
    if (!nonzero) return ZState::Zero;
    if (!want_support) return ZState::Partial;
    if (only_const) return ZState::Whole;
    return split(T, R, done, split_at, out);
  }

 private:
  ZState split(const std::vector<DTerm<F>>& T, const Region<F>& R, const std::vector<bool>& done, size_t i, std::vector<Region<F>>& out) {
    std::vector<Region<F>> local;
    bool all_whole = true, all_zero = true;
    for (unsigned long d = 0; d < K.p; ++d) {
      Region<F> C = R;
      C[i].c = R[i].c + K.from_int(static_cast<long>(d)) * K.unif_pow(R[i].r);
      C[i].r = R[i].r + 1;
      std::vector<Region<F>> sub;
      ZState z = run(T, C, done, sub);
      if (z != ZState::Whole) all_whole = false;
      if (z != ZState::Zero) all_zero = false;
      if (z != ZState::Zero && !want_support) return ZState::Partial;
      if (z == ZState::Whole) local.push_back(C);
      local.insert(local.end(), sub.begin(), sub.end());
    }
    if (all_zero) return ZState::Zero;
    if (all_whole) return ZState::Whole;
    out.insert(out.end(), local.begin(), local.end());
    return ZState::Partial;
  }

  /// Coordinate i carries only characters psi(a_i x_i); group by a_i.
  ZState by_frequency(const std::vector<DTerm<F>>& T, const Region<F>& R, std::vector<bool> done, size_t i, std::vector<Region<F>>& out, bool whole_region) {
    std::map<typename F::elem, std::vector<DTerm<F>>> g;
    for (auto t : T) {
      typename F::elem a = t.a[i];
      t.a[i] = K.zero();
      g[a].push_back(t);
    }
    done[i] = true;
    int live = 0;
    ZState last = ZState::Zero;
    std::vector<Region<F>> local;
    for (auto& [a, ts] : g) {
      std::vector<Region<F>> sub;
      ZState z = run(ts, R, done, sub);
      if (z == ZState::Zero) continue;
      if (!want_support) return ZState::Partial;
      ++live;
      last = z;
      if (z == ZState::Whole) local.push_back(R);
      local.insert(local.end(), sub.begin(), sub.end());
    }
    if (live == 0) return ZState::Zero;
    if (live > 1) exact = false;
    if (live == 1 && whole_region && last == ZState::Whole) return ZState::Whole;
    out.insert(out.end(), local.begin(), local.end());
    return ZState::Partial;
  }
};

/// Terms sharing the same delta coordinates and points.
template <class F>
struct DeltaGroup {
  std::vector<size_t> D, E;
  Vec<F> d;
  std::vector<DTerm<F>> h;
};

template <class F>
std::vector<DeltaGroup<F>> delta_groups(const Dist<F>& u) {
  std::map<std::pair<std::vector<bool>, Vec<F>>, DeltaGroup<F>> g;
  for (auto& t : u.terms) {
    std::vector<bool> mask(u.n);
    Vec<F> pts;
    for (size_t i = 0; i < u.n; ++i) {
      mask[i] = t.f[i].kind == FK::Delta;
      if (mask[i]) pts.push_back(t.f[i].pt);
    }
    auto& G = g[{mask, pts}];
    if (G.D.empty() && G.E.empty()) {
      for (size_t i = 0; i < u.n; ++i) (mask[i] ? G.D : G.E).push_back(i);
      G.d = pts;
    }
    DTerm<F> h{t.c, {}, {}};
    for (size_t i : G.E) {
      h.a.push_back(t.a[i]);
      h.f.push_back(t.f[i]);
    }
    G.h.push_back(h);
  }
  std::vector<DeltaGroup<F>> out;
  for (auto& kv : g) out.push_back(kv.second);
  return out;
}

template <class F>
Region<F> full_region(const F& K, size_t m) {
  return Region<F>(m, RCoord<F>{RK::Full, K.zero(), 0});
}

template <class F>
bool density_is_zero(const F& K, const std::vector<DTerm<F>>& h, size_t m) {
  ZeroTester<F> z{K, false};
  std::vector<Region<F>> sink;
  return z.run(h, full_region(K, m), std::vector<bool>(m, false), sink) == ZState::Zero;
}

/// Exact test u == 0 as a distribution.
template <class F>
bool is_zero(const Dist<F>& u) {
  for (auto& G : delta_groups(u))
    if (!density_is_zero(u.K, G.h, G.E.size())) return false;
  return true;
}

template <class F>
bool same_dist(const Dist<F>& u, const Dist<F>& v) {
  return is_zero(u - v);
}

template <class F>
struct SupportPiece {
  Region<F> base;
  std::vector<size_t> D;  // delta coordinates of the originating group
};

template <class F>
struct SupportInfo {
  std::vector<SupportPiece<F>> support;
  std::vector<SupportPiece<F>> singular;
  bool exact = true;
  bool compact = true;
};

template <class F>
std::vector<Region<F>> density_support(const F& K, const std::vector<DTerm<F>>& h, size_t m, bool& exact) {
  ZeroTester<F> z{K, true};
  std::vector<Region<F>> out;
  Region<F> R = full_region(K, m);
  ZState s = z.run(h, R, std::vector<bool>(m, false), out);
  if (s == ZState::Whole) out.push_back(R);
  exact = exact && z.exact;
  return out;
}

/// Support and singular support; pieces with Full coordinates over-approximate
/// unbounded parts, and `exact` records whether that happened.
template <class F>
SupportInfo<F> support_and_ss(const Dist<F>& u) {
  SupportInfo<F> info;
  for (auto& G : delta_groups(u)) {
    bool ex = true;
    auto pieces = density_support(u.K, G.h, G.E.size(), ex);
    info.exact = info.exact && ex;
    for (auto& pc : pieces) {
      SupportPiece<F> sp;
      sp.base.resize(u.n);
      sp.D = G.D;
      for (size_t j = 0; j < G.D.size(); ++j) sp.base[G.D[j]] = RCoord<F>{RK::Point, G.d[j], 0};
      for (size_t j = 0; j < G.E.size(); ++j) {
        sp.base[G.E[j]] = pc[j];
        if (pc[j].kind == RK::Full) info.compact = false;
      }
      info.support.push_back(sp);
      if (!G.D.empty()) info.singular.push_back(sp);
    }
  }
  return info;
}

/// Exact test whether the support is bounded in the given coordinates.
template <class F>
bool compact_in(const Dist<F>& u, const std::vector<size_t>& coords) {
  auto info = support_and_ss(u);
  for (auto& sp : info.support)
    for (size_t i : coords)
      if (sp.base[i].kind == RK::Full) {
        // A Full piece means some far region is nonzero, since the near part
        // is always reported with finite radii.
        return false;
      }
  return true;
}

/// Smallest radius S with supp u inside B_S(0) on the given coordinates;
/// requires compact_in.
template <class F>
long support_radius(const Dist<F>& u, const std::vector<size_t>& coords) {
  auto info = support_and_ss(u);
  long S = 0;
  for (auto& sp : info.support)
    for (size_t i : coords) {
      const auto& c = sp.base[i];
      if (c.kind == RK::Full) throw MathError("NotProperOnSupport", "support not compact");
      S = std::min(S, u.K.ord(c.c));
      if (c.kind == RK::Ball) S = std::min(S, c.r);
    }
  return S;
}

// ---------------------------------------------------------------------------
// Paley-Wiener representative.
// ---------------------------------------------------------------------------

/// xi -> <u, 1_B psi(. | xi)>.
template <class F>
Cyclo paley_wiener_value(const Dist<F>& u, const Polyball<F>& B, const Vec<F>& xi) {
  Cyclo s(u.K.p, 0);
  for (auto& t : u.terms) {
    Term<F> m = t;
    for (size_t i = 0; i < u.n; ++i) m.a[i] = m.a[i] + xi[i];
    Dist<F> one(u.K, u.n);
    one.terms.push_back(m);
    one.canon();
    for (auto& x : one.terms) s += pair_term(u.K, x, B);
  }
  return s;
}

template <class F>
std::function<Cyclo(const Vec<F>&)> paley_wiener_repr(const Dist<F>& u, const Polyball<F>& B) {
  auto info = support_and_ss(u);
  if (!info.compact) throw MathError("NotCompact", "support not compact");
  for (auto& sp : info.support) {
    for (size_t i = 0; i < u.n; ++i) {
      const auto& c = sp.base[i];
      if (c.kind == RK::Point ? u.K.ord(c.c - B.c[i]) < B.r[i] : (c.r < B.r[i] || u.K.ord(c.c - B.c[i]) < B.r[i]))
        throw MathError("NotCompact", "ball does not contain the support");
    }
  }
  return [u, B](const Vec<F>& xi) { return paley_wiener_value(u, B, xi); };
}

// ---------------------------------------------------------------------------
// Series distributions and B-function views.
// ---------------------------------------------------------------------------

struct Interval {
  Cyclo mid;
  double radius = 0;
  bool exact() const { return radius == 0; }
};

template <class F>
struct Series {
  F K;
  size_t n = 1;
  std::function<Dist<F>(long)> term;
  /// Bound on sum_{j>k} |<term_j, phi>| / sup|phi|.
  std::function<double(long)> tail;
  /// Index after which no term meets supp phi, if known.
  std::function<std::optional<long>(const SB<F>&)> finite_after;
  long truncation = 1;
};

template <class F>
Interval series_pair(const Series<F>& s, const SB<F>& phi, std::optional<long> upto = std::nullopt) {
  long m = upto.value_or(s.truncation);
  Interval iv{Cyclo(s.K.p, 0), 0};
  for (long k = 1; k <= m; ++k) iv.mid += evaluate(s.term(k), phi);
  std::optional<long> fin = s.finite_after ? s.finite_after(phi) : std::nullopt;
  if (fin && *fin <= m) return iv;
  iv.radius = s.tail(m) * phi.sup_norm();
  return iv;
}

/// A distribution known only through its values on balls.
template <class F>
struct BFun {
  F K;
  size_t n = 1;
  std::function<Cyclo(const Vec<F>&, long)> D;

  Cyclo evaluate(const SB<F>& phi) const {
    Cyclo s(K.p, 0);
    for (auto& [c, v] : phi.cells) s += v * D(c, phi.aplus);
    return s;
  }
  bool additive_at(const Vec<F>& x, long r) const {
    Cyclo s(K.p, 0);
    for (auto& ch : Polyball<F>::equal(K, x, r).children(K)) s += D(ch.c, r + 1);
    return s == D(x, r);
  }
};

template <class F>
BFun<F> bfun_view(const Dist<F>& u) {
  return BFun<F>{u.K, u.n, [u](const Vec<F>& x, long r) { return b_function(u, x, r); }};
}

// ---------------------------------------------------------------------------
// Random class instances for tests.
// ---------------------------------------------------------------------------

struct RandomDistOptions {
  int max_terms = 3;
  long lo = 0;       // ball centers drawn from B_lo
  long hi = 2;       // radii in [lo, hi]
  double p_delta = 0.3;
  double p_full = 0.0;
  bool modulate = true;
};

template <class F, class Rng>
Dist<F> random_dist(const F& K, size_t n, Rng& g, const RandomDistOptions& o = {}) {
  Dist<F> u(K, n);
  std::uniform_int_distribution<int> nt(1, o.max_terms);
  std::uniform_real_distribution<double> U(0, 1);
  std::uniform_int_distribution<long> rad(o.lo, o.hi);
  std::uniform_int_distribution<int> cf(-3, 3);
  int k = nt(g);
  for (int j = 0; j < k; ++j) {
    Term<F> t{Cyclo(K.p, mpq_class(cf(g) ? cf(g) : 1)), Vec<F>(n, K.zero()), {}};
    for (size_t i = 0; i < n; ++i) {
      double x = U(g);
      if (x < o.p_delta) {
        t.f.push_back(Factor<F>::delta(K.random(g, o.lo, o.hi)));
      } else if (x < o.p_delta + o.p_full) {
        t.f.push_back(Factor<F>::full(K));
        if (o.modulate) t.a[i] = K.random(g, -1, 1);
      } else {
        long r = rad(g);
        t.f.push_back(Factor<F>::ball(K.random(g, o.lo, r), r));
        if (o.modulate && U(g) < 0.5) t.a[i] = K.random(g, -1, 1);
      }
    }
    u.terms.push_back(t);
  }
  return u.canon();
}

}  // namespace umla

#endif
