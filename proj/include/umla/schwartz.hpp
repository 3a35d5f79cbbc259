#ifndef UMLA_SCHWARTZ_HPP
#define UMLA_SCHWARTZ_HPP

#include "localfield.hpp"

namespace umla {

/// Locally constant compactly supported function on K^n, stored as a table
/// of level-aplus cells inside B_amin(0)^n. Missing cells are zero.
template <class F>
struct SB {
  F K;
  size_t n = 1;
  long amin = 0;
  long aplus = 0;
  std::map<Vec<F>, Cyclo> cells;

  SB(F k, size_t dim, long lo = 0, long hi = 0) : K(std::move(k)), n(dim), amin(lo), aplus(hi) {
    if (hi < lo) throw std::invalid_argument("alpha_plus < alpha_minus");
  }

  bool is_zero() const { return cells.empty(); }

  Cyclo at(const Vec<F>& x) const {
    if (x.size() != n) throw std::invalid_argument("dimension mismatch");
    Vec<F> key(n);
    for (size_t i = 0; i < n; ++i) {
      if (K.ord(x[i]) < amin) return Cyclo(K.p, 0);
      key[i] = K.truncate(x[i], aplus);
    }
    auto it = cells.find(key);
    return it == cells.end() ? Cyclo(K.p, 0) : it->second;
  }

  void add_cell(const Vec<F>& c, const Cyclo& v) {
    if (v.is_zero()) return;
    auto& slot = cells[c];
    slot += v;
    if (slot.is_zero()) cells.erase(c);
  }

  /// Same function at level L >= aplus.
  SB refined(long L) const {
    if (L < aplus) throw std::invalid_argument("refine below current level");
    SB out(K, n, amin, L);
    if (L == aplus) {
      out.cells = cells;
      return out;
    }
    auto sub = cells_1d(K, aplus, L);
    for (auto& [c, v] : cells) {
      std::vector<size_t> idx(n, 0);
      Vec<F> x(n);
      while (true) {
        for (size_t i = 0; i < n; ++i) x[i] = c[i] + sub[idx[i]];
        out.cells.emplace(x, v);
        size_t i = 0;
        while (i < n && ++idx[i] == sub.size()) idx[i++] = 0;
        if (i == n) break;
      }
    }
    return out;
  }

  /// Same function with a smaller support radius and a level at least L.
  SB widened(long lo, long L) const {
    SB out = refined(std::max(L, aplus));
    out.amin = std::min(lo, amin);
    return out;
  }

  /// Smallest constancy level and largest support radius.
  SB normalized() const {
    SB cur = *this;
    if (cur.cells.empty()) return cur;
    while (cur.aplus > cur.amin) {
      long L = cur.aplus - 1;
      std::map<Vec<F>, std::vector<Cyclo>> parents;
      for (auto& [c, v] : cur.cells) {
        Vec<F> pc(n);
        for (size_t i = 0; i < n; ++i) pc[i] = K.truncate(c[i], L);
        parents[pc].push_back(v);
      }
      size_t full = static_cast<size_t>(ipow(K.p, static_cast<long>(n)));
      bool ok = true;
      for (auto& [pc, vs] : parents) {
        if (vs.size() != full) {
          ok = false;
          break;
        }
        for (auto& v : vs)
          if (v != vs[0]) {
            ok = false;
            break;
          }
        if (!ok) break;
      }
      if (!ok) break;
      SB nxt(K, n, cur.amin, L);
      for (auto& [pc, vs] : parents) nxt.cells.emplace(pc, vs[0]);
      cur = nxt;
    }
    long s = cur.aplus;
    for (auto& [c, v] : cur.cells) s = std::min(s, ord_vec(K, c));
    cur.amin = s;
    return cur;
  }

  std::pair<long, long> alpha_bounds() const {
    if (cells.empty()) throw std::domain_error("alpha bounds of the zero function");
    SB m = normalized();
    return {m.amin, m.aplus};
  }

  Cyclo integrate() const {
    Cyclo s(K.p, 0);
    for (auto& [c, v] : cells) s += v;
    return s * Cyclo::qint(K.p, -aplus * static_cast<long>(n));
  }

  double sup_norm() const {
    double m = 0;
    for (auto& [c, v] : cells) m = std::max(m, std::abs(v.approx()));
    return m;
  }
};

template <class F>
void check_same(const SB<F>& a, const SB<F>& b) {
  if (a.n != b.n) throw std::invalid_argument("dimension mismatch");
  if (a.K.p != b.K.p) throw std::invalid_argument("field mismatch");
}

/// Canonical table for a sum of weighted polyball indicators.
template <class F>
SB<F> make_sb(const F& K, size_t n, const std::vector<std::pair<Polyball<F>, Cyclo>>& parts) {
  if (parts.empty()) return SB<F>(K, n, 0, 0);
  long lo = kInf, hi = -kInf;
  for (auto& [b, v] : parts) {
    if (b.dim() != n) throw std::invalid_argument("dimension mismatch");
    for (size_t i = 0; i < n; ++i) {
      lo = std::min({lo, b.r[i], K.ord(b.c[i])});
      hi = std::max(hi, b.r[i]);
    }
  }
  lo = std::min(lo, hi);
  SB<F> out(K, n, lo, hi);
  for (auto& [b, v] : parts) {
    std::vector<std::vector<typename F::elem>> sub(n);
    for (size_t i = 0; i < n; ++i) sub[i] = cells_1d(K, b.r[i], hi);
    std::vector<size_t> idx(n, 0);
    Vec<F> x(n);
    while (true) {
      for (size_t i = 0; i < n; ++i) x[i] = b.c[i] + sub[i][idx[i]];
      out.add_cell(x, v);
      size_t i = 0;
      while (i < n && ++idx[i] == sub[i].size()) idx[i++] = 0;
      if (i == n) break;
    }
  }
  return out;
}

template <class F>
SB<F> indicator(const F& K, const Polyball<F>& b) {
  return make_sb(K, b.dim(), {{b, Cyclo(K.p, 1)}});
}

/// Brings two functions to a common support radius and level.
template <class F>
std::pair<SB<F>, SB<F>> common(const SB<F>& a, const SB<F>& b) {
  check_same(a, b);
  long lo = std::min(a.amin, b.amin), hi = std::max(a.aplus, b.aplus);
  return {a.widened(lo, hi), b.widened(lo, hi)};
}

template <class F>
SB<F> operator+(const SB<F>& a, const SB<F>& b) {
  auto [x, y] = common(a, b);
  for (auto& [c, v] : y.cells) x.add_cell(c, v);
  return x;
}

template <class F>
SB<F> scale(const SB<F>& a, const Cyclo& s) {
  SB<F> out(a.K, a.n, a.amin, a.aplus);
  for (auto& [c, v] : a.cells) out.add_cell(c, v * s);
  return out;
}

template <class F>
SB<F> operator-(const SB<F>& a, const SB<F>& b) {
  return a + scale(b, Cyclo(a.K.p, -1));
}

template <class F>
bool same_function(const SB<F>& a, const SB<F>& b) {
  return (a - b).is_zero();
}

template <class F>
SB<F> multiply(const SB<F>& a, const SB<F>& b) {
  check_same(a, b);
  long hi = std::max(a.aplus, b.aplus);
  long lo = std::min(std::max(a.amin, b.amin), hi);
  SB<F> x = a.refined(hi);
  SB<F> out(a.K, a.n, lo, hi);
  for (auto& [c, v] : x.cells) {
    if (ord_vec(a.K, c) < lo) continue;
    Cyclo w = b.at(c);
    if (!w.is_zero()) out.add_cell(c, v * w);
  }
  return out;
}

/// x -> phi(x - a).
template <class F>
SB<F> translate(const SB<F>& a, const Vec<F>& t) {
  long lo = std::min(a.amin, std::min(ord_vec(a.K, t), a.aplus));
  SB<F> out(a.K, a.n, lo, a.aplus);
  for (auto& [c, v] : a.cells) {
    Vec<F> x(a.n);
    for (size_t i = 0; i < a.n; ++i) x[i] = a.K.truncate(c[i] + t[i], a.aplus);
    out.add_cell(x, v);
  }
  return out;
}

/// x -> phi(-x).
template <class F>
SB<F> reflect(const SB<F>& a) {
  SB<F> out(a.K, a.n, a.amin, a.aplus);
  for (auto& [c, v] : a.cells) {
    Vec<F> x(a.n);
    for (size_t i = 0; i < a.n; ++i) x[i] = a.K.truncate(-c[i], a.aplus);
    out.add_cell(x, v);
  }
  return out;
}

/// x -> psi(a.x) phi(x).
template <class F>
SB<F> modulate(const SB<F>& a, const Vec<F>& m) {
  long L = a.aplus;
  for (auto& mi : m)
    if (!is_inf(a.K.ord(mi))) L = std::max(L, 1 - a.K.ord(mi));
  SB<F> x = a.refined(L);
  SB<F> out(a.K, a.n, a.amin, L);
  for (auto& [c, v] : x.cells) out.add_cell(c, v * psi_dot(a.K, m, c));
  return out;
}

template <class F>
SB<F> fourier_sb(const SB<F>& a) {
  const F& K = a.K;
  SB<F> out(K, a.n, 1 - a.aplus, 1 - a.amin);
  Cyclo v = Cyclo::qint(K.p, -a.aplus * static_cast<long>(a.n));
  for_each_cell(K, a.n, out.amin, out.aplus, [&](const Vec<F>& xi) {
    Cyclo s(K.p, 0);
    for (auto& [c, w] : a.cells) s += w * psi_dot(K, c, xi);
    if (!s.is_zero()) out.cells.emplace(xi, s * v);
  });
  return out;
}

/// (a*b)(z) = int a(z-y) b(y) dy.
template <class F>
SB<F> convolve_sb(const SB<F>& a, const SB<F>& b) {
  check_same(a, b);
  long L = std::max(a.aplus, b.aplus);
  SB<F> x = a.refined(L), y = b.refined(L);
  long lo = std::min(a.amin, b.amin);
  Cyclo v = Cyclo::qint(a.K.p, -L * static_cast<long>(a.n));
  SB<F> out(a.K, a.n, lo, L);
  for (auto& [c1, v1] : x.cells)
    for (auto& [c2, v2] : y.cells) {
      Vec<F> z(a.n);
      for (size_t i = 0; i < a.n; ++i) z[i] = a.K.truncate(c1[i] + c2[i], L);
      out.add_cell(z, v1 * v2 * v);
    }
  return out;
}

/// Tensor product of functions on K^n1 and K^n2.
template <class F>
SB<F> tensor_sb(const SB<F>& a, const SB<F>& b) {
  long hi = std::max(a.aplus, b.aplus), lo = std::min(a.amin, b.amin);
  SB<F> x = a.refined(hi), y = b.refined(hi);
  SB<F> out(a.K, a.n + b.n, lo, hi);
  for (auto& [c1, v1] : x.cells)
    for (auto& [c2, v2] : y.cells) {
      Vec<F> z = c1;
      z.insert(z.end(), c2.begin(), c2.end());
      out.add_cell(z, v1 * v2);
    }
  return out;
}

/// Random function with every cell of B_lo^n at level hi given a random
/// small coefficient (roughly a fraction `fill` of cells are nonzero).
template <class F, class Rng>
SB<F> random_sb(const F& K, size_t n, long lo, long hi, Rng& g, double fill = 0.5) {
  SB<F> out(K, n, lo, hi);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> c(-3, 3);
  std::uniform_int_distribution<int> ang(0, static_cast<int>(K.p) - 1);
  for_each_cell(K, n, lo, hi, [&](const Vec<F>& x) {
    if (u(g) >= fill) return;
    Cyclo v(K.p, mpq_class(c(g)));
    if (u(g) < 0.3) v *= Cyclo::root(K.p, ang(g), 1);
    out.add_cell(x, v);
  });
  return out;
}

}  // namespace umla

#endif
