#ifndef UMLA_PHASE_HPP
#define UMLA_PHASE_HPP

#include <cmath>

#include "microlocal.hpp"
#include "poly.hpp"

namespace umla {

/// Taylor data of p(c + w + y, e + z), grouped by the y-exponent.
template <class F>
struct TaylorCell {
  size_t n = 1, k = 1;
  std::map<std::vector<int>, MPoly<F>> by_beta;  // beta -> polynomial in (w, z)
};

template <class F>
TaylorCell<F> taylor_cell(const F& K, const MPoly<F>& p, size_t n, size_t k, const Vec<F>& c, const Vec<F>& e) {
  const size_t nv = 2 * n + k;
  std::vector<MPoly<F>> sub;
  for (size_t i = 0; i < n; ++i) {
    auto s = MPoly<F>::constant(K, nv, c[i]).plus(K, MPoly<F>::var(K, nv, i)).plus(K, MPoly<F>::var(K, nv, n + i));
    sub.push_back(s);
  }
  for (size_t j = 0; j < k; ++j) sub.push_back(MPoly<F>::constant(K, nv, e[j]).plus(K, MPoly<F>::var(K, nv, 2 * n + j)));
  MPoly<F> Q = p.compose(K, sub, nv);
  TaylorCell<F> T;
  T.n = n;
  T.k = k;
  for (auto& [ex, co] : Q.t) {
    std::vector<int> beta(ex.begin() + static_cast<long>(n), ex.begin() + static_cast<long>(2 * n));
    std::vector<int> rest(ex.begin(), ex.begin() + static_cast<long>(n));
    rest.insert(rest.end(), ex.begin() + static_cast<long>(2 * n), ex.end());
    auto& slot = T.by_beta[beta];
    slot.nv = n + k;
    slot.add_term(K, rest, co);
  }
  return T;
}

template <class F>
struct PhaseCheck {
  long ord_lambda = 0;
  typename F::elem lambda{};
  Vec<F> eta;
  Cyclo value;
};

template <class F>
struct PhaseBound {
  long r = 0;           // I(lambda) = 0 for ord lambda < -r
  long T = 0;           // = -(r + 1)
  long G = 0;           // certified gradient exponent used
  long G_certified = 0;
  long L = 0;
  std::map<int, long> rho;  // |beta| -> lower bound on ord c_beta
  std::vector<PhaseCheck<F>> checks;
  long violations = 0;
  bool confirmed = false;
};

template <class F>
std::string cell_str(const F& K, const Polyball<F>& b) {
  std::string s = "B(";
  for (size_t i = 0; i < b.dim(); ++i) s += (i ? "," : "") + K.str(b.c[i]) + "@" + std::to_string(b.r[i]);
  return s + ")";
}

/// Exact integral of phi(x) psi(lambda p(x, eta)) at a level where the
/// phase is constant on cells.
template <class F>
Cyclo phase_integral(const F& K, const MPoly<F>& p, const SB<F>& phi, const Vec<F>& eta, const typename F::elem& lambda, long M) {
  const size_t n = phi.n;
  Cyclo s(K.p, 0);
  auto sub = cells_1d(K, phi.aplus, M);
  for (auto& [c, v] : phi.cells) {
    std::vector<size_t> idx(n, 0);
    Vec<F> x(n + eta.size());
    for (size_t j = 0; j < eta.size(); ++j) x[n + j] = eta[j];
    while (true) {
      for (size_t i = 0; i < n; ++i) x[i] = c[i] + sub[idx[i]];
      s += v * K.psi(lambda * p.eval(K, x));
      size_t i = 0;
      while (i < n && ++idx[i] == sub.size()) idx[i++] = 0;
      if (i == n) break;
    }
  }
  return s * Cyclo::qint(K.p, -M * static_cast<long>(n));
}

/// Bound r with I_eta(p, phi)(lambda) = 0 for ord lambda < -r and eta in V,
/// from a certified lower bound delta on |grad_x p|, confirmed by exact
/// integration on a window of lambda representatives.
template <class F, class Rng>
PhaseBound<F> stationary_phase_bound(const MPoly<F>& p, const SB<F>& phi, const Polyball<F>& V, const mpq_class& delta,
                                     const LambdaSubgroup<F>& Lam, Rng& g, long window = 2, int eta_samples = 3,
                                     int max_depth = 6) {
  const F& K = phi.K;
  const size_t n = phi.n, k = V.dim();
  if (p.nv != n + k) throw std::invalid_argument("phase has the wrong number of variables");
  if (delta <= 0) throw MathError("DegenerateDelta", "gradient lower bound must be positive");
  if (phi.is_zero()) throw MathError("DegenerateDelta", "test function is zero");
  // g_delta: largest integer g with q^-g >= delta.
  long gdel = static_cast<long>(std::floor(-std::log(delta.get_d()) / std::log(static_cast<double>(K.q())) + 1e-9));
  while (mpq_class(qpow(K.p, -gdel)) < delta) --gdel;
  while (mpq_class(qpow(K.p, -(gdel + 1))) >= delta) ++gdel;

  PhaseBound<F> B;
  B.L = phi.aplus;
  B.G_certified = -kInf;
  std::map<int, long> rho;
  const long rx = phi.aplus;
  struct Job {
    Vec<F> c;
    long rx;
    Polyball<F> V;
    int depth;
  };
  std::vector<Job> jobs;
  for (auto& [c, v] : phi.cells) jobs.push_back({c, rx, V, 0});
  while (!jobs.empty()) {
    Job J = jobs.back();
    jobs.pop_back();
    auto T = taylor_cell(K, p, n, k, J.c, J.V.c);
    std::vector<long> rad(n, J.rx);
    for (size_t j = 0; j < k; ++j) rad.push_back(J.V.r[j]);
    long cellG = kInf;
    for (size_t i = 0; i < n; ++i) {
      std::vector<int> b(n, 0);
      b[i] = 1;
      auto it = T.by_beta.find(b);
      if (it == T.by_beta.end()) continue;
      auto c0 = it->second.const_term(K);
      long o0 = K.ord(c0);
      long orest = it->second.without_const().ord_lower(K, rad);
      if (!is_inf(o0) && o0 < orest) cellG = std::min(cellG, o0);
    }
    if (is_inf(cellG)) {
      if (J.depth >= max_depth) {
        Polyball<F> xb = Polyball<F>::equal(K, J.c, J.rx);
        throw MathError("CertificationFailed", "gradient not certified on x-cell " + cell_str(K, xb) + " eta-cell " + cell_str(K, J.V));
      }
      auto xs = Polyball<F>::equal(K, J.c, J.rx).children(K);
      auto es = J.V.children(K);
      for (auto& xc : xs)
        for (auto& ec : es) jobs.push_back({xc.c, J.rx + 1, ec, J.depth + 1});
      continue;
    }
    if (cellG > gdel) {
      Polyball<F> xb = Polyball<F>::equal(K, J.c, J.rx);
      throw MathError("GradientBelowDelta", "|grad| < delta on x-cell " + cell_str(K, xb) + " eta-cell " + cell_str(K, J.V));
    }
    B.G_certified = std::max(B.G_certified, cellG);
    for (auto& [beta, poly] : T.by_beta) {
      int s = 0;
      for (int x : beta) s += x;
      if (s == 0) continue;
      long lb = poly.ord_lower(K, rad);
      auto it = rho.find(s);
      rho[s] = it == rho.end() ? lb : std::min(it->second, lb);
    }
  }
  B.G = gdel;
  B.rho = rho;
  auto floordiv = [](long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
  long Tb = -B.G - B.L;
  for (auto& [s, r] : rho) {
    if (s < 2 || is_inf(r)) continue;
    Tb = std::min(Tb, floordiv(r - 1 - s * B.G, s - 1));
  }
  B.T = Tb;
  B.r = -(Tb + 1);

  // Confirmation by exact integration.
  std::vector<Vec<F>> etas{V.c};
  for (int s = 0; s < eta_samples; ++s) {
    Vec<F> e = V.c;
    for (size_t j = 0; j < k; ++j) e[j] = e[j] + K.random(g, V.r[j], V.r[j] + 2);
    etas.push_back(e);
  }
  for (long l = Tb - window; l <= Tb + window; ++l)
    for (auto& lam : Lam.reps(l))
      for (auto& eta : etas) {
        long M = B.L;
        for (auto& [s, r] : rho)
          if (!is_inf(r)) M = std::max(M, floordiv(1 - l - r + s - 1, s));
        PhaseCheck<F> c{l, lam, eta, phase_integral(K, p, phi, eta, lam, M)};
        if (l <= Tb && !c.value.is_zero()) ++B.violations;
        B.checks.push_back(c);
      }
  B.confirmed = B.violations == 0;
  return B;
}

}  // namespace umla

#endif
