#include <gtest/gtest.h>

#include <random>

#include "umla/distribution.hpp"

using namespace umla;

namespace {

template <class F>
Polyball<F> ball(const F& K, typename F::elem c, long r) {
  return Polyball<F>::equal(K, Vec<F>{c}, r);
}

template <class F>
SB<F> ind(const F& K, typename F::elem c, long r) {
  return indicator(K, ball(K, c, r));
}

}  // namespace

TEST(Constructors, Examples) {
  Qp Q3(3), Q2(2);
  EXPECT_EQ(evaluate(delta(Q3, Vec<Qp>{0}), ind(Q3, 0, 0)), Cyclo(3, 1));
  EXPECT_EQ(evaluate(from_density(ind(Q2, 0, 0)), ind(Q2, 0, 1)), Cyclo(2, mpq_class(1, 2)));
  auto one = modulated_constant(Q3, Vec<Qp>{0});
  for (long r = -2; r <= 3; ++r) EXPECT_EQ(b_function(one, Vec<Qp>{5}, r), Cyclo::qint(3, -r));
}

TEST(BFunction, Examples) {
  Qp Q2(2), Q3(3);
  auto d0 = delta(Q2, Vec<Qp>{0});
  EXPECT_EQ(b_function(d0, Vec<Qp>{0}, 5), Cyclo(2, 1));
  EXPECT_TRUE(b_function(d0, Vec<Qp>{1}, 1).is_zero());
  auto dens = from_density(ind(Q3, 0, 0));
  for (long r = 0; r < 5; ++r) EXPECT_EQ(b_function(dens, Vec<Qp>{0}, r), Cyclo::qint(3, -r));
  auto m1 = modulated_constant(Q3, Vec<Qp>{1});
  for (long r = -2; r <= 3; ++r) {
    Cyclo want = r >= 1 ? Cyclo::qint(3, -r) : Cyclo(3, 0);
    EXPECT_EQ(b_function(m1, Vec<Qp>{0}, r), want) << r;
  }
}

TEST(Wavelet, Examples) {
  Qp Q3(3);
  auto d0 = delta(Q3, Vec<Qp>{0});
  for (long r = -1; r < 3; ++r) EXPECT_EQ(wavelet(d0, Vec<Qp>{0}, r), Cyclo::qint(3, r));
  auto dens = from_density(ind(Q3, 0, 0));
  EXPECT_EQ(wavelet(dens, Vec<Qp>{0}, 2), Cyclo(3, 1));
  EXPECT_TRUE(wavelet(dens, Vec<Qp>{mpq_class(1, 3)}, 0).is_zero());
}

TEST(Evaluate, Examples) {
  Qp Q2(2), Q3(3);
  EXPECT_EQ(evaluate(delta(Q2, Vec<Qp>{1}), ind(Q2, 0, 0)), Cyclo(2, 1));
  EXPECT_TRUE(evaluate(modulated_constant(Q2, Vec<Qp>{1}), ind(Q2, 0, 0)).is_zero());
  auto u = delta(Q3, Vec<Qp>{0}) + from_density(ind(Q3, 0, 0));
  EXPECT_EQ(evaluate(u, ind(Q3, 0, 0)), Cyclo(3, 2));
}

TEST(FourierDist, Examples) {
  for (unsigned long p : {2ul, 3ul}) {
    Qp K(p);
    auto Fd = fourier_dist(delta(K, Vec<Qp>{0}));
    EXPECT_TRUE(same_dist(Fd, modulated_constant(K, Vec<Qp>{0})));
    auto F1 = fourier_dist(modulated_constant(K, Vec<Qp>{0}));
    EXPECT_TRUE(same_dist(F1, scale(delta(K, Vec<Qp>{0}), Cyclo::qint(p, -1))));
    auto FO = fourier_dist(from_density(ind(K, 0, 0)));
    EXPECT_TRUE(same_dist(FO, from_density(ind(K, 0, 1))));
  }
}

template <class F>
void transpose_and_double(const F& K, uint64_t seed) {
  std::mt19937_64 g(seed);
  RandomDistOptions o;
  o.p_full = 0.2;
  for (size_t n : {1u, 2u})
    for (int it = 0; it < 60; ++it) {
      auto u = random_dist(K, n, g, o);
      auto phi = random_sb(K, n, -1, n == 1 ? 2 : 1, g);
      ASSERT_EQ(evaluate(fourier_dist(u), phi), evaluate(u, fourier_sb(phi)));
      auto FF = fourier_dist(fourier_dist(u));
      auto want = scale(reflect(u), Cyclo::qint(K.p, -static_cast<long>(n)));
      ASSERT_TRUE(FF.same_terms(want));
      ASSERT_TRUE(same_dist(FF, want));
      // Linearity in phi and u.
      auto psi = random_sb(K, n, -1, 1, g);
      auto v = random_dist(K, n, g, o);
      ASSERT_EQ(evaluate(u, phi + psi), evaluate(u, phi) + evaluate(u, psi));
      ASSERT_EQ(evaluate(u + v, phi), evaluate(u, phi) + evaluate(v, phi));
    }
}

TEST(FourierDist, TransposeAndDoubleQ2) { transpose_and_double(Qp(2), 1); }
TEST(FourierDist, TransposeAndDoubleQ3) { transpose_and_double(Qp(3), 2); }
TEST(FourierDist, TransposeAndDoubleF2t) { transpose_and_double(Fpt(2), 3); }

TEST(PaleyWiener, Examples) {
  Qp Q2(2), Q3(3);
  auto B = ball(Q2, 0, -1);
  auto R0 = paley_wiener_repr(delta(Q2, Vec<Qp>{0}), B);
  EXPECT_EQ(R0(Vec<Qp>{mpq_class(1, 4)}), Cyclo(2, 1));
  auto R1 = paley_wiener_repr(delta(Q2, Vec<Qp>{1}), B);
  EXPECT_EQ(R1(Vec<Qp>{1}), Cyclo(2, -1));
  auto O = from_density(ind(Q3, 0, 0));
  auto RO = paley_wiener_repr(O, ball(Q3, 0, 0));
  auto want = fourier_sb(ind(Q3, 0, 0));
  for (mpq_class x : {mpq_class(0), mpq_class(3), mpq_class(1), mpq_class(1, 3)}) EXPECT_EQ(RO(Vec<Qp>{x}), want.at({x}));
  EXPECT_THROW(paley_wiener_repr(modulated_constant(Q3, Vec<Qp>{0}), ball(Q3, 0, 0)), MathError);
}

TEST(PaleyWiener, RandomCompact) {
  std::mt19937_64 g(7);
  Qp K(3);
  for (int it = 0; it < 30; ++it) {
    auto u = random_dist(K, 1, g);
    auto R = paley_wiener_repr(u, ball(K, 0, 0));
    auto Fu = fourier_dist(u);
    for (int s = 0; s < 10; ++s) {
      Vec<Qp> xi{K.random(g, -3, 2)};
      ASSERT_EQ(R(xi), density_value(Fu, xi));
    }
  }
}

TEST(MulBySB, Examples) {
  Qp Q2(2);
  auto d1 = delta(Q2, Vec<Qp>{1});
  EXPECT_TRUE(same_dist(mul_by_sb(d1, ind(Q2, 0, 0)), d1));
  EXPECT_TRUE(is_zero(mul_by_sb(d1, ind(Q2, 0, 1))));
  EXPECT_TRUE(same_dist(mul_by_sb(modulated_constant(Q2, Vec<Qp>{0}), ind(Q2, 0, 0)), from_density(ind(Q2, 0, 0))));
}

TEST(MulBySB, Adjoint) {
  std::mt19937_64 g(8);
  Qp K(2);
  RandomDistOptions o;
  o.p_full = 0.3;
  for (int it = 0; it < 50; ++it) {
    auto u = random_dist(K, 2, g, o);
    auto phi = random_sb(K, 2, -1, 0, g), chi = random_sb(K, 2, -1, 1, g);
    ASSERT_EQ(evaluate(mul_by_sb(u, phi), chi), evaluate(u, multiply(phi, chi)));
  }
}

TEST(ConvolveDist, Examples) {
  Qp Q2(2), Q3(3);
  auto c = convolve_dist(delta(Q2, Vec<Qp>{1}), ind(Q2, 0, 0));
  EXPECT_EQ(density_value(c, Vec<Qp>{1}), Cyclo(2, 1));
  auto phi = ind(Q3, 1, 1);
  auto k = convolve_dist(modulated_constant(Q3, Vec<Qp>{0}), phi);
  for (mpq_class x : {mpq_class(0), mpq_class(1, 3), mpq_class(7)}) EXPECT_EQ(density_value(k, Vec<Qp>{x}), phi.integrate());
}

template <class F>
void convolution_props(const F& K, uint64_t seed) {
  std::mt19937_64 g(seed);
  RandomDistOptions o;
  o.p_full = 0.2;
  for (int it = 0; it < 40; ++it) {
    size_t n = it % 2 ? 2 : 1;
    auto u = random_dist(K, n, g, o);
    auto phi = random_sb(K, n, -1, n == 1 ? 1 : 0, g);
    auto chi = random_sb(K, n, -1, n == 1 ? 1 : 0, g);
    auto lhs = convolve_dist(convolve_dist(u, phi), chi);
    auto rhs = convolve_dist(u, convolve_sb(phi, chi));
    ASSERT_TRUE(same_dist(lhs, rhs));
    if (phi.is_zero()) continue;
    long a = phi.alpha_bounds().second;
    for (long l = a; l < a + 2; ++l) ASSERT_EQ(evaluate(convolve_dist(u, approx_identity(K, n, l)), phi), evaluate(u, phi));
    // Pointwise check of u*phi against <u, phi(x - .)>.
    Vec<F> x(n);
    for (auto& xi : x) xi = K.random(g, -1, 2);
    SB<F> shifted = translate(reflect(phi), x);
    ASSERT_EQ(density_value(convolve_dist(u, phi), x), evaluate(u, shifted));
  }
}

TEST(ConvolveDist, PropertiesQ3) { convolution_props(Qp(3), 11); }
TEST(ConvolveDist, PropertiesF2t) { convolution_props(Fpt(2), 12); }

TEST(Tensor, Examples) {
  Qp K(3);
  auto d = tensor(delta(K, Vec<Qp>{0}), delta(K, Vec<Qp>{0}));
  EXPECT_TRUE(same_dist(d, delta(K, Vec<Qp>{0, 0})));
  auto u = tensor(delta(K, Vec<Qp>{0}), from_density(ind(K, 0, 0)));
  EXPECT_EQ(evaluate(u, indicator(K, Polyball<Qp>::equal(K, {0, 0}, 0))), Cyclo(3, 1));
  std::mt19937_64 g(3);
  RandomDistOptions o;
  o.p_full = 0.2;
  for (int it = 0; it < 40; ++it) {
    auto a = random_dist(K, 1, g, o), b = random_dist(K, 1, g, o);
    EXPECT_TRUE(fourier_dist(tensor(a, b)).same_terms(tensor(fourier_dist(a), fourier_dist(b))));
    auto p1 = random_sb(K, 1, -1, 1, g), p2 = random_sb(K, 1, -1, 1, g);
    EXPECT_EQ(evaluate(tensor(a, b), tensor_sb(p1, p2)), evaluate(a, p1) * evaluate(b, p2));
  }
}

TEST(Support, Examples) {
  Qp Q2(2);
  auto u = delta(Q2, Vec<Qp>{1}) + from_density(ind(Q2, 0, 0));
  auto s = support_and_ss(u);
  ASSERT_EQ(s.singular.size(), 1u);
  EXPECT_EQ(s.singular[0].base[0].kind, RK::Point);
  EXPECT_EQ(s.singular[0].base[0].c, 1);
  auto m = from_density(modulate(ind(Q2, 0, 0), Vec<Qp>{1}));
  EXPECT_TRUE(support_and_ss(m).singular.empty());
  EXPECT_TRUE(support_and_ss(delta(Q2, Vec<Qp>{1}) - delta(Q2, Vec<Qp>{1})).support.empty());
  auto sd = support_and_ss(delta(Q2, Vec<Qp>{3}));
  ASSERT_EQ(sd.support.size(), 1u);
  EXPECT_EQ(sd.support[0].base[0].c, 3);
  EXPECT_TRUE(sd.compact);
  EXPECT_FALSE(support_and_ss(modulated_constant(Q2, Vec<Qp>{1})).compact);
}

TEST(Support, CancellingRepresentations) {
  Qp K(3);
  // 1_O written as a sum of its children, minus 1_O.
  Dist<Qp> u = from_density(ind(K, 0, 0));
  Dist<Qp> v(K, 1);
  for (long c = 0; c < 3; ++c) v = v + from_density(ind(K, c, 1));
  EXPECT_TRUE(is_zero(u - v));
  // 1 - 1_O is supported off O and not compact.
  auto w = modulated_constant(K, Vec<Qp>{0}) - u;
  auto s = support_and_ss(w);
  EXPECT_FALSE(s.compact);
  EXPECT_FALSE(is_zero(w));
  // psi(x) + psi(x) 1_{3O}*(-1) on O is psi(x) on units only.
  auto h = from_density(modulate(ind(K, 0, 0), Vec<Qp>{1})) - from_density(modulate(ind(K, 0, 1), Vec<Qp>{1}));
  auto sh = support_and_ss(h);
  EXPECT_TRUE(sh.exact);
  for (auto& pc : sh.support) EXPECT_EQ(K.ord(pc.base[0].c), 0);
}

/// Support pieces agree with pointwise nonvanishing on a fine grid.
template <class F>
void support_matches_grid(const F& K, uint64_t seed) {
  std::mt19937_64 g(seed);
  RandomDistOptions o;
  o.p_delta = 0;
  o.max_terms = 4;
  for (int it = 0; it < 40; ++it) {
    auto u = random_dist(K, 1, g, o);
    auto s = support_and_ss(u);
    ASSERT_TRUE(s.compact);
    ASSERT_TRUE(s.exact);
    bool any = false;
    for_each_cell(K, 1, 0, 4, [&](const Vec<F>& x) {
      bool nz = !density_value(u, x).is_zero();
      any = any || nz;
      bool in = false;
      for (auto& pc : s.support) in = in || region_contains(K, pc.base, x);
      ASSERT_EQ(nz, in);
    });
    ASSERT_EQ(any, !is_zero(u));
  }
}

TEST(Support, MatchesGridQ2) { support_matches_grid(Qp(2), 21); }
TEST(Support, MatchesGridF3t) { support_matches_grid(Fpt(3), 22); }

TEST(Additivity, Examples) {
  Qp K(3);
  auto B = ball(K, 0, 0);
  EXPECT_TRUE(additivity_check(delta(K, Vec<Qp>{0}), B));
  EXPECT_TRUE(additivity_check(from_density(ind(K, 0, 0)), B));
  auto m = modulated_constant(K, Vec<Qp>{1});
  EXPECT_TRUE(pair_ball(m, B).is_zero());
  Cyclo s(3, 0);
  for (auto& ch : B.children(K)) s += pair_ball(m, ch);
  EXPECT_TRUE(s.is_zero());
  EXPECT_TRUE(additivity_check(m, B));
}

TEST(Additivity, Random) {
  std::mt19937_64 g(31);
  for (unsigned long p : {2ul, 3ul}) {
    Qp K(p);
    RandomDistOptions o;
    o.p_full = 0.2;
    for (int it = 0; it < 200; ++it) {
      size_t n = 1 + it % 2;
      auto u = random_dist(K, n, g, o);
      Vec<Qp> c(n);
      for (auto& x : c) x = K.random(g, -2, 2);
      std::uniform_int_distribution<long> r(-2, 3);
      ASSERT_TRUE(additivity_check(u, Polyball<Qp>::equal(K, c, r(g))));
    }
  }
}

TEST(Series, IntervalsShrink) {
  Qp K(3);
  Series<Qp> s{K, 1,
               [&](long k) { return scale(from_density(ind(K, 0, k)), Cyclo::qint(3, -k)); },
               [](long k) { return std::pow(3.0, -2.0 * (k + 1)) / (1 - 1.0 / 9); },
               nullptr, 3};
  auto phi = ind(K, 0, 0);
  double last = 1e9;
  for (long m = 1; m < 6; ++m) {
    auto iv = series_pair(s, phi, m);
    EXPECT_LT(iv.radius, last);
    last = iv.radius;
    double exact = 0;
    for (long k = 1; k < 40; ++k) exact += std::pow(3.0, -2.0 * k);
    EXPECT_LE(std::abs(iv.mid.approx().real() - exact), iv.radius + 1e-12);
  }
}
