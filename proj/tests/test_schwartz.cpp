#include <gtest/gtest.h>

#include <random>

#include "umla/schwartz.hpp"

using namespace umla;

namespace {

/// Riemann sum of phi(x) psi(x.xi) at a level fine enough for exactness.
template <class F>
Cyclo fourier_oracle(const SB<F>& phi, const Vec<F>& xi) {
  const F& K = phi.K;
  long L = phi.aplus;
  for (auto& x : xi)
    if (!is_inf(K.ord(x))) L = std::max(L, 1 - K.ord(x));
  Cyclo s(K.p, 0);
  for_each_cell(K, phi.n, phi.amin, L, [&](const Vec<F>& x) {
    Cyclo v = phi.at(x);
    if (!v.is_zero()) s += v * psi_dot(K, x, xi);
  });
  return s * Cyclo::qint(K.p, -L * static_cast<long>(phi.n));
}

template <class F>
Vec<F> random_point(const F& K, size_t n, std::mt19937_64& g, long lo, long hi) {
  Vec<F> x(n);
  for (auto& xi : x) xi = K.random(g, lo, hi);
  return x;
}

}  // namespace

TEST(MakeSB, Examples) {
  Qp Q2(2);
  auto one = make_sb(Q2, 1, {{Polyball<Qp>::equal(Q2, {0}, 0), Cyclo(2, 1)}});
  EXPECT_EQ(one.amin, 0);
  EXPECT_EQ(one.aplus, 0);
  auto two = make_sb(Q2, 1, {{Polyball<Qp>::equal(Q2, {0}, 0), Cyclo(2, 1)}, {Polyball<Qp>::equal(Q2, {0}, 1), Cyclo(2, 1)}});
  EXPECT_EQ(two.at({2}), Cyclo(2, 2));
  EXPECT_EQ(two.at({1}), Cyclo(2, 1));
  auto halves = make_sb(Q2, 1, {{Polyball<Qp>::equal(Q2, {0}, 1), Cyclo(2, 1)}, {Polyball<Qp>::equal(Q2, {1}, 1), Cyclo(2, 1)}});
  EXPECT_TRUE(same_function(halves, one));
  auto nh = halves.normalized();
  EXPECT_EQ(nh.aplus, 0);
  EXPECT_EQ(nh.cells.size(), 1u);
}

TEST(AlphaBounds, Examples) {
  Qp Q3(3), Q2(2);
  EXPECT_EQ(indicator(Q3, Polyball<Qp>::equal(Q3, {0}, 0)).alpha_bounds(), std::make_pair(0L, 0L));
  EXPECT_EQ(indicator(Q3, Polyball<Qp>::equal(Q3, {1}, 2)).alpha_bounds(), std::make_pair(0L, 2L));
  auto m = modulate(indicator(Q2, Polyball<Qp>::equal(Q2, {0}, 0)), Vec<Qp>{1});
  EXPECT_EQ(m.alpha_bounds(), std::make_pair(0L, 1L));
  EXPECT_THROW(SB<Qp>(Q2, 1).alpha_bounds(), std::domain_error);
}

TEST(Integrate, Examples) {
  Qp Q3(3), Q2(2);
  EXPECT_EQ(indicator(Q3, Polyball<Qp>::equal(Q3, {0}, 2)).integrate(), Cyclo(3, mpq_class(1, 9)));
  EXPECT_EQ(indicator(Q2, Polyball<Qp>::equal(Q2, {0, 0}, 0)).integrate(), Cyclo(2, 1));
  auto m = modulate(indicator(Q2, Polyball<Qp>::equal(Q2, {0}, 0)), Vec<Qp>{1});
  EXPECT_TRUE(m.integrate().is_zero());
}

TEST(Fourier, Examples) {
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    Qp K(p);
    auto O = indicator(K, Polyball<Qp>::equal(K, {0}, 0));
    EXPECT_TRUE(same_function(fourier_sb(O), indicator(K, Polyball<Qp>::equal(K, {0}, 1))));
    auto FF = fourier_sb(fourier_sb(O));
    EXPECT_TRUE(same_function(FF, scale(O, Cyclo::qint(p, -1))));
  }
  Qp Q2(2);
  auto F1 = fourier_sb(indicator(Q2, Polyball<Qp>::equal(Q2, {1}, 1)));
  EXPECT_EQ(F1.at({1}), Cyclo(2, mpq_class(-1, 2)));
  EXPECT_EQ(F1.at({0}), Cyclo(2, mpq_class(1, 2)));
  EXPECT_TRUE(F1.at({mpq_class(1, 2)}).is_zero());
}

template <class F>
void fourier_props(const F& K, uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_int_distribution<long> lo(-1, 1);
  for (size_t n : {1u, 2u}) {
    for (int it = 0; it < 40; ++it) {
      long a = lo(g);
      long spread = n == 1 ? 2 : 1;
      auto phi = random_sb(K, n, a, a + spread, g);
      auto psi = random_sb(K, n, a, a + spread, g);
      auto Fp = fourier_sb(phi);
      // Transform agrees with a brute-force Riemann sum.
      for (int s = 0; s < 3; ++s) {
        auto xi = random_point(K, n, g, -2, 2);
        ASSERT_EQ(Fp.at(xi), fourier_oracle(phi, xi));
      }
      // Inversion.
      ASSERT_TRUE(same_function(fourier_sb(Fp), scale(reflect(phi), Cyclo::qint(K.p, -static_cast<long>(n)))));
      // Self-dual pairing.
      ASSERT_EQ(multiply(Fp, psi).integrate(), multiply(phi, fourier_sb(psi)).integrate());
      // Translation.
      auto t = random_point(K, n, g, -1, 1);
      auto lhs = fourier_sb(translate(phi, t));
      auto rhs = modulate(Fp, t);
      ASSERT_TRUE(same_function(lhs, rhs));
      // Convolution theorem.
      ASSERT_TRUE(same_function(fourier_sb(convolve_sb(phi, psi)), multiply(Fp, fourier_sb(psi))));
      // Linearity.
      ASSERT_TRUE(same_function(fourier_sb(phi + psi), Fp + fourier_sb(psi)));
    }
  }
}

TEST(Fourier, PropertiesQ2) { fourier_props(Qp(2), 1); }
TEST(Fourier, PropertiesQ3) { fourier_props(Qp(3), 2); }
TEST(Fourier, PropertiesF3t) { fourier_props(Fpt(3), 3); }

TEST(Algebra, Examples) {
  Qp Q2(2);
  auto O = indicator(Q2, Polyball<Qp>::equal(Q2, {0}, 0));
  EXPECT_TRUE(same_function(translate(O, Vec<Qp>{1}), indicator(Q2, Polyball<Qp>::equal(Q2, {1}, 0))));
  auto B1 = indicator(Q2, Polyball<Qp>::equal(Q2, {0}, 1));
  EXPECT_TRUE(same_function(multiply(O, B1), B1));
  EXPECT_EQ(modulate(O, Vec<Qp>{1}).at({1}), Cyclo(2, -1));
  auto Q3 = Qp(3);
  EXPECT_THROW(multiply(O, indicator(Q2, Polyball<Qp>::equal(Q2, {0, 0}, 0))), std::invalid_argument);
  (void)Q3;
}

TEST(Convolve, Examples) {
  for (unsigned long p : {2ul, 3ul}) {
    Qp K(p);
    mpq_class a = 1, b = p == 2 ? mpq_class(1, 2) : mpq_class(2);
    auto lhs = convolve_sb(indicator(K, Polyball<Qp>::equal(K, {b}, 1)), indicator(K, Polyball<Qp>::equal(K, {a}, 0)));
    auto rhs = scale(indicator(K, Polyball<Qp>::equal(K, {a + b}, 0)), Cyclo::qint(p, -1));
    EXPECT_TRUE(same_function(lhs, rhs));
  }
  std::mt19937_64 g(4);
  Qp K(3);
  for (int it = 0; it < 20; ++it) {
    auto phi = random_sb(K, 1, -1, 1, g);
    if (phi.is_zero()) continue;
    long m = phi.aplus;
    auto avg = convolve_sb(phi, scale(indicator(K, Polyball<Qp>::equal(K, {0}, m)), Cyclo::qint(3, m)));
    EXPECT_TRUE(same_function(avg, phi));
  }
}
