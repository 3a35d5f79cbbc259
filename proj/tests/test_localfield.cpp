#include <gtest/gtest.h>

#include <random>

#include "umla/localfield.hpp"

using namespace umla;

namespace {

// Independent oracle: p-adic digits of a rational with denominator prime to
// p, computed by long division in machine integers.
std::vector<long> digits_oracle(long num, long den, long p, int count) {
  std::vector<long> d;
  long inv = 1;
  while ((den * inv) % p != 1) ++inv;
  for (int i = 0; i < count; ++i) {
    long m = ((num % p) + p) % p;
    long di = (m * inv) % p;
    d.push_back(di);
    num = (num - di * den) / p;
  }
  return d;
}

}  // namespace

TEST(Ord, Examples) {
  Qp Q3(3), Q2(2);
  Fpt F3(3);
  EXPECT_EQ(Q3.ord(6), 1);
  EXPECT_TRUE(is_inf(Q2.ord(0)));
  EXPECT_EQ(F3.ord(F3.parse("t^-2+1")), -2);
  EXPECT_EQ(Q3.ord(mpq_class(2, 9)), -2);
  EXPECT_EQ(Q2.ord(mpq_class(12, 5)), 2);
}

TEST(Ac, Examples) {
  Qp Q3(3), Q2(2);
  EXPECT_EQ(Q3.ac(6, 1), 2);
  EXPECT_EQ(Q3.ac(6, 2), 2);
  EXPECT_EQ(Q2.ac(12, 2), 3);
  EXPECT_THROW(Q3.ac(0, 1), std::domain_error);
  Fpt F3(3);
  // t^2 (2 + t) : unit part 2 + t, encoded 2 + 1*3.
  EXPECT_EQ(F3.ac(F3.parse("2t^2+t^3"), 2), 5);
}

TEST(Ac, Multiplicative) {
  std::mt19937_64 g(5);
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    Qp K(p);
    Fpt L(p);
    for (int i = 0; i < 300; ++i) {
      auto x = K.random(g, -2, 3), y = K.random(g, -2, 3);
      if (x == 0 || y == 0) continue;
      EXPECT_EQ(K.ac(x * y, 3), K.res_mul(K.ac(x, 3), K.ac(y, 3), 3));
      auto a = L.random(g, -2, 3), b = L.random(g, -2, 3);
      if (a.is_zero() || b.is_zero()) continue;
      EXPECT_EQ(L.ac(a * b, 3), L.res_mul(L.ac(a, 3), L.ac(b, 3), 3));
    }
  }
}

TEST(Digits, MatchLongDivision) {
  Qp K(5);
  for (long num : {1L, -1L, 7L, 123L, -44L})
    for (long den : {1L, 2L, 3L, 7L}) {
      auto d = digits_oracle(num, den, 5, 6);
      mpq_class x(num, den);
      x.canonicalize();
      for (int i = 0; i < 6; ++i) EXPECT_EQ(static_cast<long>(K.digit(x, i)), d[i]) << num << "/" << den << " digit " << i;
    }
}

TEST(Psi, Examples) {
  Qp Q2(2), Q3(3);
  EXPECT_EQ(Q2.psi(1), Cyclo(2, -1));
  EXPECT_EQ(Q2.psi(mpq_class(1, 2)), Cyclo::root(2, 1, 2));
  auto i = Q2.psi(mpq_class(1, 2)).approx();
  EXPECT_NEAR(i.real(), 0, 1e-12);
  EXPECT_NEAR(i.imag(), 1, 1e-12);
  EXPECT_EQ(Q3.psi(3), Cyclo(3, 1));
  Fpt F5(5);
  EXPECT_EQ(F5.psi(F5.parse("3+t^-1")), Cyclo::root(5, 3, 1));
  EXPECT_EQ(F5.psi(F5.parse("t")), Cyclo(5, 1));
}

TEST(Psi, NontrivialOnUnits) {
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    Qp K(p);
    EXPECT_NE(K.psi(1), Cyclo(p, 1));
  }
}

TEST(Psi, OrderDividesConductor) {
  std::mt19937_64 g(9);
  Qp K(3);
  for (int i = 0; i < 200; ++i) {
    auto x = K.random(g, -3, 2);
    long v = K.ord(x);
    if (v > 0) continue;
    Cyclo z = K.psi(x);
    Cyclo w(3, 1);
    for (int64_t k = 0; k < ipow(3, 1 - v); ++k) w *= z;
    EXPECT_EQ(w, Cyclo(3, 1));
  }
}

template <class F>
void additivity_and_ultrametric(const F& K, uint64_t seed) {
  std::mt19937_64 g(seed);
  for (int i = 0; i < 10000; ++i) {
    auto x = K.random(g, -3, 3), y = K.random(g, -3, 3), z = K.random(g, -3, 3);
    ASSERT_EQ(K.psi(x + y), K.psi(x) * K.psi(y));
    long a = K.ord(x - z), b = K.ord(x - y), c = K.ord(y - z);
    ASSERT_GE(a, std::min(b, c));
    if (!(x == K.zero()) && !(y == K.zero())) {
      ASSERT_EQ(K.ord(x * y), K.ord(x) + K.ord(y));
    }
  }
}

TEST(Psi, AdditiveAndUltrametricQp) {
  for (unsigned long p : {2ul, 3ul, 5ul}) additivity_and_ultrametric(Qp(p), p);
}

TEST(Psi, AdditiveAndUltrametricFpt) {
  for (unsigned long p : {2ul, 3ul, 5ul}) additivity_and_ultrametric(Fpt(p), 100 + p);
}

TEST(Cyclo, Examples) {
  Cyclo z = Cyclo::root(3, 1, 1);
  EXPECT_TRUE((Cyclo(3, 1) + z + z * z).is_zero());
  EXPECT_EQ(Cyclo::qhalf(3, 1) * Cyclo::qhalf(3, 1), Cyclo(3, 3));
  Cyclo i = Cyclo::root(2, 1, 2);
  EXPECT_EQ(i * i, Cyclo(2, -1));
  EXPECT_EQ(Cyclo::qhalf(2, -3) * Cyclo::qhalf(2, 3), Cyclo(2, 1));
}

TEST(Cyclo, RingLaws) {
  std::mt19937_64 g(11);
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    auto rnd = [&] {
      std::uniform_int_distribution<int> c(-3, 3), lv(0, 3), h(-2, 2);
      Cyclo s(p, 0);
      for (int k = 0; k < 3; ++k) {
        int L = lv(g);
        std::uniform_int_distribution<int64_t> nm(0, ipow(p, L) - 1);
        s += Cyclo::root(p, nm(g), L) * Cyclo::qhalf(p, h(g)).scaled(c(g));
      }
      return s;
    };
    for (int i = 0; i < 300; ++i) {
      Cyclo a = rnd(), b = rnd(), c = rnd();
      ASSERT_EQ((a + b) + c, a + (b + c));
      ASSERT_EQ(a * (b + c), a * b + a * c);
      ASSERT_EQ(a * b, b * a);
      ASSERT_EQ((a * b) * c, a * (b * c));
      Cyclo n = a;
      n.normalize();
      ASSERT_EQ(n, a);
      ASSERT_TRUE((a - a).is_zero());
      auto d = (a * b).approx() - a.approx() * b.approx();
      ASSERT_LT(std::abs(d), 1e-9 * (1 + std::abs(a.approx() * b.approx())));
    }
  }
}

TEST(Cyclo, ZeroTestMatchesNumerics) {
  // Sums of all p^k-th roots of unity vanish; partial sums do not.
  for (unsigned long p : {2ul, 3ul, 5ul})
    for (int k = 1; k <= 3; ++k) {
      Cyclo s(p, 0);
      int64_t n = ipow(p, k);
      for (int64_t j = 0; j < n; ++j) {
        s += Cyclo::root(p, j, k);
        if (j + 1 < n) {
          EXPECT_FALSE(s.is_zero() && std::abs(s.approx()) > 1e-9);
        }
      }
      EXPECT_TRUE(s.is_zero());
    }
}

TEST(Polyball, Children) {
  Qp Q3(3), Q2(2), Q5(5);
  auto B = Polyball<Qp>::equal(Q3, {0}, 0);
  auto ch = B.children(Q3);
  ASSERT_EQ(ch.size(), 3u);
  EXPECT_EQ(ch[1].c[0], 1);
  EXPECT_EQ(ch[2].r[0], 1);
  EXPECT_EQ(Polyball<Qp>::equal(Q2, {0, 0}, 0).children(Q2).size(), 4u);
  auto c5 = Polyball<Qp>::equal(Q5, {3}, 2).children(Q5);
  std::vector<mpq_class> want{3, 28, 53, 78, 103};
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(c5[i].c[0], want[i]);
    EXPECT_EQ(c5[i].r[0], 3);
  }
}

TEST(Polyball, CanonicalCenter) {
  Qp K(3);
  auto a = Polyball<Qp>::equal(K, {mpq_class(1, 2)}, 2);
  auto b = Polyball<Qp>::equal(K, {mpq_class(1, 2) + 9}, 2);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.contains(K, Vec<Qp>{mpq_class(1, 2)}));
}

template <class F>
void partition_property(const F& K, uint64_t seed) {
  std::mt19937_64 g(seed);
  for (int it = 0; it < 200; ++it) {
    Vec<F> c{K.random(g, -1, 2), K.random(g, -1, 2)};
    auto B = Polyball<F>(K, c, {K.ord(c[0]) < 5 ? 1 : 0, 2});
    auto ch = B.children(K);
    for (int s = 0; s < 20; ++s) {
      Vec<F> x{B.c[0] + K.random(g, B.r[0], B.r[0] + 3), B.c[1] + K.random(g, B.r[1], B.r[1] + 3)};
      int hits = 0;
      for (auto& b : ch) hits += b.contains(K, x);
      ASSERT_EQ(hits, 1);
    }
  }
}

TEST(Polyball, PartitionQp) { partition_property(Qp(3), 1); }
TEST(Polyball, PartitionFpt) { partition_property(Fpt(2), 2); }
