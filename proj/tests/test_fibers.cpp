#include <gtest/gtest.h>

#include <random>

#include "umla/fibers.hpp"

using namespace umla;

namespace {

/// Residues mod p^k of zeros in Z_p, found by lifting congruence solutions
/// digit by digit to modulus p^(k + slack).
std::set<mpz_class> brute_roots(const ZPoly& g, unsigned long p, long k, long slack = 8) {
  std::vector<mpz_class> cur{0};
  mpz_class mod = 1;
  for (long i = 0; i < k + slack; ++i) {
    mpz_class next_mod = mod * p;
    std::vector<mpz_class> nxt;
    for (auto& b : cur)
      for (unsigned long d = 0; d < p; ++d) {
        mpz_class x = b + mod * d, v = 0;
        for (size_t j = g.c.size(); j-- > 0;) v = (v * x + g.c[j]) % next_mod;
        if (v == 0) nxt.push_back(x);
      }
    cur = nxt;
    mod = next_mod;
  }
  mpz_class pk = 1;
  for (long i = 0; i < k; ++i) pk *= p;
  std::set<mpz_class> out;
  for (auto& b : cur) out.insert(mpz_class(b % pk));
  return out;
}

std::set<mpz_class> as_set(const std::vector<mpq_class>& v) {
  std::set<mpz_class> s;
  for (auto& x : v) s.insert(x.get_num());
  return s;
}

ZPoly mul_lin(const ZPoly& a, long r) {  // a * (x - r)
  std::vector<mpz_class> c(a.c.size() + 1, 0);
  for (size_t i = 0; i < a.c.size(); ++i) {
    c[i + 1] += a.c[i];
    c[i] -= a.c[i] * r;
  }
  return ZPoly(c);
}

template <class F, class Rng>
SB<F> random_away_from_zero(const F& K, Rng& g) {
  std::uniform_int_distribution<long> o(0, 1), extra(1, 2);
  std::uniform_int_distribution<int> cf(-2, 3);
  std::vector<std::pair<Polyball<F>, Cyclo>> parts;
  for (int i = 0; i < 3; ++i) {
    long v = o(g);
    typename F::elem y = (K.random(g, 0, 2) * K.unif_pow(1) + K.lift(1 + static_cast<long>(g() % (K.p - 1)))) * K.unif_pow(v);
    long r = v + extra(g);
    parts.push_back({Polyball<F>::equal(K, Vec<F>{y}, r), Cyclo(K.p, mpq_class(cf(g)))});
  }
  return make_sb(K, 1, parts);
}

}  // namespace

TEST(Roots, Examples) {
  Qp Q3(3), Q2(2);
  auto r1 = padic_roots(Q3, ZPoly::parse("x^2 - 4"), 2);
  EXPECT_EQ(as_set(r1), (std::set<mpz_class>{2, 7}));
  EXPECT_EQ(as_set(r1), brute_roots(ZPoly::parse("x^2 - 4"), 3, 2));
  auto r2 = padic_roots(Q2, ZPoly::parse("x^2 - 1"), 3);
  EXPECT_EQ(as_set(r2), (std::set<mpz_class>{1, 7}));
  EXPECT_EQ(as_set(r2), brute_roots(ZPoly::parse("x^2 - 1"), 2, 3));
  EXPECT_TRUE(padic_roots(Q3, ZPoly::parse("x^2 - 2"), 4).empty());
  try {
    padic_roots(Q3, ZPoly::parse("x^2"), 3);
    FAIL();
  } catch (const MathError& e) {
    EXPECT_EQ(e.code, "ClusterUnresolved");
  }
  // Precision too low to split the pair +-1 over Q2.
  EXPECT_THROW(padic_roots(Q2, ZPoly::parse("x^2 - 1"), 1, 0), MathError);
  Fpt F5(5);
  auto r3 = padic_roots(F5, ZPoly::parse("x^2 - 4"), 1);
  ASSERT_EQ(r3.size(), 2u);
}

TEST(Roots, CompletenessAgainstCongruences) {
  std::mt19937_64 g(2);
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    Qp K(p);
    int done = 0;
    for (int t = 0; t < 40; ++t) {
      ZPoly f(std::vector<mpz_class>{1});
      int nl = 1 + static_cast<int>(g() % 3);
      for (int i = 0; i < nl; ++i) f = mul_lin(f, static_cast<long>(g() % 40) - 20);
      // an extra quadratic factor x^2 + a x + b
      ZPoly q(std::vector<mpz_class>{static_cast<long>(g() % 11) - 5, static_cast<long>(g() % 7) - 3, 1});
      std::vector<mpz_class> prod(f.c.size() + 2, 0);
      for (size_t i = 0; i < f.c.size(); ++i)
        for (size_t j = 0; j < 3; ++j) prod[i + j] += f.c[i] * q.c[j];
      ZPoly h(prod);
      if (disc_poly(h).c.empty() || disc_poly(h).c[0] == 0) continue;  // repeated zero
      for (long k : {2l, 3l}) {
        std::vector<mpq_class> roots;
        try {
          roots = padic_roots(K, h, k);
        } catch (const MathError&) {
          continue;  // zeros too close for the depth budget
        }
        EXPECT_EQ(as_set(roots), brute_roots(h, p, k, 12)) << h.str() << " p=" << p << " k=" << k;
        ++done;
      }
    }
    EXPECT_GT(done, 20);
  }
}

TEST(Discriminant, CriticalValues) {
  auto d2 = disc_poly(ZPoly::parse("x^2"));
  ASSERT_EQ(d2.degree(), 1);
  EXPECT_EQ(d2.c[0], 0);
  auto d3 = disc_poly(ZPoly::parse("x^3 - x"));
  ASSERT_EQ(d3.degree(), 2);
  // Critical values of x^3 - x satisfy 27 y^2 = 4.
  EXPECT_EQ(d3.c[2] * 4 + d3.c[0] * 27, 0);
  EXPECT_EQ(d3.c[1], 0);
  ZPoly lin = ZPoly::parse("3*x + 1");
  EXPECT_EQ(disc_poly(lin).degree(), 0);
}

TEST(FiberIntegrate, Examples) {
  Qp Q3(3);
  FiberProblem<Qp> P(Q3, ZPoly::parse("x^2"));
  auto one = indicator(Q3, Polyball<Qp>::equal(Q3, {0}, 0));
  EXPECT_EQ(fiber_integrate(P, one, mpq_class(4)).value, Cyclo(3, 2));
  EXPECT_EQ(fiber_integrate(P, one, mpq_class(9)).value, Cyclo(3, 6));
  EXPECT_TRUE(fiber_integrate(P, one, mpq_class(2)).value.is_zero());
  EXPECT_EQ(fiber_integrate(P, one, mpq_class(4)).points.size(), 2u);
  try {
    fiber_integrate(P, one, mpq_class(0));
    FAIL();
  } catch (const MathError& e) {
    EXPECT_EQ(e.code, "OnDiscriminant");
  }
  // The value at 9 against the volume ratio of the pulled-back ball.
  auto ball = indicator(Q3, Polyball<Qp>::equal(Q3, {9}, 3));
  EXPECT_EQ(pullback_integral(P, one, ball), Cyclo(3, mpq_class(2, 9)));
  EXPECT_EQ(pullback_integral(P, one, ball).scaled(27), Cyclo(3, 6));
  Qp Q2(2);
  FiberProblem<Qp> P2(Q2, ZPoly::parse("x^2"));
  EXPECT_EQ(fiber_integrate(P2, indicator(Q2, Polyball<Qp>::equal(Q2, {0}, 0)), mpq_class(1)).value, Cyclo(2, 4));
}

TEST(FiberIntegrate, StableLevelCertificate) {
  std::mt19937_64 g(4);
  Qp Q3(3);
  FiberProblem<Qp> P(Q3, ZPoly::parse("x^3 - x"));
  for (int t = 0; t < 30; ++t) {
    auto phi = random_sb(Q3, 1, 0, 2, g);
    mpq_class y = Q3.random(g, 0, 4);
    auto fv = fiber_integrate(P, phi, y);
    for (int s = 0; s < 5; ++s) {
      mpq_class y2 = y + Q3.random(g, std::max(fv.stable, 0l), fv.stable + 3);
      EXPECT_EQ(fiber_integrate(P, phi, y2).value, fv.value);
    }
  }
}

template <class F>
void change_of_variables(const F& K, int trials, std::mt19937_64& g) {
  for (const char* fs : {"x^2", "x^3 - x"}) {
    FiberProblem<F> P(K, ZPoly::parse(fs));
    if (P.disck.empty()) continue;
    bool etale = P.disck.size() == 1;
    for (int t = 0; t < trials; ++t) {
      auto phi = random_sb(K, 1, -1 + static_cast<long>(g() % 2), 2, g);
      SB<F> h = std::string(fs) == "x^2" && !etale ? random_away_from_zero(K, g) : random_sb(K, 1, -2, 2, g);
      if (std::string(fs) != "x^2" && !etale) {
        // keep g away from the critical values when they are K-points
        auto bad = discriminant_cells(P, -2, 3);
        if (!bad.empty()) continue;
      }
      EXPECT_EQ(pullback_integral(P, phi, h), pushforward_integral(P, phi, h)) << K.name() << " f=" << fs;
    }
  }
}

TEST(FiberIntegrate, ChangeOfVariables) {
  std::mt19937_64 g(12);
  change_of_variables(Qp(3), 15, g);
  change_of_variables(Qp(2), 10, g);
  change_of_variables(Qp(5), 8, g);
  change_of_variables(Fpt(3), 8, g);
  change_of_variables(Fpt(5), 5, g);
}

TEST(Levels, SquareMapOverQ3) {
  Qp Q3(3);
  FiberProblem<Qp> P(Q3, ZPoly::parse("x^2"));
  auto one = level_probe(Q3, 0);
  auto e0 = measure_level(P, one, 0);
  ASSERT_TRUE(e0.resolved);
  EXPECT_EQ(e0.mu, 1);
  auto e2 = measure_level(P, one, 2);
  ASSERT_TRUE(e2.resolved);
  EXPECT_LE(e2.mu, 3);
  auto rep = level_measure(P, {0, 1, 2, 3, 4}, {0, 1, 2, 3}, 2, 14, 2);
  ASSERT_EQ(rep.rows.size(), 20u);
  for (auto& r : rep.rows) {
    EXPECT_TRUE(r.resolved);
    auto base = std::find_if(rep.rows.begin(), rep.rows.end(), [&](const LevelEntry& b) { return b.m == 0 && b.eps == r.eps; });
    EXPECT_LE(r.mu, base->mu + r.m) << "eps=" << r.eps << " m=" << r.m;
  }
  EXPECT_TRUE(rep.fitted);
  EXPECT_LE(rep.a, 2);
  EXPECT_LE(rep.b, 2);
  EXPECT_LE(rep.c, 2);
}

TEST(Levels, JobsDoNotChangeResults) {
  Qp Q5(5);
  FiberProblem<Qp> P(Q5, ZPoly::parse("x^3 - x"));
  auto a = level_measure(P, {0, 1}, {0, 1}, 3, 10, 1);
  auto b = level_measure(P, {0, 1}, {0, 1}, 3, 10, 3);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mu, b.rows[i].mu);
    EXPECT_EQ(a.rows[i].cells, b.rows[i].cells);
  }
}
