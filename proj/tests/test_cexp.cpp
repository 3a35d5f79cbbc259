#include <gtest/gtest.h>

#include <random>

#include "umla/cexp.hpp"

using namespace umla;
using namespace umla::cexp;

namespace {

int count_kind(const NodeP& n, NK k) {
  int c = n->k == k;
  for (auto& x : n->kids) c += count_kind(x, k);
  return c;
}

template <class F>
Cyclo ev(const F& K, const std::string& src, Env<F> env = {}, const std::map<std::string, Sort>& decl = {}) {
  return eval(compile(src, decl), K, env);
}

}  // namespace

TEST(Parse, Examples) {
  auto t = parse("q^(-2*ord(x)) * psi(x)");
  EXPECT_EQ(count_kind(t, NK::Ord), 1);
  EXPECT_EQ(t->k, NK::Mul);
  auto s = parse("sum(i, 0..ord(x), q^(-i))");
  EXPECT_EQ(s->k, NK::Sum);
  EXPECT_EQ(s->name, "i");
  try {
    parse("ac[1](x");
    FAIL() << "expected a syntax error";
  } catch (const CexpError& e) {
    EXPECT_EQ(e.kind, "SyntaxError");
    EXPECT_EQ(e.offset, 7);
  }
  for (const char* bad : {"", "x +", "ord x", "ac[0](x)", "sum(q, 0..1, 1)", "x ^ y", "[x]", "x $ y", "(x"}) {
    EXPECT_THROW(parse(bad), CexpError) << bad;
  }
  EXPECT_EQ(print(parse("(a + b) + c")), "a + b + c");
  EXPECT_EQ(print(parse("a - (b - c)")), "a - (b - c)");
  EXPECT_EQ(print(parse("[(x == 1 or y == 2) and not r >= 0]")), "[(x == 1 or y == 2) and not r >= 0]");
  EXPECT_EQ(print(parse("[(x + 1)*2 == 3]")), "[(x + 1)*2 == 3]");
}

TEST(Parse, RoundTripRandomAsts) {
  std::mt19937_64 g(11);
  for (int i = 0; i < 1000; ++i) {
    auto t = random_ast(g, 1 + i % 5);
    std::string s = print(t);
    NodeP back;
    ASSERT_NO_THROW(back = parse(s)) << s;
    ASSERT_TRUE(same(t, back)) << s << " -> " << print(back);
  }
}

TEST(Sorts, InferenceAndErrors) {
  auto c = compile("[ord(x - 0) >= r] * psi(y)");
  EXPECT_EQ(c.free.at("x").s, S::VF);
  EXPECT_EQ(c.free.at("r").s, S::Z);
  EXPECT_EQ(c.free.at("y").s, S::VF);
  EXPECT_EQ(compile("[x == 1]").free.at("x").s, S::VF);
  EXPECT_EQ(compile("[n < 1]").free.at("n").s, S::Z);
  auto a = compile("[ac[2](x) == u]");
  EXPECT_EQ(a.free.at("u").s, S::RF);
  EXPECT_EQ(a.free.at("u").m, 2);
  for (const char* bad : {"ord(ac[1](x))", "[psi(x) >= 1]", "q^(ord(x)*ord(y))", "psi(x)/y", "[ac[1](x) == ac[2](x)]",
                          "[x < 1] * psi(x)", "ord(psi(x))", "lift(u)"}) {
    try {
      compile(bad);
      ADD_FAILURE() << "accepted " << bad;
    } catch (const CexpError& e) {
      EXPECT_EQ(e.kind, "SortError") << bad;
      EXPECT_FALSE(e.path.empty());
    }
  }
}

TEST(Eval, Examples) {
  Qp Q3(3), Q2(2), Q5(5);
  Env<Qp> e;
  e.vf["x"] = 9;
  EXPECT_EQ(ev(Q3, "sum(i, 0..ord(x), q^(-i))", e), Cyclo(3, mpq_class(13, 9)));
  e.vf["x"] = 1;
  EXPECT_EQ(ev(Q3, "q^(-2*ord(x))*psi(x)", e), Cyclo(3, 1) * Q3.psi(1));
  EXPECT_EQ(ev(Q3, "psi(x/3)", e), Cyclo::root(3, 1, 2));
  EXPECT_TRUE(ev(Q2, "[ord(x) >= 1] * q^(1/2)", e).is_zero());
  EXPECT_EQ(ev(Q2, "[ord(x) >= 0] * q^(1/2)", e), Cyclo::qhalf(2, 1));
  // Empty range, ord(0) = infinity, ac of zero.
  EXPECT_TRUE(ev(Q3, "sum(i, 3..1, 1)").is_zero());
  Env<Qp> z;
  z.vf["x"] = 0;
  EXPECT_EQ(ev(Q5, "[ord(x) >= 100]", z), Cyclo(5, 1));
  EXPECT_TRUE(ev(Q5, "q^(-ord(x))", z).is_zero());
  try {
    ev(Q5, "[ac[1](x) == 1]", z);
    FAIL();
  } catch (const CexpError& err) {
    EXPECT_EQ(err.kind, "EvalError");
  }
  // Character sums over the residue ring.
  EXPECT_TRUE(ev(Q3, "sumrf(u, 1, psi(lift(u)))").is_zero());
  EXPECT_EQ(ev(Q5, "sumrf(u, 2, 1)"), Cyclo(5, 25));
  Env<Qp> w;
  w.vf["x"] = mpq_class(7, 2);
  EXPECT_EQ(ev(Q5, "sumrf(u, 2, [ac[2](x) == u])", w), Cyclo(5, 1));
  EXPECT_EQ(ev(Q5, "ord(x)*q^(0) + 1", w), Cyclo(5, 1));
}

TEST(Eval, FunctionFieldInstance) {
  Fpt K(3);
  Env<Fpt> e;
  e.vf["x"] = K.parse("2t^-1+1");
  EXPECT_EQ(ev(K, "ord(x)", e), Cyclo(3, -1));
  EXPECT_EQ(ev(K, "psi(x)", e), K.psi(e.vf["x"]));
  EXPECT_EQ(ev(K, "sumrf(u, 1, [ac[1](x) == u])", e), Cyclo(3, 1));
  EXPECT_EQ(ev(K, "[x*x == x^2] + [3 == 0]", e), Cyclo(3, 2));
}

TEST(Eval, SubstitutionCommutesWithEvaluation) {
  Qp Q3(3);
  std::mt19937_64 g(5);
  const char* terms[] = {"q^(-ord(x - y))*psi(x*y)", "sum(i, 0..ord(x*y), q^(-i))*[ord(x) >= n]",
                         "[ac[1](x + 1) == ac[1](y + 2) or ord(x) < n]*psi(x^2/9)", "q^(n/2)*psi(y)"};
  for (auto src : terms) {
    auto t = parse(src);
    std::map<std::string, Sort> decl{{"x", {S::VF}}, {"y", {S::VF}}, {"n", {S::Z}}};
    auto full = typecheck(t, decl);
    for (int k = 0; k < 20; ++k) {
      long cx = std::uniform_int_distribution<long>(1, 60)(g), cn = std::uniform_int_distribution<long>(-3, 3)(g);
      mpq_class yv(std::uniform_int_distribution<long>(1, 30)(g), 1 + 3 * std::uniform_int_distribution<long>(0, 1)(g));
      yv.canonicalize();
      Env<Qp> e;
      e.vf["x"] = cx;
      e.vf["y"] = yv;
      e.z["n"] = ZV{cn};
      Cyclo want = eval(full, Q3, e);
      auto tx = substitute(t, "x", num(cx));
      NodeP nlit = cn < 0 ? mk(NK::Neg, {num(-cn)}) : num(cn);
      auto txn = substitute(tx, "n", nlit);
      Env<Qp> e2;
      e2.vf["y"] = yv;
      EXPECT_EQ(eval(typecheck(txn, {{"y", {S::VF}}}), Q3, e2), want) << print(txn);
    }
  }
}

TEST(Eval, SumSplitting) {
  Qp Q5(5);
  std::mt19937_64 g(9);
  for (int i = 0; i < 50; ++i) {
    long a = std::uniform_int_distribution<long>(-4, 2)(g);
    long b = a + std::uniform_int_distribution<long>(0, 6)(g);
    long k = std::uniform_int_distribution<long>(a - 1, b)(g);
    Env<Qp> e;
    e.vf["x"] = std::uniform_int_distribution<long>(1, 200)(g);
    auto body = std::string("q^(-i)*psi(x/25)*[ord(x) >= i]");
    auto whole = ev(Q5, "sum(i, " + std::to_string(a) + ".." + std::to_string(b) + ", " + body + ")", e);
    auto l = ev(Q5, "sum(i, " + std::to_string(a) + ".." + std::to_string(k) + ", " + body + ")", e);
    auto r = ev(Q5, "sum(i, " + std::to_string(k + 1) + ".." + std::to_string(b) + ", " + body + ")", e);
    EXPECT_EQ(whole, l + r);
  }
}

TEST(Family, ConstantAndDelta) {
  Qp Q5(5);
  auto one = instantiate_b_function(make_family("q^(-r)"), Q5);
  for (long r = -3; r <= 3; ++r) EXPECT_EQ(one.D({mpq_class(7)}, r), Cyclo::qint(5, -r));
  std::mt19937_64 g(3);
  auto fam = make_family("[ord(x - 0) >= r]");
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    Qp K(p);
    auto D = instantiate_b_function(fam, K);
    auto d0 = delta(K, Vec<Qp>{0});
    for (int i = 0; i < 100; ++i) {
      long r = std::uniform_int_distribution<long>(-3, 4)(g);
      mpq_class x = i % 4 == 0 ? mpq_class(0) : K.random(g, -2, 5);
      EXPECT_EQ(D.D({x}, r), b_function(d0, Vec<Qp>{x}, r));
    }
  }
}

TEST(Family, ModulatedConstantAgreesForPositiveRadius) {
  Qp Q3(3);
  auto D = instantiate_b_function(make_family("q^(-r) * psi(x)"), Q3);
  auto u = modulated_constant(Q3, Vec<Qp>{1});
  std::mt19937_64 g(8);
  int mismatches_nonpos = 0;
  for (int i = 0; i < 60; ++i) {
    long r = std::uniform_int_distribution<long>(-2, 3)(g);
    mpq_class x = Q3.random(g, -2, 3);
    if (r >= 1)
      EXPECT_EQ(D.D({x}, r), b_function(u, Vec<Qp>{x}, r));
    else
      mismatches_nonpos += D.D({x}, r) != b_function(u, Vec<Qp>{x}, r);
  }
  EXPECT_GT(mismatches_nonpos, 0);
}

TEST(Family, DisSample) {
  std::mt19937_64 g(21);
  auto delta0 = make_family("[ord(x - 0) >= r]");
  auto planted = make_family("q^(-r) + [r >= 0]");
  auto zero = make_family("0");
  for (unsigned long p : {2ul, 3ul, 5ul}) {
    Qp K(p);
    EXPECT_TRUE(dis_sample(delta0, K, {}, 60, g).pass);
    EXPECT_TRUE(dis_sample(zero, K, {}, 20, g).pass);
    auto bad = dis_sample(planted, K, {}, 60, g);
    EXPECT_FALSE(bad.pass);
    EXPECT_FALSE(bad.witness.empty());
  }
  Fpt F3(3);
  EXPECT_TRUE(dis_sample(delta0, F3, {}, 40, g).pass);
  EXPECT_FALSE(dis_sample(planted, F3, {}, 40, g).pass);
  // A parameterized family: the delta at y.
  auto dy = make_family("[ord(x - y) >= r]", {"x"}, "r", {"y"});
  EXPECT_TRUE(dis_sample(dy, Qp(3), {mpq_class(4)}, 60, g).pass);
  // A two-dimensional density.
  auto dens = make_family("q^(-2*r)*[r >= 0 and ord(x1) >= 0 and ord(x2) >= 0] + [r < 0 and ord(x1) >= r and ord(x2) >= r]", {"x1", "x2"});
  EXPECT_TRUE(dis_sample(dens, Qp(2), {}, 40, g).pass);
}

TEST(Family, FileFormat) {
  auto fam = parse_family_file("# delta at a parameter\npoint: z\nradius: k\nparams: a\n[ord(z - a) >= k]\n");
  EXPECT_EQ(fam.x, std::vector<std::string>{"z"});
  EXPECT_EQ(fam.r, "k");
  EXPECT_EQ(fam.y, std::vector<std::string>{"a"});
  Qp Q3(3);
  auto D = instantiate_b_function(fam, Q3, {mpq_class(1)});
  EXPECT_EQ(D.D({mpq_class(10)}, 2), Cyclo(3, 1));
  EXPECT_TRUE(D.D({mpq_class(10)}, 3).is_zero());
}
