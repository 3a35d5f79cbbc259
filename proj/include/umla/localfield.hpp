#ifndef UMLA_LOCALFIELD_HPP
#define UMLA_LOCALFIELD_HPP

#include <gmpxx.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace umla {

/// Valuations live in long; kInf marks ord(0).
constexpr long kInf = LONG_MAX / 4;

inline bool is_inf(long v) { return v >= kInf; }

struct MathError : std::runtime_error {
  std::string code;
  MathError(std::string c, const std::string& what) : std::runtime_error(what), code(std::move(c)) {}
};

inline mpz_class zpow(unsigned long p, unsigned long k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, k);
  return r;
}

/// p^k as a rational, k of either sign.
inline mpq_class qpow(unsigned long p, long k) {
  mpq_class r;
  if (k >= 0) {
    r = mpq_class(zpow(p, static_cast<unsigned long>(k)));
  } else {
    r = mpq_class(mpz_class(1), zpow(p, static_cast<unsigned long>(-k)));
  }
  return r;
}

/// Checked p^k in 64-bit arithmetic.
inline int64_t ipow(unsigned long p, long k) {
  int64_t r = 1;
  for (long i = 0; i < k; ++i) {
    if (r > (int64_t(1) << 62) / static_cast<int64_t>(p)) throw std::overflow_error("p^k overflows 2^62");
    r *= static_cast<int64_t>(p);
  }
  return r;
}

inline bool is_prime(unsigned long p) {
  if (p < 2) return false;
  for (unsigned long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// CycloScalar: sum of c * q^(h/2) * exp(2 pi i num / p^level), h in {0,1}.
// ---------------------------------------------------------------------------

class Cyclo {
 public:
  struct Key {
    int half = 0;
    int level = 0;
    int64_t num = 0;
    bool operator<(const Key& o) const {
      if (half != o.half) return half < o.half;
      if (level != o.level) return level < o.level;
      return num < o.num;
    }
    bool operator==(const Key& o) const { return half == o.half && level == o.level && num == o.num; }
  };

  Cyclo() = default;
  Cyclo(unsigned long p, const mpq_class& c) : p_(p) {
    if (c != 0) t_[Key{}] = c;
  }
  explicit Cyclo(long c) {
    if (c != 0) t_[Key{}] = mpq_class(c);
  }

  /// exp(2 pi i num / p^level).
  static Cyclo root(unsigned long p, int64_t num, int level) {
    Cyclo r;
    r.p_ = p;
    if (level == 0) {
      r.t_[Key{}] = 1;
      return r;
    }
    int64_t n = ipow(p, level);
    num %= n;
    if (num < 0) num += n;
    r.t_[Key{0, level, num}] = 1;
    r.normalize();
    return r;
  }

  /// q^(twice/2).
  static Cyclo qhalf(unsigned long p, long twice) {
    long k = twice >= 0 ? twice / 2 : -((-twice + 1) / 2);
    int h = static_cast<int>(twice - 2 * k);
    Cyclo r;
    r.p_ = p;
    r.t_[Key{h, 0, 0}] = qpow(p, k);
    return r;
  }

  /// Integer power q^k as a rational scalar.
  static Cyclo qint(unsigned long p, long k) { return Cyclo(p, qpow(p, k)); }

  unsigned long p() const { return p_; }
  const std::map<Key, mpq_class>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  /// Value is a rational number (no roots of unity, no sqrt q).
  bool is_rational() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first == Key{}); }
  mpq_class rational() const {
    if (!is_rational()) throw std::logic_error("scalar is not rational");
    return t_.empty() ? mpq_class(0) : t_.begin()->second;
  }

  Cyclo& operator+=(const Cyclo& o) {
    merge_p(o.p_);
    for (auto& [k, c] : o.t_) t_[k] += c;
    normalize();
    return *this;
  }
  Cyclo& operator-=(const Cyclo& o) {
    merge_p(o.p_);
    for (auto& [k, c] : o.t_) t_[k] -= c;
    normalize();
    return *this;
  }
  Cyclo operator-() const {
    Cyclo r = *this;
    for (auto& kv : r.t_) kv.second = -kv.second;
    return r;
  }
  friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
  friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }

  friend Cyclo operator*(const Cyclo& a, const Cyclo& b) {
    Cyclo r;
    r.p_ = a.p_ ? a.p_ : b.p_;
    if (a.p_ && b.p_ && a.p_ != b.p_) throw std::invalid_argument("scalar primes differ");
    if (a.t_.empty() || b.t_.empty()) return r;
    for (auto& [ka, ca] : a.t_) {
      for (auto& [kb, cb] : b.t_) {
        Key k;
        mpq_class c = ca * cb;
        int h = ka.half + kb.half;
        if (h == 2) {
          c *= r.p_;
          h = 0;
        }
        k.half = h;
        k.level = std::max(ka.level, kb.level);
        if (k.level > 0) {
          int64_t n = ipow(r.p_, k.level);
          int64_t x = mulmod(ka.num, ipow(r.p_, k.level - ka.level), n);
          int64_t y = mulmod(kb.num, ipow(r.p_, k.level - kb.level), n);
          k.num = (x + y) % n;
        }
        r.t_[k] += c;
      }
    }
    r.normalize();
    return r;
  }
  Cyclo& operator*=(const Cyclo& o) { return *this = *this * o; }

  Cyclo scaled(const mpq_class& c) const {
    Cyclo r;
    r.p_ = p_;
    if (c == 0) return r;
    r.t_ = t_;
    for (auto& kv : r.t_) kv.second *= c;
    return r;
  }

  friend bool operator==(const Cyclo& a, const Cyclo& b) { return a.t_ == b.t_; }
  friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }
  bool operator<(const Cyclo& o) const { return t_ < o.t_; }

  std::complex<double> approx() const {
    std::complex<double> z = 0;
    const double two_pi = 6.283185307179586476925286766559;
    for (auto& [k, c] : t_) {
      double mag = c.get_d() * (k.half ? std::sqrt(static_cast<double>(p_)) : 1.0);
      double ang = k.level ? two_pi * static_cast<double>(k.num) / static_cast<double>(ipow(p_, k.level)) : 0.0;
      z += std::polar(1.0, ang) * mag;
    }
    return z;
  }
  /// Loose bound on the floating error of approx().
  double approx_error() const { return 1e-12 * (1.0 + static_cast<double>(t_.size())) * (1.0 + std::abs(approx())); }

  std::string str() const {
    if (t_.empty()) return "0";
    std::string s;
    for (auto& [k, c] : t_) {
      if (!s.empty()) s += " + ";
      s += c.get_str();
      if (k.half) s += "*q^(1/2)";
      if (k.level) s += "*z(" + std::to_string(k.num) + "/" + std::to_string(ipow(p_, k.level)) + ")";
    }
    return s;
  }

  /// Power-basis reduction at the maximal level, separately per q^(1/2) slice.
  void normalize() {
    for (auto it = t_.begin(); it != t_.end();) {
      if (it->second == 0)
        it = t_.erase(it);
      else
        ++it;
    }
    if (t_.empty()) return;
    std::map<Key, mpq_class> out;
    for (int h = 0; h < 2; ++h) {
      int top = 0;
      bool any = false;
      for (auto& [k, c] : t_)
        if (k.half == h) {
          any = true;
          top = std::max(top, k.level);
        }
      if (!any) continue;
      if (top == 0) {
        auto it = t_.find(Key{h, 0, 0});
        out[Key{h, 0, 0}] = it->second;
        continue;
      }
      int64_t n = ipow(p_, top);
      int64_t step = n / static_cast<int64_t>(p_);
      int64_t cut = n - step;
      std::map<int64_t, mpq_class> acc;
      for (auto& [k, c] : t_) {
        if (k.half != h) continue;
        acc[k.num * ipow(p_, top - k.level)] += c;
      }
      std::map<int64_t, mpq_class> red;
      for (auto& [j, c] : acc) {
        if (c == 0) continue;
        if (j < cut) {
          red[j] += c;
        } else {
          for (unsigned long i = 1; i < p_; ++i) red[j - static_cast<int64_t>(i) * step] -= c;
        }
      }
      for (auto& [j, c] : red) {
        if (c == 0) continue;
        Key k{h, top, j};
        while (k.level > 0 && k.num % static_cast<int64_t>(p_) == 0) {
          k.num /= static_cast<int64_t>(p_);
          --k.level;
        }
        if (k.level == 0) k.num = 0;
        out[k] += c;
      }
    }
    t_.clear();
    for (auto& [k, c] : out)
      if (c != 0) t_[k] = c;
  }

 private:
  static int64_t mulmod(int64_t a, int64_t b, int64_t n) {
    return static_cast<int64_t>((static_cast<__int128>(a) * b) % n);
  }
  void merge_p(unsigned long q) {
    if (!q) return;
    if (p_ && p_ != q) throw std::invalid_argument("scalar primes differ");
    p_ = q;
  }

  unsigned long p_ = 0;
  std::map<Key, mpq_class> t_;
};

// ---------------------------------------------------------------------------
// Laurent polynomials over Z/p, the elements of F_p((t)) used here.
// ---------------------------------------------------------------------------

struct Laurent {
  unsigned long p = 0;
  std::map<long, unsigned long> c;

  Laurent() = default;
  Laurent(unsigned long pp, long v) : p(pp) {
    long r = v % static_cast<long>(pp);
    if (r < 0) r += static_cast<long>(pp);
    if (r) c[0] = static_cast<unsigned long>(r);
  }
  static Laurent mono(unsigned long pp, long e, unsigned long a) {
    Laurent x;
    x.p = pp;
    a %= pp;
    if (a) x.c[e] = a;
    return x;
  }
  bool is_zero() const { return c.empty(); }

  friend Laurent operator+(const Laurent& a, const Laurent& b) {
    Laurent r = a;
    r.p = a.p ? a.p : b.p;
    for (auto& [e, v] : b.c) {
      unsigned long s = (r.c[e] + v) % r.p;
      if (s)
        r.c[e] = s;
      else
        r.c.erase(e);
    }
    return r;
  }
  Laurent operator-() const {
    Laurent r = *this;
    for (auto& kv : r.c) kv.second = (p - kv.second) % p;
    return r;
  }
  friend Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }
  friend Laurent operator*(const Laurent& a, const Laurent& b) {
    Laurent r;
    r.p = a.p ? a.p : b.p;
    for (auto& [e1, v1] : a.c)
      for (auto& [e2, v2] : b.c) {
        unsigned long s = (r.c[e1 + e2] + v1 * v2) % r.p;
        if (s)
          r.c[e1 + e2] = s;
        else
          r.c.erase(e1 + e2);
      }
    return r;
  }
  Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
  Laurent& operator-=(const Laurent& o) { return *this = *this - o; }
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }
  friend bool operator==(const Laurent& a, const Laurent& b) { return a.c == b.c; }
  friend bool operator!=(const Laurent& a, const Laurent& b) { return !(a == b); }
  friend bool operator<(const Laurent& a, const Laurent& b) { return a.c < b.c; }
};

inline unsigned long inv_mod(unsigned long a, unsigned long p) {
  long t = 0, nt = 1, r = static_cast<long>(p), nr = static_cast<long>(a % p);
  while (nr) {
    long q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw std::domain_error("not invertible mod p");
  return static_cast<unsigned long>(t < 0 ? t + static_cast<long>(p) : t);
}

// ---------------------------------------------------------------------------
// Field policies. Both expose the same interface; algorithms are templates
// over the policy type.
// ---------------------------------------------------------------------------

/// Q_p with exact rational elements.
struct Qp {
  using elem = mpq_class;
  unsigned long p;

  explicit Qp(unsigned long pp) : p(pp) {
    if (!is_prime(pp)) throw std::invalid_argument("p must be prime");
  }
  static constexpr const char* kind = "Qp";
  std::string name() const { return std::string(kind) + ":" + std::to_string(p); }
  unsigned long q() const { return p; }

  elem zero() const { return 0; }
  elem one() const { return 1; }
  elem from_int(long v) const { return v; }
  elem unif_pow(long k) const { return qpow(p, k); }

  long ord(const elem& x) const {
    if (x == 0) return kInf;
    return vz(x.get_num()) - vz(x.get_den());
  }

  elem inv(const elem& x) const {
    if (x == 0) throw std::domain_error("division by zero");
    return 1 / x;
  }
  elem div(const elem& a, const elem& b) const { return a * inv(b); }

  /// Unit part x * p^(-ord x) reduced mod p^m, as an integer in [0, p^m).
  long ac(const elem& x, long m) const {
    if (x == 0) throw std::domain_error("ac of zero undefined");
    elem u = x * unif_pow(-ord(x));
    mpz_class mod = zpow(p, static_cast<unsigned long>(m));
    return residue(u, mod).get_si();
  }

  /// Canonical representative of x modulo B_r(0): sum of its digits below r.
  elem truncate(const elem& x, long r) const {
    long v = ord(x);
    if (v >= r) return 0;
    elem u = x * unif_pow(-v);
    mpz_class mod = zpow(p, static_cast<unsigned long>(r - v));
    return elem(residue(u, mod)) * unif_pow(v);
  }

  /// Digit of x at p^i, in [0, p).
  unsigned long digit(const elem& x, long i) const {
    elem d = (truncate(x, i + 1) - truncate(x, i)) * unif_pow(-i);
    return d.get_num().get_ui();
  }

  Cyclo psi(const elem& x) const {
    long v = ord(x);
    if (v >= 1) return Cyclo(p, 1);
    // frac(x/p) = truncate(x, 1) / p, a rational c / p^(1-v).
    elem t = truncate(x, 1) * unif_pow(-v);
    int64_t num = t.get_num().get_si();
    return Cyclo::root(p, num, static_cast<int>(1 - v));
  }

  long res_mul(long a, long b, long m) const {
    int64_t n = ipow(p, m);
    return static_cast<long>((static_cast<__int128>(a) * b) % n);
  }
  elem lift(long res) const { return res; }

  std::string str(const elem& x) const { return x.get_str(); }
  elem parse(const std::string& s) const {
    elem r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    r.canonicalize();
    return r;
  }

  /// Element with random digits at exponents lo..hi-1.
  template <class Rng>
  elem random(Rng& g, long lo, long hi) const {
    elem r = 0;
    std::uniform_int_distribution<unsigned long> d(0, p - 1);
    for (long i = lo; i < hi; ++i) r += elem(static_cast<long>(d(g))) * unif_pow(i);
    return r;
  }

 private:
  long vz(const mpz_class& z) const {
    mpz_class t = z;
    long v = 0;
    if (t == 0) return kInf;
    while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
      mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
      ++v;
    }
    return v;
  }
  /// u must be a p-adic unit or integer rational; returns u mod `mod` in [0, mod).
  mpz_class residue(const elem& u, const mpz_class& mod) const {
    mpz_class inv;
    if (!mpz_invert(inv.get_mpz_t(), u.get_den().get_mpz_t(), mod.get_mpz_t()) && mod != 1)
      throw std::domain_error("denominator not invertible");
    mpz_class r = (u.get_num() * inv) % mod;
    if (r < 0) r += mod;
    return r;
  }
};

/// F_p((t)) with Laurent polynomial elements.
struct Fpt {
  using elem = Laurent;
  unsigned long p;

  explicit Fpt(unsigned long pp) : p(pp) {
    if (!is_prime(pp)) throw std::invalid_argument("p must be prime");
  }
  static constexpr const char* kind = "Fpt";
  std::string name() const { return std::string(kind) + ":" + std::to_string(p); }
  unsigned long q() const { return p; }

  elem zero() const { return Laurent(p, 0); }
  elem one() const { return Laurent(p, 1); }
  elem from_int(long v) const { return Laurent(p, v); }
  elem unif_pow(long k) const { return Laurent::mono(p, k, 1); }

  long ord(const elem& x) const { return x.c.empty() ? kInf : x.c.begin()->first; }

  /// Only monomials a*t^k are invertible inside Laurent polynomials.
  elem inv(const elem& x) const {
    if (x.c.size() != 1) {
      if (x.c.empty()) throw std::domain_error("division by zero");
      throw std::domain_error("Fpt: inverse of a non-monomial is not a Laurent polynomial");
    }
    auto [e, a] = *x.c.begin();
    return Laurent::mono(p, -e, inv_mod(a, p));
  }
  elem div(const elem& a, const elem& b) const { return a * inv(b); }

  long ac(const elem& x, long m) const {
    if (x.c.empty()) throw std::domain_error("ac of zero undefined");
    long v = ord(x);
    long r = 0, w = 1;
    for (long i = 0; i < m; ++i) {
      auto it = x.c.find(v + i);
      if (it != x.c.end()) r += static_cast<long>(it->second) * w;
      w *= static_cast<long>(p);
    }
    return r;
  }

  elem truncate(const elem& x, long r) const {
    Laurent y;
    y.p = p;
    for (auto& [e, a] : x.c)
      if (e < r) y.c[e] = a;
    return y;
  }
  unsigned long digit(const elem& x, long i) const {
    auto it = x.c.find(i);
    return it == x.c.end() ? 0 : it->second;
  }

  Cyclo psi(const elem& x) const {
    auto it = x.c.find(0);
    if (it == x.c.end()) return Cyclo(p, 1);
    return Cyclo::root(p, static_cast<int64_t>(it->second), 1);
  }

  /// Residues mod t^m are encoded by their base-p digit strings.
  long res_mul(long a, long b, long m) const {
    std::vector<long> x(m), y(m), z(m, 0);
    for (long i = 0; i < m; ++i) {
      x[i] = a % static_cast<long>(p);
      a /= static_cast<long>(p);
      y[i] = b % static_cast<long>(p);
      b /= static_cast<long>(p);
    }
    for (long i = 0; i < m; ++i)
      for (long j = 0; i + j < m; ++j) z[i + j] = (z[i + j] + x[i] * y[j]) % static_cast<long>(p);
    long r = 0, w = 1;
    for (long i = 0; i < m; ++i) {
      r += z[i] * w;
      w *= static_cast<long>(p);
    }
    return r;
  }
  elem lift(long res) const {
    Laurent y;
    y.p = p;
    for (long i = 0; res; ++i) {
      long d = res % static_cast<long>(p);
      if (d) y.c[i] = static_cast<unsigned long>(d);
      res /= static_cast<long>(p);
    }
    return y;
  }

  std::string str(const elem& x) const {
    if (x.c.empty()) return "0";
    std::string s;
    for (auto& [e, a] : x.c) {
      if (!s.empty()) s += "+";
      s += std::to_string(a);
      if (e) s += "t^" + std::to_string(e);
    }
    return s;
  }
  /// Accepts an integer, an integer polynomial "a t^e + ..." written as
  /// "2t^-1+1+t^3", or the bare token "t".
  elem parse(const std::string& s) const {
    Laurent r = zero();
    size_t i = 0;
    auto skip = [&] {
      while (i < s.size() && s[i] == ' ') ++i;
    };
    while (true) {
      skip();
      if (i >= s.size()) break;
      long sign = 1;
      if (s[i] == '+' || s[i] == '-') {
        if (s[i] == '-') sign = -1;
        ++i;
        skip();
      }
      long coef = 1;
      bool have = false;
      if (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) {
        size_t j = i;
        while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
        coef = std::stol(s.substr(i, j - i));
        i = j;
        have = true;
      }
      long e = 0;
      skip();
      if (i < s.size() && s[i] == '*') ++i;
      skip();
      if (i < s.size() && s[i] == 't') {
        ++i;
        e = 1;
        if (i < s.size() && s[i] == '^') {
          ++i;
          size_t j = i;
          if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
          while (j < s.size() && isdigit(static_cast<unsigned char>(s[j]))) ++j;
          e = std::stol(s.substr(i, j - i));
          i = j;
        }
        have = true;
      }
      if (!have) throw std::invalid_argument("bad Laurent polynomial: " + s);
      r = r + Laurent::mono(p, e, static_cast<unsigned long>(((sign * coef) % static_cast<long>(p) + static_cast<long>(p)) % static_cast<long>(p)));
    }
    return r;
  }

  template <class Rng>
  elem random(Rng& g, long lo, long hi) const {
    Laurent r = zero();
    std::uniform_int_distribution<unsigned long> d(0, p - 1);
    for (long i = lo; i < hi; ++i) {
      unsigned long a = d(g);
      if (a) r.c[i] = a;
    }
    return r;
  }
};

// ---------------------------------------------------------------------------
// Generic helpers.
// ---------------------------------------------------------------------------

template <class F>
using Vec = std::vector<typename F::elem>;

template <class F>
typename F::elem dot(const Vec<F>& a, const Vec<F>& b) {
  typename F::elem s = a.empty() ? typename F::elem() : a[0] * b[0];
  for (size_t i = 1; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

template <class F>
Cyclo psi_dot(const F& K, const Vec<F>& a, const Vec<F>& x) {
  if (a.empty()) return Cyclo(K.p, 1);
  return K.psi(dot<F>(a, x));
}

/// Haar volume of a ball B_r in one coordinate: q^(-r).
inline Cyclo vol(unsigned long p, long r) { return Cyclo::qint(p, -r); }

template <class F>
long ord_vec(const F& K, const Vec<F>& x) {
  long v = kInf;
  for (auto& xi : x) v = std::min(v, K.ord(xi));
  return v;
}

/// Product ball with per-coordinate radii and canonical centers.
template <class F>
struct Polyball {
  Vec<F> c;
  std::vector<long> r;

  Polyball() = default;
  Polyball(const F& K, Vec<F> center, std::vector<long> radius) : c(std::move(center)), r(std::move(radius)) {
    for (size_t i = 0; i < c.size(); ++i) c[i] = K.truncate(c[i], r[i]);
  }
  static Polyball equal(const F& K, Vec<F> center, long radius) {
    std::vector<long> rr(center.size(), radius);
    return Polyball(K, std::move(center), rr);
  }
  size_t dim() const { return c.size(); }

  bool contains(const F& K, const Vec<F>& x) const {
    for (size_t i = 0; i < c.size(); ++i)
      if (K.ord(x[i] - c[i]) < r[i]) return false;
    return true;
  }
  bool contains(const F& K, const Polyball& b) const {
    for (size_t i = 0; i < c.size(); ++i)
      if (b.r[i] < r[i] || K.ord(b.c[i] - c[i]) < r[i]) return false;
    return true;
  }
  bool intersects(const F& K, const Polyball& b) const {
    for (size_t i = 0; i < c.size(); ++i)
      if (K.ord(b.c[i] - c[i]) < std::min(r[i], b.r[i])) return false;
    return true;
  }

  /// The q^n sub-polyballs with every radius increased by one.
  std::vector<Polyball> children(const F& K) const {
    std::vector<Polyball> out;
    size_t n = c.size();
    std::vector<unsigned long> digit(n, 0);
    while (true) {
      Polyball b;
      b.c = c;
      b.r = r;
      for (size_t i = 0; i < n; ++i) {
        b.c[i] = c[i] + K.from_int(static_cast<long>(digit[i])) * K.unif_pow(r[i]);
        b.r[i] = r[i] + 1;
      }
      out.push_back(b);
      size_t i = 0;
      while (i < n && ++digit[i] == K.p) digit[i++] = 0;
      if (i == n) break;
    }
    return out;
  }

  bool operator<(const Polyball& o) const {
    if (r != o.r) return r < o.r;
    return c < o.c;
  }
  bool operator==(const Polyball& o) const { return r == o.r && c == o.c; }
};

/// All cells of level L inside B_R(0) in one coordinate (R <= L).
template <class F>
std::vector<typename F::elem> cells_1d(const F& K, long R, long L) {
  std::vector<typename F::elem> out;
  if (L < R) return out;
  int64_t cnt = ipow(K.p, L - R);
  out.reserve(static_cast<size_t>(cnt));
  for (int64_t k = 0; k < cnt; ++k) {
    typename F::elem x = K.zero();
    int64_t v = k;
    for (long i = R; i < L; ++i) {
      long d = static_cast<long>(v % static_cast<int64_t>(K.p));
      v /= static_cast<int64_t>(K.p);
      if (d) x = x + K.from_int(d) * K.unif_pow(i);
    }
    out.push_back(x);
  }
  return out;
}

/// Iterate over every level-L cell center of B_R(0)^n.
template <class F, class Fn>
void for_each_cell(const F& K, size_t n, long R, long L, Fn&& fn) {
  auto one = cells_1d(K, R, L);
  if (one.empty()) return;
  std::vector<size_t> idx(n, 0);
  Vec<F> x(n);
  while (true) {
    for (size_t i = 0; i < n; ++i) x[i] = one[idx[i]];
    fn(static_cast<const Vec<F>&>(x));
    size_t i = 0;
    while (i < n && ++idx[i] == one.size()) idx[i++] = 0;
    if (i == n) break;
  }
}

/// Runtime field choice, written "Qp:<p>" or "Fpt:<p>".
using AnyField = std::variant<Qp, Fpt>;

inline AnyField parse_field(const std::string& desc) {
  auto colon = desc.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("field descriptor must be Qp:<p> or Fpt:<p>: " + desc);
  std::string kind = desc.substr(0, colon), num = desc.substr(colon + 1);
  if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos || num.size() > 9)
    throw std::invalid_argument("bad prime in field descriptor: " + desc);
  unsigned long p = std::stoul(num);
  if (kind == "Qp") return Qp(p);
  if (kind == "Fpt") return Fpt(p);
  throw std::invalid_argument("unknown field kind: " + kind);
}

inline std::string field_name(const AnyField& K) {
  return std::visit([](const auto& k) { return k.name(); }, K);
}

}  // namespace umla

#endif
