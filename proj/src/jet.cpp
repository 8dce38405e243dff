#include "curv/jet.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace curv {
namespace {

struct Pair {
  std::uint8_t a, b, r;
};

struct Tables {
  std::array<std::array<std::uint8_t, 4>, Jet::kSize> exps{};
  std::array<int, Jet::kOrder + 2> count{};     // count[d] = #monomials deg <= d
  std::array<int, Jet::kOrder + 1> pairs_upto{};  // #pairs with result deg <= d
  std::vector<Pair> pairs;
  std::array<std::array<int, 4>, Jet::kSize> up{};  // index of a + e_k, -1 if too high
  int lookup[7][7][7][7];

  Tables() {
    int n = 0;
    for (int d = 0; d <= Jet::kOrder; ++d) {
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b)
          for (int c = d - a - b; c >= 0; --c) {
            int e = d - a - b - c;
            exps[n] = {std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(e)};
            lookup[a][b][c][e] = n;
            ++n;
          }
      count[d] = n;
    }
    for (int i = 0; i < Jet::kSize; ++i)
      for (int k = 0; k < 4; ++k) {
        auto e = exps[i];
        int deg = e[0] + e[1] + e[2] + e[3];
        if (deg >= Jet::kOrder) {
          up[i][k] = -1;
          continue;
        }
        e[k]++;
        up[i][k] = lookup[e[0]][e[1]][e[2]][e[3]];
      }
    for (int d = 0; d <= Jet::kOrder; ++d) {
      for (int i = 0; i < count[d]; ++i)
        for (int j = 0; j < count[d]; ++j) {
          const auto& x = exps[i];
          const auto& y = exps[j];
          int s = x[0] + y[0] + x[1] + y[1] + x[2] + y[2] + x[3] + y[3];
          if (s != d) continue;
          int r = lookup[x[0] + y[0]][x[1] + y[1]][x[2] + y[2]][x[3] + y[3]];
          pairs.push_back({std::uint8_t(i), std::uint8_t(j), std::uint8_t(r)});
        }
      pairs_upto[d] = int(pairs.size());
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace


const std::array<std::uint8_t, 4>& Jet::exponent(int idx) { return tables().exps[idx]; }

int Jet::index(const std::array<int, 4>& a) {
  return tables().lookup[a[0]][a[1]][a[2]][a[3]];
}

void Jet::copy_prefix(const Jet& o) {
  if (const_)
    c_[0] = o.c_[0];
  else
    std::copy_n(o.c_.begin(), count(deg_), c_.begin());
}

void Jet::materialize() {
  if (!const_) return;
  std::fill(c_.begin() + 1, c_.begin() + count(deg_), 0.0);
  const_ = false;
}

Jet Jet::variable(int k, double v, int d) {
  Jet j = zero(d);
  j.c_[0] = v;
  if (d >= 1) j.c_[1 + k] = 1.0;
  return j;
}

Jet Jet::zero(int d) {
  Jet j;
  j.deg_ = d;
  j.materialize();
  return j;
}

double Jet::derivative(const std::array<int, 4>& a) const {
  int total = a[0] + a[1] + a[2] + a[3];
  if (total > deg_) throw DepthError("derivative of order " + std::to_string(total));
  double f = 1.0;
  for (int k = 0; k < 4; ++k)
    for (int i = 2; i <= a[k]; ++i) f *= i;
  return f * coeff(index(a));
}

Jet Jet::truncated(int d) const {
  Jet r(*this);
  r.deg_ = std::min(d, deg_);
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.const_) {
    deg_ = std::min(deg_, o.deg_);
    c_[0] += o.c_[0];
    return *this;
  }
  if (const_) {
    const double v = c_[0];
    const int d = std::min(deg_, o.deg_);
    const_ = false;
    deg_ = d;
    std::copy_n(o.c_.begin(), count(d), c_.begin());
    c_[0] += v;
    return *this;
  }
  deg_ = std::min(deg_, o.deg_);
  int n = count(deg_);
  for (int i = 0; i < n; ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.const_) {
    deg_ = std::min(deg_, o.deg_);
    c_[0] -= o.c_[0];
    return *this;
  }
  if (const_) {
    const double v = c_[0];
    const int d = std::min(deg_, o.deg_);
    const_ = false;
    deg_ = d;
    int n = count(d);
    for (int i = 0; i < n; ++i) c_[i] = -o.c_[i];
    c_[0] += v;
    return *this;
  }
  deg_ = std::min(deg_, o.deg_);
  int n = count(deg_);
  for (int i = 0; i < n; ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  int n = const_ ? 1 : count(deg_);
  for (int i = 0; i < n; ++i) c_[i] *= s;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  if (o.const_) {
    deg_ = std::min(deg_, o.deg_);
    return *this *= o.c_[0];
  }
  return *this = *this * o;
}

Jet Jet::operator-() const {
  Jet r(*this);
  r *= -1.0;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.const_ || b.const_) {
    const Jet& c = a.const_ ? a : b;
    Jet r = a.const_ ? b : a;
    r.deg_ = std::min(a.deg_, b.deg_);
    r *= c.c_[0];
    return r;
  }
  const Tables& t = tables();
  Jet r;
  r.deg_ = std::min(a.deg_, b.deg_);
  r.materialize();
  int np = t.pairs_upto[r.deg_];
  const Pair* p = t.pairs.data();
  const double* x = a.c_.data();
  const double* y = b.c_.data();
  double* z = r.c_.data();
  for (int i = 0; i < np; ++i) z[p[i].r] += x[p[i].a] * y[p[i].b];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet partial(const Jet& f, int k) {
  if (f.deg_ <= 0) throw DepthError("partial derivative of a degree-0 jet");
  if (f.const_) {
    Jet r(0.0);
    r.deg_ = f.deg_ - 1;
    return r;
  }
  const Tables& t = tables();
  Jet r = Jet::zero(f.deg_ - 1);
  int n = Jet::count(r.deg_);
  for (int i = 0; i < n; ++i) r.c_[i] = (t.exps[i][k] + 1) * f.c_[t.up[i][k]];
  return r;
}

Jet series(const Jet& a, const double* taylor) {
  if (a.const_) {
    Jet r(taylor[0]);
    r.deg_ = a.deg_;
    return r;
  }
  Jet delta(a);
  delta.c_[0] = 0.0;
  int d = a.deg_;
  Jet r = Jet::zero(d);
  r.c_[0] = taylor[d];
  for (int n = d - 1; n >= 0; --n) {
    r = r * delta;
    r.c_[0] += taylor[n];
  }
  return r;
}

Jet sin(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  double t[Jet::kOrder + 1];
  double f = 1.0;
  for (int n = 0; n <= Jet::kOrder; ++n) {
    if (n > 0) f *= n;
    double v = (n % 4 == 0) ? s : (n % 4 == 1) ? c : (n % 4 == 2) ? -s : -c;
    t[n] = v / f;
  }
  return series(a, t);
}

Jet cos(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  double t[Jet::kOrder + 1];
  double f = 1.0;
  for (int n = 0; n <= Jet::kOrder; ++n) {
    if (n > 0) f *= n;
    double v = (n % 4 == 0) ? c : (n % 4 == 1) ? -s : (n % 4 == 2) ? -c : s;
    t[n] = v / f;
  }
  return series(a, t);
}

Jet exp(const Jet& a) {
  double e = std::exp(a.value());
  double t[Jet::kOrder + 1];
  double f = 1.0;
  for (int n = 0; n <= Jet::kOrder; ++n) {
    if (n > 0) f *= n;
    t[n] = e / f;
  }
  return series(a, t);
}

Jet pow(const Jet& a, double p) {
  double x = a.value();
  if (x <= 0.0 && p != std::floor(p))
    throw std::domain_error("jet pow: non-positive base with fractional exponent");
  double t[Jet::kOrder + 1];
  // generalized binomial: f^(n)/n! = C(p, n) x^(p-n)
  double binom = 1.0;
  for (int n = 0; n <= Jet::kOrder; ++n) {
    if (n > 0) binom *= (p - (n - 1)) / n;
    t[n] = binom * std::pow(x, p - n);
  }
  return series(a, t);
}

Jet sqrt(const Jet& a) {
  if (a.value() <= 0.0) throw std::domain_error("jet sqrt: non-positive value");
  return pow(a, 0.5);
}

Jet reciprocal(const Jet& a) {
  double x = a.value();
  if (x == 0.0) throw std::domain_error("jet reciprocal: zero value");
  double t[Jet::kOrder + 1];
  double q = 1.0 / x;
  double v = q;
  for (int n = 0; n <= Jet::kOrder; ++n) {
    t[n] = (n % 2 == 0) ? v : -v;
    v *= q;
  }
  return series(a, t);
}

}  // namespace curv
