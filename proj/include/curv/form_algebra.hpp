#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "curv/multivector.hpp"
#include "curv/tensor.hpp"

namespace curv {

// p-form on the parameter domain with Lambda^q(R^m) values and coefficients
// of type T (Jet or double). Components are kept as a full rank-p array with
// lower indices; constructors go through antisymmetrize so the array is
// always alternating.
template <class T>
struct BasicForm {
  using Value = BasicMultivector<T>;
  int p = 0;
  int q = 0;
  int m = 0;
  Tensor<Value> c;

  BasicForm() = default;
  BasicForm(int p_, int q_, int m_) : p(p_), q(q_), m(m_), c(p_, Value(m_, q_)) {
    if (p < 0 || p > kDim) throw std::invalid_argument("form degree out of range");
  }

  Value& operator()(int i) { return c(i); }
  const Value& operator()(int i) const { return c(i); }
  Value& operator()(int i, int j) { return c(i, j); }
  const Value& operator()(int i, int j) const { return c(i, j); }
  Value& operator()(int i, int j, int k) { return c(i, j, k); }
  const Value& operator()(int i, int j, int k) const { return c(i, j, k); }

  BasicForm& operator+=(const BasicForm& o) {
    check_shape(o);
    for (std::size_t f = 0; f < c.size(); ++f) c.at(f) += o.c.at(f);
    return *this;
  }
  BasicForm& operator-=(const BasicForm& o) {
    check_shape(o);
    for (std::size_t f = 0; f < c.size(); ++f) c.at(f) -= o.c.at(f);
    return *this;
  }
  BasicForm& operator*=(double s) {
    for (auto& v : c.data()) v *= s;
    return *this;
  }
  friend BasicForm operator+(BasicForm a, const BasicForm& b) { return a += b; }
  friend BasicForm operator-(BasicForm a, const BasicForm& b) { return a -= b; }
  friend BasicForm operator*(BasicForm a, double s) { return a *= s; }
  friend BasicForm operator*(double s, BasicForm a) { return a *= s; }

 private:
  void check_shape(const BasicForm& o) const {
    if (p != o.p || q != o.q || m != o.m) throw std::invalid_argument("form: shape mismatch");
  }
};

namespace form_detail {

struct Perm {
  std::array<int, 5> p{};
  int sign = 1;
};

// All permutations of {0..n-1} with their signs.
inline const std::vector<Perm>& permutations(int n) {
  static const std::array<std::vector<Perm>, 6> all = [] {
    std::array<std::vector<Perm>, 6> out;
    for (int k = 0; k <= 5; ++k) {
      std::array<int, 5> a{};
      std::iota(a.begin(), a.begin() + k, 0);
      do {
        int inv = 0;
        for (int i = 0; i < k; ++i)
          for (int j = i + 1; j < k; ++j)
            if (a[i] > a[j]) ++inv;
        out[k].push_back({a, inv % 2 ? -1 : 1});
      } while (std::next_permutation(a.begin(), a.begin() + k));
    }
    return out;
  }();
  return all.at(n);
}

inline double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Sign of the permutation sorting idx[0..n) into 0..n-1, or 0 on repeats.
inline int levi_sign(const std::array<int, 5>& idx, int n) {
  int inv = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) ++inv;
    }
  return inv % 2 ? -1 : 1;
}

inline int value_grade(Pairing pr, int qa, int qb) {
  switch (pr) {
    case Pairing::Dot:
      return 0;
    case Pairing::Bullet:
      return qb;
    case Pairing::Wedge:
      return qa + qb;
    case Pairing::Interior:
      return 1;
    case Pairing::Scale:
      return qa == 0 ? qb : qa;
  }
  return 0;
}

}  // namespace form_detail

// Raises every index with ginv.
template <class T>
Tensor<BasicMultivector<T>> raise_with(const Tensor<T>& ginv, const Tensor<BasicMultivector<T>>& t) {
  Tensor<BasicMultivector<T>> cur = t;
  for (int s = 0; s < t.rank(); ++s) {
    Tensor<BasicMultivector<T>> nxt(t.rank());
    for (std::size_t f = 0; f < cur.size(); ++f) {
      auto idx = cur.unflatten(f);
      const int i = idx[s];
      BasicMultivector<T> acc;
      for (int a = 0; a < kDim; ++a) {
        idx[s] = a;
        acc += cur.at(cur.flatten(idx)) * ginv(i, a);
      }
      nxt.at(f) = std::move(acc);
    }
    cur = std::move(nxt);
  }
  return cur;
}

// Alternating projection (1/p!) sum_sigma sign(sigma) t_sigma.
template <class T>
BasicForm<T> antisymmetrize(const Tensor<BasicMultivector<T>>& t, int q, int m) {
  using namespace form_detail;
  const int p = t.rank();
  BasicForm<T> out(p, q, m);
  const auto& perms = permutations(p);
  const double inv = 1.0 / factorial(p);
  for (std::size_t f = 0; f < out.c.size(); ++f) {
    auto idx = out.c.unflatten(f);
    if (p > 1 && levi_sign(idx, p) == 0) continue;
    BasicMultivector<T> acc(m, q);
    for (const Perm& s : perms) {
      std::array<int, 5> j{};
      for (int k = 0; k < p; ++k) j[k] = idx[s.p[k]];
      if (s.sign > 0)
        acc += t.at(t.flatten(j));
      else
        acc -= t.at(t.flatten(j));
    }
    out.c.at(f) = acc * inv;
  }
  return out;
}

// A ^ B with the (p+q)!/(p!q!) convention; values combined by the pairing.
template <class T>
BasicForm<T> form_wedge(const BasicForm<T>& a, const BasicForm<T>& b, Pairing pr) {
  using namespace form_detail;
  const int p = a.p + b.p;
  if (p > kDim) throw std::invalid_argument("form_wedge: degree above 4");
  Tensor<BasicMultivector<T>> t(p);
  for (std::size_t f = 0; f < t.size(); ++f) {
    auto idx = t.unflatten(f);
    std::array<int, 5> ia{}, ib{};
    for (int k = 0; k < a.p; ++k) ia[k] = idx[k];
    for (int k = 0; k < b.p; ++k) ib[k] = idx[a.p + k];
    t.at(f) = pair_values(pr, a.c.at(a.c.flatten(ia)), b.c.at(b.c.flatten(ib)));
  }
  BasicForm<T> out = antisymmetrize(t, value_grade(pr, a.q, b.q), a.m);
  out *= factorial(p) / (factorial(a.p) * factorial(b.p));
  return out;
}

// A ⌐ B for deg B <= deg A: B enters the leading slots of A with 1/(deg B)!
// normalization; the trailing slots of A survive.
template <class T>
BasicForm<T> form_interior(const Tensor<T>& ginv, const BasicForm<T>& a, const BasicForm<T>& b, Pairing pr) {
  using namespace form_detail;
  if (b.p > a.p) throw std::invalid_argument("form_interior: needs deg B <= deg A");
  const int r = a.p - b.p;
  auto bup = raise_with(ginv, b.c);
  BasicForm<T> out(r, value_grade(pr, a.q, b.q), a.m);
  const double inv = 1.0 / factorial(b.p);
  for (std::size_t f = 0; f < out.c.size(); ++f) {
    auto o = out.c.unflatten(f);
    BasicMultivector<T> acc;
    for (std::size_t g = 0; g < bup.size(); ++g) {
      auto j = bup.unflatten(g);
      std::array<int, 5> idx{};
      for (int k = 0; k < b.p; ++k) idx[k] = j[k];
      for (int k = 0; k < r; ++k) idx[b.p + k] = o[k];
      acc += pair_values(pr, a.c.at(a.c.flatten(idx)), bup.at(g));
    }
    out.c.at(f) = acc * inv;
  }
  return out;
}

// <A, B> = (1/p!) A_{i..} B^{i..}, values combined by the pairing.
template <class T>
BasicMultivector<T> form_inner(const Tensor<T>& ginv, const BasicForm<T>& a, const BasicForm<T>& b, Pairing pr) {
  if (a.p != b.p) throw std::invalid_argument("form_inner: degree mismatch");
  auto bup = raise_with(ginv, b.c);
  BasicMultivector<T> acc;
  for (std::size_t f = 0; f < bup.size(); ++f) acc += pair_values(pr, a.c.at(f), bup.at(f));
  return acc * (1.0 / form_detail::factorial(a.p));
}

// Values combined pointwise with a fixed multivector: (A ⊛ v) or (v ⊛ A).
template <class T>
BasicForm<T> form_pair_right(const BasicForm<T>& a, const BasicMultivector<T>& v, Pairing pr) {
  BasicForm<T> out(a.p, form_detail::value_grade(pr, a.q, v.grade()), a.m);
  for (std::size_t f = 0; f < a.c.size(); ++f) out.c.at(f) = pair_values(pr, a.c.at(f), v);
  return out;
}

template <class T>
BasicForm<T> form_pair_left(const BasicMultivector<T>& v, const BasicForm<T>& a, Pairing pr) {
  BasicForm<T> out(a.p, form_detail::value_grade(pr, v.grade(), a.q), a.m);
  for (std::size_t f = 0; f < a.c.size(); ++f) out.c.at(f) = pair_values(pr, v, a.c.at(f));
  return out;
}

// A ⊙ B for 2-forms: (A ⊙ B)_{i1 i2} = A_{i2}^j ⊛ B_{j i1} - A_{i1}^j ⊛ B_{j i2}.
template <class T>
BasicForm<T> form_odot(const Tensor<T>& ginv, const BasicForm<T>& a, const BasicForm<T>& b, Pairing pr) {
  if (a.p != 2 || b.p != 2) throw std::invalid_argument("form_odot: needs 2-forms");
  BasicForm<T> out(2, form_detail::value_grade(pr, a.q, b.q), a.m);
  // t(i, k) = g^{jl} A_ij ⊛ B_lk
  Tensor<BasicMultivector<T>> t(2);
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      BasicMultivector<T> acc;
      for (int j = 0; j < kDim; ++j)
        for (int l = 0; l < kDim; ++l) {
          if (i == j || l == k) continue;
          acc += pair_values(pr, a(i, j), b(l, k)) * ginv(j, l);
        }
      t(i, k) = acc.empty() ? BasicMultivector<T>(a.m, out.q) : acc;
    }
  for (int i1 = 0; i1 < kDim; ++i1)
    for (int i2 = 0; i2 < kDim; ++i2) out(i1, i2) = t(i2, i1) - t(i1, i2);
  return out;
}

}  // namespace curv
