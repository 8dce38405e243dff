#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace curv {

constexpr int kMaxAmbient = 16;
constexpr int kMaxGrade = 3;

// Canonical blades of grade q in R^m: strictly increasing index tuples in
// lexicographic order.
struct BladeTable {
  int m = 0;
  int grade = 0;
  std::vector<std::array<int, 3>> blades;
  // rank[i][j][k] for the sorted tuple; unused slots are 0.
  std::vector<int> rank;

  int index(int i) const { return i; }
  int index(int i, int j) const { return rank[i * m + j]; }
  int index(int i, int j, int k) const { return rank[(i * m + j) * m + k]; }

  static const BladeTable& get(int m, int grade);
};

inline const BladeTable& BladeTable::get(int m, int grade) {
  if (m < 1 || m > kMaxAmbient || grade < 0 || grade > kMaxGrade)
    throw std::invalid_argument("blade table: unsupported (m, grade)");
  static const auto all = [] {
    std::vector<BladeTable> v((kMaxAmbient + 1) * (kMaxGrade + 1));
    for (int mm = 1; mm <= kMaxAmbient; ++mm)
      for (int q = 0; q <= kMaxGrade; ++q) {
        BladeTable& t = v[mm * (kMaxGrade + 1) + q];
        t.m = mm;
        t.grade = q;
        if (q == 0) {
          t.blades.push_back({0, 0, 0});
        } else if (q == 1) {
          for (int i = 0; i < mm; ++i) t.blades.push_back({i, 0, 0});
        } else if (q == 2) {
          t.rank.assign(mm * mm, 0);
          for (int i = 0; i < mm; ++i)
            for (int j = i + 1; j < mm; ++j) {
              t.rank[i * mm + j] = int(t.blades.size());
              t.blades.push_back({i, j, 0});
            }
        } else {
          t.rank.assign(mm * mm * mm, 0);
          for (int i = 0; i < mm; ++i)
            for (int j = i + 1; j < mm; ++j)
              for (int k = j + 1; k < mm; ++k) {
                t.rank[(i * mm + j) * mm + k] = int(t.blades.size());
                t.blades.push_back({i, j, k});
              }
        }
      }
    return v;
  }();
  return all[m * (kMaxGrade + 1) + grade];
}

// Element of Lambda^q(R^m), q <= 3, with coefficients of type T (double or
// Jet). Only canonical blades are stored; component(i, j, ...) applies the
// permutation sign.
template <class T>
class BasicMultivector {
 public:
  BasicMultivector() = default;
  BasicMultivector(int m, int grade) : m_(m), grade_(grade) {
    c_.assign(BladeTable::get(m, grade).blades.size(), T(0.0));
  }
  BasicMultivector(int m, int grade, std::vector<T> coeffs)
      : m_(m), grade_(grade), c_(std::move(coeffs)) {
    if (c_.size() != BladeTable::get(m, grade).blades.size())
      throw std::invalid_argument("multivector: coefficient count mismatch");
  }

  static BasicMultivector scalar(int m, const T& s) {
    BasicMultivector r(m, 0);
    r.c_[0] = s;
    return r;
  }
  static BasicMultivector basis(int m, int i) {
    BasicMultivector r(m, 1);
    r.c_[i] = T(1.0);
    return r;
  }
  static BasicMultivector vector(const std::vector<T>& v) {
    return BasicMultivector(int(v.size()), 1, v);
  }

  int dim() const { return m_; }
  int grade() const { return grade_; }
  std::size_t size() const { return c_.size(); }
  bool empty() const { return m_ == 0; }
  const std::vector<T>& coeffs() const { return c_; }
  std::vector<T>& coeffs() { return c_; }
  T& operator[](std::size_t b) { return c_[b]; }
  const T& operator[](std::size_t b) const { return c_[b]; }

  // Signed component reads for grades 1..3.
  T component(int i) const { return c_[i]; }
  T component(int i, int j) const {
    if (i == j) return T(0.0);
    const BladeTable& t = BladeTable::get(m_, 2);
    return i < j ? c_[t.index(i, j)] : -c_[t.index(j, i)];
  }
  T component(int i, int j, int k) const {
    if (i == j || j == k || i == k) return T(0.0);
    int a[3] = {i, j, k};
    int sign = sort3(a);
    const T& v = c_[BladeTable::get(m_, 3).index(a[0], a[1], a[2])];
    return sign > 0 ? v : -v;
  }
  // Accumulates v into the (i, j) slot with the permutation sign.
  void add(int i, int j, const T& v) {
    if (i == j) return;
    const BladeTable& t = BladeTable::get(m_, 2);
    if (i < j)
      c_[t.index(i, j)] += v;
    else
      c_[t.index(j, i)] -= v;
  }
  void add(int i, int j, int k, const T& v) {
    if (i == j || j == k || i == k) return;
    int a[3] = {i, j, k};
    int sign = sort3(a);
    T& slot = c_[BladeTable::get(m_, 3).index(a[0], a[1], a[2])];
    if (sign > 0)
      slot += v;
    else
      slot -= v;
  }

  BasicMultivector& operator+=(const BasicMultivector& o) {
    if (empty()) return *this = o;
    if (o.empty()) return *this;
    check_same(o);
    for (std::size_t b = 0; b < c_.size(); ++b) c_[b] += o.c_[b];
    return *this;
  }
  BasicMultivector& operator-=(const BasicMultivector& o) {
    if (o.empty()) return *this;
    if (empty()) return *this = -o;
    check_same(o);
    for (std::size_t b = 0; b < c_.size(); ++b) c_[b] -= o.c_[b];
    return *this;
  }
  template <class S>
  BasicMultivector& operator*=(const S& s) {
    for (auto& x : c_) x = x * s;
    return *this;
  }
  BasicMultivector operator-() const {
    BasicMultivector r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend BasicMultivector operator+(BasicMultivector a, const BasicMultivector& b) {
    return a += b;
  }
  friend BasicMultivector operator-(BasicMultivector a, const BasicMultivector& b) {
    return a -= b;
  }
  friend BasicMultivector operator*(BasicMultivector a, const T& s) { return a *= s; }
  friend BasicMultivector operator*(const T& s, BasicMultivector a) { return a *= s; }

  void check_same(const BasicMultivector& o) const {
    if (m_ != o.m_ || grade_ != o.grade_)
      throw std::invalid_argument("multivector: dimension or grade mismatch");
  }

 private:
  static int sort3(int* a) {
    int sign = 1;
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < 2; ++i)
        if (a[i] > a[i + 1]) {
          std::swap(a[i], a[i + 1]);
          sign = -sign;
        }
    return sign;
  }

  int m_ = 0;
  int grade_ = 0;
  std::vector<T> c_;
};

template <class T>
  requires(!std::is_same_v<T, double>)
BasicMultivector<T> operator*(BasicMultivector<T> a, double s) {
  return a *= s;
}
template <class T>
  requires(!std::is_same_v<T, double>)
BasicMultivector<T> operator*(double s, BasicMultivector<T> a) {
  return a *= s;
}

using Multivector = BasicMultivector<double>;

class GradeError : public std::invalid_argument {
 public:
  explicit GradeError(const std::string& what) : std::invalid_argument("grade error: " + what) {}
};

// Wedge with the (p+q)!/(p!q!) convention: e_i ^ e_j has component +1 on (i, j).
template <class T>
BasicMultivector<T> wedge(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: ambient dimension mismatch");
  const int p = a.grade(), q = b.grade(), m = a.dim();
  if (p + q > kMaxGrade) throw GradeError("wedge result above grade 3");
  if (p == 0) return b * a[0];
  if (q == 0) return a * b[0];
  BasicMultivector<T> r(m, p + q);
  if (p == 1 && q == 1) {
    const BladeTable& t = BladeTable::get(m, 2);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) r[t.index(i, j)] = a[i] * b[j] - a[j] * b[i];
    return r;
  }
  // grade 2 ^ grade 1 or grade 1 ^ grade 2 (they agree: even * odd commutes)
  const BasicMultivector<T>& two = (p == 2) ? a : b;
  const BasicMultivector<T>& one = (p == 2) ? b : a;
  const BladeTable& t3 = BladeTable::get(m, 3);
  for (std::size_t bl = 0; bl < t3.blades.size(); ++bl) {
    auto [i, j, k] = t3.blades[bl];
    r[bl] = two.component(i, j) * one[k] - two.component(i, k) * one[j] +
            two.component(j, k) * one[i];
  }
  return r;
}

// Inner product with the 1/p! normalization (blade-orthonormal).
template <class T>
T dot(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  if (a.dim() != b.dim() || a.grade() != b.grade())
    throw GradeError("dot requires equal grade and dimension");
  T s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// a ⌐ b for grade(a) = p in {2,3}, grade(b) = p-1: b is contracted into the
// leading p-1 slots of a with 1/(p-1)! normalization; result has grade 1.
template <class T>
BasicMultivector<T> interior(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  const int p = a.grade(), m = a.dim();
  if (b.grade() != p - 1 || (p != 2 && p != 3) || b.dim() != m)
    throw GradeError("interior needs grades (2,1) or (3,2)");
  BasicMultivector<T> r(m, 1);
  if (p == 2) {
    for (int j = 0; j < m; ++j) {
      T s(0.0);
      for (int i = 0; i < m; ++i)
        if (i != j) s += a.component(i, j) * b[i];
      r[j] = s;
    }
    return r;
  }
  const BladeTable& t2 = BladeTable::get(m, 2);
  for (int k = 0; k < m; ++k) {
    T s(0.0);
    for (std::size_t bl = 0; bl < t2.blades.size(); ++bl) {
      auto [i, j, unused] = t2.blades[bl];
      (void)unused;
      if (i == k || j == k) continue;
      s += a.component(i, j, k) * b[bl];
    }
    r[k] = s;
  }
  return r;
}

// First-order contraction a • b for a 2-vector a and b of grade 1 or 2. On
// vectors it is interior(a, b); on 2-vectors it is extended by the Leibniz
// rule a•(u^v) = (a•u)^v - (a•v)^u.
template <class T>
BasicMultivector<T> bullet(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  if (a.grade() != 2) throw GradeError("bullet needs a 2-vector on the left");
  if (b.grade() == 1) return interior(a, b);
  if (b.grade() != 2) throw GradeError("bullet supports grades 1 and 2 on the right");
  const int m = a.dim();
  const BladeTable& t2 = BladeTable::get(m, 2);
  // Dense antisymmetric arrays; t_kj = sum_i a_ik b_ij, blade (k,l) = t_kl - t_lk.
  std::vector<T> da(m * m, T(0.0)), db(m * m, T(0.0)), t(m * m, T(0.0));
  for (std::size_t bl = 0; bl < t2.blades.size(); ++bl) {
    auto [i, j, unused] = t2.blades[bl];
    (void)unused;
    da[i * m + j] = a[bl];
    da[j * m + i] = -a[bl];
    db[i * m + j] = b[bl];
    db[j * m + i] = -b[bl];
  }
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      if (k == i) continue;
      const T& aik = da[i * m + k];
      for (int j = 0; j < m; ++j)
        if (j != i) t[k * m + j] += aik * db[i * m + j];
    }
  BasicMultivector<T> r(m, 2);
  for (std::size_t bl = 0; bl < t2.blades.size(); ++bl) {
    auto [k, l, unused] = t2.blades[bl];
    (void)unused;
    r[bl] = t[k * m + l] - t[l * m + k];
  }
  return r;
}

// Grade-agnostic product used by form contractions: the ambient pairing
// selected by a tag. Scalars (grade 0) multiply.
enum class Pairing { Dot, Bullet, Wedge, Interior, Scale };

template <class T>
BasicMultivector<T> pair_values(Pairing p, const BasicMultivector<T>& a,
                                const BasicMultivector<T>& b) {
  switch (p) {
    case Pairing::Dot:
      return BasicMultivector<T>::scalar(a.dim(), dot(a, b));
    case Pairing::Bullet:
      return bullet(a, b);
    case Pairing::Wedge:
      return wedge(a, b);
    case Pairing::Interior:
      return interior(a, b);
    case Pairing::Scale:
      if (a.grade() == 0) return b * a[0];
      if (b.grade() == 0) return a * b[0];
      throw GradeError("scale pairing needs a scalar operand");
  }
  throw GradeError("unknown pairing");
}

}  // namespace curv
