#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace curv {

// Thrown when a computation asks for more derivatives than the jet carries.
class DepthError : public std::runtime_error {
 public:
  explicit DepthError(const std::string& what)
      : std::runtime_error("insufficient derivative order: " + what) {}
};

// Truncated Taylor expansion in 4 variables, total degree <= 6.
//
// Coefficients are raw Taylor coefficients: f(x0 + d) = sum_a c_a d^a.
// Monomials are ordered by total degree, so the coefficients valid through
// degree k form a prefix of length count(k). deg() records how far the
// expansion is exact; products and sums take the minimum, and every partial
// derivative lowers it by one. Constants are exact to the maximal order and
// are stored without their (zero) higher coefficients.
class Jet {
 public:
  static constexpr int kOrder = 6;
  static constexpr int kVars = 4;
  static constexpr int kSize = 210;

  Jet() : deg_(kOrder), const_(true) { c_[0] = 0.0; }
  Jet(double v) : deg_(kOrder), const_(true) { c_[0] = v; }  // NOLINT: implicit from scalars is intended
  Jet(const Jet& o) : deg_(o.deg_), const_(o.const_) { copy_prefix(o); }
  Jet& operator=(const Jet& o) {
    if (this != &o) {
      deg_ = o.deg_;
      const_ = o.const_;
      copy_prefix(o);
    }
    return *this;
  }

  // Coordinate function x_k about value v, exact through degree d.
  static Jet variable(int k, double v, int d = kOrder);
  // Zero jet carrying degree d.
  static Jet zero(int d);

  int deg() const { return deg_; }
  double value() const { return c_[0]; }
  double coeff(int idx) const { return const_ && idx > 0 ? 0.0 : c_[idx]; }
  double& coeff(int idx) {
    materialize();
    return c_[idx];
  }
  // Partial derivative d^a f at the expansion point for a multi-index a.
  double derivative(const std::array<int, 4>& a) const;
  // Jet restricted to degree d <= deg().
  Jet truncated(int d) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(double s);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  // Number of monomials of total degree <= d.
  static constexpr int count(int d) {
    constexpr int n[kOrder + 1] = {1, 5, 15, 35, 70, 126, 210};
    return d < 0 ? 0 : n[d < kOrder ? d : kOrder];
  }
  // Multi-index of the monomial stored at idx.
  static const std::array<std::uint8_t, 4>& exponent(int idx);
  // Storage index of a multi-index (total degree <= kOrder).
  static int index(const std::array<int, 4>& a);

 private:
  void copy_prefix(const Jet& o);
  // Expands a constant into explicit zero-filled coefficients.
  void materialize();

  // Only the first count(deg_) coefficients are meaningful; a constant keeps
  // just c_[0] and treats all higher coefficients as zero.
  std::array<double, kSize> c_;
  int deg_;
  bool const_;

  friend Jet partial(const Jet& f, int k);
  friend Jet series(const Jet& a, const double* taylor);
};

// sum_n taylor[n] (a - a(x0))^n, taylor[n] = f^(n)(a(x0)) / n!.
Jet series(const Jet& a, const double* taylor);

Jet partial(const Jet& f, int k);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet sqrt(const Jet& a);
Jet reciprocal(const Jet& a);
Jet pow(const Jet& a, double p);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace curv
