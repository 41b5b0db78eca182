#ifndef VERTEXKIT_RATIONAL_HPP
#define VERTEXKIT_RATIONAL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace vertexkit {

/// Exact arbitrary-precision rational scalar. All coefficient arithmetic in
/// the kernel runs over these; there is no floating point anywhere.
using Rat = mpq_class;

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) {
    throw std::invalid_argument("not a rational literal: " + s);
  }
  r.canonicalize();
  return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline bool rat_is_zero(const Rat& r) { return sgn(r) == 0; }

/// n! as an exact integer-valued rational.
inline Rat factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("factorial of negative integer");
  mpz_class acc = 1;
  for (std::int64_t i = 2; i <= n; ++i) acc *= static_cast<long>(i);
  return Rat(acc);
}

/// binom(n, k) for any integer n (falling-factorial extension) and k >= 0;
/// zero for k < 0. This is the C(n, i) used by divided powers acting on
/// inverted localizers, e.g. binom(-1, 2) = 1.
inline Rat binomial(std::int64_t n, std::int64_t k) {
  if (k < 0) return Rat(0);
  mpz_class num = 1;
  for (std::int64_t i = 0; i < k; ++i) num *= static_cast<long>(n - i);
  Rat r(num);
  r /= factorial(k);
  return r;
}

/// Dual number a + b*eps with eps^2 = 0, used for first-order deformations.
struct DualScalar {
  Rat a;  // value part
  Rat b;  // eps part

  DualScalar() : a(0), b(0) {}
  explicit DualScalar(Rat value) : a(std::move(value)), b(0) {}
  DualScalar(Rat value, Rat eps) : a(std::move(value)), b(std::move(eps)) {}

  static DualScalar eps(Rat coeff) { return DualScalar(Rat(0), std::move(coeff)); }

  DualScalar operator+(const DualScalar& o) const { return {a + o.a, b + o.b}; }
  DualScalar operator-(const DualScalar& o) const { return {a - o.a, b - o.b}; }
  DualScalar operator-() const { return {-a, -b}; }
  DualScalar operator*(const DualScalar& o) const {
    return {a * o.a, a * o.b + b * o.a};
  }
  DualScalar& operator+=(const DualScalar& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  DualScalar& operator*=(const DualScalar& o) {
    *this = *this * o;
    return *this;
  }
  bool operator==(const DualScalar& o) const { return a == o.a && b == o.b; }
  bool operator!=(const DualScalar& o) const { return !(*this == o); }
};

/// Traits every coefficient scalar used by the series engine satisfies.
/// Rat is the default; DualScalar carries first-order deformation data.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rat> {
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  static bool is_zero(const Rat& s) { return rat_is_zero(s); }
  static Rat from_rat(const Rat& r) { return r; }
  static std::string to_string(const Rat& s) { return rat_to_string(s); }
};

template <>
struct ScalarTraits<DualScalar> {
  static DualScalar zero() { return DualScalar(); }
  static DualScalar one() { return DualScalar(Rat(1)); }
  static bool is_zero(const DualScalar& s) {
    return rat_is_zero(s.a) && rat_is_zero(s.b);
  }
  static DualScalar from_rat(const Rat& r) { return DualScalar(r); }
  static std::string to_string(const DualScalar& s) {
    return rat_to_string(s.a) + "+" + rat_to_string(s.b) + "e";
  }
};

}  // namespace vertexkit

#endif
