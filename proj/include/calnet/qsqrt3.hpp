#pragma once

#include <gmpxx.h>

#include <concepts>
#include <string>
#include <string_view>

namespace calnet {

/// Exact element a + b*sqrt(3) of the real quadratic field Q(sqrt 3).
///
/// Every construction in this library that stays on the hexagonal lattice
/// (edge directions at multiples of 30 degrees, offsets scaled by sqrt 3) is
/// closed under these operations, so norms, dot products and residuals can
/// be decided exactly.
class QSqrt3 {
 public:
  QSqrt3() = default;
  template <std::integral I>
  QSqrt3(I value) : a_(static_cast<long>(value)) {}  // NOLINT(google-explicit-constructor)
  QSqrt3(mpq_class rational, mpq_class irrational)
      : a_(std::move(rational)), b_(std::move(irrational)) {
    a_.canonicalize();
    b_.canonicalize();
  }

  static QSqrt3 sqrt3() { return {mpq_class(0), mpq_class(1)}; }
  static QSqrt3 ratio(long num, long den) { return {mpq_class(num, den), mpq_class(0)}; }
  /// Exact value of a finite double (its binary rational expansion).
  static QSqrt3 from_double(double value);
  /// Parses "p/q", "1.25", "3/2*sqrt3", "-sqrt3/2", "1/2+3/4*sqrt3", ...
  static QSqrt3 parse(std::string_view text);

  const mpq_class& rational_part() const { return a_; }
  const mpq_class& sqrt3_part() const { return b_; }

  int sign() const;
  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  double to_double() const;
  std::string str() const;

  QSqrt3& operator+=(const QSqrt3& o);
  QSqrt3& operator-=(const QSqrt3& o);
  QSqrt3& operator*=(const QSqrt3& o);
  QSqrt3& operator/=(const QSqrt3& o);

  friend QSqrt3 operator+(QSqrt3 l, const QSqrt3& r) { return l += r; }
  friend QSqrt3 operator-(QSqrt3 l, const QSqrt3& r) { return l -= r; }
  friend QSqrt3 operator*(QSqrt3 l, const QSqrt3& r) { return l *= r; }
  friend QSqrt3 operator/(QSqrt3 l, const QSqrt3& r) { return l /= r; }
  friend QSqrt3 operator-(const QSqrt3& v) { return {-v.a_, -v.b_}; }

  friend bool operator==(const QSqrt3& l, const QSqrt3& r) { return l.a_ == r.a_ && l.b_ == r.b_; }
  friend std::strong_ordering operator<=>(const QSqrt3& l, const QSqrt3& r) {
    const int s = (l - r).sign();
    return s < 0 ? std::strong_ordering::less
                 : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class a_{0};
  mpq_class b_{0};
};

inline QSqrt3 abs(const QSqrt3& v) { return v.sign() < 0 ? -v : v; }

}  // namespace calnet
