#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>

#include "calnet/qsqrt3.hpp"

namespace calnet {

// Scalar-generic helpers. Geometry templates are instantiated for `double`
// (tolerance-based) and `QSqrt3` (exact; tolerances are ignored).

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, QSqrt3>;

inline double to_double(double v) { return v; }
inline double to_double(const QSqrt3& v) { return v.to_double(); }

template <class T>
T sqrt3_value() {
  if constexpr (is_exact_v<T>) {
    return QSqrt3::sqrt3();
  } else {
    return std::sqrt(3.0);
  }
}

template <class T>
T from_double(double v) {
  if constexpr (is_exact_v<T>) {
    return QSqrt3::from_double(v);
  } else {
    return v;
  }
}

template <class T>
T half() {
  if constexpr (is_exact_v<T>) {
    return QSqrt3::ratio(1, 2);
  } else {
    return 0.5;
  }
}

inline int sign_of(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }
inline int sign_of(const QSqrt3& v, double /*eps*/) { return v.sign(); }

template <class T>
bool near_zero(const T& v, double eps) {
  return sign_of(v, eps) == 0;
}

template <class T>
T abs_of(const T& v) {
  if constexpr (is_exact_v<T>) {
    return abs(v);
  } else {
    return std::abs(v);
  }
}

template <class T>
const T& max_of(const T& a, const T& b) {
  return a < b ? b : a;
}

inline std::string to_text(double v) { return std::to_string(v); }
inline std::string to_text(const QSqrt3& v) { return v.str(); }

template <class T>
struct Vec2 {
  T x{};
  T y{};

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 l, const Vec2& r) { return l += r; }
  friend Vec2 operator-(Vec2 l, const Vec2& r) { return l -= r; }
  friend Vec2 operator-(const Vec2& v) { return {-v.x, -v.y}; }
  friend Vec2 operator*(const T& s, const Vec2& v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator*(const Vec2& v, const T& s) { return {v.x * s, v.y * s}; }
  friend Vec2 operator/(const Vec2& v, const T& s) { return {v.x / s, v.y / s}; }
  friend bool operator==(const Vec2& l, const Vec2& r) { return l.x == r.x && l.y == r.y; }
};

using Point2 = Vec2<double>;
using Vector2 = Vec2<double>;
using ExactPoint = Vec2<QSqrt3>;

template <class T>
T dot(const Vec2<T>& a, const Vec2<T>& b) {
  return a.x * b.x + a.y * b.y;
}

template <class T>
T cross(const Vec2<T>& a, const Vec2<T>& b) {
  return a.x * b.y - a.y * b.x;
}

/// Counterclockwise quarter turn.
template <class T>
Vec2<T> perp(const Vec2<T>& v) {
  return {-v.y, v.x};
}

inline double norm(const Vector2& v) { return std::hypot(v.x, v.y); }

inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline Point2 to_double(const Vec2<double>& p) { return p; }
inline Point2 to_double(const ExactPoint& p) { return {p.x.to_double(), p.y.to_double()}; }

template <class T>
Vec2<T> from_double(const Point2& p) {
  return {from_double<T>(p.x), from_double<T>(p.y)};
}

/// Exact unit vector at angle k*30 degrees.
ExactPoint exact_direction_30(int k);

/// Unit vector along `v`. For exact scalars `v` must be parallel to one of the
/// twelve directions k*30 degrees; otherwise nullopt.
std::optional<Vector2> unit_direction(const Vector2& v);
std::optional<ExactPoint> unit_direction(const ExactPoint& v);

/// Unit vector along `v`; throws NotAlignable when an exact vector is off the
/// 30-degree direction set and InvalidInput for a zero vector.
template <class T>
Vec2<T> unit(const Vec2<T>& v);

/// Euclidean length. Exact only for vectors along the 30-degree directions.
template <class T>
T length(const Vec2<T>& v) {
  if constexpr (is_exact_v<T>) {
    return dot(v, unit(v));
  } else {
    return norm(v);
  }
}

}  // namespace calnet
