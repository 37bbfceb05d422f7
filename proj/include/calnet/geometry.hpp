#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "calnet/errors.hpp"
#include "calnet/scalar.hpp"

namespace calnet {

struct ToleranceConfig {
  double eps_len = 1e-9;
  double eps_angle = 1e-9;
  double eps_field = 1e-12;

  /// Throws InvalidInput unless all tolerances are strictly positive.
  void validate() const;
};

template <class T>
struct Segment {
  Vec2<T> a;
  Vec2<T> b;

  Vec2<T> direction() const { return b - a; }
};

template <class T>
using Ring = std::vector<Vec2<T>>;

/// Polygon with a counterclockwise outer ring and clockwise holes.
template <class T>
struct Polygon {
  Ring<T> outer;
  std::vector<Ring<T>> holes;
};

// ---------------------------------------------------------------------------
// Hexagonal norm
// ---------------------------------------------------------------------------

/// The generators g1 = (1,0), g2 = (-1/2,-sqrt3/2), g3 = -g1-g2.
template <class T>
std::array<Vec2<T>, 3> hex_generators();

/// The six vertices +-g1, +-g2, +-g3 of the unit ball of the hexagonal norm.
template <class T>
std::array<Vec2<T>, 6> hex_vertices();

/// Norm whose unit ball is the regular hexagon with vertices +-g_i:
/// (2/sqrt3) * max(|y|, |(sqrt3 x + y)/2|, |(sqrt3 x - y)/2|).
template <class T>
T hex_norm(const Vec2<T>& v);

/// Dual of hex_norm: max over hexagon vertices w of <v, w>.
template <class T>
T hex_dual_norm(const Vec2<T>& v);

Vector2 rotate(const Vector2& v, double theta);

/// Exact rotation by k * 30 degrees.
template <class T>
Vec2<T> rotate_30(const Vec2<T>& v, int k);

// ---------------------------------------------------------------------------
// Segments
// ---------------------------------------------------------------------------

enum class IntersectionKind { empty, point, overlap };

template <class T>
struct Intersection {
  IntersectionKind kind = IntersectionKind::empty;
  Vec2<T> p;  ///< the point, or the start of the overlap
  Vec2<T> q;  ///< end of the overlap
};

/// Classifies the intersection of two closed segments; tolerance `eps` is a
/// length (ignored for exact scalars). Overlaps are reported along s1's
/// direction.
template <class T>
Intersection<T> segment_intersection(const Segment<T>& s1, const Segment<T>& s2, double eps);

/// Distance from p to the closed segment s (double only).
double point_segment_distance(const Point2& p, const Segment<double>& s);

// ---------------------------------------------------------------------------
// Polygons
// ---------------------------------------------------------------------------

template <class T>
T signed_area(const Ring<T>& ring);

/// Outer area minus hole areas.
template <class T>
T area(const Polygon<T>& poly);

/// Point strictly inside a ring (even-odd rule; boundary points may go either way).
bool ring_contains(const Ring<double>& ring, const Point2& p);
bool polygon_contains(const Polygon<double>& poly, const Point2& p);

/// True when no two non-adjacent edges of the ring intersect and adjacent
/// edges meet only at their shared vertex.
template <class T>
bool is_simple(const Ring<T>& ring, double eps);

/// Sutherland-Hodgman clip of `subject` against a convex counterclockwise ring.
template <class T>
Ring<T> clip_to_convex(const Ring<T>& subject, const Ring<T>& convex);

/// Splits a convex ring by the line through `origin` with direction `dir`.
/// Returns {left part, right part}; either may be empty.
template <class T>
std::array<Ring<T>, 2> split_convex(const Ring<T>& ring, const Vec2<T>& origin, const Vec2<T>& dir);

/// Removes consecutive duplicates and collinear vertices.
template <class T>
Ring<T> simplify_ring(const Ring<T>& ring, double eps);

/// Rotates the ring so it starts at its lexicographically smallest (x, y) vertex.
template <class T>
Ring<T> canonical_start(Ring<T> ring);

// ---------------------------------------------------------------------------
// Tubular neighborhoods
// ---------------------------------------------------------------------------

/// Miter-join tubular neighborhood of a network of straight segments whose
/// vertices have degree 1 (truncated orthogonally) or 3 (120-degree junction).
/// Throws NotMinimal for other degrees or angles, ThresholdViolation when
/// delta >= sqrt3 * d / 8 with d the shortest segment.
template <class T>
Polygon<T> polygon_offset_network(const std::vector<Segment<T>>& segments, const T& delta,
                                  const ToleranceConfig& tol);

/// Same outline without the width threshold (used for the wide domains of the
/// counterexample). Throws InvalidGeometry when the outline is not simple.
template <class T>
Polygon<T> tube_polygon(const std::vector<Segment<T>>& segments, const T& delta,
                        const ToleranceConfig& tol);

}  // namespace calnet
