#include "calnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace calnet {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "InvalidInput";
    case ErrorKind::threshold_violation: return "ThresholdViolation";
    case ErrorKind::not_minimal: return "NotMinimal";
    case ErrorKind::not_alignable: return "NotAlignable";
    case ErrorKind::calibration_failure: return "CalibrationFailure";
    case ErrorKind::invalid_comparison: return "InvalidComparison";
    case ErrorKind::hypothesis_violation: return "HypothesisViolation";
    case ErrorKind::no_coloring: return "NoColoring";
    case ErrorKind::inconsistent_assignment: return "InconsistentAssignment";
    case ErrorKind::non_transverse: return "NonTransverse";
    case ErrorKind::invalid_geometry: return "InvalidGeometry";
    case ErrorKind::unsupported: return "Unsupported";
  }
  return "Error";
}

void ToleranceConfig::validate() const {
  if (!(eps_len > 0) || !(eps_angle > 0) || !(eps_field > 0))
    throw InvalidInput("tolerances must be strictly positive");
}

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

ExactPoint exact_direction_30(int k) {
  k = ((k % 12) + 12) % 12;
  const QSqrt3 one(1), h = QSqrt3::ratio(1, 2);
  const QSqrt3 r = QSqrt3(mpq_class(0), mpq_class(1, 2));  // sqrt3 / 2
  switch (k) {
    case 0: return {one, 0};
    case 1: return {r, h};
    case 2: return {h, r};
    case 3: return {0, one};
    case 4: return {-h, r};
    case 5: return {-r, h};
    case 6: return {-one, 0};
    case 7: return {-r, -h};
    case 8: return {-h, -r};
    case 9: return {0, -one};
    case 10: return {h, -r};
    default: return {r, -h};
  }
}

std::optional<Vector2> unit_direction(const Vector2& v) {
  const double n = norm(v);
  if (!(n > 0) || !std::isfinite(n)) return std::nullopt;
  return v / n;
}

std::optional<ExactPoint> unit_direction(const ExactPoint& v) {
  if (v.x.is_zero() && v.y.is_zero()) return std::nullopt;
  // Quadrant pre-filter keeps this to one or two exact tests.
  const double a = std::atan2(v.y.to_double(), v.x.to_double());
  const int guess = static_cast<int>(std::lround(a / (M_PI / 6)));
  for (int k : {guess, guess - 1, guess + 1}) {
    ExactPoint u = exact_direction_30(k);
    if (cross(v, u).is_zero() && dot(v, u).sign() > 0) return u;
  }
  return std::nullopt;
}

template <class T>
Vec2<T> unit(const Vec2<T>& v) {
  auto u = unit_direction(v);
  if (!u) {
    if constexpr (is_exact_v<T>) {
      if (!(v.x.is_zero() && v.y.is_zero()))
        throw NotAlignable("exact direction is not a multiple of 30 degrees");
    }
    throw InvalidInput("zero-length direction");
  }
  return *u;
}

// ---------------------------------------------------------------------------
// Hexagonal norm
// ---------------------------------------------------------------------------

template <class T>
std::array<Vec2<T>, 3> hex_generators() {
  const T h = half<T>();
  const Vec2<T> g1{T(1), T(0)};
  const Vec2<T> g2{-h, -(h * sqrt3_value<T>())};
  return {g1, g2, -(g1 + g2)};
}

template <class T>
std::array<Vec2<T>, 6> hex_vertices() {
  auto g = hex_generators<T>();
  return {g[0], -g[0], g[1], -g[1], g[2], -g[2]};
}

namespace {

void require_finite(const Vector2& v) {
  if (!is_finite(v)) throw InvalidInput("non-finite vector");
}
void require_finite(const ExactPoint&) {}

}  // namespace

template <class T>
T hex_norm(const Vec2<T>& v) {
  require_finite(v);
  const T s = sqrt3_value<T>();
  const T h = half<T>();
  T m = abs_of(v.y);
  T t2 = abs_of((s * v.x + v.y) * h);
  T t3 = abs_of((s * v.x - v.y) * h);
  if (m < t2) m = t2;
  if (m < t3) m = t3;
  // 2/sqrt3 = 2 sqrt3 / 3
  if constexpr (is_exact_v<T>) {
    return m * QSqrt3(mpq_class(0), mpq_class(2, 3));
  } else {
    return m * (2.0 / s);
  }
}

template <class T>
T hex_dual_norm(const Vec2<T>& v) {
  require_finite(v);
  auto g = hex_generators<T>();
  T m = abs_of(dot(v, g[0]));
  for (int i = 1; i < 3; ++i) {
    T t = abs_of(dot(v, g[i]));
    if (m < t) m = t;
  }
  return m;
}

Vector2 rotate(const Vector2& v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

template <class T>
Vec2<T> rotate_30(const Vec2<T>& v, int k) {
  ExactPoint e = exact_direction_30(k);
  if constexpr (is_exact_v<T>) {
    return {e.x * v.x - e.y * v.y, e.y * v.x + e.x * v.y};
  } else {
    const double c = e.x.to_double(), s = e.y.to_double();
    return {c * v.x - s * v.y, s * v.x + c * v.y};
  }
}

// ---------------------------------------------------------------------------
// Segments
// ---------------------------------------------------------------------------

template <class T>
Intersection<T> segment_intersection(const Segment<T>& s1, const Segment<T>& s2, double eps) {
  const Vec2<T> d1 = s1.direction();
  const Vec2<T> d2 = s2.direction();
  const double len1 = norm(to_double(d1));
  const double len2 = norm(to_double(d2));
  Intersection<T> out;
  if (!(len1 > 0) || !(len2 > 0)) throw InvalidInput("degenerate segment");

  const T c_a = cross(d1, s2.a - s1.a);
  const T c_b = cross(d1, s2.b - s1.a);
  if (near_zero(c_a, eps * len1) && near_zero(c_b, eps * len1)) {
    const T dd = dot(d1, d1);
    T t0 = dot(s2.a - s1.a, d1) / dd;
    T t1 = dot(s2.b - s1.a, d1) / dd;
    if (t1 < t0) std::swap(t0, t1);
    T lo = t0 < T(0) ? T(0) : t0;
    T hi = T(1) < t1 ? T(1) : t1;
    const T span = hi - lo;
    const int s = sign_of(span, eps / len1);
    if (s > 0) {
      out.kind = IntersectionKind::overlap;
      out.p = s1.a + lo * d1;
      out.q = s1.a + hi * d1;
    } else if (s == 0) {
      out.kind = IntersectionKind::point;
      out.p = s1.a + (lo + hi) * half<T>() * d1;
    }
    return out;
  }

  const T denom = cross(d1, d2);
  if (sign_of(denom, 0.0) == 0) return out;
  const Vec2<T> w = s2.a - s1.a;
  T t = cross(w, d2) / denom;
  T u = cross(w, d1) / denom;
  const double e1 = eps / len1, e2 = eps / len2;
  if (sign_of(t, e1) < 0 || sign_of(T(1) - t, e1) < 0) return out;
  if (sign_of(u, e2) < 0 || sign_of(T(1) - u, e2) < 0) return out;
  if constexpr (!is_exact_v<T>) t = std::clamp(t, 0.0, 1.0);
  out.kind = IntersectionKind::point;
  out.p = s1.a + t * d1;
  return out;
}

double point_segment_distance(const Point2& p, const Segment<double>& s) {
  const Vector2 d = s.direction();
  const double dd = dot(d, d);
  double t = dd > 0 ? dot(p - s.a, d) / dd : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (s.a + t * d));
}

// ---------------------------------------------------------------------------
// Polygons
// ---------------------------------------------------------------------------

template <class T>
T signed_area(const Ring<T>& ring) {
  T sum(0);
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) sum += cross(ring[i], ring[(i + 1) % n]);
  return sum * half<T>();
}

template <class T>
T area(const Polygon<T>& poly) {
  T a = abs_of(signed_area(poly.outer));
  for (const auto& h : poly.holes) a -= abs_of(signed_area(h));
  return a;
}

bool ring_contains(const Ring<double>& ring, const Point2& p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = ring[i];
    const Point2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool polygon_contains(const Polygon<double>& poly, const Point2& p) {
  if (!ring_contains(poly.outer, p)) return false;
  for (const auto& h : poly.holes)
    if (ring_contains(h, p)) return false;
  return true;
}

template <class T>
bool is_simple(const Ring<T>& ring, double eps) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    Segment<T> si{ring[i], ring[(i + 1) % n]};
    for (std::size_t j = i + 1; j < n; ++j) {
      Segment<T> sj{ring[j], ring[(j + 1) % n]};
      auto hit = segment_intersection(si, sj, eps);
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        if (hit.kind == IntersectionKind::overlap) return false;
      } else if (hit.kind != IntersectionKind::empty) {
        return false;
      }
    }
  }
  return true;
}

template <class T>
Ring<T> clip_to_convex(const Ring<T>& subject, const Ring<T>& convex) {
  Ring<T> out = subject;
  const std::size_t m = convex.size();
  for (std::size_t i = 0; i < m && !out.empty(); ++i) {
    const Vec2<T>& c = convex[i];
    const Vec2<T> e = convex[(i + 1) % m] - c;
    Ring<T> in = std::move(out);
    out.clear();
    const std::size_t n = in.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2<T>& p = in[k];
      const Vec2<T>& q = in[(k + 1) % n];
      const T sp = cross(e, p - c);
      const T sq = cross(e, q - c);
      const int a = sign_of(sp, 0.0), b = sign_of(sq, 0.0);
      if (a >= 0) out.push_back(p);
      if ((a > 0 && b < 0) || (a < 0 && b > 0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
    }
  }
  return out;
}

template <class T>
std::array<Ring<T>, 2> split_convex(const Ring<T>& ring, const Vec2<T>& origin, const Vec2<T>& dir) {
  std::array<Ring<T>, 2> parts;
  const std::size_t n = ring.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2<T>& p = ring[k];
    const Vec2<T>& q = ring[(k + 1) % n];
    const T sp = cross(dir, p - origin);
    const T sq = cross(dir, q - origin);
    const int a = sign_of(sp, 0.0), b = sign_of(sq, 0.0);
    if (a >= 0) parts[0].push_back(p);
    if (a <= 0) parts[1].push_back(p);
    if ((a > 0 && b < 0) || (a < 0 && b > 0)) {
      Vec2<T> x = p + (q - p) * (sp / (sp - sq));
      parts[0].push_back(x);
      parts[1].push_back(x);
    }
  }
  for (auto& part : parts) {
    part = simplify_ring(part, 0.0);
    if (part.size() < 3 || sign_of(signed_area(part), 0.0) == 0) part.clear();
  }
  return parts;
}

template <class T>
Ring<T> simplify_ring(const Ring<T>& ring, double eps) {
  Ring<T> r = ring;
  bool changed = true;
  while (changed && r.size() >= 3) {
    changed = false;
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2<T>& prev = r[(i + n - 1) % n];
      const Vec2<T>& cur = r[i];
      const Vec2<T>& next = r[(i + 1) % n];
      const Vec2<T> u = cur - prev;
      const Vec2<T> v = next - cur;
      const double lu = norm(to_double(u)), lv = norm(to_double(v));
      const bool duplicate = near_zero(u.x, eps) && near_zero(u.y, eps);
      const bool collinear = near_zero(cross(u, v), eps * std::max(lu, lv)) && sign_of(dot(u, v), 0.0) > 0;
      if (duplicate || collinear) {
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return r;
}

template <class T>
Ring<T> canonical_start(Ring<T> ring) {
  if (ring.empty()) return ring;
  auto less = [](const Vec2<T>& a, const Vec2<T>& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
  auto it = std::min_element(ring.begin(), ring.end(), less);
  std::rotate(ring.begin(), it, ring.end());
  return ring;
}

// ---------------------------------------------------------------------------
// Tubular neighborhoods
// ---------------------------------------------------------------------------

namespace {

template <class T>
struct HalfEdgeMesh {
  std::vector<Vec2<T>> vertices;
  std::vector<std::size_t> origin;  // per half-edge
  std::vector<Vec2<T>> dir;         // unit direction per half-edge
  std::vector<std::vector<std::size_t>> around;  // outgoing half-edges sorted by angle
  std::vector<T> seg_length;

  std::size_t dest(std::size_t h) const { return origin[h ^ 1U]; }
};

template <class T>
std::size_t find_or_add(std::vector<Vec2<T>>& verts, const Vec2<T>& p, double eps) {
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if constexpr (is_exact_v<T>) {
      if (verts[i] == p) return i;
    } else {
      if (norm(verts[i] - p) <= eps) return i;
    }
  }
  verts.push_back(p);
  return verts.size() - 1;
}

template <class T>
HalfEdgeMesh<T> build_mesh(const std::vector<Segment<T>>& segments, const ToleranceConfig& tol) {
  HalfEdgeMesh<T> mesh;
  if (segments.empty()) throw InvalidInput("empty network");
  for (const auto& s : segments) {
    const Vec2<T> d = s.direction();
    if (!(norm(to_double(d)) > tol.eps_len)) throw InvalidInput("degenerate segment in network");
    const std::size_t a = find_or_add(mesh.vertices, s.a, tol.eps_len);
    const std::size_t b = find_or_add(mesh.vertices, s.b, tol.eps_len);
    const Vec2<T> u = unit(d);
    mesh.origin.push_back(a);
    mesh.dir.push_back(u);
    mesh.origin.push_back(b);
    mesh.dir.push_back(-u);
    mesh.seg_length.push_back(dot(d, u));
  }
  mesh.around.resize(mesh.vertices.size());
  for (std::size_t h = 0; h < mesh.origin.size(); ++h) mesh.around[mesh.origin[h]].push_back(h);
  for (auto& list : mesh.around) {
    std::sort(list.begin(), list.end(), [&](std::size_t l, std::size_t r) {
      const Point2 dl = to_double(mesh.dir[l]);
      const Point2 dr = to_double(mesh.dir[r]);
      return std::atan2(dl.y, dl.x) < std::atan2(dr.y, dr.x);
    });
  }
  return mesh;
}

template <class T>
void require_minimal_junctions(const HalfEdgeMesh<T>& mesh, const ToleranceConfig& tol) {
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const auto& out = mesh.around[v];
    if (out.size() != 1 && out.size() != 3)
      throw NotMinimal("vertex of degree " + std::to_string(out.size()) + " in tubular neighborhood input");
    if (out.size() == 3) {
      Vec2<T> sum = mesh.dir[out[0]] + mesh.dir[out[1]] + mesh.dir[out[2]];
      bool balanced;
      if constexpr (is_exact_v<T>) {
        balanced = sum.x.is_zero() && sum.y.is_zero();
      } else {
        balanced = norm(sum) <= tol.eps_angle;
      }
      if (!balanced)
        throw NotMinimal("junction angles differ from 2pi/3");
    }
  }
}

template <class T>
Vec2<T> right_normal(const Vec2<T>& u) {
  return {u.y, -u.x};
}

}  // namespace

template <class T>
Polygon<T> tube_polygon(const std::vector<Segment<T>>& segments, const T& delta, const ToleranceConfig& tol) {
  if (sign_of(delta, 0.0) <= 0) throw InvalidInput("tube width must be positive");
  const HalfEdgeMesh<T> mesh = build_mesh(segments, tol);
  for (const auto& out : mesh.around)
    if (out.size() != 1 && out.size() != 3) throw NotMinimal("tube vertices must have degree 1 or 3");

  const std::size_t nh = mesh.origin.size();
  std::vector<bool> used(nh, false);
  std::vector<Ring<T>> rings;
  auto next_ccw = [&](std::size_t h) {
    const auto& list = mesh.around[mesh.origin[h]];
    auto it = std::find(list.begin(), list.end(), h);
    ++it;
    return it == list.end() ? list.front() : *it;
  };
  for (std::size_t start = 0; start < nh; ++start) {
    if (used[start]) continue;
    Ring<T> ring;
    std::size_t cur = start;
    do {
      used[cur] = true;
      const std::size_t v = mesh.dest(cur);
      const Vec2<T> n = right_normal(mesh.dir[cur]);
      std::size_t nxt;
      if (mesh.around[v].size() == 1) {
        ring.push_back(mesh.vertices[v] + delta * n);
        ring.push_back(mesh.vertices[v] - delta * n);
        nxt = cur ^ 1U;
      } else {
        nxt = next_ccw(cur ^ 1U);
        const Vec2<T> p1 = mesh.vertices[mesh.origin[cur]] + delta * n;
        const Vec2<T> p2 = mesh.vertices[v] + delta * right_normal(mesh.dir[nxt]);
        const T den = cross(mesh.dir[cur], mesh.dir[nxt]);
        if (sign_of(den, 0.0) == 0) {
          ring.push_back(p2);
        } else {
          ring.push_back(p1 + (cross(p2 - p1, mesh.dir[nxt]) / den) * mesh.dir[cur]);
        }
      }
      cur = nxt;
    } while (cur != start);
    rings.push_back(std::move(ring));
  }

  Polygon<T> poly;
  bool have_outer = false;
  for (auto& r : rings) {
    if (sign_of(signed_area(r), 0.0) > 0) {
      if (have_outer) throw InvalidGeometry("tube has more than one outer boundary");
      poly.outer = canonical_start(std::move(r));
      have_outer = true;
    } else {
      poly.holes.push_back(canonical_start(std::move(r)));
    }
  }
  if (!have_outer) throw InvalidGeometry("tube has no outer boundary");
  if (!is_simple(poly.outer, tol.eps_len)) throw InvalidGeometry("tube outline is not simple");
  for (const auto& h : poly.holes)
    if (!is_simple(h, tol.eps_len)) throw InvalidGeometry("tube hole is not simple");
  return poly;
}

template <class T>
Polygon<T> polygon_offset_network(const std::vector<Segment<T>>& segments, const T& delta,
                                  const ToleranceConfig& tol) {
  tol.validate();
  if (sign_of(delta, 0.0) <= 0) throw InvalidInput("tube width must be positive");
  const HalfEdgeMesh<T> mesh = build_mesh(segments, tol);
  require_minimal_junctions(mesh, tol);
  T d = mesh.seg_length.front();
  for (const T& l : mesh.seg_length)
    if (l < d) d = l;
  const T bound = sqrt3_value<T>() * d / T(8);
  if (!(delta < bound))
    throw ThresholdViolation("tube width " + to_text(delta) + " is not below sqrt3*d/8 = " + to_text(bound));
  return tube_polygon(segments, delta, tol);
}

#define CALNET_INSTANTIATE(T)                                                                      \
  template Vec2<T> unit(const Vec2<T>&);                                                           \
  template std::array<Vec2<T>, 3> hex_generators<T>();                                             \
  template std::array<Vec2<T>, 6> hex_vertices<T>();                                               \
  template T hex_norm(const Vec2<T>&);                                                             \
  template T hex_dual_norm(const Vec2<T>&);                                                        \
  template Vec2<T> rotate_30(const Vec2<T>&, int);                                                 \
  template Intersection<T> segment_intersection(const Segment<T>&, const Segment<T>&, double);     \
  template T signed_area(const Ring<T>&);                                                          \
  template T area(const Polygon<T>&);                                                              \
  template bool is_simple(const Ring<T>&, double);                                                 \
  template Ring<T> clip_to_convex(const Ring<T>&, const Ring<T>&);                                 \
  template std::array<Ring<T>, 2> split_convex(const Ring<T>&, const Vec2<T>&, const Vec2<T>&);    \
  template Ring<T> simplify_ring(const Ring<T>&, double);                                          \
  template Ring<T> canonical_start(Ring<T>);                                                       \
  template Polygon<T> polygon_offset_network(const std::vector<Segment<T>>&, const T&,             \
                                             const ToleranceConfig&);                              \
  template Polygon<T> tube_polygon(const std::vector<Segment<T>>&, const T&, const ToleranceConfig&);

CALNET_INSTANTIATE(double)
CALNET_INSTANTIATE(QSqrt3)

#undef CALNET_INSTANTIATE

}  // namespace calnet
