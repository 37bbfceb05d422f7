#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "calnet/geometry.hpp"
#include "calnet/network.hpp"

namespace calnet::testing {

inline std::array<Point2, 6> hexagon_corners() {
  std::array<Point2, 6> out;
  for (int k = 0; k < 6; ++k) out[k] = {std::cos(k * std::numbers::pi / 3), std::sin(k * std::numbers::pi / 3)};
  return out;
}

inline bool in_hexagon(const Point2& p) {
  const auto c = hexagon_corners();
  for (int k = 0; k < 6; ++k) {
    const Point2 a = c[k], b = c[(k + 1) % 6];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < -1e-15) return false;
  }
  return true;
}

/// Smallest t with v / t inside the hexagon, by bisection on membership.
inline double hull_norm(const Point2& v) {
  if (v.x == 0 && v.y == 0) return 0;
  double lo = 0, hi = 1;
  while (!in_hexagon({v.x / hi, v.y / hi})) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (in_hexagon({v.x / mid, v.y / mid}) ? hi : lo) = mid;
  }
  return hi;
}

inline double distance_to_ring(const Point2& p, const Ring<double>& r) {
  double best = INFINITY;
  for (std::size_t k = 0; k < r.size(); ++k) best = std::min(best, point_segment_distance(p, {r[k], r[(k + 1) % r.size()]}));
  return best;
}

inline double distance_to_boundary(const Point2& p, const Polygon<double>& poly) {
  double best = distance_to_ring(p, poly.outer);
  for (const auto& h : poly.holes) best = std::min(best, distance_to_ring(p, h));
  return best;
}

/// Network from named points and straight edges; kinds follow degrees.
inline Network make_network(const std::vector<std::pair<std::string, Point2>>& points,
                            const std::vector<std::pair<std::string, std::string>>& edges) {
  Network net;
  for (const auto& [id, p] : points) net.vertices.push_back({id, p, std::nullopt, VertexKind::junction});
  for (const auto& [a, b] : edges) net.edges.push_back({net.vertex_index(a), net.vertex_index(b), {}, {}});
  for (std::size_t v = 0; v < net.vertices.size(); ++v)
    net.vertices[v].kind = net.degree(v) == 1 ? VertexKind::endpoint : VertexKind::junction;
  return net;
}

inline Network without_exact(Network net) {
  for (auto& v : net.vertices) v.exact.reset();
  for (auto& e : net.edges) e.exact_bends.clear();
  return net;
}

inline double edge_length(const Network& net, std::size_t e) {
  const auto pts = net.polyline(e);
  double len = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) len += std::hypot(pts[k + 1].x - pts[k].x, pts[k + 1].y - pts[k].y);
  return len;
}

inline double shortest_edge(const Network& net) {
  double d = INFINITY;
  for (std::size_t e = 0; e < net.edges.size(); ++e) d = std::min(d, edge_length(net, e));
  return d;
}

/// Same graph and endpoints: junctions displaced by up to `scale` times the
/// shortest edge and about half the edges bent through up to three points.
inline Network perturb(const Network& ref, std::mt19937_64& rng, double scale = 0.15) {
  Network net = without_exact(ref);
  const double d = shortest_edge(ref);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> bends(0, 3);
  for (auto& v : net.vertices)
    if (v.kind == VertexKind::junction) v.p = v.p + Vector2{u(rng), u(rng)} * (scale * d / std::sqrt(2.0));
  for (auto& e : net.edges) {
    e.bends.clear();
    const int k = bends(rng);
    if (k == 0 || u(rng) < 0) continue;
    const Point2 a = net.vertices[e.from].p, b = net.vertices[e.to].p;
    const Vector2 n = perp(b - a) * (1 / norm(b - a));
    for (int j = 1; j <= k; ++j) e.bends.push_back(a + (b - a) * (double(j) / (k + 1)) + n * (u(rng) * scale * d / 2));
  }
  return net;
}

}  // namespace calnet::testing
