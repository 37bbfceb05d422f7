#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calnet/geometry.hpp"

namespace calnet {

enum class VertexKind { junction, endpoint };

struct Vertex {
  std::string id;
  Point2 p;
  std::optional<ExactPoint> exact;  // present when the input coordinates are known exactly
  VertexKind kind = VertexKind::junction;
};

/// Edge immersed as a polyline from `from` to `to` through `bends`.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<Point2> bends;
  std::vector<ExactPoint> exact_bends;  // empty or same length as bends
};

/// A connected graph together with a piecewise-linear immersion of its edges.
/// Endpoints (degree 1) are the boundary points; every other vertex is a
/// junction. Degree-2 vertices are accepted for competitor networks.
struct Network {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  std::size_t vertex_index(const std::string& id) const;
  std::size_t degree(std::size_t v) const;
  std::vector<std::size_t> endpoints() const;
  /// True when every vertex and bend carries exact coordinates.
  bool has_exact() const;

  /// Polyline of edge e including its end vertices.
  std::vector<Point2> polyline(std::size_t e) const;
  std::vector<ExactPoint> exact_polyline(std::size_t e) const;

  /// All straight pieces of all edges, in edge order.
  template <class T>
  std::vector<Segment<T>> segments() const;
};

/// Throws InvalidInput for dangling indices, repeated ids, zero-length pieces,
/// a disconnected graph, or a vertex kind that disagrees with its degree.
void validate(const Network& net, const ToleranceConfig& tol = {});

double length(const Network& net);
/// Exact length; every piece must lie along a multiple of 30 degrees.
QSqrt3 exact_length(const Network& net);

enum class ViolationKind { angle, straightness, embedding, junction_order, self_loop };

std::string_view to_string(ViolationKind kind);

struct Violation {
  std::string location;
  ViolationKind kind;
  double magnitude = 0;
};

struct MinimalityCertificate {
  bool is_minimal = true;
  std::vector<Violation> violations;

  /// Throws NotMinimal naming the first violation.
  void throw_if_failed() const;
};

MinimalityCertificate check_minimal(const Network& net, const ToleranceConfig& tol = {});

/// Angle theta in (-pi/6, pi/6] after which every edge is parallel to one of
/// g1, g2, g3. Throws NotAlignable when some edge disagrees.
double canonical_rotation(const Network& net, const ToleranceConfig& tol = {});

/// Rotates all geometry about the origin. Exact coordinates survive only a
/// rotation by a multiple of 30 degrees given as `k30`.
Network rotated(const Network& net, double theta);
Network rotated_30(const Network& net, int k30);
Network translated(const Network& net, const Vector2& shift);

/// Random connected piece of the unit honeycomb with exactly `junction_budget`
/// junctions when the growth allows it. Junction vertices keep all three
/// lattice edges; no endpoint is enclosed by a cycle. Coordinates are exact.
Network generate_honeycomb_network(std::uint64_t seed, int junction_budget);

/// True when the graph has no cycles.
bool is_tree(const Network& net);

}  // namespace calnet
