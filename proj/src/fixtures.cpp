#include "calnet/fixtures.hpp"

#include "calnet/partitions.hpp"

namespace calnet::fixtures {

namespace {

Vertex exact_vertex(std::string id, const ExactPoint& p, VertexKind kind) {
  return Vertex{std::move(id), to_double(p), p, kind};
}

Vertex plain_vertex(std::string id, double x, double y, VertexKind kind) {
  return Vertex{std::move(id), {x, y}, std::nullopt, kind};
}

Edge bent(std::size_t from, std::size_t to, std::vector<Point2> bends = {}) { return Edge{from, to, std::move(bends), {}}; }

ExactPoint scaled(const ExactPoint& p, const QSqrt3& s) { return {p.x * s, p.y * s}; }

}  // namespace

Network tripod() {
  Network net;
  net.vertices = {exact_vertex("o", {QSqrt3(0), QSqrt3(0)}, VertexKind::junction),
                  exact_vertex("a", exact_direction_30(3), VertexKind::endpoint),
                  exact_vertex("b", exact_direction_30(7), VertexKind::endpoint),
                  exact_vertex("c", exact_direction_30(11), VertexKind::endpoint)};
  net.edges = {bent(0, 1), bent(0, 2), bent(0, 3)};
  return net;
}

Network double_tripod_unit() { return double_tripod(1.0, 2.0); }

Network hexagon_with_stubs(double side, double stub) {
  const QSqrt3 r = QSqrt3::from_double(side);
  const QSqrt3 R = QSqrt3::from_double(side + stub);
  Network net;
  for (int k = 0; k < 6; ++k)
    net.vertices.push_back(exact_vertex("h" + std::to_string(k), scaled(exact_direction_30(2 * k), r), VertexKind::junction));
  for (int k = 0; k < 6; ++k)
    net.vertices.push_back(exact_vertex("e" + std::to_string(k), scaled(exact_direction_30(2 * k), R), VertexKind::endpoint));
  for (std::size_t k = 0; k < 6; ++k) net.edges.push_back(bent(k, (k + 1) % 6));
  for (std::size_t k = 0; k < 6; ++k) net.edges.push_back(bent(k, k + 6));
  return net;
}

ComparisonFixture richer_triangle_bubble() {
  ComparisonFixture f;
  f.name = "richer-triangle-bubble";
  f.reference = double_tripod(2.0, 2.0);
  const double s = std::sqrt(3.0);
  auto& h = f.competitor;
  h.vertices = {
      plain_vertex("p1", -1, s, VertexKind::endpoint),      plain_vertex("p2", -1, -s, VertexKind::endpoint),
      plain_vertex("p3", 3, s, VertexKind::endpoint),       plain_vertex("p4", 3, -s, VertexKind::endpoint),
      plain_vertex("tu", -0.5, s / 2, VertexKind::junction), plain_vertex("tl", -0.5, -s / 2, VertexKind::junction),
      plain_vertex("tr", 0.25, 0, VertexKind::junction),    plain_vertex("b0", 0.75, 0, VertexKind::junction),
      plain_vertex("b1", 1.65, 0, VertexKind::junction),    plain_vertex("q", 2, 0, VertexKind::junction),
  };
  h.edges = {
      bent(0, 4),                    // p1 - tu
      bent(1, 5),                    // p2 - tl
      bent(4, 5, {{-0.8, 0}}),       // left side of the triangle
      bent(4, 6, {{0, 0.5}}),        // upper side
      bent(5, 6, {{0, -0.5}}),       // lower side
      bent(6, 7),                    // tr - b0
      bent(7, 8, {{1.2, 0.35}}),     // upper half of the bubble
      bent(7, 8, {{1.2, -0.35}}),    // lower half
      bent(8, 9),                    // b1 - q
      bent(9, 2),                    // q - p3
      bent(9, 3),                    // q - p4
  };
  f.quotient.collapse = {CollapsedSubgraph{{"tu", "tl", "tr"}, std::nullopt},
                         CollapsedSubgraph{{"b0", "b1"}, std::nullopt}};
  f.quotient.endpoint_map = {{"p1", "p1"}, {"p2", "p2"}, {"p3", "p3"}, {"p4", "p4"}};
  return f;
}

ComparisonFixture poorer_crossing_diagonals() {
  ComparisonFixture f;
  f.name = "poorer-crossing-diagonals";
  f.reference = double_tripod(1.0, 2.0);
  auto& h = f.competitor;
  h.vertices.push_back(exact_vertex("m", {QSqrt3::ratio(1, 2), QSqrt3(0)}, VertexKind::junction));
  for (std::size_t k = 2; k < 6; ++k) h.vertices.push_back(f.reference.vertices[k]);
  h.edges = {bent(0, 1), bent(0, 2), bent(0, 3), bent(0, 4)};
  f.quotient.collapse = {CollapsedSubgraph{{"o1", "o2"}, std::nullopt}};
  return f;
}

ComparisonFixture poorer_hexagon_star() {
  ComparisonFixture f;
  f.name = "poorer-hexagon-star";
  f.reference = hexagon_with_stubs(0.75, 0.25);
  auto& h = f.competitor;
  h.vertices.push_back(exact_vertex("c", {QSqrt3(0), QSqrt3(0)}, VertexKind::junction));
  for (std::size_t k = 6; k < 12; ++k) h.vertices.push_back(f.reference.vertices[k]);
  for (std::size_t k = 1; k <= 6; ++k) h.edges.push_back(bent(0, k));
  f.quotient.collapse = {CollapsedSubgraph{{"h0", "h1", "h2", "h3", "h4", "h5"}, std::nullopt}};
  return f;
}

}  // namespace calnet::fixtures
