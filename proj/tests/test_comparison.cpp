#include <doctest.h>

#include <random>
#include <set>

#include "calnet/comparison.hpp"
#include "calnet/currents.hpp"
#include "calnet/errors.hpp"
#include "calnet/fixtures.hpp"
#include "support.hpp"

using namespace calnet;
using calnet::testing::make_network;

namespace {

const GroupElement g1{1, 0}, g2{0, 1};

Network subdivided_segment() {
  return make_network({{"a", {0, 0}}, {"u", {1.0 / 3, 0}}, {"v", {2.0 / 3, 0}}, {"b", {1, 0}}},
                      {{"a", "u"}, {"u", "v"}, {"v", "b"}});
}

void check_certificate(const ComparisonCertificate<double>& c) {
  CHECK(c.verdict);
  CHECK(c.boundary_match);
  CHECK(c.competitor_mass <= c.competitor_length + 1e-9);
  CHECK(c.reference_length <= c.competitor_mass + 1e-9);
}

}  // namespace

TEST_CASE("compare_same_topology against itself is an exact equality") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto net = generate_honeycomb_network(seed, static_cast<int>(seed % 15));
    const auto c = compare_same_topology<QSqrt3>(net, net);
    CHECK(c.verdict);
    CHECK(c.reference_length == c.competitor_length);
    CHECK(c.reference_length == c.competitor_mass);
  }
}

TEST_CASE("compare_same_topology with a displaced junction") {
  const auto ref = testing::without_exact(fixtures::tripod());
  auto comp = ref;
  comp.vertices[comp.vertex_index("o")].p = {0.1, 0};
  const auto c = compare_same_topology<double>(ref, comp);
  check_certificate(c);
  CHECK(c.reference_length < c.competitor_length - 1e-6);
  CHECK(c.reference_length < c.competitor_mass - 1e-6);
}

TEST_CASE("compare_same_topology with a zigzag central edge") {
  const auto ref = fixtures::double_tripod_unit();
  auto comp = testing::without_exact(ref);
  comp.edges[0].bends = {{0.25, 0.2}, {0.5, -0.2}, {0.75, 0.2}};
  const auto c = compare_same_topology<double>(ref, comp);
  check_certificate(c);
  CHECK(c.competitor_length > c.reference_length);
}

TEST_CASE("compare_same_topology rejects other graphs and moved endpoints") {
  const auto ref = fixtures::double_tripod_unit();
  auto moved = testing::without_exact(ref);
  moved.vertices[moved.vertex_index("p1")].p.x += 0.5;
  CHECK_THROWS_AS(compare_same_topology<double>(ref, moved), InvalidComparison);
  CHECK_THROWS_AS(compare_same_topology<double>(ref, fixtures::tripod()), InvalidComparison);
}

TEST_CASE("compare_embedded_copy with a dangling extra edge") {
  const auto ref = testing::without_exact(fixtures::tripod());
  auto comp = ref;
  comp.vertices.push_back({"x", {0.3, 0.3}, std::nullopt, VertexKind::endpoint});
  comp.edges.push_back({0, 4, {}, {}});
  Embedding emb;
  for (const auto& v : ref.vertices) emb.vertex_map[v.id] = v.id;
  for (std::size_t e = 0; e < ref.edges.size(); ++e) emb.edge_paths[e] = {{e, true}};
  const auto c = compare_embedded_copy(ref, comp, emb);
  check_certificate(c);
  REQUIRE(c.embedded_length.has_value());
  CHECK(c.competitor_length > *c.embedded_length + 0.1);
}

TEST_CASE("compare_embedded_copy of a subdivided segment") {
  const auto ref = make_network({{"a", {0, 0}}, {"b", {1, 0}}}, {{"a", "b"}});
  Embedding emb{{{"a", "a"}, {"b", "b"}}, {{0, {{0, true}, {1, true}, {2, true}}}}};
  const auto c = compare_embedded_copy(ref, subdivided_segment(), emb);
  check_certificate(c);
  CHECK(c.competitor_length == doctest::Approx(1).epsilon(1e-15));
  CHECK(*c.embedded_length == doctest::Approx(c.reference_length));

  Embedding broken{{{"a", "a"}, {"b", "b"}}, {{0, {{0, true}, {2, true}}}}};
  CHECK_THROWS_AS(compare_embedded_copy(ref, subdivided_segment(), broken), InvalidComparison);
  Embedding twice{{{"a", "a"}, {"b", "b"}}, {{0, {{0, true}, {1, true}, {1, false}, {1, true}, {2, true}}}}};
  CHECK_THROWS_AS(compare_embedded_copy(ref, subdivided_segment(), twice), InvalidComparison);
}

TEST_CASE("richer-topology fixture") {
  const auto f = fixtures::richer_triangle_bubble();
  CHECK(check_minimal(f.reference).is_minimal);
  const auto c = compare_quotient_richer(f.reference, f.competitor, f.quotient);
  check_certificate(c);
  CHECK(c.reference_length == doctest::Approx(10));
  CHECK(c.competitor_length > *c.embedded_length);
}

TEST_CASE("find_embedded_copy inside a triangle uses two of its sides") {
  const auto f = fixtures::richer_triangle_bubble();
  const auto emb = find_embedded_copy(f.reference, f.competitor, f.quotient);
  const std::set<std::size_t> triangle{2, 3, 4};
  std::size_t used = 0, total = 0;
  for (const auto& [e, path] : emb.edge_paths)
    for (const auto& [h, fwd] : path) {
      ++total;
      used += triangle.count(h);
    }
  CHECK(used == 2);
  const std::set<std::string> corners{"tu", "tl", "tr"};
  CHECK(corners.count(emb.vertex_map.at("o1")) == 1);
  CHECK(emb.vertex_map.at("p1") == "p1");
  CHECK(total == 9);
  CHECK_NOTHROW(compare_embedded_copy(f.reference, f.competitor, emb));
}

TEST_CASE("find_embedded_copy on a single junction vertex") {
  const auto ref = fixtures::double_tripod_unit();
  auto comp = testing::without_exact(ref);
  comp.vertices[comp.vertex_index("o1")].p = {0.05, 0.05};
  QuotientSpec q{{CollapsedSubgraph{{"o1"}, std::nullopt}}, {}};
  const auto emb = find_embedded_copy(ref, comp, q);
  CHECK(emb.vertex_map.at("o1") == "o1");
  for (const auto& [e, path] : emb.edge_paths) CHECK(path.size() == 1);
  check_certificate(compare_quotient_richer(ref, comp, q));
}

TEST_CASE("find_embedded_copy through a collapsed path") {
  const auto ref = fixtures::double_tripod_unit();
  auto comp = testing::without_exact(ref);
  comp.edges.erase(comp.edges.begin());
  const std::size_t base = comp.vertices.size();
  const char* ids[] = {"u", "x", "y", "v"};
  const Point2 pts[] = {{0.2, 0.1}, {0.4, 0.2}, {0.6, 0.2}, {0.8, 0.1}};
  for (int k = 0; k < 4; ++k) comp.vertices.push_back({ids[k], pts[k], std::nullopt, VertexKind::junction});
  comp.edges.push_back({0, base, {}, {}});
  for (std::size_t k = 0; k < 3; ++k) comp.edges.push_back({base + k, base + k + 1, {}, {}});
  comp.edges.push_back({base + 3, 1, {}, {}});
  QuotientSpec q{{CollapsedSubgraph{{"u", "x", "y", "v"}, std::nullopt}}, {}};
  const auto emb = find_embedded_copy(ref, comp, q);
  CHECK(emb.edge_paths.at(0).size() == 5);
  const auto c = compare_quotient_richer(ref, comp, q);
  check_certificate(c);
  CHECK(*c.embedded_length == doctest::Approx(c.competitor_length));
}

TEST_CASE("find_embedded_copy rejects a collapsed subgraph with four attachments") {
  const auto f = fixtures::poorer_crossing_diagonals();
  QuotientSpec q{{CollapsedSubgraph{{"m"}, std::nullopt}}, {}};
  CHECK_THROWS_AS(find_embedded_copy(f.reference, f.competitor, q), HypothesisViolation);
}

TEST_CASE("poorer-topology fixtures") {
  for (const auto& f : {fixtures::poorer_crossing_diagonals(), fixtures::poorer_hexagon_star()}) {
    CAPTURE(f.name);
    CHECK(check_minimal(f.reference).is_minimal);
    const auto c = compare_quotient_poorer(f.reference, f.competitor, f.quotient);
    check_certificate(c);
  }
  const auto x = compare_quotient_poorer(fixtures::poorer_crossing_diagonals().reference,
                                         fixtures::poorer_crossing_diagonals().competitor,
                                         fixtures::poorer_crossing_diagonals().quotient);
  CHECK(x.reference_length == doctest::Approx(9));
  CHECK(x.competitor_length == doctest::Approx(4 * std::sqrt(5.25)).epsilon(1e-12));  // |(-1, sqrt3) - (1/2, 0)|
}

TEST_CASE("collapsing an edge whose end charges differ violates the hypothesis") {
  const auto ref = make_network({{"a", {0, 0}}, {"m", {1, 0}}, {"n", {2, 0}}, {"b", {3, 0}}},
                                {{"a", "m"}, {"m", "n"}, {"n", "b"}});
  const auto comp = make_network({{"a", {0, 0}}, {"c", {1.5, 0.2}}, {"b", {3, 0}}}, {{"a", "c"}, {"c", "b"}});
  const std::vector<EdgeCharge> charges{{g1, true}, {g1, true}, {g2, true}};
  QuotientSpec q{{CollapsedSubgraph{{"m", "n"}, std::nullopt}}, {}};
  CHECK(!collapsed_charge(ref, charges, {1, 2}).is_zero());
  CHECK_THROWS_AS(transfer_charges(ref, charges, comp, q), HypothesisViolation);

  const std::vector<EdgeCharge> coherent{{g1, true}, {g1, true}, {g1, true}};
  const auto c = transfer_charges(ref, coherent, comp, q);
  CHECK(c.boundary_match);
}

TEST_CASE("quotient hypotheses") {
  const auto f = fixtures::poorer_crossing_diagonals();
  QuotientSpec with_endpoint{{CollapsedSubgraph{{"o1", "p1"}, std::nullopt}}, {}};
  CHECK_THROWS_AS(compare_quotient_poorer(f.reference, f.competitor, with_endpoint), HypothesisViolation);
  QuotientSpec overlapping{{CollapsedSubgraph{{"o1", "o2"}, std::nullopt}, CollapsedSubgraph{{"o2"}, std::nullopt}}, {}};
  CHECK_THROWS_AS(compare_quotient_poorer(f.reference, f.competitor, overlapping), HypothesisViolation);
  QuotientSpec unknown{{CollapsedSubgraph{{"zz"}, std::nullopt}}, {}};
  CHECK_THROWS_AS(compare_quotient_poorer(f.reference, f.competitor, unknown), InvalidInput);
}

TEST_CASE("random same-topology perturbations never beat the minimal network") {
  std::vector<Network> refs;
  for (const auto& f : {fixtures::richer_triangle_bubble(), fixtures::poorer_crossing_diagonals(),
                        fixtures::poorer_hexagon_star()})
    refs.push_back(f.reference);
  for (std::uint64_t seed = 0; seed < 5; ++seed) refs.push_back(generate_honeycomb_network(seed, 6 + 3 * static_cast<int>(seed)));
  std::mt19937_64 rng(99);
  for (const auto& ref : refs) {
    for (int k = 0; k < 200; ++k) {
      const auto comp = testing::perturb(ref, rng);
      const auto c = compare_same_topology<double>(ref, comp);
      CHECK(c.verdict);
      CHECK(c.boundary_match);
      CHECK(c.reference_length <= c.competitor_length + 1e-9);
    }
  }
}

TEST_CASE("Steiner oracle") {
  const auto two = steiner_oracle({{0, 0}, {1, 0}});
  CHECK(two.length == doctest::Approx(1).epsilon(1e-12));
  CHECK(two.network.edges.size() == 1);

  const auto tri = steiner_oracle({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  CHECK(std::abs(tri.length - std::sqrt(3.0)) < 1e-8);
  const auto s = tri.network.vertices[tri.network.vertex_index("s0")].p;
  CHECK(s.x == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(s.y == doctest::Approx(std::sqrt(3.0) / 6).epsilon(1e-8));

  const auto square = steiner_oracle({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(std::abs(square.length - (1 + std::sqrt(3.0))) < 1e-8);
  CHECK(square.network.vertices.size() == 6);
  CHECK(check_minimal(square.network).is_minimal);

  CHECK_THROWS_AS(steiner_oracle({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 1}}), Unsupported);
}

TEST_CASE("Steiner oracle agrees with generated minimal trees") {
  std::size_t same = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto net = generate_honeycomb_network(seed, 1 + static_cast<int>(seed % 3));
    REQUIRE(is_tree(net));
    std::vector<Point2> t;
    for (auto v : net.endpoints()) t.push_back(net.vertices[v].p);
    REQUIRE(t.size() <= 5);
    const auto sol = steiner_oracle(t);
    CHECK(sol.length <= length(net) + 1e-8);
    bool coincide = sol.network.vertices.size() == net.vertices.size();
    for (const auto& v : sol.network.vertices) {
      if (v.kind != VertexKind::junction) continue;
      bool near = false;
      for (const auto& w : net.vertices) near |= w.kind == VertexKind::junction && norm(w.p - v.p) < 1e-6;
      coincide &= near;
    }
    if (coincide) {
      ++same;
      CHECK(std::abs(sol.length - length(net)) < 1e-8);
    }
  }
  CHECK(same > 0);
}
