#include <doctest.h>

#include <numbers>
#include <random>

#include "calnet/kernels.hpp"
#include "calnet/network.hpp"

using namespace calnet;

TEST_CASE("identity comass reaches 1 exactly at the hexagon directions") {
  for (int k = 0; k < 12; ++k) {
    const double v = kernels::identity_comass(k * std::numbers::pi / 6);
    CHECK(v <= 1 + 1e-15);
    if (k % 2 == 0) CHECK(v == doctest::Approx(1).epsilon(1e-15));
  }
  CHECK(kernels::identity_comass(std::numbers::pi / 6) == doctest::Approx(std::sqrt(3.0) / 2));
}

TEST_CASE("comass scan: parallel matches serial") {
  for (std::size_t n : {0u, 1u, 360u, 100000u}) {
    const auto a = kernels::comass_scan_serial(n), b = kernels::comass_scan(n);
    CHECK(a.max_value == b.max_value);
    CHECK(a.min_value == b.min_value);
    CHECK(a.argmax == b.argmax);
    CHECK(a.evaluated == b.evaluated);
    CHECK(a.max_value <= 1 + 1e-15);
    CHECK(a.max_value >= 1 - 1e-15);
  }
}

TEST_CASE("segment conflicts: parallel matches serial") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<kernels::TaggedSegment> segs;
  for (std::size_t k = 0; k < 300; ++k) segs.push_back({{{u(rng), u(rng)}, {u(rng), u(rng)}}, 2 * k, 2 * k + 1});
  const auto a = kernels::segment_conflicts_serial(segs, 1e-9);
  const auto b = kernels::segment_conflicts(segs, 1e-9);
  REQUIRE(a.size() == b.size());
  CHECK(!a.empty());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].i == b[k].i);
    CHECK(a[k].j == b[k].j);
    CHECK(a[k].hit.p.x == b[k].hit.p.x);
  }
}

TEST_CASE("segment conflicts ignore shared nodes of a honeycomb") {
  const auto net = generate_honeycomb_network(11, 20);
  std::vector<kernels::TaggedSegment> segs;
  for (const auto& e : net.edges) segs.push_back({{net.vertices[e.from].p, net.vertices[e.to].p}, e.from, e.to});
  CHECK(kernels::segment_conflicts(segs, 1e-9).empty());
  segs.push_back({{{-100, -100}, {100, 100}}, 9999, 10000});
  CHECK(!kernels::segment_conflicts(segs, 1e-9).empty());
}

TEST_CASE("cell overlaps: parallel matches serial and finds grid adjacencies") {
  std::vector<Ring<double>> cells;
  const int n = 12;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cells.push_back({{double(i), double(j)}, {i + 1.0, double(j)}, {i + 1.0, j + 1.0}, {double(i), j + 1.0}});
  const auto a = kernels::cell_overlaps_serial(cells, 1e-9);
  const auto b = kernels::cell_overlaps(cells, 1e-9);
  CHECK(a.size() == static_cast<std::size_t>(2 * n * (n - 1)));
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].a == b[k].a);
    CHECK(a[k].b == b[k].b);
    CHECK(a[k].edge_a == b[k].edge_a);
    CHECK(a[k].p == b[k].p);
    CHECK(a[k].q == b[k].q);
  }
}

TEST_CASE("cell overlaps in exact arithmetic") {
  const QSqrt3 s3 = QSqrt3::sqrt3();
  const QSqrt3 zero(0), one(1);
  std::vector<Ring<QSqrt3>> cells{{{zero, zero}, {one, zero}, {zero, s3}}, {{one, zero}, {one, s3}, {zero, s3}}};
  const auto ov = kernels::cell_overlaps(cells, 0);
  REQUIRE(ov.size() == 1);
  CHECK(ov[0].a == 0);
  CHECK(ov[0].b == 1);
  CHECK(kernels::cell_overlaps_serial(cells, 0).size() == 1);
}

TEST_CASE("Steiner search: parallel matches serial") {
  CHECK(kernels::full_topology_count(3) == 1);
  CHECK(kernels::full_topology_count(4) == 3);
  CHECK(kernels::full_topology_count(5) == 15);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point2> t;
    for (int k = 0; k < 3 + trial % 3; ++k) t.push_back({u(rng), u(rng)});
    const auto a = kernels::steiner_search_serial(t), b = kernels::steiner_search(t);
    CHECK(a.length == b.length);
    CHECK(a.topology == b.topology);
    CHECK(a.edges == b.edges);
  }
}
