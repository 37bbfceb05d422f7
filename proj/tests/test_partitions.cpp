#include <doctest.h>

#include <numbers>
#include <random>
#include <set>

#include "calnet/errors.hpp"
#include "calnet/fixtures.hpp"
#include "calnet/partitions.hpp"
#include "partition_oracles.hpp"
#include "support.hpp"

using namespace calnet;

namespace {

using Q = QSqrt3;
const Q s3 = Q::sqrt3();
const Q one_half = Q::ratio(1, 2);
const ExactPoint zero_vec{Q(0), Q(0)};

ExactPoint ev(const Q& x, const Q& y) { return {x, y}; }

struct Pipeline {
  PartitionDomain<Q> domain;
  FaceColoring coloring;
  FieldAssignment<Q> fields;
  PartitionSpec<Q> spec;
  PartitionCalibrationReport<Q> report;
};

Pipeline run_exact(const Network& net, const Q& delta, const Q& delta_prime, std::optional<std::array<int, 3>> perm = {}) {
  Pipeline p;
  p.domain = build_partition_domain<Q>(net, delta, delta_prime);
  p.coloring = three_color_faces(p.domain.extended);
  if (perm) p.coloring = relabel(p.coloring, *perm);
  p.fields = assign_fields(p.domain, p.coloring);
  p.spec = partition_spec(p.domain, p.coloring);
  p.report = verify_paired_calibration(p.spec, p.fields);
  return p;
}

/// Colors of the double tripod faces renamed to the reference labelling: the two
/// side faces 1, the bottom face 2, the top face 3.
std::array<int, 3> reference_labels(const FaceColoring& c) {
  std::array<int, 3> perm{};
  perm[c.color_of(1, true) - 1] = 1;   // left of o1 -> p1: the left face
  perm[c.color_of(0, false) - 1] = 2;  // right of o1 -> o2: the bottom face
  perm[c.color_of(0, true) - 1] = 3;   // left of o1 -> o2: the top face
  return perm;
}

Pipeline double_tripod_pipeline() {
  const auto net = double_tripod(1, 2);
  const auto domain = build_partition_domain<Q>(net, Q::ratio(1, 5), Q::ratio(3, 10));
  return run_exact(net, Q::ratio(1, 5), Q::ratio(3, 10), reference_labels(three_color_faces(domain.extended)));
}

bool all_zero(const PartitionCalibrationReport<Q>& r) {
  return r.trace_residual.is_zero() && r.norm_excess.is_zero() && r.interface_residual.is_zero() &&
         r.sum_residual.is_zero();
}

const TraceCheck<Q>* find_trace(const PartitionCalibrationReport<Q>& r, const std::string& a, const std::string& b,
                                int pair) {
  for (const auto& t : r.traces)
    if (t.pair == pair && ((t.zone_a == a && t.zone_b == b) || (t.zone_a == b && t.zone_b == a))) return &t;
  return nullptr;
}

}  // namespace

TEST_CASE("pair labels") {
  CHECK(pair_label(0) == "12");
  CHECK(pair_label(1) == "23");
  CHECK(pair_label(2) == "31");
  CHECK(pair_index(1, 2) == std::pair<int, bool>{0, true});
  CHECK(pair_index(2, 1) == std::pair<int, bool>{0, false});
  CHECK(pair_index(3, 1) == std::pair<int, bool>{2, true});
  CHECK(pair_index(2, 3) == std::pair<int, bool>{1, true});
}

TEST_CASE("domain of a single segment") {
  Network seg;
  seg.vertices = {{"a", {0, 0}, ev(Q(0), Q(0)), VertexKind::endpoint}, {"b", {1, 0}, ev(Q(1), Q(0)), VertexKind::endpoint}};
  seg.edges = {{0, 1, {}, {}}};
  const auto dom = build_partition_domain<Q>(seg, Q::ratio(1, 10), Q::ratio(1, 5));
  CHECK(area(dom.omega) == Q::ratio(7, 5) * Q::ratio(1, 5));
  Q xmin = dom.omega.outer[0].x, xmax = xmin;
  for (const auto& p : dom.omega.outer) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    CHECK(abs(p.y) == Q::ratio(1, 10));
  }
  CHECK(xmin == Q::ratio(-1, 5));
  CHECK(xmax == Q::ratio(6, 5));
}

TEST_CASE("domain of the double tripod") {
  const auto dom = build_partition_domain<Q>(double_tripod(1, 2), Q::ratio(1, 5), Q::ratio(3, 10));
  CHECK(dom.omega.holes.empty());
  CHECK(dom.omega.outer.size() == 14);  // two per endpoint cap, one per junction sector
  CHECK(dom.pieces.size() == 20);
  CHECK(exact_length(dom.extended) == Q(1) + Q(4) * Q::ratio(23, 10));
  Q covered(0);
  for (const auto& piece : dom.pieces) covered += signed_area(piece.ring);
  CHECK(covered == area(dom.omega));
  std::set<std::string> zones;
  for (const auto& piece : dom.pieces) zones.insert(piece.zone);
  CHECK(zones.count("hub o1"));
  CHECK(zones.count("wedge o1-o2 left"));
  CHECK(zones.count("wedge o1-o2 right"));
}

TEST_CASE("domain thresholds") {
  const auto net = double_tripod(1, 2);
  CHECK_NOTHROW(build_partition_domain<double>(net, 0.2, 0.3));
  CHECK_THROWS_AS(build_partition_domain<double>(net, 0.25, 0.3), ThresholdViolation);
  CHECK_THROWS_AS(build_partition_domain<Q>(net, s3 / Q(8), Q::ratio(3, 10)), ThresholdViolation);
  CHECK_NOTHROW(build_partition_domain<Q>(net, s3 / Q(8) - Q::ratio(1, 1000000), Q::ratio(3, 10)));
  CHECK_THROWS_AS(build_partition_domain<double>(net, 0.2, 0.0), InvalidInput);
  CHECK_THROWS_AS(build_partition_domain<double>(net, 0.2, 1.0), InvalidInput);
  CHECK_THROWS_AS(build_partition_domain<double>(net, -0.1, 0.3), InvalidInput);
  auto bent = testing::without_exact(net);
  bent.vertices[0].p.y += 0.01;
  CHECK_THROWS_AS(build_partition_domain<double>(bent, 0.1, 0.3), NotMinimal);
}

TEST_CASE("domain clipped to a convex polygon") {
  const auto net = double_tripod(1, 2);
  const Polygon<double> box{{{-0.8, -1.2}, {1.8, -1.2}, {1.8, 1.2}, {-0.8, 1.2}}, {}};
  const auto dom = build_partition_domain<double>(net, 0.2, 0.3, box);
  const auto full = build_partition_domain<double>(net, 0.2, 0.3);
  CHECK(area(dom.omega) < area(full.omega));
  double covered = 0;
  for (const auto& piece : dom.pieces) covered += signed_area(piece.ring);
  CHECK(covered == doctest::Approx(area(dom.omega)).epsilon(1e-12));
  const auto col = three_color_faces(dom.extended);
  const auto report = verify_paired_calibration(partition_spec(dom, col), assign_fields(dom, col));
  CHECK(report.verdict);

  const Polygon<double> concave{{{-2, -2}, {3, -2}, {0.5, 0}, {3, 2}, {-2, 2}}, {}};
  CHECK_THROWS_AS(build_partition_domain<double>(net, 0.2, 0.3, concave), InvalidInput);
  const Polygon<double> along_side{{{-5, -5}, {5, -5}, {5, 0.2}, {-5, 0.2}}, {}};
  CHECK_THROWS_AS(build_partition_domain<double>(net, 0.2, 0.3, along_side), NonTransverse);
}

TEST_CASE("three_color_faces") {
  const auto tri = three_color_faces(fixtures::tripod());
  CHECK(tri.faces() == 3);
  CHECK(std::set<int>(tri.color.begin(), tri.color.end()) == std::set<int>{1, 2, 3});

  const auto dt = three_color_faces(double_tripod(1, 2));
  CHECK(dt.faces() == 4);
  CHECK(dt.color_of(1, true) == dt.color_of(3, false));  // the two side faces
  std::set<int> three{dt.color_of(1, true), dt.color_of(0, true), dt.color_of(0, false)};
  CHECK(three.size() == 3);

  const auto hex = fixtures::hexagon_with_stubs(1, 1);
  const auto hc = three_color_faces(hex);
  CHECK(hc.faces() == 7);
  for (std::size_t e = 0; e < 6; ++e) CHECK(hc.color_of(e, true) == hc.color_of(0, true));  // inner face
  for (std::size_t e = 0; e < hex.edges.size(); ++e) CHECK(hc.color_of(e, true) != hc.color_of(e, false));

  const auto relabeled = relabel(dt, {2, 3, 1});
  for (std::size_t f = 0; f < dt.faces(); ++f) CHECK(relabeled.color[f] == std::array<int, 3>{2, 3, 1}[dt.color[f] - 1]);

  const auto path = testing::make_network({{"a", {0, 0}}, {"b", {1, 0}}, {"c", {2, 1}}}, {{"a", "b"}, {"b", "c"}});
  CHECK_THROWS_AS(three_color_faces(path), NoColoring);
}

TEST_CASE("double tripod field table") {
  const auto p = double_tripod_pipeline();
  bool saw_r1 = false, saw_rtu = false;
  for (const auto& c : p.fields.cells) {
    CHECK(c.psi[0] + c.psi[1] + c.psi[2] == zero_vec);
    if (c.zone == "hub o1") {
      saw_r1 = true;
      CHECK(c.psi[0] == ev(s3 * one_half, -one_half));
      CHECK(c.psi[1] == ev(Q(0), Q(1)));
      CHECK(c.psi[2] == ev(-s3 * one_half, -one_half));
    }
    if (c.zone == "wedge o1-o2 left") {
      saw_rtu = true;
      CHECK(c.label == 3);
      CHECK(c.psi[0] == zero_vec);
      CHECK(c.psi[1] == ev(Q(0), Q(1)));
      CHECK(c.psi[2] == ev(Q(0), Q(-1)));
    }
  }
  CHECK(saw_r1);
  CHECK(saw_rtu);
}

TEST_CASE("double tripod construction calibrates with zero residuals") {
  const auto p = double_tripod_pipeline();
  CHECK(p.report.verdict);
  CHECK(all_zero(p.report));
  CHECK(p.report.failures.empty());
  CHECK_NOTHROW(p.spec.validate());
  CHECK(perimeter_energy(p.spec) == Q::ratio(51, 5));
}

TEST_CASE("the worked trace check between R1 and R_Tu") {
  const auto p = double_tripod_pipeline();
  const auto* t = find_trace(p.report, "hub o1", "wedge o1-o2 left", 0);
  REQUIRE(t != nullptr);
  const bool a_is_hub = t->zone_a == "hub o1";
  const ExactPoint n_hub = a_is_hub ? t->normal_a : ExactPoint{-t->normal_a.x, -t->normal_a.y};
  CHECK(n_hub == ev(one_half, s3 * one_half));
  CHECK((a_is_hub ? t->trace_a : t->trace_b) == Q(0));
  CHECK(dot(ev(s3 * one_half, -one_half), ev(one_half, s3 * one_half)) == Q(0));
  CHECK(t->residual == Q(0));
}

TEST_CASE("corrupting R1's Psi12 leaves a trace residual of 1/2") {
  auto p = double_tripod_pipeline();
  const auto* t = find_trace(p.report, "hub o1", "wedge o1-o2 left", 0);
  REQUIRE(t != nullptr);
  const std::size_t hub_cell = t->zone_a == "hub o1" ? t->cell_a : t->cell_b;
  p.fields.cells[hub_cell].psi[0] = ev(Q(1), Q(0));
  const auto bad = verify_paired_calibration(p.spec, p.fields);
  CHECK_FALSE(bad.verdict);
  const auto* u = find_trace(bad, "hub o1", "wedge o1-o2 left", 0);
  bool found = false;
  for (const auto& tr : bad.traces)
    if (tr.pair == 0 && (tr.cell_a == hub_cell || tr.cell_b == hub_cell) &&
        ((tr.zone_a == "wedge o1-o2 left") || (tr.zone_b == "wedge o1-o2 left"))) {
      CHECK(tr.residual == one_half);
      found = true;
    }
  CHECK(found);
  CHECK(u != nullptr);
  CHECK(bad.trace_residual >= one_half);
}

TEST_CASE("zero fields fail every interface") {
  auto p = double_tripod_pipeline();
  for (auto& c : p.fields.cells) c.psi = {zero_vec, zero_vec, zero_vec};
  const auto r = verify_paired_calibration(p.spec, p.fields);
  CHECK_FALSE(r.verdict);
  CHECK(r.interface_residual == Q(1));
}

template <class T>
void corrupt_each_cell(const PartitionSpec<T>& spec, const FieldAssignment<T>& base, double min_residual) {
  REQUIRE(verify_paired_calibration(spec, base).verdict);
  std::vector<std::array<Vec2<T>, 3>> rows;
  for (const auto& c : base.cells)
    if (std::find(rows.begin(), rows.end(), c.psi) == rows.end()) rows.push_back(c.psi);
  CHECK(rows.size() > 2);
  for (std::size_t k = 0; k < base.cells.size(); ++k) {
    for (const auto& row : rows) {
      if (row == base.cells[k].psi) continue;
      auto fields = base;
      fields.cells[k].psi = row;
      const auto r = verify_paired_calibration(spec, fields);
      CHECK(to_double(r.trace_residual) > min_residual);
      CHECK_FALSE(r.verdict);
    }
  }
}

TEST_CASE("single-cell corruption by another table row is always detected") {
  const auto exact = double_tripod_pipeline();
  corrupt_each_cell(exact.spec, exact.fields, 0.0);
  const auto hex = run_exact(fixtures::hexagon_with_stubs(1, 1), Q::ratio(1, 5), Q::ratio(1, 2));
  corrupt_each_cell(to_double(hex.spec), to_double(hex.fields), 1e-6);
}

TEST_CASE("hexagon construction calibrates with zero residuals") {
  const auto p = run_exact(fixtures::hexagon_with_stubs(1, 1), Q::ratio(1, 5), Q::ratio(1, 2));
  CHECK(p.report.verdict);
  CHECK(all_zero(p.report));
  CHECK(perimeter_energy(p.spec) == Q(6) + Q(6) * Q::ratio(3, 2));
}

TEST_CASE("float pipeline matches the exact one") {
  const auto net = double_tripod(1, 2);
  const auto dom = build_partition_domain<double>(net, 0.2, 0.3);
  const auto col = three_color_faces(dom.extended);
  const auto spec = partition_spec(dom, col);
  const auto r = verify_paired_calibration(spec, assign_fields(dom, col));
  CHECK(r.verdict);
  CHECK(r.trace_residual <= 1e-12);
  CHECK(r.interface_residual <= 1e-12);
  CHECK(r.sum_residual <= 1e-12);
  CHECK(perimeter_energy(spec) == doctest::Approx(10.2).epsilon(1e-12));
}

TEST_CASE("perimeter_energy") {
  const auto tri = run_exact(rotated_30(fixtures::tripod(), 1), Q::ratio(1, 10), Q::ratio(3, 10));
  CHECK(perimeter_energy(tri.spec) == Q(3) * Q::ratio(13, 10));
  PartitionSpec<Q> empty;
  CHECK(perimeter_energy(empty) == Q(0));
}

TEST_CASE("perimeter_energy equals half the interior boundary length of the regions") {
  std::vector<PartitionSpec<double>> specs;
  specs.push_back(to_double(double_tripod_pipeline().spec));
  specs.push_back(to_double(run_exact(fixtures::hexagon_with_stubs(1, 1), Q::ratio(1, 5), Q::ratio(1, 2)).spec));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = generate_honeycomb_network(seed, 3 + static_cast<int>(seed));
    const auto dom = build_partition_domain<double>(net, 0.9 * std::sqrt(3.0) / 8, 0.3);
    specs.push_back(partition_spec(dom, three_color_faces(dom.extended)));
  }
  specs.push_back(counterexample(1, 2, 0.6, 0.7).F);
  for (const auto& spec : specs) CHECK(testing::perimeter_oracle(spec) == doctest::Approx(perimeter_energy(spec)).epsilon(1e-9));
}

TEST_CASE("spec validation") {
  auto spec = to_double(double_tripod_pipeline().spec);
  CHECK_NOTHROW(spec.validate());
  auto bad_normal = spec;
  bad_normal.interfaces[0].normal = bad_normal.interfaces[0].normal * 2.0;
  CHECK_THROWS_AS(bad_normal.validate(), InvalidInput);
  auto missing = spec;
  missing.regions[0].pop_back();
  CHECK_THROWS_AS(missing.validate(), InvalidInput);
}

TEST_CASE("partition_from_labeled_cells") {
  const Polygon<double> omega{{{0, 0}, {2, 0}, {2, 1}, {0, 1}}, {}};
  const std::vector<Ring<double>> cells{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{1, 0}, {2, 0}, {2, 1}, {1, 1}}};
  const auto spec = partition_from_labeled_cells(omega, cells, {2, 1});
  REQUIRE(spec.interfaces.size() == 1);
  const auto& i = spec.interfaces[0];
  CHECK(i.pair == 0);
  CHECK(i.normal.x == doctest::Approx(-1));  // from region 1 (right) into region 2 (left)
  CHECK(perimeter_energy(spec) == doctest::Approx(1));
}

TEST_CASE("counterexample closed form") {
  const auto at = counterexample(1, 2, std::sqrt(3.0) / 4, 0.5);
  CHECK(std::abs(at.delta_P) <= 1e-12);
  CHECK_FALSE(at.improves);

  const auto r = counterexample(1, 2, 0.6, 0.7);
  CHECK(r.delta_P == doctest::Approx(2.4 / std::sqrt(3.0) - 1).epsilon(1e-12));
  CHECK(r.delta_P == doctest::Approx(0.385641).epsilon(1e-6));
  CHECK(r.improves);
  CHECK(r.P_E == doctest::Approx(9).epsilon(1e-12));
  CHECK(perimeter_energy(r.E) - perimeter_energy(r.F) == doctest::Approx(r.delta_P).epsilon(1e-12));
  CHECK(testing::perimeter_oracle(r.E) - testing::perimeter_oracle(r.F) == doctest::Approx(r.delta_P).epsilon(1e-9));

  CHECK_FALSE(counterexample(1, 2, 0.2, 0.7).improves);
  CHECK_FALSE(counterexample(1, 2, 0.1, 0.7).improves);
  CHECK_THROWS_AS(counterexample(1, 2, 0.7, 0.7), InvalidGeometry);
  CHECK_THROWS_AS(counterexample(1, 2, 0.5, 0.9), InvalidGeometry);
  CHECK_THROWS_AS(counterexample(1, 0.5, 0.1, 0.3), InvalidInput);
}

TEST_CASE("counterexample matches 4h/sqrt3 - d on random feasible pairs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 100; ++k) {
    const double d = 0.5 + 1.5 * u(rng);
    const double delta = (0.3 + 0.65 * u(rng)) * std::sqrt(3.0) * d / 2;
    const double h = (0.02 + 0.96 * u(rng)) * delta;
    const auto r = counterexample(d, 2 * d + 0.5, h, delta);
    CHECK(std::abs(r.delta_P - (4 * h / std::sqrt(3.0) - d)) <= 1e-12);
  }
}

TEST_CASE("improvement flips sign exactly at h = sqrt3 d / 4") {
  const double d = 1, delta = 0.8, h0 = std::sqrt(3.0) * d / 4;
  for (int k = 1; k <= 100; ++k) {
    const double h = delta * k / 101.0;
    const auto r = counterexample(d, 2, h, delta);
    CHECK(std::abs(r.delta_P - (4 * h / std::sqrt(3.0) - d)) <= 1e-12);
    if (h < h0 - 1e-9) CHECK_FALSE(r.improves);
    if (h > h0 + 1e-9) CHECK(r.improves);
  }
}

TEST_CASE("boundary traces") {
  const auto spec = to_double(double_tripod_pipeline().spec);
  const auto arcs = boundary_trace(spec);
  CHECK(!arcs.empty());
  std::set<int> labels;
  for (const auto& a : arcs) {
    CHECK(a.t0 < a.t1);
    labels.insert(a.label);
  }
  CHECK(labels == std::set<int>{1, 2, 3});
}

TEST_CASE("flux_check") {
  const auto net = double_tripod(1, 2);
  const auto dom = build_partition_domain<double>(net, 0.2, 0.3);
  const auto col = three_color_faces(dom.extended);
  const auto fields = assign_fields(dom, col);
  const auto E = partition_spec(dom, col);
  CHECK(flux_check(E, E, fields) <= 1e-12);

  const auto F = channel_competitor(dom, col, 0.15);
  CHECK(flux_check(E, F, fields) <= 1e-12);
  for (int i = 0; i < 3; ++i) {
    const double fe = testing::region_flux_oracle(E, fields, i), ff = testing::region_flux_oracle(F, fields, i);
    CHECK(fe == doctest::Approx(ff).epsilon(1e-9));
  }
  CHECK(perimeter_energy(F) > perimeter_energy(E));

  auto swapped = E;
  std::swap(swapped.regions[0], swapped.regions[1]);
  CHECK_THROWS_AS(flux_check(E, swapped, fields), InvalidComparison);
  CHECK_THROWS_AS(channel_competitor(dom, col, 0.25), InvalidGeometry);
}

TEST_CASE("flux identity on 50 random trace-matched pairs") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(-1, 1);
  struct Setup {
    PartitionDomain<double> dom;
    FaceColoring col;
    FieldAssignment<double> fields;
    PartitionSpec<double> spec;
  };
  std::vector<Setup> setups;
  auto add = [&](const Network& net, double delta, double dp) {
    Setup s;
    s.dom = build_partition_domain<double>(net, delta, dp);
    s.col = three_color_faces(s.dom.extended);
    s.fields = assign_fields(s.dom, s.col);
    s.spec = partition_spec(s.dom, s.col);
    setups.push_back(std::move(s));
  };
  add(double_tripod(1, 2), 0.2, 0.3);
  add(fixtures::hexagon_with_stubs(1, 1), 0.2, 0.5);
  add(generate_honeycomb_network(5, 8), 0.18, 0.3);
  add(generate_honeycomb_network(9, 14), 0.18, 0.3);

  auto displaced = [&](const Setup& s) {
    Network comp = testing::without_exact(s.dom.extended);
    for (auto& v : comp.vertices)
      if (v.kind == VertexKind::junction) v.p = v.p + Vector2{u(rng), u(rng)} * (0.25 * s.dom.delta);
    return partition_from_network(s.dom, s.col, comp);
  };

  int pairs = 0;
  double worst = 0, worst_oracle = 0;
  for (int k = 0; k < 50; ++k) {
    const Setup& s = setups[k % setups.size()];
    PartitionSpec<double> a = (k % 3 == 0) ? s.spec : displaced(s);
    PartitionSpec<double> b;
    if (k % setups.size() == 0 && k % 2 == 0) {
      b = channel_competitor(s.dom, s.col, s.dom.delta * (0.1 + 0.8 * (u(rng) + 1) / 2));
    } else {
      b = displaced(s);
    }
    worst = std::max(worst, flux_check(a, b, s.fields));
    for (int i = 1; i < 3; ++i) {
      const double fa = testing::region_flux_oracle(a, s.fields, i), fb = testing::region_flux_oracle(b, s.fields, i);
      worst_oracle = std::max(worst_oracle, std::abs(fa - fb));
    }
    ++pairs;
  }
  CHECK(pairs == 50);
  CHECK(worst <= 1e-12);
  CHECK(worst_oracle <= 1e-9);
}

TEST_CASE("honeycomb networks up to 20 junctions calibrate") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int budget = 1 + static_cast<int>(seed % 20);
    const auto net = generate_honeycomb_network(seed, budget);
    const Q delta = Q(9) * s3 / Q(80);  // 0.9 * sqrt3 * d / 8 with d = 1
    const auto p = run_exact(net, delta, Q::ratio(3, 10));
    CHECK_MESSAGE(p.report.verdict, "seed " << seed);
    CHECK(all_zero(p.report));
    const auto fd = build_partition_domain<double>(net, 0.9 * std::sqrt(3.0) / 8, 0.3);
    const auto fc = three_color_faces(fd.extended);
    const auto fr = verify_paired_calibration(partition_spec(fd, fc), assign_fields(fd, fc));
    CHECK(fr.verdict);
    CHECK(std::max({fr.trace_residual, fr.interface_residual, fr.sum_residual, fr.norm_excess}) <= 1e-12);
  }
}
