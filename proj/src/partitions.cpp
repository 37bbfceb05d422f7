#include "calnet/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "calnet/kernels.hpp"

namespace calnet {

std::string_view pair_label(int pair) {
  switch (pair) {
    case 0: return "12";
    case 1: return "23";
    case 2: return "31";
  }
  return "??";
}

std::pair<int, bool> pair_index(int i, int j) {
  if (i == j || i < 1 || i > 3 || j < 1 || j > 3) throw InvalidInput("labels must be two distinct values in 1..3");
  if (j == i % 3 + 1) return {i - 1, true};
  return {j - 1, false};
}

namespace {

template <class T>
bool within_tol(const T& residual, double eps) {
  if constexpr (is_exact_v<T>) {
    return residual.sign() <= 0;
  } else {
    return residual <= eps;
  }
}

template <class T>
Vec2<T> position(const Network& net, std::size_t v) {
  if constexpr (is_exact_v<T>) {
    if (!net.vertices[v].exact) throw InvalidInput("vertex '" + net.vertices[v].id + "' has no exact coordinates");
    return *net.vertices[v].exact;
  } else {
    return net.vertices[v].p;
  }
}

template <class T>
void set_position(Vertex& v, const Vec2<T>& p) {
  if constexpr (is_exact_v<T>) {
    v.exact = p;
    v.p = to_double(p);
  } else {
    v.p = p;
    v.exact.reset();
  }
}

Point2 centroid(const Ring<double>& ring) {
  Point2 c{0, 0};
  for (const auto& p : ring) c += p;
  return c / static_cast<double>(ring.size());
}

bool in_convex(const Ring<double>& ring, const Point2& p, double eps) {
  const std::size_t n = ring.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vector2 e = ring[(k + 1) % n] - ring[k];
    if (cross(e, p - ring[k]) < -eps * norm(e)) return false;
  }
  return true;
}

// Outgoing arms of a junction sorted counterclockwise by angle.
struct Arm {
  std::size_t edge;
  bool outgoing_is_forward;  // the junction is the edge's `from`
  double angle;
};

std::vector<Arm> arms_at(const Network& net, std::size_t v) {
  std::vector<Arm> arms;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& edge = net.edges[e];
    if (edge.from == v) {
      const Vector2 d = net.vertices[edge.to].p - net.vertices[v].p;
      arms.push_back({e, true, std::atan2(d.y, d.x)});
    }
    if (edge.to == v) {
      const Vector2 d = net.vertices[edge.from].p - net.vertices[v].p;
      arms.push_back({e, false, std::atan2(d.y, d.x)});
    }
  }
  std::sort(arms.begin(), arms.end(), [](const Arm& a, const Arm& b) { return a.angle < b.angle; });
  return arms;
}

template <class T>
Network extend_endpoints(const Network& net, const T& delta_prime) {
  Network out = net;
  for (auto& e : out.edges) {
    e.bends.clear();
    e.exact_bends.clear();
  }
  if (sign_of(delta_prime, 0.0) == 0) return out;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& edge = net.edges[e];
    for (bool at_to : {false, true}) {
      const std::size_t v = at_to ? edge.to : edge.from;
      const std::size_t w = at_to ? edge.from : edge.to;
      if (net.degree(v) != 1) continue;
      const Vec2<T> pv = position<T>(net, v);
      const Vec2<T> u = unit(pv - position<T>(net, w));
      set_position(out.vertices[v], pv + u * delta_prime);
    }
  }
  return out;
}

template <class T>
std::vector<Segment<T>> straight_segments(const Network& net) {
  std::vector<Segment<T>> out;
  for (const auto& e : net.edges) out.push_back({position<T>(net, e.from), position<T>(net, e.to)});
  return out;
}

template <class T>
std::vector<DomainPiece<T>> make_pieces(const Network& net, const T& delta, bool split) {
  const T s3 = sqrt3_value<T>();
  const T inset = delta / s3;  // where a strip meets its junction triangle
  std::vector<DomainPiece<T>> pieces;
  auto junction = [&](std::size_t v) { return net.degree(v) == 3; };

  for (std::size_t v = 0; v < net.vertices.size(); ++v) {
    if (!junction(v)) continue;
    const auto arms = arms_at(net, v);
    const Vec2<T> o = position<T>(net, v);
    std::array<Vec2<T>, 3> u;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& edge = net.edges[arms[k].edge];
      u[k] = unit(position<T>(net, arms[k].outgoing_is_forward ? edge.to : edge.from) - o);
    }
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t k1 = (k + 1) % 3;
      DomainPiece<T> piece;
      piece.ring = {o, o + u[k] * inset, o + (u[k] + u[k1]) * (T(2) * inset), o + u[k1] * inset};
      piece.zone = "hub " + net.vertices[v].id;
      piece.edge = arms[k].edge;
      piece.left = arms[k].outgoing_is_forward;
      piece.hub = static_cast<int>(v);
      pieces.push_back(std::move(piece));
    }
  }

  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& edge = net.edges[e];
    const Vec2<T> a = position<T>(net, edge.from);
    const Vec2<T> d = position<T>(net, edge.to) - a;
    const T len = length(d);
    const Vec2<T> u = unit(d);
    const Vec2<T> n = perp(u);
    const bool ja = junction(edge.from), jb = junction(edge.to);
    const T sa = ja ? inset : T(0);
    const T sb = jb ? len - inset : len;
    auto P = [&](const T& s, const T& t) { return a + u * s + n * t; };
    const std::string ida = net.vertices[edge.from].id, idb = net.vertices[edge.to].id;
    auto add = [&](Ring<T> ring, std::string zone, bool left, int hub, bool wedge) {
      pieces.push_back({std::move(ring), std::move(zone), e, left, hub, wedge});
    };
    const T zero(0);
    if (split && ja && jb) {
      const T m = len / T(2);
      const T w = delta * s3;
      const int ha = static_cast<int>(edge.from), hb = static_cast<int>(edge.to);
      add({P(sa, zero), P(m, zero), P(m - w, delta), P(sa, delta)}, "hub " + ida, true, ha, false);
      add({P(m, zero), P(m + w, delta), P(m - w, delta)}, "wedge " + ida + "-" + idb + " left", true, -1, true);
      add({P(m, zero), P(sb, zero), P(sb, delta), P(m + w, delta)}, "hub " + idb, true, hb, false);
      add({P(sa, -delta), P(m - w, -delta), P(m, zero), P(sa, zero)}, "hub " + ida, false, ha, false);
      add({P(m - w, -delta), P(m + w, -delta), P(m, zero)}, "wedge " + ida + "-" + idb + " right", false, -1, true);
      add({P(m + w, -delta), P(sb, -delta), P(sb, zero), P(m, zero)}, "hub " + idb, false, hb, false);
    } else {
      const int hub = ja ? static_cast<int>(edge.from) : (jb ? static_cast<int>(edge.to) : -1);
      const std::string zone = hub >= 0 ? "hub " + net.vertices[hub].id : "strip " + ida + "-" + idb;
      add({P(sa, zero), P(sb, zero), P(sb, delta), P(sa, delta)}, zone, true, hub, false);
      add({P(sa, -delta), P(sb, -delta), P(sb, zero), P(sa, zero)}, zone, false, hub, false);
    }
  }
  return pieces;
}

template <class T>
bool is_convex_ccw(const Ring<T>& ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t k = 0; k < n; ++k) {
    const auto e1 = ring[(k + 1) % n] - ring[k];
    const auto e2 = ring[(k + 2) % n] - ring[(k + 1) % n];
    if (sign_of(cross(e1, e2), 0.0) < 0) return false;
  }
  return sign_of(signed_area(ring), 0.0) > 0;
}

template <class T>
void check_transverse(const Polygon<T>& omega, const Ring<T>& D, const ToleranceConfig& tol) {
  std::vector<const Ring<T>*> rings{&omega.outer};
  for (const auto& h : omega.holes) rings.push_back(&h);
  const std::size_t m = D.size();
  for (const auto* ring : rings) {
    const std::size_t n = ring->size();
    for (std::size_t i = 0; i < n; ++i) {
      const Segment<T> s{(*ring)[i], (*ring)[(i + 1) % n]};
      for (std::size_t j = 0; j < m; ++j) {
        const Segment<T> t{D[j], D[(j + 1) % m]};
        const auto hit = segment_intersection(s, t, tol.eps_len);
        if (hit.kind == IntersectionKind::empty) continue;
        if (hit.kind == IntersectionKind::overlap)
          throw NonTransverse("clip boundary runs along the tube boundary");
        const Vector2 a = to_double(s.direction()), b = to_double(t.direction());
        if (std::abs(cross(a, b)) <= tol.eps_angle * norm(a) * norm(b))
          throw NonTransverse("clip boundary touches the tube boundary tangentially");
      }
    }
  }
}

template <class T>
PartitionDomain<T> make_domain(const Network& net, const T& delta, const T& delta_prime, bool split,
                               const std::optional<Polygon<T>>& D, const ToleranceConfig& tol) {
  PartitionDomain<T> dom;
  dom.delta = delta;
  dom.delta_prime = delta_prime;
  dom.extended = extend_endpoints(net, delta_prime);
  dom.omega = tube_polygon(straight_segments<T>(dom.extended), delta, tol);
  dom.pieces = make_pieces(dom.extended, delta, split);
  if (D) {
    if (!D->holes.empty()) throw InvalidInput("clip polygon must not have holes");
    Ring<T> clip = D->outer;
    if (sign_of(signed_area(clip), 0.0) < 0) std::reverse(clip.begin(), clip.end());
    if (!is_convex_ccw(clip)) throw InvalidInput("clip polygon must be convex");
    check_transverse(dom.omega, clip, tol);
    Polygon<T> clipped;
    clipped.outer = simplify_ring(clip_to_convex(dom.omega.outer, clip), tol.eps_len);
    for (const auto& h : dom.omega.holes) {
      auto r = simplify_ring(clip_to_convex(h, clip), tol.eps_len);
      if (r.size() >= 3) clipped.holes.push_back(std::move(r));
    }
    if (clipped.outer.size() < 3) throw InvalidGeometry("clip polygon misses the tube");
    dom.omega = std::move(clipped);
    std::vector<DomainPiece<T>> kept;
    for (auto& piece : dom.pieces) {
      piece.ring = simplify_ring(clip_to_convex(piece.ring, clip), tol.eps_len);
      if (piece.ring.size() >= 3 && sign_of(signed_area(piece.ring), 0.0) > 0) kept.push_back(std::move(piece));
    }
    dom.pieces = std::move(kept);
  }
  return dom;
}

}  // namespace

// ---------------------------------------------------------------------------

template <class T>
void PartitionSpec<T>::validate(const ToleranceConfig& tol) const {
  for (const auto& i : interfaces) {
    if (i.pair < 0 || i.pair > 2) throw InvalidInput("interface label out of range");
    const T nn = dot(i.normal, i.normal);
    if (!within_tol(abs_of(nn - T(1)), 1e-9)) throw InvalidInput("interface normal is not a unit vector");
  }
  T covered{};
  double magnitude = 0;
  for (const auto& region : regions) {
    for (const auto& poly : region) {
      const T a = area(poly);
      covered += a;
      magnitude += std::abs(to_double(a));
    }
  }
  const T defect = abs_of(covered - area(omega));
  const double allowed = std::max(tol.eps_len * tol.eps_len, 64 * 2.2e-16 * magnitude);
  if (!within_tol(defect, allowed)) throw InvalidInput("regions do not cover the domain (area defect " + to_text(defect) + ")");
}

template <class T>
PartitionDomain<T> build_partition_domain(const Network& net, const T& delta, const T& delta_prime,
                                          const std::optional<Polygon<T>>& D, const ToleranceConfig& tol) {
  tol.validate();
  validate(net, tol);
  check_minimal(net, tol).throw_if_failed();
  if (sign_of(delta, 0.0) <= 0) throw InvalidInput("delta must be positive");
  if (sign_of(delta_prime, 0.0) <= 0 || !(delta_prime < T(1))) throw InvalidInput("delta_prime must lie in (0, 1)");
  const auto segs = straight_segments<T>(net);
  T d = length(segs.front().direction());
  for (const auto& s : segs) d = std::min(d, length(s.direction()));
  const T bound = sqrt3_value<T>() * d / T(8);
  if (!(delta < bound))
    throw ThresholdViolation("delta = " + to_text(delta) + " is not below sqrt3*d/8 = " + to_text(bound) +
                             " (d = " + to_text(d) + ")");
  return make_domain(net, delta, delta_prime, true, D, tol);
}

FaceColoring three_color_faces(const Network& net) {
  const std::size_t E = net.edges.size();
  std::vector<std::size_t> parent(2 * E);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto side = [](std::size_t e, bool left) { return 2 * e + (left ? 0 : 1); };
  for (std::size_t v = 0; v < net.vertices.size(); ++v) {
    const std::size_t deg = net.degree(v);
    if (deg == 1) continue;
    if (deg != 3) throw NoColoring("vertex '" + net.vertices[v].id + "' is neither an endpoint nor a triple junction");
    const auto arms = arms_at(net, v);
    for (std::size_t k = 0; k < 3; ++k) {
      const Arm& a = arms[k];
      const Arm& b = arms[(k + 1) % 3];
      // sector between a and b (counterclockwise): left of outgoing a, right of outgoing b
      const std::size_t x = side(a.edge, a.outgoing_is_forward);
      const std::size_t y = side(b.edge, !b.outgoing_is_forward);
      parent[find(x)] = find(y);
    }
  }
  FaceColoring out;
  out.face_of_side.assign(2 * E, -1);
  std::map<std::size_t, int> face_id;
  for (std::size_t s = 0; s < 2 * E; ++s) {
    const std::size_t r = find(s);
    auto [it, fresh] = face_id.emplace(r, static_cast<int>(face_id.size()));
    out.face_of_side[s] = it->second;
  }
  const std::size_t F = face_id.size();
  std::vector<std::set<int>> adj(F);
  for (std::size_t e = 0; e < E; ++e) {
    const int l = out.face_of_side[2 * e], r = out.face_of_side[2 * e + 1];
    if (l == r)
      throw NoColoring("the same face lies on both sides of edge " + net.vertices[net.edges[e].from].id + "-" +
                       net.vertices[net.edges[e].to].id);
    adj[l].insert(r);
    adj[r].insert(l);
  }
  // breadth-first order from face 0
  std::vector<int> order;
  std::vector<bool> seen(F, false);
  for (std::size_t s = 0; s < F; ++s) {
    if (seen[s]) continue;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    seen[s] = true;
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      order.push_back(f);
      for (int g : adj[f])
        if (!seen[g]) {
          seen[g] = true;
          q.push(g);
        }
    }
  }
  out.color.assign(F, 0);
  std::function<bool(std::size_t)> paint = [&](std::size_t idx) -> bool {
    if (idx == order.size()) return true;
    const int f = order[idx];
    for (int c = 1; c <= 3; ++c) {
      bool ok = true;
      for (int g : adj[f]) ok = ok && out.color[g] != c;
      if (!ok) continue;
      out.color[f] = c;
      if (paint(idx + 1)) return true;
    }
    out.color[f] = 0;
    return false;
  };
  if (!paint(0)) throw NoColoring("the face adjacency graph is not 3-colorable");
  return out;
}

FaceColoring relabel(const FaceColoring& coloring, const std::array<int, 3>& perm) {
  FaceColoring out = coloring;
  for (int& c : out.color) c = perm[c - 1];
  return out;
}

template <class T>
FieldAssignment<T> assign_fields(const PartitionDomain<T>& domain, const FaceColoring& coloring,
                                 const ToleranceConfig& tol) {
  const Network& net = domain.extended;
  if (coloring.face_of_side.size() != 2 * net.edges.size()) throw InvalidInput("coloring belongs to another network");
  using Potential = std::array<Vec2<T>, 4>;  // indexed by color 1..3
  auto edge_dir = [&](std::size_t e) {
    return unit(position<T>(net, net.edges[e].to) - position<T>(net, net.edges[e].from));
  };
  auto psi_of = [](const Potential& phi) {
    return std::array<Vec2<T>, 3>{phi[1] - phi[2], phi[2] - phi[3], phi[3] - phi[1]};
  };

  std::map<int, Potential> hubs;
  for (std::size_t v = 0; v < net.vertices.size(); ++v) {
    if (net.degree(v) != 3) continue;
    const auto arms = arms_at(net, v);
    Potential phi;
    std::array<bool, 4> known{false, false, false, false};
    struct Relation {
      int l, r;
      Vec2<T> n;
    };
    std::vector<Relation> rel;
    for (const auto& arm : arms) {
      const int l = coloring.color_of(arm.edge, true), r = coloring.color_of(arm.edge, false);
      rel.push_back({l, r, -perp(edge_dir(arm.edge))});  // from the left face into the right face
    }
    known[rel[0].l] = true;
    for (int pass = 0; pass < 3; ++pass) {
      for (const auto& x : rel) {
        if (known[x.l] && !known[x.r]) {
          phi[x.r] = phi[x.l] - x.n;
          known[x.r] = true;
        } else if (known[x.r] && !known[x.l]) {
          phi[x.l] = phi[x.r] + x.n;
          known[x.l] = true;
        }
      }
    }
    for (const auto& x : rel) {
      const Vec2<T> gap = phi[x.l] - phi[x.r] - x.n;
      if (!known[x.l] || !known[x.r] || !within_tol(abs_of(gap.x) + abs_of(gap.y), tol.eps_field))
        throw InconsistentAssignment("arm normals at junction '" + net.vertices[v].id +
                                     "' do not match the face colors");
    }
    hubs[static_cast<int>(v)] = phi;
  }

  FieldAssignment<T> out;
  for (const auto& piece : domain.pieces) {
    FieldCell<T> cell;
    cell.ring = piece.ring;
    cell.zone = piece.zone;
    const int c = coloring.color_of(piece.edge, piece.left);
    cell.label = c;
    Potential phi;
    if (piece.hub >= 0 && !piece.wedge) {
      phi = hubs.at(piece.hub);
    } else {
      // midpoint wedge, or an isolated segment: face c against the face across the edge
      phi[c] = piece.left ? -perp(edge_dir(piece.edge)) : perp(edge_dir(piece.edge));
    }
    cell.psi = psi_of(phi);
    out.cells.push_back(std::move(cell));
  }
  return out;
}

template <class T>
PartitionSpec<T> partition_from_labeled_cells(const Polygon<T>& omega, const std::vector<Ring<T>>& cells,
                                              const std::vector<int>& labels, const ToleranceConfig& tol) {
  if (cells.size() != labels.size()) throw InvalidInput("one label per cell is required");
  PartitionSpec<T> spec;
  spec.omega = omega;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (labels[i] < 1 || labels[i] > 3) throw InvalidInput("cell labels must lie in 1..3");
    spec.regions[labels[i] - 1].push_back({cells[i], {}});
  }
  for (const auto& ov : kernels::cell_overlaps(cells, tol.eps_len)) {
    const int la = labels[ov.a], lb = labels[ov.b];
    if (la == lb) continue;
    const Vec2<T> n = -perp(unit(ov.q - ov.p));  // from cell a into cell b
    const auto [k, forward] = pair_index(la, lb);
    spec.interfaces.push_back({{ov.p, ov.q}, k, forward ? n : -n});
  }
  return spec;
}

template <class T>
PartitionSpec<T> partition_spec(const PartitionDomain<T>& domain, const FaceColoring& coloring,
                                const ToleranceConfig& tol) {
  std::vector<Ring<T>> cells;
  std::vector<int> labels;
  for (const auto& piece : domain.pieces) {
    cells.push_back(piece.ring);
    labels.push_back(coloring.color_of(piece.edge, piece.left));
  }
  return partition_from_labeled_cells(domain.omega, cells, labels, tol);
}

template <class T>
PartitionCalibrationReport<T> verify_paired_calibration(const PartitionSpec<T>& spec,
                                                        const FieldAssignment<T>& fields,
                                                        const ToleranceConfig& tol) {
  PartitionCalibrationReport<T> rep;
  const double eps = tol.eps_field;
  std::string worst_sum, worst_norm, worst_trace, worst_interface;

  for (std::size_t c = 0; c < fields.cells.size(); ++c) {
    const auto& cell = fields.cells[c];
    const Vec2<T> s = cell.psi[0] + cell.psi[1] + cell.psi[2];
    T r;
    if constexpr (is_exact_v<T>) {
      r = max_of(abs_of(s.x), abs_of(s.y));
    } else {
      r = norm(s);
    }
    if (rep.sum_residual < r) {
      rep.sum_residual = r;
      worst_sum = cell.zone;
    }
    for (int k = 0; k < 3; ++k) {
      T excess;
      if constexpr (is_exact_v<T>) {
        excess = dot(cell.psi[k], cell.psi[k]) - T(1);
      } else {
        excess = norm(cell.psi[k]) - 1.0;
      }
      if (rep.norm_excess < excess) {
        rep.norm_excess = excess;
        worst_norm = cell.zone + " Psi" + std::string(pair_label(k));
      }
    }
  }

  std::vector<Ring<T>> rings;
  for (const auto& cell : fields.cells) rings.push_back(cell.ring);
  for (const auto& ov : kernels::cell_overlaps(rings, tol.eps_len)) {
    const Vec2<T> n = -perp(unit(ov.q - ov.p));
    for (int k = 0; k < 3; ++k) {
      TraceCheck<T> t;
      t.cell_a = ov.a;
      t.cell_b = ov.b;
      t.zone_a = fields.cells[ov.a].zone;
      t.zone_b = fields.cells[ov.b].zone;
      t.pair = k;
      t.normal_a = n;
      t.trace_a = dot(fields.cells[ov.a].psi[k], n);
      t.trace_b = dot(fields.cells[ov.b].psi[k], -n);
      t.residual = abs_of(t.trace_a + t.trace_b);
      t.p = ov.p;
      t.q = ov.q;
      if (rep.trace_residual < t.residual) {
        rep.trace_residual = t.residual;
        worst_trace = t.zone_a + " | " + t.zone_b + " Psi" + std::string(pair_label(k));
      }
      rep.traces.push_back(std::move(t));
    }
  }

  struct Box {
    double x0, y0, x1, y1;
  };
  std::vector<Box> boxes;
  for (const auto& r : rings) {
    Box b{1e300, 1e300, -1e300, -1e300};
    for (const auto& p : r) {
      const Point2 q = to_double(p);
      b = {std::min(b.x0, q.x), std::min(b.y0, q.y), std::max(b.x1, q.x), std::max(b.y1, q.y)};
    }
    boxes.push_back(b);
  }
  const double pad = tol.eps_len;
  for (std::size_t i = 0; i < spec.interfaces.size(); ++i) {
    const auto& itf = spec.interfaces[i];
    const Point2 a = to_double(itf.seg.a), b = to_double(itf.seg.b);
    const double len = norm(b - a);
    double minus_side = 0, plus_side = 0;
    for (std::size_t c = 0; c < rings.size(); ++c) {
      const Box& bx = boxes[c];
      if (std::max(a.x, b.x) < bx.x0 - pad || std::min(a.x, b.x) > bx.x1 + pad || std::max(a.y, b.y) < bx.y0 - pad ||
          std::min(a.y, b.y) > bx.y1 + pad)
        continue;
      const auto& ring = rings[c];
      for (std::size_t k = 0; k < ring.size(); ++k) {
        const Segment<T> edge{ring[k], ring[(k + 1) % ring.size()]};
        const auto hit = segment_intersection(itf.seg, edge, tol.eps_len);
        if (hit.kind != IntersectionKind::overlap) continue;
        const double covered = norm(to_double(hit.q - hit.p));
        if (covered <= tol.eps_len) continue;
        const Vec2<T> outward = -perp(edge.direction());
        if (sign_of(dot(outward, itf.normal), 0.0) > 0) {
          minus_side += covered;
        } else {
          plus_side += covered;
        }
        const T r = abs_of(dot(fields.cells[c].psi[itf.pair], itf.normal) - T(1));
        if (rep.interface_residual < r) {
          rep.interface_residual = r;
          worst_interface = fields.cells[c].zone + " on interface " + std::string(pair_label(itf.pair));
        }
      }
    }
    if (minus_side < len - 10 * tol.eps_len || plus_side < len - 10 * tol.eps_len) {
      rep.failures.push_back("interface " + std::to_string(i) + " (" + std::string(pair_label(itf.pair)) +
                             ") is not bordered by field cells on both sides");
      if (rep.interface_residual < T(1)) rep.interface_residual = T(1);
    }
  }

  if (!within_tol(rep.trace_residual, eps))
    rep.failures.push_back("normal trace jump " + to_text(rep.trace_residual) + " at " + worst_trace);
  if (!within_tol(rep.norm_excess, eps))
    rep.failures.push_back("field norm exceeds 1 by " + to_text(rep.norm_excess) + " at " + worst_norm);
  if (!within_tol(rep.interface_residual, eps))
    rep.failures.push_back("interface condition off by " + to_text(rep.interface_residual) +
                           (worst_interface.empty() ? std::string() : " at " + worst_interface));
  if (!within_tol(rep.sum_residual, eps))
    rep.failures.push_back("field sum off by " + to_text(rep.sum_residual) + " at " + worst_sum);
  rep.verdict = rep.failures.empty();
  return rep;
}

template <class T>
T perimeter_energy(const PartitionSpec<T>& spec) {
  T total{};
  for (const auto& i : spec.interfaces) total += length(i.seg.direction());
  return total;
}

// ---------------------------------------------------------------------------

std::vector<Ring<double>> refine_by_lines(const std::vector<Ring<double>>& cells,
                                          const std::vector<std::pair<Point2, Vector2>>& lines, double eps) {
  std::vector<Ring<double>> current = cells;
  for (const auto& [origin, dir] : lines) {
    const Vector2 u = dir / norm(dir);
    std::vector<Ring<double>> next;
    for (auto& ring : current) {
      bool above = false, below = false;
      for (const auto& p : ring) {
        const double s = cross(u, p - origin);
        above = above || s > eps;
        below = below || s < -eps;
      }
      if (!(above && below)) {
        next.push_back(std::move(ring));
        continue;
      }
      for (auto& part : split_convex(ring, origin, u))
        if (!part.empty()) next.push_back(std::move(part));
    }
    current = std::move(next);
  }
  return current;
}

namespace {

// Face (edge, left side) of the competitor network containing p.
std::pair<std::size_t, bool> locate_face(const Network& h, const Point2& p) {
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    const Segment<double> s{h.vertices[h.edges[e].from].p, h.vertices[h.edges[e].to].p};
    const double d = point_segment_distance(p, s);
    if (d < best_d) {
      best_d = d;
      best = e;
    }
  }
  const auto& edge = h.edges[best];
  const Point2 a = h.vertices[edge.from].p, b = h.vertices[edge.to].p;
  const Vector2 ab = b - a;
  const double t = dot(p - a, ab) / dot(ab, ab);
  std::optional<std::size_t> corner;
  if (t <= 1e-12 && h.degree(edge.from) == 3) corner = edge.from;
  if (t >= 1 - 1e-12 && h.degree(edge.to) == 3) corner = edge.to;
  if (!corner) return {best, cross(ab, p - a) > 0};
  const auto arms = arms_at(h, *corner);
  const Vector2 v = p - h.vertices[*corner].p;
  const double ang = std::atan2(v.y, v.x);
  for (std::size_t k = 0; k < 3; ++k) {
    const Arm& x = arms[k];
    const Arm& y = arms[(k + 1) % 3];
    double span = y.angle - x.angle;
    double rel = ang - x.angle;
    if (span <= 0) span += 2 * M_PI;
    if (rel < 0) rel += 2 * M_PI;
    if (rel <= span) return {x.edge, x.outgoing_is_forward};
  }
  return {arms[0].edge, arms[0].outgoing_is_forward};
}

std::vector<std::pair<Point2, Vector2>> network_lines(const Network& h) {
  std::vector<std::pair<Point2, Vector2>> lines;
  for (const auto& e : h.edges) lines.push_back({h.vertices[e.from].p, h.vertices[e.to].p - h.vertices[e.from].p});
  return lines;
}

std::vector<Ring<double>> piece_rings(const PartitionDomain<double>& domain) {
  std::vector<Ring<double>> out;
  for (const auto& p : domain.pieces) out.push_back(p.ring);
  return out;
}

void require_same_graph(const Network& a, const Network& b) {
  if (a.edges.size() != b.edges.size() || a.vertices.size() != b.vertices.size())
    throw InvalidInput("competitor network must have the graph of the domain network");
  for (std::size_t e = 0; e < a.edges.size(); ++e)
    if (a.edges[e].from != b.edges[e].from || a.edges[e].to != b.edges[e].to)
      throw InvalidInput("competitor network must have the graph of the domain network");
}

}  // namespace

PartitionSpec<double> partition_from_network(const PartitionDomain<double>& domain, const FaceColoring& coloring,
                                             const Network& competitor, const ToleranceConfig& tol) {
  require_same_graph(domain.extended, competitor);
  const auto cells = refine_by_lines(piece_rings(domain), network_lines(competitor), tol.eps_len);
  std::vector<int> labels;
  for (const auto& c : cells) {
    const auto [e, left] = locate_face(competitor, centroid(c));
    labels.push_back(coloring.color_of(e, left));
  }
  return partition_from_labeled_cells(domain.omega, cells, labels, tol);
}

std::vector<TraceArc> boundary_trace(const PartitionSpec<double>& spec, const ToleranceConfig& tol) {
  std::vector<Segment<double>> boundary;
  auto add_ring = [&](const Ring<double>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) boundary.push_back({r[k], r[(k + 1) % r.size()]});
  };
  add_ring(spec.omega.outer);
  for (const auto& h : spec.omega.holes) add_ring(h);

  std::vector<TraceArc> arcs;
  for (int label = 1; label <= 3; ++label) {
    for (const auto& poly : spec.regions[label - 1]) {
      std::vector<const Ring<double>*> rings{&poly.outer};
      for (const auto& h : poly.holes) rings.push_back(&h);
      for (const auto* ring : rings) {
        for (std::size_t k = 0; k < ring->size(); ++k) {
          const Segment<double> edge{(*ring)[k], (*ring)[(k + 1) % ring->size()]};
          for (std::size_t b = 0; b < boundary.size(); ++b) {
            const auto& s = boundary[b];
            if (std::max(edge.a.x, edge.b.x) < std::min(s.a.x, s.b.x) - tol.eps_len ||
                std::min(edge.a.x, edge.b.x) > std::max(s.a.x, s.b.x) + tol.eps_len ||
                std::max(edge.a.y, edge.b.y) < std::min(s.a.y, s.b.y) - tol.eps_len ||
                std::min(edge.a.y, edge.b.y) > std::max(s.a.y, s.b.y) + tol.eps_len)
              continue;
            const auto hit = segment_intersection(s, edge, tol.eps_len);
            if (hit.kind != IntersectionKind::overlap) continue;
            const Vector2 d = s.direction();
            const double L2 = dot(d, d);
            double t0 = dot(hit.p - s.a, d) / L2, t1 = dot(hit.q - s.a, d) / L2;
            if (t0 > t1) std::swap(t0, t1);
            if ((t1 - t0) * std::sqrt(L2) <= tol.eps_len) continue;
            arcs.push_back({b, t0, t1, label});
          }
        }
      }
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const TraceArc& x, const TraceArc& y) {
    return std::tie(x.boundary_edge, x.t0, x.t1) < std::tie(y.boundary_edge, y.t0, y.t1);
  });
  std::vector<TraceArc> merged;
  for (const auto& a : arcs) {
    if (!merged.empty()) {
      auto& m = merged.back();
      const double L = norm(boundary[a.boundary_edge].direction());
      if (m.boundary_edge == a.boundary_edge && m.label == a.label && (a.t0 - m.t1) * L <= 10 * tol.eps_len) {
        m.t1 = std::max(m.t1, a.t1);
        continue;
      }
    }
    merged.push_back(a);
  }
  return merged;
}

namespace {

std::array<double, 3> fluxes(const PartitionSpec<double>& spec, const FieldAssignment<double>& fields,
                             const ToleranceConfig& tol) {
  // Phi_1 = 0, Phi_2 = -Psi12, Phi_3 = Psi31
  auto phi = [&](std::size_t cell, int label) -> Vector2 {
    const auto& psi = fields.cells[cell].psi;
    if (label == 1) return {0, 0};
    if (label == 2) return -psi[0];
    return psi[2];
  };
  double scale = 0;
  for (const auto& c : fields.cells)
    for (const auto& p : c.ring) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  const double eta = 1e-7 * std::max(scale, 1.0);

  std::array<double, 3> out{0, 0, 0};
  for (const auto& itf : spec.interfaces) {
    const Point2 a = itf.seg.a, b = itf.seg.b;
    const Vector2 d = b - a;
    const double len = norm(d);
    std::vector<double> ts{0.0, 1.0};
    for (const auto& cell : fields.cells) {
      const auto& r = cell.ring;
      for (std::size_t k = 0; k < r.size(); ++k) {
        const auto hit = segment_intersection(itf.seg, Segment<double>{r[k], r[(k + 1) % r.size()]}, tol.eps_len);
        if (hit.kind == IntersectionKind::empty) continue;
        ts.push_back(dot(hit.p - a, d) / (len * len));
        if (hit.kind == IntersectionKind::overlap) ts.push_back(dot(hit.q - a, d) / (len * len));
      }
    }
    std::sort(ts.begin(), ts.end());
    const int ci = itf.pair + 1, cj = itf.pair % 3 + 1;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double t0 = std::clamp(ts[k], 0.0, 1.0), t1 = std::clamp(ts[k + 1], 0.0, 1.0);
      const double piece = (t1 - t0) * len;
      if (piece <= 1e-14) continue;
      const Point2 m = a + d * ((t0 + t1) / 2);
      std::optional<std::size_t> owner;
      for (const Point2 probe : {m + itf.normal * eta, m - itf.normal * eta}) {
        for (std::size_t c = 0; c < fields.cells.size() && !owner; ++c)
          if (in_convex(fields.cells[c].ring, probe, 1e-12)) owner = c;
        if (owner) break;
      }
      if (!owner) throw InvalidInput("interface leaves the cells of the field assignment");
      // D chi of region i is -nu on this interface, of region j it is +nu
      out[ci - 1] -= dot(phi(*owner, ci), itf.normal) * piece;
      out[cj - 1] += dot(phi(*owner, cj), itf.normal) * piece;
    }
  }
  return out;
}

}  // namespace

double flux_check(const PartitionSpec<double>& spec_a, const PartitionSpec<double>& spec_b,
                  const FieldAssignment<double>& fields, const ToleranceConfig& tol) {
  const auto ta = boundary_trace(spec_a, tol);
  const auto tb = boundary_trace(spec_b, tol);
  const double tt = 1e-7;
  bool same = ta.size() == tb.size();
  for (std::size_t k = 0; same && k < ta.size(); ++k)
    same = ta[k].boundary_edge == tb[k].boundary_edge && ta[k].label == tb[k].label &&
           std::abs(ta[k].t0 - tb[k].t0) <= tt && std::abs(ta[k].t1 - tb[k].t1) <= tt;
  if (!same) throw InvalidComparison("the two partitions have different traces on the domain boundary");
  const auto fa = fluxes(spec_a, fields, tol);
  const auto fb = fluxes(spec_b, fields, tol);
  double worst = 0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(fa[i] - fb[i]));
  return worst;
}

FieldAssignment<double> to_double(const FieldAssignment<QSqrt3>& fields) {
  FieldAssignment<double> out;
  for (const auto& c : fields.cells) {
    FieldCell<double> d;
    for (const auto& p : c.ring) d.ring.push_back(to_double(p));
    d.zone = c.zone;
    d.label = c.label;
    for (int k = 0; k < 3; ++k) d.psi[k] = to_double(c.psi[k]);
    out.cells.push_back(std::move(d));
  }
  return out;
}

PartitionSpec<double> to_double(const PartitionSpec<QSqrt3>& spec) {
  auto ring = [](const Ring<QSqrt3>& r) {
    Ring<double> out;
    for (const auto& p : r) out.push_back(to_double(p));
    return out;
  };
  auto poly = [&](const Polygon<QSqrt3>& p) {
    Polygon<double> out{ring(p.outer), {}};
    for (const auto& h : p.holes) out.holes.push_back(ring(h));
    return out;
  };
  PartitionSpec<double> out;
  out.omega = poly(spec.omega);
  for (int i = 0; i < 3; ++i)
    for (const auto& p : spec.regions[i]) out.regions[i].push_back(poly(p));
  for (const auto& itf : spec.interfaces)
    out.interfaces.push_back({{to_double(itf.seg.a), to_double(itf.seg.b)}, itf.pair, to_double(itf.normal)});
  return out;
}

// ---------------------------------------------------------------------------

Network double_tripod(double d, double outer_len) {
  if (!(d > 0) || !(outer_len > 0)) throw InvalidInput("edge lengths must be positive");
  const QSqrt3 D = QSqrt3::from_double(d), L = QSqrt3::from_double(outer_len);
  const QSqrt3 h = QSqrt3::ratio(1, 2);
  const QSqrt3 s = QSqrt3::sqrt3() * h;
  auto vertex = [](std::string id, const ExactPoint& p, VertexKind kind) {
    return Vertex{std::move(id), to_double(p), p, kind};
  };
  Network net;
  net.vertices = {
      vertex("o1", {QSqrt3(0), QSqrt3(0)}, VertexKind::junction),
      vertex("o2", {D, QSqrt3(0)}, VertexKind::junction),
      vertex("p1", {-L * h, L * s}, VertexKind::endpoint),
      vertex("p2", {-L * h, -(L * s)}, VertexKind::endpoint),
      vertex("p3", {D + L * h, L * s}, VertexKind::endpoint),
      vertex("p4", {D + L * h, -(L * s)}, VertexKind::endpoint),
  };
  net.edges = {{0, 1, {}, {}}, {0, 2, {}, {}}, {0, 3, {}, {}}, {1, 4, {}, {}}, {1, 5, {}, {}}};
  return net;
}

PartitionSpec<double> channel_competitor(const PartitionDomain<double>& domain, const FaceColoring& coloring,
                                         double h, const ToleranceConfig& tol) {
  const Network& net = domain.extended;
  std::optional<std::size_t> middle;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (net.degree(net.edges[e].from) == 3 && net.degree(net.edges[e].to) == 3) {
      if (middle) throw InvalidInput("channel competitor needs exactly one edge between junctions");
      middle = e;
    }
  }
  if (!middle || net.edges.size() != 5) throw InvalidInput("channel competitor needs a double tripod");
  if (!(h > 0)) throw InvalidGeometry("channel offset must be positive");
  if (!(h < domain.delta)) throw InvalidGeometry("channel at offset " + std::to_string(h) +
                                                 " does not fit in a tube of width " + std::to_string(domain.delta));
  const double b = 2 * h / std::sqrt(3.0);
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    if (e != *middle && norm(net.vertices[net.edges[e].to].p - net.vertices[net.edges[e].from].p) <= b)
      throw InvalidGeometry("outer edge shorter than the channel cut 2h/sqrt3");

  const auto& m = net.edges[*middle];
  const Point2 o1 = net.vertices[m.from].p;
  const Vector2 u = (net.vertices[m.to].p - o1) / norm(net.vertices[m.to].p - o1);
  const Vector2 n = perp(u);
  const int top = coloring.color_of(*middle, true), bottom = coloring.color_of(*middle, false);
  const int side = 6 - top - bottom;

  auto lines = network_lines(net);
  lines.push_back({o1 + n * h, u});
  lines.push_back({o1 - n * h, u});
  const auto cells = refine_by_lines(piece_rings(domain), lines, tol.eps_len);
  std::vector<int> labels;
  for (const auto& c : cells) {
    const Point2 p = centroid(c);
    const auto [e, left] = locate_face(net, p);
    int label = coloring.color_of(e, left);
    const double t = dot(p - o1, n);
    if ((label == top && t < h) || (label == bottom && t > -h)) label = side;
    labels.push_back(label);
  }
  return partition_from_labeled_cells(domain.omega, cells, labels, tol);
}

CounterexampleResult counterexample(double d, double outer_len, double h, double delta, const ToleranceConfig& tol) {
  if (!(d > 0) || !(outer_len > d) || !(h > 0) || !(delta > 0))
    throw InvalidInput("counterexample needs d > 0, outer_len > d, h > 0, delta > 0");
  if (!(delta < std::sqrt(3.0) * d / 2))
    throw InvalidGeometry("tube width " + std::to_string(delta) + " swallows the central edge");
  if (!(h < delta)) throw InvalidGeometry("competitor at height h = " + std::to_string(h) + " leaves the tube");
  const Network net = double_tripod(d, outer_len);
  const auto domain = make_domain<double>(net, delta, 0.0, false, std::nullopt, tol);
  const auto coloring = three_color_faces(domain.extended);
  CounterexampleResult out;
  out.E = partition_from_network(domain, coloring, domain.extended, tol);
  out.F = channel_competitor(domain, coloring, h, tol);
  out.P_E = perimeter_energy(out.E);
  out.P_F = perimeter_energy(out.F);
  out.delta_P = out.P_E - out.P_F;
  out.improves = out.delta_P > tol.eps_len;
  return out;
}

#define CALNET_INSTANTIATE(T)                                                                             \
  template struct PartitionSpec<T>;                                                                       \
  template PartitionDomain<T> build_partition_domain(const Network&, const T&, const T&,                  \
                                                     const std::optional<Polygon<T>>&, const ToleranceConfig&); \
  template FieldAssignment<T> assign_fields(const PartitionDomain<T>&, const FaceColoring&,               \
                                            const ToleranceConfig&);                                      \
  template PartitionSpec<T> partition_from_labeled_cells(const Polygon<T>&, const std::vector<Ring<T>>&,  \
                                                         const std::vector<int>&, const ToleranceConfig&); \
  template PartitionSpec<T> partition_spec(const PartitionDomain<T>&, const FaceColoring&,                \
                                           const ToleranceConfig&);                                       \
  template PartitionCalibrationReport<T> verify_paired_calibration(                                       \
      const PartitionSpec<T>&, const FieldAssignment<T>&, const ToleranceConfig&);                        \
  template T perimeter_energy(const PartitionSpec<T>&);

CALNET_INSTANTIATE(double)
CALNET_INSTANTIATE(QSqrt3)

#undef CALNET_INSTANTIATE

}  // namespace calnet
