#include "calnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <unordered_map>

#include "calnet/kernels.hpp"

namespace calnet {

std::size_t Network::vertex_index(const std::string& id) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) return i;
  throw InvalidInput("unknown vertex id '" + id + "'");
}

std::size_t Network::degree(std::size_t v) const {
  std::size_t d = 0;
  for (const auto& e : edges) d += (e.from == v) + (e.to == v);
  return d;
}

std::vector<std::size_t> Network::endpoints() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].kind == VertexKind::endpoint) out.push_back(v);
  return out;
}

bool Network::has_exact() const {
  for (const auto& v : vertices)
    if (!v.exact) return false;
  for (const auto& e : edges)
    if (e.exact_bends.size() != e.bends.size()) return false;
  return true;
}

std::vector<Point2> Network::polyline(std::size_t e) const {
  const Edge& edge = edges.at(e);
  std::vector<Point2> pts{vertices[edge.from].p};
  pts.insert(pts.end(), edge.bends.begin(), edge.bends.end());
  pts.push_back(vertices[edge.to].p);
  return pts;
}

std::vector<ExactPoint> Network::exact_polyline(std::size_t e) const {
  const Edge& edge = edges.at(e);
  if (!vertices[edge.from].exact || !vertices[edge.to].exact || edge.exact_bends.size() != edge.bends.size())
    throw InvalidInput("network has no exact coordinates");
  std::vector<ExactPoint> pts{*vertices[edge.from].exact};
  pts.insert(pts.end(), edge.exact_bends.begin(), edge.exact_bends.end());
  pts.push_back(*vertices[edge.to].exact);
  return pts;
}

template <class T>
std::vector<Segment<T>> Network::segments() const {
  std::vector<Segment<T>> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::vector<Vec2<T>> pts;
    if constexpr (is_exact_v<T>) {
      pts = exact_polyline(e);
    } else {
      pts = polyline(e);
    }
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) out.push_back({pts[k], pts[k + 1]});
  }
  return out;
}

template std::vector<Segment<double>> Network::segments<double>() const;
template std::vector<Segment<QSqrt3>> Network::segments<QSqrt3>() const;

void validate(const Network& net, const ToleranceConfig& tol) {
  if (net.vertices.empty()) throw InvalidInput("network has no vertices");
  if (net.edges.empty()) throw InvalidInput("network has no edges");
  std::set<std::string> ids;
  for (const auto& v : net.vertices) {
    if (!ids.insert(v.id).second) throw InvalidInput("duplicate vertex id '" + v.id + "'");
    if (!is_finite(v.p)) throw InvalidInput("non-finite coordinate at vertex '" + v.id + "'");
  }
  const std::size_t nv = net.vertices.size();
  std::vector<std::size_t> parent(nv);
  for (std::size_t i = 0; i < nv; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const Edge& edge = net.edges[e];
    if (edge.from >= nv || edge.to >= nv) throw InvalidInput("edge " + std::to_string(e) + " references a missing vertex");
    if (!edge.exact_bends.empty() && edge.exact_bends.size() != edge.bends.size())
      throw InvalidInput("edge " + std::to_string(e) + " has inconsistent exact bends");
    const auto pts = net.polyline(e);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      if (!is_finite(pts[k + 1])) throw InvalidInput("non-finite polyline point on edge " + std::to_string(e));
      if (norm(pts[k + 1] - pts[k]) <= tol.eps_len)
        throw InvalidInput("edge " + std::to_string(e) + " has a zero-length piece");
    }
    parent[find(edge.from)] = find(edge.to);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (find(v) != find(0)) throw InvalidInput("network is not connected");
    const std::size_t d = net.degree(v);
    const bool endpoint = net.vertices[v].kind == VertexKind::endpoint;
    if (endpoint != (d == 1))
      throw InvalidInput("vertex '" + net.vertices[v].id + "' is marked " + (endpoint ? "endpoint" : "junction") +
                         " but has degree " + std::to_string(d));
  }
}

double length(const Network& net) {
  double total = 0;
  for (const auto& s : net.segments<double>()) total += norm(s.direction());
  return total;
}

QSqrt3 exact_length(const Network& net) {
  QSqrt3 total;
  for (const auto& s : net.segments<QSqrt3>()) total += length(s.direction());
  return total;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::angle: return "angle";
    case ViolationKind::straightness: return "straightness";
    case ViolationKind::embedding: return "embedding";
    case ViolationKind::junction_order: return "junction-order";
    case ViolationKind::self_loop: return "self-loop";
  }
  return "unknown";
}

void MinimalityCertificate::throw_if_failed() const {
  if (is_minimal) return;
  const Violation& v = violations.front();
  throw NotMinimal(std::string(to_string(v.kind)) + " violation at " + v.location);
}

namespace {

std::string edge_name(const Network& net, std::size_t e) {
  return net.vertices[net.edges[e].from].id + "-" + net.vertices[net.edges[e].to].id;
}

Vector2 inner_tangent(const Network& net, std::size_t e, std::size_t v) {
  const auto pts = net.polyline(e);
  Vector2 d = net.edges[e].from == v ? pts[1] - pts[0] : pts[pts.size() - 2] - pts.back();
  return d / norm(d);
}

}  // namespace

MinimalityCertificate check_minimal(const Network& net, const ToleranceConfig& tol) {
  tol.validate();
  validate(net, tol);
  MinimalityCertificate cert;
  auto add = [&](std::string where, ViolationKind kind, double magnitude) {
    cert.violations.push_back({std::move(where), kind, magnitude});
  };

  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const Edge& edge = net.edges[e];
    if (edge.from == edge.to) add("edge " + edge_name(net, e), ViolationKind::self_loop, 0);
    const auto pts = net.polyline(e);
    double worst = 0;
    for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
      const Vector2 u = pts[k] - pts[k - 1];
      const Vector2 w = pts[k + 1] - pts[k];
      worst = std::max(worst, std::abs(std::atan2(cross(u, w), dot(u, w))));
    }
    if (worst > tol.eps_angle) add("edge " + edge_name(net, e), ViolationKind::straightness, worst);
  }

  for (std::size_t v = 0; v < net.vertices.size(); ++v) {
    const std::size_t d = net.degree(v);
    if (d == 1) continue;
    if (d != 3) {
      add("vertex " + net.vertices[v].id, ViolationKind::junction_order, static_cast<double>(d));
      continue;
    }
    Vector2 sum;
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
      const Edge& edge = net.edges[e];
      if (edge.from == edge.to) continue;
      if (edge.from == v || edge.to == v) sum += inner_tangent(net, e, v);
    }
    const double mag = norm(sum);
    if (mag > tol.eps_angle) add("vertex " + net.vertices[v].id, ViolationKind::angle, mag);
  }

  // Node ids: vertices keep their index, bends get fresh ids so consecutive
  // pieces of one edge may touch at their common bend.
  std::vector<kernels::TaggedSegment> tagged;
  std::vector<std::size_t> owner;
  std::size_t next_id = net.vertices.size();
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto pts = net.polyline(e);
    std::size_t tail = net.edges[e].from;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const std::size_t head = (k + 2 == pts.size()) ? net.edges[e].to : next_id++;
      tagged.push_back({{pts[k], pts[k + 1]}, tail, head});
      owner.push_back(e);
      tail = head;
    }
  }
  for (const auto& c : kernels::segment_conflicts(tagged, tol.eps_len)) {
    const double mag = c.hit.kind == IntersectionKind::overlap ? norm(c.hit.q - c.hit.p) : 0.0;
    const std::string where = owner[c.i] == owner[c.j] ? "edge " + edge_name(net, owner[c.i])
                                                       : "edges " + edge_name(net, owner[c.i]) + " and " +
                                                             edge_name(net, owner[c.j]);
    add(where + " near (" + std::to_string(c.hit.p.x) + ", " + std::to_string(c.hit.p.y) + ")",
        ViolationKind::embedding, mag);
  }

  cert.is_minimal = cert.violations.empty();
  return cert;
}

double canonical_rotation(const Network& net, const ToleranceConfig& tol) {
  const auto segs = net.segments<double>();
  if (segs.empty()) throw InvalidInput("network has no edges");
  constexpr double kSector = std::numbers::pi / 3;
  auto reduce = [&](double a) {
    double r = std::remainder(a, kSector);  // in [-pi/6, pi/6]
    if (r <= -kSector / 2) r += kSector;
    return r;
  };
  const Vector2 d0 = segs.front().direction();
  const double theta = reduce(-std::atan2(d0.y, d0.x));
  for (const auto& s : segs) {
    const Vector2 d = s.direction();
    const double off = std::abs(std::remainder(std::atan2(d.y, d.x) + theta, kSector));
    if (off > tol.eps_angle)
      throw NotAlignable("edge direction is " + std::to_string(off) + " rad away from the g1, g2, g3 axes");
  }
  return theta;
}

Network rotated(const Network& net, double theta) {
  Network out = net;
  for (auto& v : out.vertices) {
    v.p = rotate(v.p, theta);
    v.exact.reset();
  }
  for (auto& e : out.edges) {
    for (auto& b : e.bends) b = rotate(b, theta);
    e.exact_bends.clear();
  }
  return out;
}

Network rotated_30(const Network& net, int k30) {
  Network out = net;
  for (auto& v : out.vertices) {
    v.p = rotate_30(v.p, k30);
    if (v.exact) v.exact = rotate_30(*v.exact, k30);
  }
  for (auto& e : out.edges) {
    for (auto& b : e.bends) b = rotate_30(b, k30);
    for (auto& b : e.exact_bends) b = rotate_30(b, k30);
  }
  return out;
}

Network translated(const Network& net, const Vector2& shift) {
  Network out = net;
  for (auto& v : out.vertices) {
    v.p += shift;
    v.exact.reset();
  }
  for (auto& e : out.edges) {
    for (auto& b : e.bends) b += shift;
    e.exact_bends.clear();
  }
  return out;
}

bool is_tree(const Network& net) { return net.edges.size() + 1 == net.vertices.size(); }

// ---------------------------------------------------------------------------
// Honeycomb generator
// ---------------------------------------------------------------------------

namespace {

// Lattice point (n, m) is n*g1 + m*g2. Points with n+m = 0 mod 3 are A-type
// honeycomb vertices (neighbours p + g_i), n+m = 1 mod 3 are B-type
// (neighbours p - g_i), n+m = 2 mod 3 are hexagon centres.
using Lattice = std::pair<long, long>;

int lattice_class(const Lattice& p) { return static_cast<int>(((p.first + p.second) % 3 + 3) % 3); }

std::array<Lattice, 3> honeycomb_neighbours(const Lattice& p) {
  const long s = lattice_class(p) == 0 ? 1 : -1;
  return {Lattice{p.first + s, p.second}, Lattice{p.first, p.second + s}, Lattice{p.first - s, p.second - s}};
}

void close_junctions(std::set<Lattice>& junctions) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<Lattice, int> hits;
    for (const auto& j : junctions)
      for (const auto& q : honeycomb_neighbours(j))
        if (!junctions.count(q)) ++hits[q];
    for (const auto& [q, count] : hits) {
      if (count >= 2) {
        junctions.insert(q);
        changed = true;
      }
    }
  }
}

// Hexagon cells reachable from outside the bounding box without crossing a
// network edge; an endpoint whose cells are unreachable sits inside a cycle.
bool encloses_endpoint(const std::set<Lattice>& junctions) {
  std::set<std::pair<Lattice, Lattice>> edges;
  std::set<Lattice> ends;
  long lo_n = 0, hi_n = 0, lo_m = 0, hi_m = 0;
  bool first = true;
  for (const auto& j : junctions) {
    for (const auto& q : honeycomb_neighbours(j)) {
      edges.insert(std::minmax(j, q));
      if (!junctions.count(q)) ends.insert(q);
      for (const auto& p : {j, q}) {
        if (first) {
          lo_n = hi_n = p.first;
          lo_m = hi_m = p.second;
          first = false;
        }
        lo_n = std::min(lo_n, p.first);
        hi_n = std::max(hi_n, p.first);
        lo_m = std::min(lo_m, p.second);
        hi_m = std::max(hi_m, p.second);
      }
    }
  }
  if (ends.empty()) return false;
  lo_n -= 3;
  hi_n += 3;
  lo_m -= 3;
  hi_m += 3;
  auto inside_box = [&](const Lattice& c) {
    return c.first >= lo_n && c.first <= hi_n && c.second >= lo_m && c.second <= hi_m;
  };
  // Crossing from centre c to c + g_i - g_j passes the edge (c + g_i, c - g_j).
  static const std::array<std::pair<Lattice, Lattice>, 6> kSteps = {{
      {{1, 0}, {0, 1}}, {{0, 1}, {1, 0}}, {{1, 0}, {-1, -1}},
      {{-1, -1}, {1, 0}}, {{0, 1}, {-1, -1}}, {{-1, -1}, {0, 1}},
  }};
  std::set<Lattice> seen;
  std::vector<Lattice> stack;
  for (long n = lo_n; n <= hi_n; ++n) {
    for (long m = lo_m; m <= hi_m; ++m) {
      const Lattice c{n, m};
      if (lattice_class(c) != 2) continue;
      if (n <= lo_n + 2 || n >= hi_n - 2 || m <= lo_m + 2 || m >= hi_m - 2) {
        if (seen.insert(c).second) stack.push_back(c);
      }
    }
  }
  while (!stack.empty()) {
    const Lattice c = stack.back();
    stack.pop_back();
    for (const auto& [gi, gj] : kSteps) {
      const Lattice a{c.first + gi.first, c.second + gi.second};
      const Lattice b{c.first - gj.first, c.second - gj.second};
      if (edges.count(std::minmax(a, b))) continue;
      const Lattice next{c.first + gi.first - gj.first, c.second + gi.second - gj.second};
      if (!inside_box(next) || !seen.insert(next).second) continue;
      stack.push_back(next);
    }
  }
  for (const auto& e : ends) {
    // One of the three cells around the endpoint: e - g1 for A-type, e + g1 for B-type.
    const long s = lattice_class(e) == 0 ? -1 : 1;
    const Lattice cell{e.first + s, e.second};
    if (!seen.count(cell)) return true;
  }
  return false;
}

ExactPoint lattice_exact(const Lattice& p) {
  return {QSqrt3(mpq_class(2 * p.first - p.second, 2), mpq_class(0)),
          QSqrt3(mpq_class(0), mpq_class(-p.second, 2))};
}

std::string lattice_id(const Lattice& p) { return "v" + std::to_string(p.first) + "_" + std::to_string(p.second); }

Network assemble(const std::set<Lattice>& junctions, const std::set<std::pair<Lattice, Lattice>>& edges) {
  std::set<Lattice> points;
  for (const auto& [a, b] : edges) {
    points.insert(a);
    points.insert(b);
  }
  Network net;
  std::map<Lattice, std::size_t> index;
  for (const auto& p : points) {
    index[p] = net.vertices.size();
    const ExactPoint x = lattice_exact(p);
    net.vertices.push_back({lattice_id(p), to_double(x), x,
                            junctions.count(p) ? VertexKind::junction : VertexKind::endpoint});
  }
  for (const auto& [a, b] : edges) {
    // orient A -> B
    const bool a_first = lattice_class(a) == 0;
    net.edges.push_back({index[a_first ? a : b], index[a_first ? b : a], {}, {}});
  }
  return net;
}

}  // namespace

Network generate_honeycomb_network(std::uint64_t seed, int junction_budget) {
  if (junction_budget < 0) throw InvalidInput("junction budget must be non-negative");
  if (junction_budget == 0) return assemble({}, {{Lattice{0, 0}, Lattice{1, 0}}});

  std::mt19937_64 rng(seed);
  std::set<Lattice> junctions{{0, 0}};
  const auto budget = static_cast<std::size_t>(junction_budget);
  while (junctions.size() < budget) {
    std::set<Lattice> frontier;
    for (const auto& j : junctions)
      for (const auto& q : honeycomb_neighbours(j))
        if (!junctions.count(q)) frontier.insert(q);
    std::vector<Lattice> candidates(frontier.begin(), frontier.end());
    std::shuffle(candidates.begin(), candidates.end(), rng);
    bool grown = false;
    for (const auto& c : candidates) {
      std::set<Lattice> trial = junctions;
      trial.insert(c);
      close_junctions(trial);
      if (trial.size() > budget || encloses_endpoint(trial)) continue;
      junctions = std::move(trial);
      grown = true;
      break;
    }
    if (!grown) break;
  }

  std::set<std::pair<Lattice, Lattice>> edges;
  for (const auto& j : junctions)
    for (const auto& q : honeycomb_neighbours(j)) edges.insert(std::minmax(j, q));
  return assemble(junctions, edges);
}

}  // namespace calnet
