#include "calnet/io.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace calnet::io {

namespace {

struct Coordinate {
  double value;
  QSqrt3 exact;
};

Coordinate coordinate(const json& j, const std::string& where) {
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw InvalidInput(where + ": coordinate is not finite");
    return {v, QSqrt3::from_double(v)};
  }
  if (j.is_string()) {
    try {
      QSqrt3 q = QSqrt3::parse(j.get<std::string>());
      return {q.to_double(), q};
    } catch (const std::exception& e) {
      throw InvalidInput(where + ": " + e.what());
    }
  }
  throw InvalidInput(where + ": coordinate must be a number or a string");
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::pair<Point2, ExactPoint> point_pair(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw InvalidInput(where + ": a point is an array [x, y]");
  const auto x = coordinate(j[0], where + "[0]"), y = coordinate(j[1], where + "[1]");
  return {{x.value, y.value}, {x.exact, y.exact}};
}

json coordinate_json(double v, const std::optional<QSqrt3>& exact) {
  if (exact && !(exact->sqrt3_part() == 0 && *exact == QSqrt3::from_double(v))) return exact->str();
  return v;
}

template <class T>
Polygon<T> polygon_impl(const json& j) {
  auto ring = [](const json& r, const std::string& where) {
    if (!r.is_array()) throw InvalidInput(where + ": ring must be an array of points");
    Ring<T> out;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto [p, q] = point_pair(r[k], where + "[" + std::to_string(k) + "]");
      if constexpr (is_exact_v<T>) {
        out.push_back(q);
      } else {
        out.push_back(p);
      }
    }
    if (out.size() < 3) throw InvalidInput(where + ": ring needs at least three points");
    return out;
  };
  Polygon<T> poly;
  if (j.is_array()) {
    poly.outer = ring(j, "polygon");
    return poly;
  }
  poly.outer = ring(member(j, "outer", "polygon"), "polygon.outer");
  if (j.contains("holes"))
    for (std::size_t k = 0; k < j["holes"].size(); ++k)
      poly.holes.push_back(ring(j["holes"][k], "polygon.holes[" + std::to_string(k) + "]"));
  return poly;
}

}  // namespace

json scalar(double v) { return v; }
json scalar(const QSqrt3& v) { return v.str(); }

Network network_from_json(const json& j) {
  try {
    Network net;
    const json& vs = member(j, "vertices", "network");
    if (!vs.is_array()) throw InvalidInput("network.vertices must be an array");
    std::map<std::string, std::size_t> index;
    std::vector<std::optional<VertexKind>> kinds;
    for (std::size_t k = 0; k < vs.size(); ++k) {
      const std::string where = "network.vertices[" + std::to_string(k) + "]";
      const json& v = vs[k];
      Vertex vert;
      vert.id = member(v, "id", where).get<std::string>();
      const auto x = coordinate(member(v, "x", where), where + ".x");
      const auto y = coordinate(member(v, "y", where), where + ".y");
      vert.p = {x.value, y.value};
      vert.exact = ExactPoint{x.exact, y.exact};
      std::optional<VertexKind> kind;
      if (v.contains("kind")) {
        const std::string s = v["kind"].get<std::string>();
        if (s == "junction") {
          kind = VertexKind::junction;
        } else if (s == "endpoint") {
          kind = VertexKind::endpoint;
        } else {
          throw InvalidInput(where + ".kind must be \"junction\" or \"endpoint\"");
        }
      }
      if (!index.emplace(vert.id, net.vertices.size()).second) throw InvalidInput(where + ": repeated id '" + vert.id + "'");
      kinds.push_back(kind);
      net.vertices.push_back(std::move(vert));
    }
    const json& es = member(j, "edges", "network");
    if (!es.is_array()) throw InvalidInput("network.edges must be an array");
    for (std::size_t k = 0; k < es.size(); ++k) {
      const std::string where = "network.edges[" + std::to_string(k) + "]";
      const json& e = es[k];
      auto lookup = [&](const char* key) {
        const std::string id = member(e, key, where).get<std::string>();
        auto it = index.find(id);
        if (it == index.end()) throw InvalidInput(where + "." + key + ": unknown vertex '" + id + "'");
        return it->second;
      };
      Edge edge;
      edge.from = lookup("from");
      edge.to = lookup("to");
      if (e.contains("bends")) {
        for (std::size_t b = 0; b < e["bends"].size(); ++b) {
          const auto [p, q] = point_pair(e["bends"][b], where + ".bends[" + std::to_string(b) + "]");
          edge.bends.push_back(p);
          edge.exact_bends.push_back(q);
        }
      }
      net.edges.push_back(std::move(edge));
    }
    for (std::size_t v = 0; v < net.vertices.size(); ++v)
      net.vertices[v].kind = kinds[v] ? *kinds[v] : (net.degree(v) == 1 ? VertexKind::endpoint : VertexKind::junction);
    return net;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("network: ") + e.what());
  }
}

json to_json(const Network& net) {
  json vs = json::array();
  for (const auto& v : net.vertices) {
    vs.push_back({{"id", v.id},
                  {"x", coordinate_json(v.p.x, v.exact ? std::optional<QSqrt3>(v.exact->x) : std::nullopt)},
                  {"y", coordinate_json(v.p.y, v.exact ? std::optional<QSqrt3>(v.exact->y) : std::nullopt)},
                  {"kind", v.kind == VertexKind::endpoint ? "endpoint" : "junction"}});
  }
  json es = json::array();
  for (const auto& e : net.edges) {
    json edge = {{"from", net.vertices[e.from].id}, {"to", net.vertices[e.to].id}};
    if (!e.bends.empty()) {
      json bends = json::array();
      for (std::size_t b = 0; b < e.bends.size(); ++b) {
        const bool ex = b < e.exact_bends.size();
        bends.push_back({coordinate_json(e.bends[b].x, ex ? std::optional<QSqrt3>(e.exact_bends[b].x) : std::nullopt),
                         coordinate_json(e.bends[b].y, ex ? std::optional<QSqrt3>(e.exact_bends[b].y) : std::nullopt)});
      }
      edge["bends"] = bends;
    }
    es.push_back(edge);
  }
  return {{"vertices", vs}, {"edges", es}};
}

QuotientSpec quotient_from_json(const json& j) {
  try {
    QuotientSpec q;
    if (j.contains("collapse")) {
      for (const auto& c : j["collapse"]) {
        CollapsedSubgraph s;
        s.vertices = member(c, "vertices", "quotient.collapse").get<std::vector<std::string>>();
        if (c.contains("edges")) s.edges = c["edges"].get<std::vector<std::size_t>>();
        q.collapse.push_back(std::move(s));
      }
    }
    if (j.contains("endpoint_map")) q.endpoint_map = j["endpoint_map"].get<std::map<std::string, std::string>>();
    return q;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("quotient: ") + e.what());
  }
}

json to_json(const QuotientSpec& q) {
  json cs = json::array();
  for (const auto& c : q.collapse) {
    json o = {{"vertices", c.vertices}};
    if (c.edges) o["edges"] = *c.edges;
    cs.push_back(o);
  }
  return {{"collapse", cs}, {"endpoint_map", q.endpoint_map}};
}

Embedding embedding_from_json(const json& j) {
  try {
    Embedding e;
    e.vertex_map = member(j, "vertex_map", "embedding").get<std::map<std::string, std::string>>();
    for (const auto& [key, path] : member(j, "edge_paths", "embedding").items()) {
      std::vector<std::pair<std::size_t, bool>> steps;
      for (const auto& s : path) steps.push_back({s.at(0).get<std::size_t>(), s.at(1).get<bool>()});
      e.edge_paths[std::stoul(key)] = std::move(steps);
    }
    return e;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("embedding: ") + e.what());
  } catch (const std::logic_error& e) {
    throw InvalidInput(std::string("embedding: bad edge index: ") + e.what());
  }
}

json to_json(const Embedding& e) {
  json paths = json::object();
  for (const auto& [edge, steps] : e.edge_paths) {
    json s = json::array();
    for (const auto& [h, fwd] : steps) s.push_back({h, fwd});
    paths[std::to_string(edge)] = s;
  }
  return {{"vertex_map", e.vertex_map}, {"edge_paths", paths}};
}

Polygon<double> polygon_from_json(const json& j) { return polygon_impl<double>(j); }
Polygon<QSqrt3> exact_polygon_from_json(const json& j) { return polygon_impl<QSqrt3>(j); }

template <class T>
json to_json(const Vec2<T>& p) {
  return json::array({scalar(p.x), scalar(p.y)});
}

template <class T>
json to_json(const Polygon<T>& p) {
  auto ring = [](const Ring<T>& r) {
    json out = json::array();
    for (const auto& q : r) out.push_back(to_json(q));
    return out;
  };
  json holes = json::array();
  for (const auto& h : p.holes) holes.push_back(ring(h));
  return {{"outer", ring(p.outer)}, {"holes", holes}};
}

json to_json(const GroupElement& g) { return {{"n", g.n}, {"m", g.m}, {"label", to_string(g)}}; }

template <class T>
json to_json(const LatticeCurrent<T>& c) {
  json out = json::array();
  for (const auto& piece : c.pieces)
    out.push_back({{"a", to_json(piece.seg.a)}, {"b", to_json(piece.seg.b)}, {"multiplicity", to_json(piece.mult)}});
  return out;
}

template <class T>
json to_json(const BoundaryMeasure<T>& b) {
  json out = json::array();
  for (const auto& atom : b.atoms) out.push_back({{"point", to_json(atom.p)}, {"coefficient", to_json(atom.coefficient)}});
  return out;
}

template <class T>
json to_json(const CalibrationReport<T>& r) {
  return {{"closedness_residual", scalar(r.closedness_residual)},
          {"comass_max", r.comass_max},
          {"comass_at_hexagon_directions", r.comass_at_hexagon_directions},
          {"comass_samples", r.comass_samples},
          {"equality_residual", scalar(r.equality_residual)},
          {"worst_piece", r.worst_piece},
          {"passed", r.passed},
          {"failures", r.failures}};
}

template <class T>
json to_json(const ComparisonCertificate<T>& c) {
  json out = {{"reference_length", scalar(c.reference_length)},
              {"competitor_length", scalar(c.competitor_length)},
              {"competitor_mass", scalar(c.competitor_mass)},
              {"boundary_match", c.boundary_match},
              {"verdict", c.verdict},
              {"construction_log", c.construction_log}};
  if (c.embedded_length) out["embedded_length"] = scalar(*c.embedded_length);
  return out;
}

template <class T>
json to_json(const PartitionSpec<T>& s) {
  json regions = json::array();
  for (const auto& region : s.regions) {
    json polys = json::array();
    for (const auto& p : region) polys.push_back(to_json(p));
    regions.push_back(polys);
  }
  json itf = json::array();
  for (const auto& i : s.interfaces)
    itf.push_back({{"a", to_json(i.seg.a)}, {"b", to_json(i.seg.b)}, {"label", pair_label(i.pair)}, {"normal", to_json(i.normal)}});
  return {{"omega", to_json(s.omega)}, {"regions", regions}, {"interfaces", itf}};
}

template <class T>
json to_json(const FieldAssignment<T>& f) {
  json cells = json::array();
  for (const auto& c : f.cells) {
    json ring = json::array();
    for (const auto& p : c.ring) ring.push_back(to_json(p));
    cells.push_back({{"ring", ring},
                     {"zone", c.zone},
                     {"label", c.label},
                     {"psi12", to_json(c.psi[0])},
                     {"psi23", to_json(c.psi[1])},
                     {"psi31", to_json(c.psi[2])}});
  }
  return {{"cells", cells}};
}

template <class T>
json to_json(const PartitionCalibrationReport<T>& r, bool with_traces) {
  json out = {{"trace_residual", scalar(r.trace_residual)},
              {"norm_excess", scalar(r.norm_excess)},
              {"interface_residual", scalar(r.interface_residual)},
              {"sum_residual", scalar(r.sum_residual)},
              {"verdict", r.verdict},
              {"trace_checks", r.traces.size()},
              {"failures", r.failures}};
  if (with_traces) {
    json traces = json::array();
    for (const auto& t : r.traces)
      traces.push_back({{"cells", {t.zone_a, t.zone_b}},
                        {"field", "Psi" + std::string(pair_label(t.pair))},
                        {"normal", to_json(t.normal_a)},
                        {"trace_a", scalar(t.trace_a)},
                        {"trace_b", scalar(t.trace_b)},
                        {"residual", scalar(t.residual)},
                        {"from", to_json(t.p)},
                        {"to", to_json(t.q)}});
    out["traces"] = traces;
  }
  return out;
}

json to_json(const MinimalityCertificate& c) {
  json vs = json::array();
  for (const auto& v : c.violations)
    vs.push_back({{"location", v.location}, {"kind", std::string(to_string(v.kind))}, {"magnitude", v.magnitude}});
  return {{"is_minimal", c.is_minimal}, {"violations", vs}};
}

json to_json(const SteinerSolution& s) {
  return {{"length", s.length}, {"degenerate", s.degenerate}, {"topology", s.topology}, {"network", to_json(s.network)}};
}

json to_json(const CounterexampleResult& r) {
  return {{"P_E", r.P_E}, {"P_F", r.P_F}, {"delta_P", r.delta_P}, {"improves", r.improves}};
}

std::string read_text(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  buf << in.rdbuf();
  return buf.str();
}

json parse(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(origin + ": " + e.what());
  }
}

#define CALNET_INSTANTIATE(T)                                                      \
  template json to_json(const Vec2<T>&);                                           \
  template json to_json(const Polygon<T>&);                                        \
  template json to_json(const LatticeCurrent<T>&);                                 \
  template json to_json(const BoundaryMeasure<T>&);                                \
  template json to_json(const CalibrationReport<T>&);                              \
  template json to_json(const ComparisonCertificate<T>&);                          \
  template json to_json(const PartitionSpec<T>&);                                  \
  template json to_json(const FieldAssignment<T>&);                                \
  template json to_json(const PartitionCalibrationReport<T>&, bool);

CALNET_INSTANTIATE(double)
CALNET_INSTANTIATE(QSqrt3)

#undef CALNET_INSTANTIATE

}  // namespace calnet::io
