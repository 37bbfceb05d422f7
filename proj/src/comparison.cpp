#include "calnet/comparison.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "calnet/kernels.hpp"

namespace calnet {

namespace {

template <class T>
bool within(const T& lhs, const T& rhs, double eps) {
  // lhs <= rhs up to eps (exact scalars compare exactly)
  return sign_of(rhs - lhs, eps) >= 0;
}

template <class T>
void finish_verdict(ComparisonCertificate<T>& cert, double eps) {
  cert.verdict = cert.boundary_match && within(cert.competitor_mass, cert.competitor_length, eps) &&
                 within(cert.reference_length, cert.competitor_mass, eps);
}

template <class T>
std::vector<Vec2<T>> edge_points(const Network& net, std::size_t e) {
  if constexpr (is_exact_v<T>) {
    return net.exact_polyline(e);
  } else {
    return net.polyline(e);
  }
}

template <class T>
void deposit_polyline(LatticeCurrent<T>& current, std::vector<Vec2<T>> pts, bool forward, const GroupElement& g) {
  if (!forward) std::reverse(pts.begin(), pts.end());
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) current.add(pts[k], pts[k + 1], g);
}

std::string describe(const Network& net, std::size_t e) {
  return net.vertices[net.edges[e].from].id + "->" + net.vertices[net.edges[e].to].id;
}

std::size_t find_vertex(const Network& net, const std::string& id, const char* role) {
  for (std::size_t i = 0; i < net.vertices.size(); ++i)
    if (net.vertices[i].id == id) return i;
  throw InvalidComparison(std::string(role) + " has no vertex '" + id + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Same topology
// ---------------------------------------------------------------------------

template <class T>
ComparisonCertificate<T> compare_same_topology(const Network& ref, const Network& comp, const ToleranceConfig& tol) {
  validate(ref, tol);
  validate(comp, tol);
  if (ref.vertices.size() != comp.vertices.size() || ref.edges.size() != comp.edges.size())
    throw InvalidComparison("competitor graph differs from the reference graph");
  std::vector<std::size_t> vmap(ref.vertices.size());
  for (std::size_t v = 0; v < ref.vertices.size(); ++v) vmap[v] = find_vertex(comp, ref.vertices[v].id, "competitor");
  std::vector<bool> same_direction(ref.edges.size());
  for (std::size_t e = 0; e < ref.edges.size(); ++e) {
    const auto& r = ref.edges[e];
    const auto& c = comp.edges[e];
    if (c.from == vmap[r.from] && c.to == vmap[r.to]) {
      same_direction[e] = true;
    } else if (c.from == vmap[r.to] && c.to == vmap[r.from]) {
      same_direction[e] = false;
    } else {
      throw InvalidComparison("competitor edge " + std::to_string(e) + " does not join the vertices of " +
                              describe(ref, e));
    }
  }
  for (std::size_t v : ref.endpoints()) {
    const auto& cv = comp.vertices[vmap[v]];
    if (cv.kind != VertexKind::endpoint || norm(cv.p - ref.vertices[v].p) > tol.eps_len)
      throw InvalidComparison("endpoint '" + ref.vertices[v].id + "' differs between reference and competitor");
  }

  const InducedCurrent<T> induced = induce_current<T>(ref, tol);
  ComparisonCertificate<T> cert;
  const Network comp_frame = (!is_exact_v<T> && induced.rotation != 0) ? rotated(comp, induced.rotation) : comp;
  if constexpr (is_exact_v<T>) {
    if (!comp.has_exact()) throw InvalidInput("exact comparison needs exact competitor coordinates");
    cert.reference_length = exact_length(ref);
    cert.competitor_length = exact_length(comp);
  } else {
    cert.reference_length = length(ref);
    cert.competitor_length = length(comp);
    if (induced.rotation != 0)
      cert.construction_log.push_back("rotated both networks by " + std::to_string(induced.rotation) + " rad");
  }

  LatticeCurrent<T> current;
  for (std::size_t e = 0; e < ref.edges.size(); ++e) {
    const GroupElement g = induced.current.pieces[e].mult;
    const bool along = induced.forward[e] == same_direction[e];
    deposit_polyline(current, edge_points<T>(comp_frame, e), along, g);
    cert.construction_log.push_back("edge " + describe(ref, e) + ": multiplicity " + to_string(g) +
                                    (induced.forward[e] ? " forward" : " reversed"));
  }
  const double eps = tol.eps_len;
  cert.boundary_match = same_boundary(boundary(current, eps), boundary(induced.current, eps), eps);
  if constexpr (is_exact_v<T>) {
    cert.competitor_mass = mass(current);
  } else {
    cert.competitor_mass = mass(canonicalize(current, eps));
  }
  finish_verdict(cert, eps);
  return cert;
}

template ComparisonCertificate<double> compare_same_topology<double>(const Network&, const Network&,
                                                                     const ToleranceConfig&);
template ComparisonCertificate<QSqrt3> compare_same_topology<QSqrt3>(const Network&, const Network&,
                                                                     const ToleranceConfig&);

// ---------------------------------------------------------------------------
// Embedded copies
// ---------------------------------------------------------------------------

ComparisonCertificate<double> compare_embedded_copy(const Network& ref, const Network& comp,
                                                    const Embedding& embedding, const ToleranceConfig& tol) {
  validate(ref, tol);
  validate(comp, tol);
  std::vector<std::size_t> image(ref.vertices.size());
  std::set<std::size_t> used_vertices;
  for (std::size_t v = 0; v < ref.vertices.size(); ++v) {
    auto it = embedding.vertex_map.find(ref.vertices[v].id);
    if (it == embedding.vertex_map.end())
      throw InvalidComparison("embedding does not map vertex '" + ref.vertices[v].id + "'");
    image[v] = find_vertex(comp, it->second, "competitor");
    if (!used_vertices.insert(image[v]).second)
      throw InvalidComparison("embedding maps two vertices to '" + it->second + "'");
  }
  for (std::size_t v : ref.endpoints())
    if (norm(comp.vertices[image[v]].p - ref.vertices[v].p) > tol.eps_len)
      throw InvalidComparison("endpoint '" + ref.vertices[v].id + "' is not mapped onto the same point");

  Network copy;
  copy.vertices = ref.vertices;
  for (std::size_t v = 0; v < ref.vertices.size(); ++v) {
    copy.vertices[v].p = comp.vertices[image[v]].p;
    copy.vertices[v].exact.reset();
  }
  std::set<std::size_t> used_edges;
  for (std::size_t e = 0; e < ref.edges.size(); ++e) {
    auto it = embedding.edge_paths.find(e);
    if (it == embedding.edge_paths.end() || it->second.empty())
      throw InvalidComparison("embedding has no path for edge " + describe(ref, e));
    std::size_t at = image[ref.edges[e].from];
    Edge edge{ref.edges[e].from, ref.edges[e].to, {}, {}};
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      const auto [h, fwd] = it->second[k];
      if (h >= comp.edges.size()) throw InvalidComparison("embedding uses a missing competitor edge");
      if (!used_edges.insert(h).second) throw InvalidComparison("competitor edge " + std::to_string(h) + " used twice");
      const auto& he = comp.edges[h];
      const std::size_t tail = fwd ? he.from : he.to;
      const std::size_t head = fwd ? he.to : he.from;
      if (tail != at) throw InvalidComparison("path of edge " + describe(ref, e) + " is not contiguous");
      auto pts = comp.polyline(h);
      if (!fwd) std::reverse(pts.begin(), pts.end());
      edge.bends.insert(edge.bends.end(), pts.begin() + 1, pts.end() - 1);
      if (k + 1 < it->second.size()) {
        if (!used_vertices.insert(head).second)
          throw InvalidComparison("path of edge " + describe(ref, e) + " revisits competitor vertex '" +
                                  comp.vertices[head].id + "'");
        edge.bends.push_back(pts.back());
      }
      at = head;
    }
    if (at != image[ref.edges[e].to])
      throw InvalidComparison("path of edge " + describe(ref, e) + " does not end at the image of its head");
    copy.edges.push_back(std::move(edge));
  }

  auto cert = compare_same_topology<double>(ref, copy, tol);
  cert.embedded_length = cert.competitor_length;
  cert.competitor_length = length(comp);
  cert.construction_log.push_back("embedded copy uses " + std::to_string(used_edges.size()) + " of " +
                                  std::to_string(comp.edges.size()) + " competitor edges, length " +
                                  std::to_string(*cert.embedded_length) + " <= " +
                                  std::to_string(cert.competitor_length));
  finish_verdict(cert, tol.eps_len);
  return cert;
}

namespace {

// Multigraph on clusters: each collapsed subgraph is one node, every other
// vertex its own node. Chains are maximal walks through degree-2 nodes.
struct Chain {
  std::size_t a = 0, b = 0;                          // cluster nodes at the two ends
  std::vector<std::pair<std::size_t, bool>> steps;   // original edge, traversed from -> to
};

struct ChainGraph {
  std::vector<std::size_t> cluster_of;  // original vertex -> cluster
  std::size_t clusters = 0;
  std::vector<std::size_t> degree;      // per cluster
  std::vector<bool> is_node;            // degree != 2 (or anchored)
  std::vector<Chain> chains;
  std::vector<std::size_t> kept_edges;  // original edges outside the collapsed sets
};

struct Collapse {
  std::vector<std::vector<std::size_t>> vertex_sets;
  std::vector<std::vector<std::size_t>> edge_sets;
};

Collapse resolve(const Network& net, const QuotientSpec& q, const char* role) {
  Collapse c;
  std::vector<int> owner(net.vertices.size(), -1);
  for (std::size_t i = 0; i < q.collapse.size(); ++i) {
    std::vector<std::size_t> vs;
    for (const auto& id : q.collapse[i].vertices) {
      std::size_t v = 0;
      try {
        v = net.vertex_index(id);
      } catch (const InvalidInput&) {
        throw InvalidInput(std::string(role) + " has no vertex '" + id + "' named in the quotient");
      }
      if (owner[v] >= 0) throw HypothesisViolation("collapsed subgraphs share vertex '" + id + "'");
      owner[v] = static_cast<int>(i);
      vs.push_back(v);
    }
    if (vs.empty()) throw InvalidInput("collapsed subgraph " + std::to_string(i) + " is empty");
    std::vector<std::size_t> es;
    if (q.collapse[i].edges) {
      es = *q.collapse[i].edges;
      for (std::size_t e : es) {
        if (e >= net.edges.size()) throw InvalidInput("quotient names a missing edge " + std::to_string(e));
        if (owner[net.edges[e].from] != static_cast<int>(i) || owner[net.edges[e].to] != static_cast<int>(i))
          throw HypothesisViolation("edge " + std::to_string(e) + " leaves collapsed subgraph " + std::to_string(i));
      }
    } else {
      for (std::size_t e = 0; e < net.edges.size(); ++e)
        if (owner[net.edges[e].from] == static_cast<int>(i) && owner[net.edges[e].to] == static_cast<int>(i))
          es.push_back(e);
    }
    c.vertex_sets.push_back(std::move(vs));
    c.edge_sets.push_back(std::move(es));
  }
  // connectivity of each subgraph through its own edges
  for (std::size_t i = 0; i < c.vertex_sets.size(); ++i) {
    std::set<std::size_t> reached{c.vertex_sets[i].front()};
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t e : c.edge_sets[i]) {
        const auto& edge = net.edges[e];
        if (reached.count(edge.from) != reached.count(edge.to)) {
          reached.insert(edge.from);
          reached.insert(edge.to);
          grew = true;
        }
      }
    }
    if (reached.size() != c.vertex_sets[i].size())
      throw HypothesisViolation("collapsed subgraph " + std::to_string(i) + " is not connected");
  }
  return c;
}

ChainGraph build_chains(const Network& net, const Collapse& collapse, const std::set<std::size_t>& anchors) {
  ChainGraph g;
  g.cluster_of.assign(net.vertices.size(), 0);
  std::vector<int> owner(net.vertices.size(), -1);
  for (std::size_t i = 0; i < collapse.vertex_sets.size(); ++i)
    for (std::size_t v : collapse.vertex_sets[i]) owner[v] = static_cast<int>(i);
  const std::size_t k = collapse.vertex_sets.size();
  std::size_t next = k;
  for (std::size_t v = 0; v < net.vertices.size(); ++v)
    g.cluster_of[v] = owner[v] >= 0 ? static_cast<std::size_t>(owner[v]) : next++;
  g.clusters = next;

  std::set<std::size_t> inside;
  for (const auto& es : collapse.edge_sets) inside.insert(es.begin(), es.end());
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    if (inside.count(e)) continue;
    if (g.cluster_of[net.edges[e].from] == g.cluster_of[net.edges[e].to])
      throw HypothesisViolation("edge " + describe(net, e) + " becomes a loop in the quotient");
    g.kept_edges.push_back(e);
  }
  g.degree.assign(g.clusters, 0);
  std::vector<std::vector<std::size_t>> incident(g.clusters);
  for (std::size_t e : g.kept_edges) {
    for (std::size_t v : {net.edges[e].from, net.edges[e].to}) {
      ++g.degree[g.cluster_of[v]];
      incident[g.cluster_of[v]].push_back(e);
    }
  }
  g.is_node.assign(g.clusters, false);
  std::set<std::size_t> anchor_clusters;
  for (std::size_t v : anchors) anchor_clusters.insert(g.cluster_of[v]);
  for (std::size_t c = 0; c < g.clusters; ++c) g.is_node[c] = g.degree[c] != 2 || anchor_clusters.count(c);

  std::set<std::size_t> walked;
  for (std::size_t c = 0; c < g.clusters; ++c) {
    if (!g.is_node[c]) continue;
    for (std::size_t first : incident[c]) {
      if (walked.count(first)) continue;
      Chain chain;
      chain.a = c;
      std::size_t at = c, e = first;
      while (true) {
        walked.insert(e);
        const bool fwd = g.cluster_of[net.edges[e].from] == at;
        chain.steps.push_back({e, fwd});
        at = g.cluster_of[fwd ? net.edges[e].to : net.edges[e].from];
        if (g.is_node[at]) break;
        const auto& inc = incident[at];
        e = inc[0] == e ? inc[1] : inc[0];
      }
      chain.b = at;
      g.chains.push_back(std::move(chain));
    }
  }
  if (walked.size() != g.kept_edges.size()) throw HypothesisViolation("quotient contains a closed loop without junctions");
  return g;
}

// Bijection between the chain nodes of two graphs, anchored at endpoints, that
// preserves the number of chains between every pair of nodes.
std::optional<std::vector<std::size_t>> match_nodes(const ChainGraph& A, const ChainGraph& B,
                                                    const std::map<std::size_t, std::size_t>& anchored) {
  std::vector<std::size_t> a_nodes, b_nodes;
  for (std::size_t c = 0; c < A.clusters; ++c)
    if (A.is_node[c]) a_nodes.push_back(c);
  for (std::size_t c = 0; c < B.clusters; ++c)
    if (B.is_node[c]) b_nodes.push_back(c);
  if (a_nodes.size() != b_nodes.size() || A.chains.size() != B.chains.size()) return std::nullopt;

  auto count = [](const ChainGraph& g, std::size_t u, std::size_t v) {
    std::size_t n = 0;
    for (const auto& ch : g.chains)
      if ((ch.a == u && ch.b == v) || (ch.a == v && ch.b == u)) ++n;
    return n;
  };
  // anchored nodes first, then by decreasing degree
  std::stable_sort(a_nodes.begin(), a_nodes.end(), [&](std::size_t x, std::size_t y) {
    const bool ax = anchored.count(x), ay = anchored.count(y);
    if (ax != ay) return ax;
    return A.degree[x] > A.degree[y];
  });
  std::vector<std::size_t> phi(A.clusters, SIZE_MAX);
  std::vector<bool> taken(B.clusters, false);
  std::function<bool(std::size_t)> assign = [&](std::size_t idx) -> bool {
    if (idx == a_nodes.size()) return true;
    const std::size_t u = a_nodes[idx];
    std::vector<std::size_t> options;
    if (auto it = anchored.find(u); it != anchored.end()) {
      options.push_back(it->second);
    } else {
      options = b_nodes;
    }
    for (std::size_t w : options) {
      if (taken[w] || !B.is_node[w] || B.degree[w] != A.degree[u]) continue;
      bool ok = count(A, u, u) == count(B, w, w);
      for (std::size_t j = 0; j < idx && ok; ++j) ok = count(A, u, a_nodes[j]) == count(B, w, phi[a_nodes[j]]);
      if (!ok) continue;
      phi[u] = w;
      taken[w] = true;
      if (assign(idx + 1)) return true;
      taken[w] = false;
      phi[u] = SIZE_MAX;
    }
    return false;
  };
  if (!assign(0)) return std::nullopt;
  return phi;
}

// For each chain of A, the chain of B joining the matched nodes and whether it
// runs in the same direction.
std::vector<std::pair<std::size_t, bool>> match_chains(const ChainGraph& A, const ChainGraph& B,
                                                       const std::vector<std::size_t>& phi) {
  std::vector<bool> used(B.chains.size(), false);
  std::vector<std::pair<std::size_t, bool>> out;
  for (const auto& ch : A.chains) {
    const std::size_t pa = phi[ch.a], pb = phi[ch.b];
    bool found = false;
    for (std::size_t j = 0; j < B.chains.size() && !found; ++j) {
      if (used[j]) continue;
      if (B.chains[j].a == pa && B.chains[j].b == pb) {
        out.push_back({j, true});
        used[j] = found = true;
      } else if (B.chains[j].a == pb && B.chains[j].b == pa) {
        out.push_back({j, false});
        used[j] = found = true;
      }
    }
    if (!found) throw HypothesisViolation("no competitor chain matches a quotient chain");
  }
  return out;
}

std::map<std::size_t, std::size_t> anchor_endpoints(const Network& ref, const Network& comp, const QuotientSpec& q,
                                                    double eps) {
  std::map<std::size_t, std::size_t> out;  // ref vertex -> comp vertex
  for (std::size_t v : ref.endpoints()) {
    std::optional<std::size_t> match;
    if (!q.endpoint_map.empty()) {
      auto it = q.endpoint_map.find(ref.vertices[v].id);
      if (it == q.endpoint_map.end())
        throw InvalidComparison("endpoint map misses reference endpoint '" + ref.vertices[v].id + "'");
      match = find_vertex(comp, it->second, "competitor");
    } else {
      for (std::size_t w = 0; w < comp.vertices.size(); ++w)
        if (comp.vertices[w].kind == VertexKind::endpoint && norm(comp.vertices[w].p - ref.vertices[v].p) <= eps)
          match = w;
      if (!match) throw InvalidComparison("no competitor endpoint at reference endpoint '" + ref.vertices[v].id + "'");
    }
    if (norm(comp.vertices[*match].p - ref.vertices[v].p) > eps)
      throw InvalidComparison("endpoint '" + ref.vertices[v].id + "' is not matched at the same position");
    out[v] = *match;
  }
  if (out.size() != comp.endpoints().size())
    throw InvalidComparison("reference and competitor have different numbers of endpoints");
  return out;
}

// Simple paths inside a collapsed subgraph, as (edge, traversed forward).
using Path = std::vector<std::pair<std::size_t, bool>>;

struct SubgraphWalker {
  const Network& net;
  std::vector<std::size_t> edges;

  // Shortest path (in edges) from s to t avoiding `blocked` vertices, if any.
  std::optional<Path> shortest(std::size_t s, std::size_t t, const std::set<std::size_t>& blocked) const {
    if (s == t) return Path{};
    std::map<std::size_t, std::pair<std::size_t, bool>> via;  // vertex -> (edge, fwd)
    std::vector<std::size_t> frontier{s};
    std::set<std::size_t> seen{s};
    while (!frontier.empty()) {
      std::vector<std::size_t> next;
      for (std::size_t v : frontier) {
        for (std::size_t e : edges) {
          const auto& edge = net.edges[e];
          for (bool fwd : {true, false}) {
            const std::size_t from = fwd ? edge.from : edge.to;
            const std::size_t to = fwd ? edge.to : edge.from;
            if (from != v || seen.count(to) || (blocked.count(to) && to != t)) continue;
            seen.insert(to);
            via[to] = {e, fwd};
            next.push_back(to);
          }
        }
      }
      if (seen.count(t)) break;
      frontier = std::move(next);
    }
    if (!seen.count(t)) return std::nullopt;
    Path p;
    for (std::size_t v = t; v != s;) {
      const auto [e, fwd] = via[v];
      p.push_back({e, fwd});
      v = fwd ? net.edges[e].from : net.edges[e].to;
    }
    std::reverse(p.begin(), p.end());
    return p;
  }

  // Every simple path from s to t avoiding `blocked`, depth first.
  void all_paths(std::size_t s, std::size_t t, std::set<std::size_t>& blocked, Path& cur,
                 const std::function<bool(const Path&)>& visit) const {
    if (s == t) {
      visit(cur);
      return;
    }
    for (std::size_t e : edges) {
      const auto& edge = net.edges[e];
      for (bool fwd : {true, false}) {
        const std::size_t from = fwd ? edge.from : edge.to;
        const std::size_t to = fwd ? edge.to : edge.from;
        if (from != s || blocked.count(to)) continue;
        blocked.insert(to);
        cur.push_back({e, fwd});
        bool stop = false;
        all_paths(to, t, blocked, cur, [&](const Path& p) { return stop = visit(p); });
        cur.pop_back();
        blocked.erase(to);
        if (stop) return;
      }
    }
  }
};

std::set<std::size_t> path_vertices(const Network& net, std::size_t start, const Path& p) {
  std::set<std::size_t> out{start};
  for (const auto& [e, fwd] : p) out.insert(fwd ? net.edges[e].to : net.edges[e].from);
  return out;
}

// Branch vertex w and three paths w -> a_k inside the subgraph sharing only w.
std::optional<std::pair<std::size_t, std::array<Path, 3>>> find_tripod(const SubgraphWalker& walker,
                                                                      const std::vector<std::size_t>& vertices,
                                                                      const std::array<std::size_t, 3>& att) {
  for (std::size_t w : vertices) {
    std::array<Path, 3> paths;
    std::function<bool(std::size_t, std::set<std::size_t>&)> grow = [&](std::size_t k,
                                                                        std::set<std::size_t>& blocked) -> bool {
      if (k == 3) return true;
      if (att[k] != w && blocked.count(att[k])) return false;
      if (att[k] == w) {
        paths[k].clear();
        return grow(k + 1, blocked);
      }
      Path cur;
      bool done = false;
      walker.all_paths(w, att[k], blocked, cur, [&](const Path& p) {
        paths[k] = p;
        auto more = blocked;
        for (std::size_t v : path_vertices(walker.net, w, p)) more.insert(v);
        done = grow(k + 1, more);
        return done;
      });
      return done;
    };
    std::set<std::size_t> blocked{w};
    if (grow(0, blocked)) return std::make_pair(w, paths);
  }
  return std::nullopt;
}

Path reversed(const Path& p) {
  Path out;
  for (auto it = p.rbegin(); it != p.rend(); ++it) out.push_back({it->first, !it->second});
  return out;
}

}  // namespace

Embedding find_embedded_copy(const Network& ref, const Network& comp, const QuotientSpec& quotient,
                             const ToleranceConfig& tol) {
  validate(ref, tol);
  validate(comp, tol);
  check_minimal(ref, tol).throw_if_failed();
  const Collapse collapse = resolve(comp, quotient, "competitor");
  const auto anchors = anchor_endpoints(ref, comp, quotient, tol.eps_len);
  for (const auto& [rv, cv] : anchors)
    for (const auto& vs : collapse.vertex_sets)
      if (std::count(vs.begin(), vs.end(), cv))
        throw HypothesisViolation("endpoint '" + comp.vertices[cv].id + "' lies in a collapsed subgraph");

  std::set<std::size_t> ref_anchor_vertices, comp_anchor_vertices;
  for (const auto& [rv, cv] : anchors) {
    ref_anchor_vertices.insert(rv);
    comp_anchor_vertices.insert(cv);
  }
  const ChainGraph A = build_chains(ref, Collapse{}, ref_anchor_vertices);
  const ChainGraph B = build_chains(comp, collapse, comp_anchor_vertices);
  std::map<std::size_t, std::size_t> anchored_nodes;
  for (const auto& [rv, cv] : anchors) anchored_nodes[A.cluster_of[rv]] = B.cluster_of[cv];
  const auto phi = match_nodes(A, B, anchored_nodes);
  if (!phi) throw HypothesisViolation("the competitor with its subgraphs collapsed is not homeomorphic to the reference graph");
  const auto chain_match = match_chains(A, B, *phi);

  const std::size_t k = collapse.vertex_sets.size();
  auto walker_for = [&](std::size_t i) { return SubgraphWalker{comp, collapse.edge_sets[i]}; };

  // Tripods at collapsed junctions: the attachment vertex of each incident chain end.
  std::map<std::size_t, std::size_t> branch;                  // cluster -> w
  std::map<std::pair<std::size_t, std::size_t>, Path> arm;    // (cluster, attachment) -> path w -> attachment
  auto attachment = [&](const Chain& ch, bool at_start) {
    const auto [e, fwd] = at_start ? ch.steps.front() : ch.steps.back();
    const auto& edge = comp.edges[e];
    return at_start ? (fwd ? edge.from : edge.to) : (fwd ? edge.to : edge.from);
  };
  for (std::size_t c = 0; c < k; ++c) {
    if (!B.is_node[c]) continue;
    std::vector<std::size_t> att;
    for (const auto& ch : B.chains) {
      if (ch.a == c) att.push_back(attachment(ch, true));
      if (ch.b == c) att.push_back(attachment(ch, false));
    }
    if (att.size() != 3)
      throw HypothesisViolation("collapsed subgraph " + std::to_string(c) + " has " + std::to_string(att.size()) +
                                " attachments; a junction needs three");
    auto tri = find_tripod(walker_for(c), collapse.vertex_sets[c], {att[0], att[1], att[2]});
    if (!tri) throw HypothesisViolation("no embedded tripod inside collapsed subgraph " + std::to_string(c));
    branch[c] = tri->first;
    for (std::size_t j = 0; j < 3; ++j) arm[{c, att[j]}] = tri->second[j];
  }

  Embedding emb;
  for (std::size_t v = 0; v < ref.vertices.size(); ++v) {
    const std::size_t c = (*phi)[A.cluster_of[v]];
    std::size_t target = 0;
    if (c < k) {
      target = branch.at(c);
    } else {
      for (std::size_t w = 0; w < comp.vertices.size(); ++w)
        if (B.cluster_of[w] == c) target = w;
    }
    emb.vertex_map[ref.vertices[v].id] = comp.vertices[target].id;
  }
  for (std::size_t j = 0; j < A.chains.size(); ++j) {
    const Chain& a_chain = A.chains[j];
    if (a_chain.steps.size() != 1) throw HypothesisViolation("reference chain with degree-2 vertices");
    const auto [b_index, same] = chain_match[j];
    const Chain& b_chain = B.chains[b_index];
    Path steps = b_chain.steps;
    std::size_t start_cluster = b_chain.a, end_cluster = b_chain.b;
    if (!same) {
      steps = reversed(steps);
      std::swap(start_cluster, end_cluster);
    }
    Path path;
    auto head_of = [&](const std::pair<std::size_t, bool>& s) {
      return s.second ? comp.edges[s.first].to : comp.edges[s.first].from;
    };
    auto tail_of = [&](const std::pair<std::size_t, bool>& s) {
      return s.second ? comp.edges[s.first].from : comp.edges[s.first].to;
    };
    if (start_cluster < k) {
      const Path& p = arm.at({start_cluster, tail_of(steps.front())});
      path.insert(path.end(), p.begin(), p.end());
    }
    for (std::size_t s = 0; s < steps.size(); ++s) {
      path.push_back(steps[s]);
      if (s + 1 == steps.size()) break;
      const std::size_t exit = head_of(steps[s]);
      const std::size_t entry = tail_of(steps[s + 1]);
      const std::size_t cl = B.cluster_of[exit];
      if (cl < k) {
        auto inner = walker_for(cl).shortest(exit, entry, {});
        if (!inner) throw HypothesisViolation("no path inside collapsed subgraph " + std::to_string(cl));
        path.insert(path.end(), inner->begin(), inner->end());
      }
    }
    if (end_cluster < k) {
      const Path p = reversed(arm.at({end_cluster, head_of(steps.back())}));
      path.insert(path.end(), p.begin(), p.end());
    }
    const std::size_t e = a_chain.steps.front().first;
    // A chain runs along its only edge; orient the path from the edge's `from`.
    if (!a_chain.steps.front().second) path = reversed(path);
    emb.edge_paths[e] = std::move(path);
  }
  return emb;
}

ComparisonCertificate<double> compare_quotient_richer(const Network& ref, const Network& comp,
                                                      const QuotientSpec& quotient, const ToleranceConfig& tol) {
  const Embedding emb = find_embedded_copy(ref, comp, quotient, tol);
  auto cert = compare_embedded_copy(ref, comp, emb, tol);
  for (const auto& [id, target] : emb.vertex_map)
    cert.construction_log.push_back("vertex " + id + " -> " + target);
  for (const auto& [e, path] : emb.edge_paths)
    cert.construction_log.push_back("edge " + describe(ref, e) + " -> path of " + std::to_string(path.size()) +
                                    " competitor edges");
  return cert;
}

// ---------------------------------------------------------------------------
// Poorer topology
// ---------------------------------------------------------------------------

GroupElement collapsed_charge(const Network& ref, const std::vector<EdgeCharge>& charges,
                              const std::vector<std::size_t>& vertex_set) {
  const std::set<std::size_t> s(vertex_set.begin(), vertex_set.end());
  GroupElement sum;
  for (std::size_t e = 0; e < ref.edges.size(); ++e) {
    const auto& edge = ref.edges[e];
    const GroupElement g = charges.at(e).g;
    const bool fwd = charges[e].forward;
    if (s.count(edge.from)) sum += fwd ? -g : g;
    if (s.count(edge.to)) sum += fwd ? g : -g;
  }
  return sum;
}

std::vector<EdgeCharge> induced_charges(const Network& ref, const ToleranceConfig& tol) {
  const auto induced = induce_current<double>(ref, tol);
  std::vector<EdgeCharge> out;
  for (std::size_t e = 0; e < ref.edges.size(); ++e) out.push_back({induced.current.pieces[e].mult, induced.forward[e]});
  return out;
}

ComparisonCertificate<double> transfer_charges(const Network& ref, const std::vector<EdgeCharge>& charges,
                                               const Network& comp, const QuotientSpec& quotient,
                                               const ToleranceConfig& tol) {
  validate(ref, tol);
  validate(comp, tol);
  if (charges.size() != ref.edges.size()) throw InvalidInput("one charge per reference edge is required");
  const Collapse collapse = resolve(ref, quotient, "reference");
  ComparisonCertificate<double> cert;
  for (std::size_t i = 0; i < collapse.vertex_sets.size(); ++i) {
    for (std::size_t v : collapse.vertex_sets[i])
      if (ref.vertices[v].kind == VertexKind::endpoint)
        throw HypothesisViolation("endpoint '" + ref.vertices[v].id + "' lies in collapsed subgraph " +
                                  std::to_string(i));
    const GroupElement sum = collapsed_charge(ref, charges, collapse.vertex_sets[i]);
    if (!sum.is_zero())
      throw HypothesisViolation("collapsed subgraph " + std::to_string(i) + " has net charge " + to_string(sum));
    cert.construction_log.push_back("collapsed subgraph " + std::to_string(i) + ": charges cancel");
  }

  const auto anchors = anchor_endpoints(ref, comp, quotient, tol.eps_len);
  std::set<std::size_t> ref_anchor_vertices, comp_anchor_vertices;
  for (const auto& [rv, cv] : anchors) {
    ref_anchor_vertices.insert(rv);
    comp_anchor_vertices.insert(cv);
  }
  const ChainGraph A = build_chains(ref, collapse, ref_anchor_vertices);
  const ChainGraph B = build_chains(comp, Collapse{}, comp_anchor_vertices);
  std::map<std::size_t, std::size_t> anchored_nodes;
  for (const auto& [rv, cv] : anchors) anchored_nodes[A.cluster_of[rv]] = B.cluster_of[cv];
  const auto phi = match_nodes(A, B, anchored_nodes);
  if (!phi) throw HypothesisViolation("the competitor is not homeomorphic to the reference with its subgraphs collapsed");
  const auto chain_match = match_chains(A, B, *phi);

  LatticeCurrent<double> reference_current, current;
  for (std::size_t e = 0; e < ref.edges.size(); ++e)
    deposit_polyline(reference_current, ref.polyline(e), charges[e].forward, charges[e].g);

  for (std::size_t j = 0; j < A.chains.size(); ++j) {
    // Signed charge carried along the chain's traversal direction.
    std::optional<GroupElement> along;
    for (const auto& [e, fwd] : A.chains[j].steps) {
      const GroupElement s = (fwd == charges[e].forward) ? charges[e].g : -charges[e].g;
      if (along && *along != s)
        throw HypothesisViolation("edges joined through a collapsed point carry incompatible charges at " +
                                  describe(ref, e));
      along = s;
    }
    const auto [b_index, same] = chain_match[j];
    for (const auto& [h, fwd] : B.chains[b_index].steps) {
      deposit_polyline(current, comp.polyline(h), fwd == same, *along);
      cert.construction_log.push_back("competitor edge " + describe(comp, h) + ": multiplicity " +
                                      to_string(fwd == same ? *along : -*along));
    }
  }

  const double eps = tol.eps_len;
  cert.reference_length = length(ref);
  cert.competitor_length = length(comp);
  cert.boundary_match = same_boundary(boundary(current, eps), boundary(reference_current, eps), eps);
  cert.competitor_mass = mass(canonicalize(current, eps));
  finish_verdict(cert, eps);
  return cert;
}

ComparisonCertificate<double> compare_quotient_poorer(const Network& ref, const Network& comp,
                                                      const QuotientSpec& quotient, const ToleranceConfig& tol) {
  validate(comp, tol);
  const auto induced = induce_current<double>(ref, tol);
  const double theta = induced.rotation;
  std::vector<EdgeCharge> charges;
  for (std::size_t e = 0; e < ref.edges.size(); ++e) charges.push_back({induced.current.pieces[e].mult, induced.forward[e]});
  const Network r = theta == 0 ? ref : rotated(ref, theta);
  const Network c = theta == 0 ? comp : rotated(comp, theta);
  auto cert = transfer_charges(r, charges, c, quotient, tol);
  if (theta != 0)
    cert.construction_log.insert(cert.construction_log.begin(),
                                 "rotated both networks by " + std::to_string(theta) + " rad");
  return cert;
}

// ---------------------------------------------------------------------------
// Steiner oracle
// ---------------------------------------------------------------------------

SteinerSolution steiner_oracle(const std::vector<Point2>& terminals, std::size_t max_terminals) {
  if (terminals.size() > std::min<std::size_t>(max_terminals, 5))
    throw Unsupported("Steiner oracle supports at most " + std::to_string(std::min<std::size_t>(max_terminals, 5)) +
                      " terminals");
  const auto tree = kernels::steiner_search(terminals);
  SteinerSolution out;
  out.length = tree.length;
  out.degenerate = tree.degenerate;
  out.topology = tree.topology;
  const std::size_t n = terminals.size();
  for (std::size_t i = 0; i < n; ++i) out.network.vertices.push_back({"t" + std::to_string(i), terminals[i], {}, VertexKind::endpoint});
  for (std::size_t k = 0; k < tree.steiner_points.size(); ++k)
    out.network.vertices.push_back({"s" + std::to_string(k), tree.steiner_points[k], {}, VertexKind::junction});
  for (auto [u, v] : tree.edges) out.network.edges.push_back({u, v, {}, {}});
  for (std::size_t v = 0; v < out.network.vertices.size(); ++v)
    out.network.vertices[v].kind = out.network.degree(v) == 1 ? VertexKind::endpoint : VertexKind::junction;
  return out;
}

}  // namespace calnet
