#include "calnet/kernels.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace calnet::kernels {

double identity_comass(double alpha) {
  constexpr double kSixth = std::numbers::pi / 6;
  return std::max({std::abs(std::cos(alpha)), std::abs(std::sin(alpha + kSixth)), std::abs(std::sin(alpha - kSixth))});
}

namespace {

double scan_angle(std::size_t i, std::size_t samples) {
  if (i < samples) return 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples);
  return static_cast<double>(i - samples) * std::numbers::pi / 6;
}

struct ScanState {
  double max_value = -1;
  std::size_t argmax = 0;
  double min_value = std::numeric_limits<double>::infinity();

  void add(double v, std::size_t i) {
    if (v > max_value || (v == max_value && i < argmax)) {
      max_value = v;
      argmax = i;
    }
    min_value = std::min(min_value, v);
  }
  void merge(const ScanState& o) {
    if (o.max_value > max_value || (o.max_value == max_value && o.argmax < argmax)) {
      max_value = o.max_value;
      argmax = o.argmax;
    }
    min_value = std::min(min_value, o.min_value);
  }
};

ComassScan finish(const ScanState& st, std::size_t samples) {
  return {st.max_value, scan_angle(st.argmax, samples), st.min_value, samples + 12};
}

}  // namespace

ComassScan comass_scan_serial(std::size_t samples) {
  ScanState st;
  for (std::size_t i = 0; i < samples + 12; ++i) st.add(identity_comass(scan_angle(i, samples)), i);
  return finish(st, samples);
}

ComassScan comass_scan(std::size_t samples) {
  ScanState total;
  const auto n = static_cast<std::ptrdiff_t>(samples + 12);
#pragma omp parallel
  {
    ScanState local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      local.add(identity_comass(scan_angle(k, samples)), k);
    }
#pragma omp critical
    total.merge(local);
  }
  return finish(total, samples);
}

// ---------------------------------------------------------------------------

namespace {

bool legitimate_contact(const TaggedSegment& x, const TaggedSegment& y, const Point2& p, double eps) {
  const std::pair<std::size_t, Point2> ends_x[] = {{x.tail, x.s.a}, {x.head, x.s.b}};
  for (const auto& [id, pos] : ends_x) {
    if ((id == y.tail || id == y.head) && norm(p - pos) <= eps) return true;
  }
  return false;
}

void conflicts_for(const std::vector<TaggedSegment>& segs, std::size_t i, double eps,
                   std::vector<SegmentConflict>& out) {
  const auto& x = segs[i];
  const double xl = std::min(x.s.a.x, x.s.b.x) - eps, xh = std::max(x.s.a.x, x.s.b.x) + eps;
  const double yl = std::min(x.s.a.y, x.s.b.y) - eps, yh = std::max(x.s.a.y, x.s.b.y) + eps;
  for (std::size_t j = i + 1; j < segs.size(); ++j) {
    const auto& y = segs[j];
    if (std::max(y.s.a.x, y.s.b.x) < xl || std::min(y.s.a.x, y.s.b.x) > xh) continue;
    if (std::max(y.s.a.y, y.s.b.y) < yl || std::min(y.s.a.y, y.s.b.y) > yh) continue;
    auto hit = segment_intersection(x.s, y.s, eps);
    if (hit.kind == IntersectionKind::empty) continue;
    if (hit.kind == IntersectionKind::point && legitimate_contact(x, y, hit.p, eps)) continue;
    out.push_back({i, j, hit});
  }
}

}  // namespace

std::vector<SegmentConflict> segment_conflicts_serial(const std::vector<TaggedSegment>& segs, double eps) {
  std::vector<SegmentConflict> out;
  for (std::size_t i = 0; i < segs.size(); ++i) conflicts_for(segs, i, eps, out);
  return out;
}

std::vector<SegmentConflict> segment_conflicts(const std::vector<TaggedSegment>& segs, double eps) {
  std::vector<std::vector<SegmentConflict>> per(segs.size());
  const auto n = static_cast<std::ptrdiff_t>(segs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) conflicts_for(segs, static_cast<std::size_t>(i), eps, per[i]);
  std::vector<SegmentConflict> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Box {
  double xl, xh, yl, yh;
};

template <class T>
Box bounds(const Ring<T>& r, double eps) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& v : r) {
    const Point2 p = to_double(v);
    b.xl = std::min(b.xl, p.x);
    b.xh = std::max(b.xh, p.x);
    b.yl = std::min(b.yl, p.y);
    b.yh = std::max(b.yh, p.y);
  }
  // The double image of an exact ring is within rounding of the true box.
  const double pad = eps + 1e-9 * (1 + std::max({std::abs(b.xl), std::abs(b.xh), std::abs(b.yl), std::abs(b.yh)}));
  b.xl -= pad;
  b.xh += pad;
  b.yl -= pad;
  b.yh += pad;
  return b;
}

bool disjoint(const Box& a, const Box& b) { return a.xh < b.xl || b.xh < a.xl || a.yh < b.yl || b.yh < a.yl; }

template <class T>
void overlaps_for(const std::vector<Ring<T>>& cells, const std::vector<Box>& boxes, std::size_t a, double eps,
                  std::vector<EdgeOverlap<T>>& out) {
  const auto& ra = cells[a];
  for (std::size_t b = a + 1; b < cells.size(); ++b) {
    if (disjoint(boxes[a], boxes[b])) continue;
    const auto& rb = cells[b];
    for (std::size_t i = 0; i < ra.size(); ++i) {
      const Segment<T> sa{ra[i], ra[(i + 1) % ra.size()]};
      for (std::size_t j = 0; j < rb.size(); ++j) {
        const Segment<T> sb{rb[j], rb[(j + 1) % rb.size()]};
        if (sign_of(dot(sa.direction(), sb.direction()), 0.0) >= 0) continue;
        auto hit = segment_intersection(sa, sb, eps);
        if (hit.kind != IntersectionKind::overlap) continue;
        out.push_back({a, i, b, j, hit.p, hit.q});
      }
    }
  }
}

}  // namespace

template <class T>
std::vector<EdgeOverlap<T>> cell_overlaps_serial(const std::vector<Ring<T>>& cells, double eps) {
  std::vector<Box> boxes;
  for (const auto& c : cells) boxes.push_back(bounds(c, eps));
  std::vector<EdgeOverlap<T>> out;
  for (std::size_t a = 0; a < cells.size(); ++a) overlaps_for(cells, boxes, a, eps, out);
  return out;
}

template <class T>
std::vector<EdgeOverlap<T>> cell_overlaps(const std::vector<Ring<T>>& cells, double eps) {
  std::vector<Box> boxes(cells.size());
  const auto n = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < n; ++a) boxes[a] = bounds(cells[a], eps);
  std::vector<std::vector<EdgeOverlap<T>>> per(cells.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t a = 0; a < n; ++a) overlaps_for(cells, boxes, static_cast<std::size_t>(a), eps, per[a]);
  std::vector<EdgeOverlap<T>> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

template std::vector<EdgeOverlap<double>> cell_overlaps_serial(const std::vector<Ring<double>>&, double);
template std::vector<EdgeOverlap<double>> cell_overlaps(const std::vector<Ring<double>>&, double);
template std::vector<EdgeOverlap<QSqrt3>> cell_overlaps_serial(const std::vector<Ring<QSqrt3>>&, double);
template std::vector<EdgeOverlap<QSqrt3>> cell_overlaps(const std::vector<Ring<QSqrt3>>&, double);

// ---------------------------------------------------------------------------

std::size_t full_topology_count(std::size_t n) {
  if (n < 3) return 1;
  std::size_t c = 1;
  for (std::size_t k = 3; k <= 2 * n - 5; k += 2) c *= k;
  return c;
}

namespace {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// Terminals are 0..n-1; Steiner point k is n+k. Terminal t >= 3 is attached by
// splitting an existing edge, in edge order.
void enumerate(std::size_t n, std::size_t next_terminal, EdgeList& edges, std::vector<EdgeList>& out) {
  if (next_terminal == n) {
    out.push_back(edges);
    return;
  }
  const std::size_t s = n + (next_terminal - 2);
  const std::size_t count = edges.size();
  for (std::size_t e = 0; e < count; ++e) {
    const auto [u, v] = edges[e];
    edges[e] = {u, s};
    edges.push_back({s, v});
    edges.push_back({next_terminal, s});
    enumerate(n, next_terminal + 1, edges, out);
    edges.pop_back();
    edges.pop_back();
    edges[e] = {u, v};
  }
}

std::vector<EdgeList> topologies(std::size_t n) {
  std::vector<EdgeList> out;
  if (n == 2) {
    out.push_back({{0, 1}});
    return out;
  }
  EdgeList star{{0, n}, {1, n}, {2, n}};
  enumerate(n, 3, star, out);
  return out;
}

double tree_length(const std::vector<Point2>& pts, const EdgeList& edges) {
  double l = 0;
  for (auto [u, v] : edges) l += norm(pts[u] - pts[v]);
  return l;
}

std::vector<Point2> initial_positions(const std::vector<Point2>& terminals, const EdgeList& edges) {
  const std::size_t n = terminals.size();
  std::vector<Point2> pts = terminals;
  pts.resize(2 * n - 2);
  std::vector<std::size_t> count(pts.size(), 0);
  std::vector<Point2> acc(pts.size());
  for (auto [u, v] : edges) {
    if (u < n && v >= n) {
      acc[v] += terminals[u];
      ++count[v];
    } else if (v < n && u >= n) {
      acc[u] += terminals[v];
      ++count[u];
    }
  }
  Point2 centroid;
  for (const auto& t : terminals) centroid += t;
  centroid = centroid / static_cast<double>(n);
  for (std::size_t k = n; k < pts.size(); ++k)
    pts[k] = count[k] ? acc[k] / static_cast<double>(count[k]) : centroid;
  return pts;
}

// Newton steps on the gradient (sum of unit vectors at each Steiner point)
// once Smith's iteration has settled; skipped for collapsing configurations.
void polish(std::vector<Point2>& pts, std::size_t n, const EdgeList& edges, double scale) {
  const std::size_t m = pts.size() - n;
  const auto dim = static_cast<Eigen::Index>(2 * m);
  for (int iter = 0; iter < 30; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
    for (auto [u, v] : edges) {
      const Vector2 d = pts[u] - pts[v];
      const double len = norm(d);
      if (len < 1e-6 * std::max(scale, 1.0)) return;
      const Vector2 t = d / len;
      Eigen::Matrix2d k;
      k << 1 - t.x * t.x, -t.x * t.y, -t.x * t.y, 1 - t.y * t.y;
      k /= len;
      const auto iu = static_cast<Eigen::Index>(2 * (u - n));
      const auto iv = static_cast<Eigen::Index>(2 * (v - n));
      if (u >= n) {
        grad(iu) += t.x;
        grad(iu + 1) += t.y;
        hess.block<2, 2>(iu, iu) += k;
      }
      if (v >= n) {
        grad(iv) -= t.x;
        grad(iv + 1) -= t.y;
        hess.block<2, 2>(iv, iv) += k;
      }
      if (u >= n && v >= n) {
        hess.block<2, 2>(iu, iv) -= k;
        hess.block<2, 2>(iv, iu) -= k;
      }
    }
    if (grad.norm() < 1e-14) return;
    const Eigen::VectorXd step = hess.ldlt().solve(-grad);
    if (!step.allFinite()) return;
    const double before = tree_length(pts, edges);
    double lambda = 1;
    bool accepted = false;
    for (int half_steps = 0; half_steps < 30 && !accepted; ++half_steps, lambda *= 0.5) {
      std::vector<Point2> trial = pts;
      for (std::size_t k = 0; k < m; ++k) {
        trial[n + k].x += lambda * step(static_cast<Eigen::Index>(2 * k));
        trial[n + k].y += lambda * step(static_cast<Eigen::Index>(2 * k + 1));
      }
      if (tree_length(trial, edges) <= before * (1 + 1e-15)) {
        pts = std::move(trial);
        accepted = true;
      }
    }
    if (!accepted) return;
  }
}

// Smith's fixed-point iteration: each step solves the weighted Laplacian system
// with weights 1/|edge| frozen at the previous iterate.
std::vector<Point2> optimize(const std::vector<Point2>& terminals, const EdgeList& edges) {
  const std::size_t n = terminals.size();
  const std::size_t m = n - 2;
  std::vector<Point2> pts = initial_positions(terminals, edges);
  double scale = 0;
  for (const auto& t : terminals) scale = std::max(scale, norm(t - terminals[0]));
  const double floor_len = 1e-15 * std::max(scale, 1.0);
  double prev = tree_length(pts, edges);
  Eigen::MatrixXd a(m, m);
  Eigen::MatrixXd rhs(m, 2);
  for (int iter = 0; iter < 10000; ++iter) {
    a.setZero();
    rhs.setZero();
    for (auto [u, v] : edges) {
      const double w = 1.0 / std::max(norm(pts[u] - pts[v]), floor_len);
      for (auto [p, q] : {std::pair{u, v}, std::pair{v, u}}) {
        if (p < n) continue;
        const auto i = static_cast<Eigen::Index>(p - n);
        a(i, i) += w;
        if (q >= n) {
          a(i, static_cast<Eigen::Index>(q - n)) -= w;
        } else {
          rhs(i, 0) += w * pts[q].x;
          rhs(i, 1) += w * pts[q].y;
        }
      }
    }
    const Eigen::MatrixXd x = a.ldlt().solve(rhs);
    std::vector<Point2> next = pts;
    for (std::size_t k = 0; k < m; ++k) next[n + k] = {x(static_cast<Eigen::Index>(k), 0), x(static_cast<Eigen::Index>(k), 1)};
    const double len = tree_length(next, edges);
    if (!std::isfinite(len)) break;
    const bool improved = len < prev;
    if (improved) pts = std::move(next);
    if (!improved || prev - len <= 1e-14 * prev) break;
    prev = len;
  }
  polish(pts, n, edges, scale);
  return pts;
}

SteinerTree collapse(const std::vector<Point2>& terminals, std::vector<Point2> pts, EdgeList edges,
                     std::size_t index) {
  const std::size_t n = terminals.size();
  double scale = 0;
  for (const auto& t : terminals) scale = std::max(scale, norm(t - terminals[0]));
  const double tiny = 1e-7 * std::max(scale, 1.0);
  SteinerTree tree;
  tree.topology = index;
  // Merge a Steiner point into a neighbour it has converged onto.
  std::vector<std::size_t> rep(pts.size());
  for (std::size_t i = 0; i < rep.size(); ++i) rep[i] = i;
  auto find = [&](std::size_t i) {
    while (rep[i] != i) i = rep[i];
    return i;
  };
  for (auto [u, v] : edges) {
    std::size_t ru = find(u), rv = find(v);
    if (ru == rv || norm(pts[ru] - pts[rv]) > tiny) continue;
    if (ru >= n && rv >= n) {
      rep[std::max(ru, rv)] = std::min(ru, rv);
    } else if (ru >= n) {
      rep[ru] = rv;
    } else if (rv >= n) {
      rep[rv] = ru;
    } else {
      continue;  // coincident terminals stay distinct
    }
    tree.degenerate = true;
  }
  std::vector<std::size_t> new_index(pts.size(), 0);
  for (std::size_t i = 0; i < n; ++i) new_index[i] = i;
  for (std::size_t k = n; k < pts.size(); ++k) {
    if (find(k) != k) continue;
    new_index[k] = n + tree.steiner_points.size();
    tree.steiner_points.push_back(pts[k]);
  }
  for (auto [u, v] : edges) {
    const std::size_t ru = find(u), rv = find(v);
    if (ru == rv) continue;
    tree.edges.emplace_back(new_index[ru], new_index[rv]);
  }
  std::vector<Point2> all = terminals;
  all.insert(all.end(), tree.steiner_points.begin(), tree.steiner_points.end());
  tree.length = tree_length(all, tree.edges);
  return tree;
}

SteinerTree pick(const std::vector<SteinerTree>& trees) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trees.size(); ++i)
    if (trees[i].length < trees[best].length - 1e-12) best = i;
  return trees[best];
}

void require_supported(const std::vector<Point2>& terminals) {
  if (terminals.size() < 2) throw InvalidInput("the Steiner search needs at least two terminals");
  if (terminals.size() > 5) throw Unsupported("the Steiner search handles at most 5 terminals");
  for (const auto& t : terminals)
    if (!is_finite(t)) throw InvalidInput("non-finite terminal");
}

SteinerTree solve_one(const std::vector<Point2>& terminals, const EdgeList& edges, std::size_t index) {
  if (terminals.size() == 2) return collapse(terminals, terminals, edges, index);
  return collapse(terminals, optimize(terminals, edges), edges, index);
}

}  // namespace

SteinerTree steiner_search_serial(const std::vector<Point2>& terminals) {
  require_supported(terminals);
  const auto tops = topologies(terminals.size());
  std::vector<SteinerTree> trees;
  for (std::size_t i = 0; i < tops.size(); ++i) trees.push_back(solve_one(terminals, tops[i], i));
  return pick(trees);
}

SteinerTree steiner_search(const std::vector<Point2>& terminals) {
  require_supported(terminals);
  const auto tops = topologies(terminals.size());
  std::vector<SteinerTree> trees(tops.size());
  const auto n = static_cast<std::ptrdiff_t>(tops.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) trees[i] = solve_one(terminals, tops[i], static_cast<std::size_t>(i));
  return pick(trees);
}

}  // namespace calnet::kernels
