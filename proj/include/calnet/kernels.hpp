#pragma once

// Hot loops with an OpenMP implementation and a serial reference. The two
// variants return identical results (same order); tests compare them and the
// benchmark target times them.

#include <cstddef>
#include <vector>

#include "calnet/geometry.hpp"

namespace calnet::kernels {

// ---- comass of the identity form ------------------------------------------

/// max(|cos a|, |sin(a + pi/6)|, |sin(a - pi/6)|)
double identity_comass(double alpha);

struct ComassScan {
  double max_value = 0;
  double argmax = 0;
  double min_value = 0;
  std::size_t evaluated = 0;
};

/// Scans `samples` uniform angles in [0, 2pi) plus the twelve angles k*pi/6.
ComassScan comass_scan_serial(std::size_t samples);
ComassScan comass_scan(std::size_t samples);

// ---- pairwise segment conflicts -------------------------------------------

struct TaggedSegment {
  Segment<double> s;
  std::size_t tail = 0;  // node ids; shared ids mark legitimate contacts
  std::size_t head = 0;
};

struct SegmentConflict {
  std::size_t i = 0;
  std::size_t j = 0;
  Intersection<double> hit;
};

/// All pairs i < j whose intersection is more than a shared end node.
std::vector<SegmentConflict> segment_conflicts_serial(const std::vector<TaggedSegment>& segs, double eps);
std::vector<SegmentConflict> segment_conflicts(const std::vector<TaggedSegment>& segs, double eps);

// ---- shared boundaries of polygonal cells ----------------------------------

/// Collinear, oppositely oriented overlap between edge `edge_a` of cell `a`
/// and edge `edge_b` of cell `b` (a < b), running from p to q along edge_a.
template <class T>
struct EdgeOverlap {
  std::size_t a = 0, edge_a = 0;
  std::size_t b = 0, edge_b = 0;
  Vec2<T> p, q;
};

template <class T>
std::vector<EdgeOverlap<T>> cell_overlaps_serial(const std::vector<Ring<T>>& cells, double eps);
template <class T>
std::vector<EdgeOverlap<T>> cell_overlaps(const std::vector<Ring<T>>& cells, double eps);

// ---- Steiner topology search -----------------------------------------------

struct SteinerTree {
  double length = 0;
  std::vector<Point2> steiner_points;                   // indices n, n+1, ... after terminals
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  bool degenerate = false;                              // some Steiner point collapsed
  std::size_t topology = 0;                             // index in enumeration order
};

/// Number of full Steiner topologies on n terminals, (2n-5)!!.
std::size_t full_topology_count(std::size_t n);

/// Best full topology after junction optimization, ties to the lowest index.
SteinerTree steiner_search_serial(const std::vector<Point2>& terminals);
SteinerTree steiner_search(const std::vector<Point2>& terminals);

}  // namespace calnet::kernels
