#pragma once

#include <string>
#include <vector>

#include "calnet/network.hpp"

namespace calnet {

/// n*g1 + m*g2 in the lattice group generated by g1 and g2.
struct GroupElement {
  long n = 0;
  long m = 0;

  static GroupElement g1() { return {1, 0}; }
  static GroupElement g2() { return {0, 1}; }
  static GroupElement g3() { return {-1, -1}; }

  bool is_zero() const { return n == 0 && m == 0; }
  /// Hexagonal norm of the embedding, max(|n|, |m|, |n - m|).
  long norm() const;

  template <class T>
  Vec2<T> embed() const;

  GroupElement& operator+=(const GroupElement& o) {
    n += o.n;
    m += o.m;
    return *this;
  }
  friend GroupElement operator+(GroupElement l, const GroupElement& r) { return l += r; }
  friend GroupElement operator-(const GroupElement& g) { return {-g.n, -g.m}; }
  friend GroupElement operator-(GroupElement l, const GroupElement& r) { return l += -r; }
  friend GroupElement operator*(long k, const GroupElement& g) { return {k * g.n, k * g.m}; }
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

std::string to_string(const GroupElement& g);

/// True for +-g1, +-g2, +-g3.
bool is_generator(const GroupElement& g);

template <class T>
struct CurrentPiece {
  Segment<T> seg;  // oriented from seg.a to seg.b
  Vec2<T> tau;     // unit tangent along seg
  GroupElement mult;
};

template <class T>
struct LatticeCurrent {
  std::vector<CurrentPiece<T>> pieces;

  /// Appends a piece oriented a -> b. Exact pieces must run along a multiple
  /// of 30 degrees so that the unit tangent is exact.
  void add(const Vec2<T>& a, const Vec2<T>& b, GroupElement mult);
};

template <class T>
struct BoundaryAtom {
  Vec2<T> p;
  GroupElement coefficient;
};

template <class T>
struct BoundaryMeasure {
  std::vector<BoundaryAtom<T>> atoms;  // sorted by (x, y), no zero coefficients
};

template <class T>
struct InducedCurrent {
  LatticeCurrent<T> current;  // one piece per network edge, same order
  std::vector<bool> forward;  // piece runs from the edge's `from` vertex to its `to` vertex
  double rotation = 0;        // angle applied to the network before inducing
};

/// Rotates a minimal network onto the g1/g2/g3 axes and orients the edge
/// parallel to g_i along +g_i with multiplicity g_i. The exact variant
/// requires exact coordinates and an already aligned network.
template <class T>
InducedCurrent<T> induce_current(const Network& net, const ToleranceConfig& tol = {});

/// +mult at each head, -mult at each tail; coincident points merged within eps.
template <class T>
BoundaryMeasure<T> boundary(const LatticeCurrent<T>& current, double eps = 1e-9);

template <class T>
T mass(const LatticeCurrent<T>& current);

/// True when the coefficients add up to zero.
template <class T>
bool sum_boundary_check(const BoundaryMeasure<T>& measure);

template <class T>
bool same_boundary(const BoundaryMeasure<T>& a, const BoundaryMeasure<T>& b, double eps = 1e-9);

/// Merges collinear overlapping pieces into maximal intervals carrying the
/// summed multiplicity, dropping intervals where it cancels. The result has
/// pairwise interior-disjoint pieces and the same boundary.
LatticeCurrent<double> canonicalize(const LatticeCurrent<double>& current, double eps = 1e-9);

template <class T>
struct CalibrationReport {
  T closedness_residual{};                 // constant form: identically zero
  double comass_max = 0;                   // sampled comass maximum
  double comass_at_hexagon_directions = 0; // min over the six hexagon directions
  std::size_t comass_samples = 0;
  T equality_residual{};                   // max |<tau, theta> - |theta||
  std::size_t worst_piece = 0;
  bool passed = true;
  std::vector<std::string> failures;

  /// Throws CalibrationFailure with the first failure message.
  void throw_if_failed() const;
};

/// Checks that the constant identity form calibrates `current`: closed, comass
/// at most 1 (sampled angles plus the twelve critical ones), and
/// <tau, theta> = |theta| on every piece.
template <class T>
CalibrationReport<T> verify_identity_calibration(const LatticeCurrent<T>& current, std::size_t samples,
                                                 const ToleranceConfig& tol = {});

}  // namespace calnet
