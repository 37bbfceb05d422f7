#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "calnet/network.hpp"

namespace calnet {

/// Interface pairs in cyclic order: 0 -> (1,2), 1 -> (2,3), 2 -> (3,1).
std::string_view pair_label(int pair);
/// Index of the unordered label pair {i, j} and whether (i, j) is the cyclic order.
std::pair<int, bool> pair_index(int i, int j);

template <class T>
struct Interface {
  Segment<T> seg;
  int pair = 0;
  Vec2<T> normal;  // unit, from region i into region j of the pair
};

/// Three-region partition of a polygonal domain. Regions are lists of convex
/// or simple polygons; labels are 1, 2, 3.
template <class T>
struct PartitionSpec {
  Polygon<T> omega;
  std::array<std::vector<Polygon<T>>, 3> regions;
  std::vector<Interface<T>> interfaces;

  /// Throws InvalidInput when a normal is not unit or the regions do not
  /// cover omega by area.
  void validate(const ToleranceConfig& tol = {}) const;
};

/// Constant fields Psi12, Psi23, Psi31 on one convex cell.
template <class T>
struct FieldCell {
  Ring<T> ring;
  std::string zone;
  int label = 0;  // region containing the cell
  std::array<Vec2<T>, 3> psi;
};

template <class T>
struct FieldAssignment {
  std::vector<FieldCell<T>> cells;
};

/// Normal traces of one field on both sides of a shared cell boundary.
template <class T>
struct TraceCheck {
  std::size_t cell_a = 0, cell_b = 0;
  std::string zone_a, zone_b;
  int pair = 0;
  Vec2<T> normal_a;  // outer normal of cell a; cell b uses its negative
  T trace_a{};       // psi_a . normal_a
  T trace_b{};       // psi_b . (-normal_a)
  T residual{};      // |trace_a + trace_b|
  Vec2<T> p, q;
};

template <class T>
struct PartitionCalibrationReport {
  T trace_residual{};
  T norm_excess{};         // exact mode: max(|psi|^2 - 1, 0)
  T interface_residual{};
  T sum_residual{};        // exact mode: max-coordinate norm
  bool verdict = false;
  std::vector<TraceCheck<T>> traces;
  std::vector<std::string> failures;
};

// ---------------------------------------------------------------------------
// Domain and partition
// ---------------------------------------------------------------------------

/// Convex piece of the tubular domain, attached to the face on one side of a
/// network edge.
template <class T>
struct DomainPiece {
  Ring<T> ring;
  std::string zone;
  std::size_t edge = 0;
  bool left = true;        // side of `edge`, relative to its from -> to direction
  int hub = -1;            // junction whose constant fields apply, or -1
  bool wedge = false;      // triangle at a junction-junction midpoint
};

template <class T>
struct PartitionDomain {
  Polygon<T> omega;
  Network extended;        // endpoint edges lengthened by delta_prime
  T delta{};
  T delta_prime{};
  std::vector<DomainPiece<T>> pieces;
};

/// Miter tube of width delta around the network with endpoint edges extended
/// by delta_prime, split into convex pieces: three quadrilaterals per
/// junction, two half strips per edge, and on junction-junction edges the
/// strips are cut by the two lines through the midpoint at +-30 degrees.
/// Throws ThresholdViolation unless delta < sqrt3 * d / 8 (d the shortest
/// edge), NonTransverse when the convex clip polygon `D` meets the tube
/// boundary tangentially.
template <class T>
PartitionDomain<T> build_partition_domain(const Network& net, const T& delta, const T& delta_prime,
                                          const std::optional<Polygon<T>>& D = std::nullopt,
                                          const ToleranceConfig& tol = {});

struct FaceColoring {
  std::vector<int> face_of_side;  // index 2*edge + (right side ? 1 : 0)
  std::vector<int> color;         // per face, 1..3
  std::size_t faces() const { return color.size(); }
  int color_of(std::size_t edge, bool left) const { return color[face_of_side[2 * edge + (left ? 0 : 1)]]; }
};

/// Faces of the tube minus the network and a proper 3-coloring of their
/// adjacency (faces sharing an edge). Smallest color first, backtracking, in
/// face order. Throws NoColoring.
FaceColoring three_color_faces(const Network& net);

/// Renames colors: color c becomes perm[c - 1].
FaceColoring relabel(const FaceColoring& coloring, const std::array<int, 3>& perm);

/// Piecewise constant fields: on the cells of a junction every pair (i,j)
/// gets the unit normal from face i into face j of the arm separating them;
/// on a midpoint wedge inside face c next to face o, Psi_co = Psi_ck = normal
/// from c into o and Psi_ok = 0. Throws InconsistentAssignment when the arm
/// normals at a junction do not close up.
template <class T>
FieldAssignment<T> assign_fields(const PartitionDomain<T>& domain, const FaceColoring& coloring,
                                 const ToleranceConfig& tol = {});

/// Convex labeled cells -> spec with interfaces on the shared boundaries of
/// cells with different labels.
template <class T>
PartitionSpec<T> partition_from_labeled_cells(const Polygon<T>& omega, const std::vector<Ring<T>>& cells,
                                              const std::vector<int>& labels, const ToleranceConfig& tol = {});

/// Partition induced on the domain by the coloring.
template <class T>
PartitionSpec<T> partition_spec(const PartitionDomain<T>& domain, const FaceColoring& coloring,
                                const ToleranceConfig& tol = {});

/// Checks the paired calibration conditions: zero normal jump of every field
/// across shared cell boundaries, |Psi| <= 1, Psi_ij . nu_ij = 1 from both
/// sides of every interface, Psi12 + Psi23 + Psi31 = 0.
template <class T>
PartitionCalibrationReport<T> verify_paired_calibration(const PartitionSpec<T>& spec,
                                                        const FieldAssignment<T>& fields,
                                                        const ToleranceConfig& tol = {});

/// Total interface length.
template <class T>
T perimeter_energy(const PartitionSpec<T>& spec);

// ---------------------------------------------------------------------------
// Competitors and flux
// ---------------------------------------------------------------------------

/// Splits every convex cell by every line (origin, direction).
std::vector<Ring<double>> refine_by_lines(const std::vector<Ring<double>>& cells,
                                          const std::vector<std::pair<Point2, Vector2>>& lines, double eps);

/// Partition of the domain by a network with the same graph as the domain's
/// extended network (moved vertices allowed): every point takes the color of
/// the face on its side of the nearest competitor edge.
PartitionSpec<double> partition_from_network(const PartitionDomain<double>& domain, const FaceColoring& coloring,
                                             const Network& competitor, const ToleranceConfig& tol = {});

/// Label arcs of the domain boundary: per boundary edge, sorted parameter
/// intervals with their region label, adjacent equal labels merged.
struct TraceArc {
  std::size_t boundary_edge = 0;
  double t0 = 0, t1 = 0;
  int label = 0;
};
std::vector<TraceArc> boundary_trace(const PartitionSpec<double>& spec, const ToleranceConfig& tol = {});

/// max_i |int Phi_i . D chi_{A_i} - int Phi_i . D chi_{B_i}| with Phi_1 = 0,
/// Phi_2 = -Psi12, Phi_3 = Psi31. Throws InvalidComparison when the boundary
/// traces differ.
double flux_check(const PartitionSpec<double>& spec_a, const PartitionSpec<double>& spec_b,
                  const FieldAssignment<double>& fields, const ToleranceConfig& tol = {});

FieldAssignment<double> to_double(const FieldAssignment<QSqrt3>& fields);
PartitionSpec<double> to_double(const PartitionSpec<QSqrt3>& spec);

// ---------------------------------------------------------------------------
// Five-edge network and its channel competitor
// ---------------------------------------------------------------------------

/// Junctions (0,0) and (d,0), outer edges of length outer_len at 120 degrees.
/// Exact coordinates when d and outer_len are rational.
Network double_tripod(double d, double outer_len);

/// The competitor for the double tripod: central edge removed, the four outer
/// edges shortened by b = 2h/sqrt3 and joined by two segments parallel to the
/// central edge at distance h. Labels of the two side faces must agree.
PartitionSpec<double> channel_competitor(const PartitionDomain<double>& domain, const FaceColoring& coloring,
                                         double h, const ToleranceConfig& tol = {});

struct CounterexampleResult {
  double P_E = 0;
  double P_F = 0;
  double delta_P = 0;
  bool improves = false;
  PartitionSpec<double> E;
  PartitionSpec<double> F;
};

/// Perimeters of the double tripod partition and its channel competitor in
/// the (unthresholded) tube of width delta. improves <=> delta_P > eps_len.
/// Throws InvalidGeometry when the competitor does not fit in the tube.
CounterexampleResult counterexample(double d, double outer_len, double h, double delta,
                                    const ToleranceConfig& tol = {});

}  // namespace calnet
