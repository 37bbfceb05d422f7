#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calnet/currents.hpp"
#include "calnet/network.hpp"

namespace calnet {

template <class T>
struct ComparisonCertificate {
  T reference_length{};
  T competitor_length{};
  T competitor_mass{};
  std::optional<T> embedded_length;  // length of the copy of G inside H, when one was used
  bool boundary_match = false;
  bool verdict = false;
  std::vector<std::string> construction_log;
};

/// Multiplicity and orientation carried by one edge of the reference graph:
/// the current runs from -> to when `forward`, otherwise to -> from.
struct EdgeCharge {
  GroupElement g;
  bool forward = true;
};

/// Subgraph identified with a point. When `edges` is absent the subgraph is
/// induced by `vertices`.
struct CollapsedSubgraph {
  std::vector<std::string> vertices;
  std::optional<std::vector<std::size_t>> edges;
};

struct QuotientSpec {
  std::vector<CollapsedSubgraph> collapse;
  /// Reference endpoint id -> competitor vertex id. Empty: match by position.
  std::map<std::string, std::string> endpoint_map;
};

/// Image of the reference graph G inside the competitor graph H: vertices to
/// vertices and each edge to a path of H edges (index, traversed forward).
struct Embedding {
  std::map<std::string, std::string> vertex_map;
  std::map<std::size_t, std::vector<std::pair<std::size_t, bool>>> edge_paths;
};

/// Competitor on the same graph with the same endpoints. Each competitor edge
/// carries the multiplicity of the corresponding reference edge.
template <class T>
ComparisonCertificate<T> compare_same_topology(const Network& ref, const Network& comp,
                                               const ToleranceConfig& tol = {});

/// Restricts `comp` to the embedded copy of G and compares on the same graph.
ComparisonCertificate<double> compare_embedded_copy(const Network& ref, const Network& comp,
                                                    const Embedding& embedding, const ToleranceConfig& tol = {});

/// Selects paths and tripods inside the collapsed subgraphs of H so that the
/// remaining graph plus the selections is a copy of G.
Embedding find_embedded_copy(const Network& ref, const Network& comp, const QuotientSpec& quotient,
                             const ToleranceConfig& tol = {});

ComparisonCertificate<double> compare_quotient_richer(const Network& ref, const Network& comp,
                                                      const QuotientSpec& quotient, const ToleranceConfig& tol = {});

/// Competitor H homeomorphic to G with the given subgraphs of G collapsed.
ComparisonCertificate<double> compare_quotient_poorer(const Network& ref, const Network& comp,
                                                      const QuotientSpec& quotient, const ToleranceConfig& tol = {});

/// Same transfer with caller-supplied charges on the reference edges (the
/// minimality of `ref` is not required). Throws HypothesisViolation when a
/// collapsed subgraph has nonzero net charge or a collapsed edge point joins
/// edges with incompatible charges.
ComparisonCertificate<double> transfer_charges(const Network& ref, const std::vector<EdgeCharge>& charges,
                                               const Network& comp, const QuotientSpec& quotient,
                                               const ToleranceConfig& tol = {});

/// Net charge sum_{edges touching S} (+g at heads in S, -g at tails in S).
GroupElement collapsed_charge(const Network& ref, const std::vector<EdgeCharge>& charges,
                              const std::vector<std::size_t>& vertex_set);

/// Charges of the induced current of a minimal network (rotation included).
std::vector<EdgeCharge> induced_charges(const Network& ref, const ToleranceConfig& tol = {});

struct SteinerSolution {
  double length = 0;
  Network network;
  bool degenerate = false;
  std::size_t topology = 0;
};

/// Shortest full Steiner topology for 2..5 terminals (Unsupported above).
SteinerSolution steiner_oracle(const std::vector<Point2>& terminals, std::size_t max_terminals = 5);

}  // namespace calnet
