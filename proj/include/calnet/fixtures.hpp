#pragma once

#include <string>

#include "calnet/comparison.hpp"
#include "calnet/network.hpp"

namespace calnet::fixtures {

/// Three unit edges from the origin at 90, 210 and 330 degrees.
Network tripod();

/// Junctions (0,0) and (1,0) with outer edges of length 2 (total length 9).
Network double_tripod_unit();

/// Regular hexagon of side `side` centred at the origin, vertices at multiples
/// of 60 degrees, each with a radial stub of length `stub`.
Network hexagon_with_stubs(double side, double stub);

struct ComparisonFixture {
  std::string name;
  Network reference;
  Network competitor;
  QuotientSpec quotient;
};

/// Double tripod with junctions (0,0), (2,0) against a competitor whose left
/// junction is blown up into a triangle with bent sides and whose central
/// edge carries a two-sided bubble.
ComparisonFixture richer_triangle_bubble();

/// Double tripod (length 9) against the cross of diagonals through (1/2, 0).
ComparisonFixture poorer_crossing_diagonals();

/// Hexagon of radius 3/4 with stubs to radius 1 against the six-armed star.
ComparisonFixture poorer_hexagon_star();

}  // namespace calnet::fixtures
