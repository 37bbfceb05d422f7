#pragma once

#include <json.hpp>

#include <string>

#include "calnet/comparison.hpp"
#include "calnet/currents.hpp"
#include "calnet/partitions.hpp"

namespace calnet::io {

using nlohmann::json;

// Coordinates may be JSON numbers or strings in Q(sqrt3) syntax ("1/2",
// "-sqrt3/2", "3/4+1/8*sqrt3"). A network read from JSON carries exact
// coordinates for every vertex and bend.

/// Throws InvalidInput with the offending path on malformed documents.
Network network_from_json(const json& j);
json to_json(const Network& net);

QuotientSpec quotient_from_json(const json& j);
json to_json(const QuotientSpec& q);

Embedding embedding_from_json(const json& j);
json to_json(const Embedding& e);

Polygon<double> polygon_from_json(const json& j);
Polygon<QSqrt3> exact_polygon_from_json(const json& j);

json scalar(double v);
json scalar(const QSqrt3& v);

template <class T>
json to_json(const Vec2<T>& p);
template <class T>
json to_json(const Polygon<T>& p);
template <class T>
json to_json(const LatticeCurrent<T>& c);
template <class T>
json to_json(const BoundaryMeasure<T>& b);
template <class T>
json to_json(const CalibrationReport<T>& r);
template <class T>
json to_json(const ComparisonCertificate<T>& c);
template <class T>
json to_json(const PartitionSpec<T>& s);
template <class T>
json to_json(const FieldAssignment<T>& f);
/// Trace records are summarized unless `with_traces`.
template <class T>
json to_json(const PartitionCalibrationReport<T>& r, bool with_traces = false);

json to_json(const MinimalityCertificate& c);
json to_json(const GroupElement& g);
json to_json(const SteinerSolution& s);
json to_json(const CounterexampleResult& r);

/// Reads a whole file, or standard input for "-". Throws InvalidInput.
std::string read_text(const std::string& path);
/// Parses JSON text, reporting line and column on failure (InvalidInput).
json parse(const std::string& text, const std::string& origin);

}  // namespace calnet::io
