#pragma once

#include <string>

#include "calnet/network.hpp"
#include "calnet/partitions.hpp"

namespace calnet::svg {

inline constexpr const char* kVersion = "calnet 0.1.0";

std::string network_svg(const Network& net);

/// Region fills, interfaces, and (when given) the three fields as arrows at
/// the cell centroids.
std::string partition_svg(const PartitionSpec<double>& spec, const FieldAssignment<double>* fields = nullptr);

/// E and F side by side.
std::string counterexample_svg(const CounterexampleResult& result);

void write_file(const std::string& path, const std::string& content);

}  // namespace calnet::svg
