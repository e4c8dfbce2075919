#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regmod/io.hpp"

namespace regmod {

// Families: grid-linear, random-metric, random-relation, polyhedral-linear,
// fixedpoint-pair, tangency-adversarial. Params are family-specific (see the README).
struct GeneratorSpec {
  std::string family;
  Json params = Json::object();
  std::uint64_t seed = 0;
};

const std::vector<std::string>& generator_families();

// Deterministic under the seed; every object is validated before it is returned.
// Oracle values, base points and suggested windows go into meta.
Instance generate(const GeneratorSpec& spec);

// Floyd-Warshall closure of a symmetric nonnegative weight matrix: the largest metric below it.
std::vector<std::vector<double>> shortest_path_metric(std::vector<std::vector<double>> w);

}  // namespace regmod
