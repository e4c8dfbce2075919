#pragma once

#include <cstdint>
#include <vector>

#include "regmod/composition.hpp"
#include "regmod/generators.hpp"
#include "regmod/metric.hpp"
#include "regmod/setmap.hpp"

namespace regmod::testing {

inline SpaceRef integers(std::size_t n) { return grid_line(n); }

// x -> {2x} from {0..4} onto {0,2,4,6,8}. The codomain is the image so that every
// y has a preimage and reg stays finite.
inline SetMap doubling() {
  return SetMap::from_rule(grid_line(5), line_space({0, 2, 4, 6, 8}), [](Index x) { return std::vector<Index>{x}; });
}

// F1(x) = {2x}, F2(x) = {x}, G(y1,y2) = {y1 + y2} on integer grids; H(x) = {3x}.
struct SumInstance {
  SpaceRef X = grid_line(4);
  SpaceRef Y1 = grid_line(7);
  SpaceRef Y2 = grid_line(4);
  SpaceRef Z = grid_line(10);
  SetMap f1 = SetMap::from_rule(X, Y1, [](Index x) { return std::vector<Index>{2 * x}; });
  SetMap f2 = SetMap::from_rule(X, Y2, [](Index x) { return std::vector<Index>{x}; });
  BiParamSetMap g = BiParamSetMap::from_rule(Y1, Y2, Z, [](Index a, Index b) { return std::vector<Index>{a + b}; });
};

inline std::vector<Index> to_vec(std::span<const Index> s) { return {s.begin(), s.end()}; }

}  // namespace regmod::testing
