#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "regmod/metric.hpp"

namespace regmod {

// Multifunction between finite spaces, stored as its graph. Fibers and preimages are
// indexed both ways so that d(y,F(x)) and d(x,F^-1(y)) are O(|fiber|).
class SetMap {
 public:
  SetMap(SpaceRef dom, SpaceRef cod, std::vector<std::pair<Index, Index>> graph);
  static SetMap from_rule(SpaceRef dom, SpaceRef cod, const std::function<std::vector<Index>(Index)>& rule);
  static SetMap identity(const SpaceRef& space);

  [[nodiscard]] const SpaceRef& dom() const { return dom_; }
  [[nodiscard]] const SpaceRef& cod() const { return cod_; }
  [[nodiscard]] const std::vector<std::pair<Index, Index>>& graph() const { return graph_; }
  [[nodiscard]] std::span<const Index> fiber(Index x) const { return fibers_.at(x); }
  [[nodiscard]] std::span<const Index> preimage(Index y) const { return preimages_.at(y); }
  [[nodiscard]] bool contains(Index x, Index y) const;

  // d(y, F(x)) and d(x, F^-1(y)).
  [[nodiscard]] ExtReal dist_to_image(Index x, Index y) const { return dist_to(*cod_, y, fiber(x)); }
  [[nodiscard]] ExtReal dist_to_preimage(Index x, Index y) const { return dist_to(*dom_, x, preimage(y)); }

 private:
  SpaceRef dom_;
  SpaceRef cod_;
  std::vector<std::pair<Index, Index>> graph_;
  std::vector<std::vector<Index>> fibers_;
  std::vector<std::vector<Index>> preimages_;
};

// G : Y1 x Y2 => Z as a set of triples.
class BiParamSetMap {
 public:
  BiParamSetMap(SpaceRef dom1, SpaceRef dom2, SpaceRef cod, std::vector<std::array<Index, 3>> graph);
  static BiParamSetMap from_rule(SpaceRef dom1, SpaceRef dom2, SpaceRef cod,
                                 const std::function<std::vector<Index>(Index, Index)>& rule);

  [[nodiscard]] const SpaceRef& dom1() const { return dom1_; }
  [[nodiscard]] const SpaceRef& dom2() const { return dom2_; }
  [[nodiscard]] const SpaceRef& cod() const { return cod_; }
  [[nodiscard]] const std::vector<std::array<Index, 3>>& graph() const { return graph_; }
  [[nodiscard]] std::span<const Index> fiber(Index y1, Index y2) const { return fibers_.at(y1 * dom2_->size() + y2); }
  [[nodiscard]] bool contains(Index y1, Index y2, Index z) const;

 private:
  SpaceRef dom1_;
  SpaceRef dom2_;
  SpaceRef cod_;
  std::vector<std::array<Index, 3>> graph_;
  std::vector<std::vector<Index>> fibers_;
};

PointSet image(const SetMap& f, const PointSet& a);
SetMap inverse(const SetMap& f);

// (F1,F2)(x) = F1(x) x F2(x) into the materialized product of the codomains.
SetMap pair(const SetMap& f1, const SetMap& f2, Combiner combiner = Combiner::sum);

// H(x) = G(F1(x), F2(x)).
SetMap compose_H(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g);

// Default metric on X x Y1 x Y2 for R: the additive one.
ProductMetric r_domain_metric(const SetMap& f1, const SetMap& f2);
// d0 = max{d_X, m d_Y1, d_Y2 / l}; l = 0 gives an infinite weight on Y2.
ProductMetric d0_metric(const SetMap& f1, const SetMap& f2, double m, double l);

// R(x,y1,y2) = G(y1,y2) when (y1,y2) in F1(x) x F2(x), else empty. The domain is the
// materialized product under pm (additive by default); flat indices follow pm.encode.
SetMap build_R(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
               const std::optional<ProductMetric>& pm = std::nullopt);

enum class SliceSide { fix_first, fix_second };
// fix_first with value p gives y2 -> G(p, y2); fix_second gives y1 -> G(y1, p).
SetMap slice(const BiParamSetMap& g, SliceSide which, Index value);

// Shape checks shared by the composition operations; throw DomainMismatch.
void check_composable(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g);

}  // namespace regmod
