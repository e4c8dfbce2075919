#include "regmod/setmap.hpp"

#include <algorithm>
#include <limits>

#include "regmod/errors.hpp"

namespace regmod {

SetMap::SetMap(SpaceRef dom, SpaceRef cod, std::vector<std::pair<Index, Index>> graph)
    : dom_(std::move(dom)), cod_(std::move(cod)), graph_(std::move(graph)) {
  if (!dom_ || !cod_) throw InputError("SetMap needs both spaces");
  std::sort(graph_.begin(), graph_.end());
  graph_.erase(std::unique(graph_.begin(), graph_.end()), graph_.end());
  fibers_.resize(dom_->size());
  preimages_.resize(cod_->size());
  for (auto [x, y] : graph_) {
    if (x >= dom_->size() || y >= cod_->size()) throw InputError("SetMap graph pair out of range");
    fibers_[x].push_back(y);
    preimages_[y].push_back(x);
  }
}

SetMap SetMap::from_rule(SpaceRef dom, SpaceRef cod, const std::function<std::vector<Index>(Index)>& rule) {
  std::vector<std::pair<Index, Index>> graph;
  for (Index x = 0; x < dom->size(); ++x)
    for (Index y : rule(x)) graph.emplace_back(x, y);
  return SetMap(std::move(dom), std::move(cod), std::move(graph));
}

SetMap SetMap::identity(const SpaceRef& space) {
  return from_rule(space, space, [](Index x) { return std::vector<Index>{x}; });
}

bool SetMap::contains(Index x, Index y) const {
  auto f = fiber(x);
  return std::binary_search(f.begin(), f.end(), y);
}

BiParamSetMap::BiParamSetMap(SpaceRef dom1, SpaceRef dom2, SpaceRef cod, std::vector<std::array<Index, 3>> graph)
    : dom1_(std::move(dom1)), dom2_(std::move(dom2)), cod_(std::move(cod)), graph_(std::move(graph)) {
  if (!dom1_ || !dom2_ || !cod_) throw InputError("BiParamSetMap needs three spaces");
  std::sort(graph_.begin(), graph_.end());
  graph_.erase(std::unique(graph_.begin(), graph_.end()), graph_.end());
  fibers_.resize(dom1_->size() * dom2_->size());
  for (const auto& t : graph_) {
    if (t[0] >= dom1_->size() || t[1] >= dom2_->size() || t[2] >= cod_->size())
      throw InputError("BiParamSetMap triple out of range");
    fibers_[t[0] * dom2_->size() + t[1]].push_back(t[2]);
  }
}

BiParamSetMap BiParamSetMap::from_rule(SpaceRef dom1, SpaceRef dom2, SpaceRef cod,
                                       const std::function<std::vector<Index>(Index, Index)>& rule) {
  std::vector<std::array<Index, 3>> graph;
  for (Index a = 0; a < dom1->size(); ++a)
    for (Index b = 0; b < dom2->size(); ++b)
      for (Index z : rule(a, b)) graph.push_back({a, b, z});
  return BiParamSetMap(std::move(dom1), std::move(dom2), std::move(cod), std::move(graph));
}

bool BiParamSetMap::contains(Index y1, Index y2, Index z) const {
  auto f = fiber(y1, y2);
  return std::binary_search(f.begin(), f.end(), z);
}

PointSet image(const SetMap& f, const PointSet& a) {
  if (a.space() != f.dom()) throw DomainMismatch("image: set is not in the map's domain");
  std::vector<Index> out;
  for (Index x : a.members()) {
    auto fib = f.fiber(x);
    out.insert(out.end(), fib.begin(), fib.end());
  }
  return PointSet(f.cod(), std::move(out));
}

SetMap inverse(const SetMap& f) {
  std::vector<std::pair<Index, Index>> g;
  g.reserve(f.graph().size());
  for (auto [x, y] : f.graph()) g.emplace_back(y, x);
  return SetMap(f.cod(), f.dom(), std::move(g));
}

SetMap pair(const SetMap& f1, const SetMap& f2, Combiner combiner) {
  if (f1.dom() != f2.dom()) throw DomainMismatch("pair: maps have different domains");
  ProductMetric pm{{f1.cod(), f2.cod()}, {1.0, 1.0}, combiner};
  SpaceRef cod = product_space(pm);
  std::vector<std::pair<Index, Index>> g;
  for (Index x = 0; x < f1.dom()->size(); ++x)
    for (Index a : f1.fiber(x))
      for (Index b : f2.fiber(x)) {
        const Index c[2] = {a, b};
        g.emplace_back(x, pm.encode(c));
      }
  return SetMap(f1.dom(), std::move(cod), std::move(g));
}

void check_composable(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g) {
  if (f1.dom() != f2.dom()) throw DomainMismatch("F1 and F2 have different domains");
  if (f1.cod() != g.dom1()) throw DomainMismatch("F1 codomain is not the first argument space of G");
  if (f2.cod() != g.dom2()) throw DomainMismatch("F2 codomain is not the second argument space of G");
}

SetMap compose_H(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g) {
  check_composable(f1, f2, g);
  std::vector<std::pair<Index, Index>> out;
  for (Index x = 0; x < f1.dom()->size(); ++x)
    for (Index a : f1.fiber(x))
      for (Index b : f2.fiber(x))
        for (Index z : g.fiber(a, b)) out.emplace_back(x, z);
  return SetMap(f1.dom(), g.cod(), std::move(out));
}

ProductMetric r_domain_metric(const SetMap& f1, const SetMap& f2) {
  return ProductMetric::additive({f1.dom(), f1.cod(), f2.cod()});
}

ProductMetric d0_metric(const SetMap& f1, const SetMap& f2, double m, double l) {
  const double w2 = l > 0.0 ? 1.0 / l : std::numeric_limits<double>::infinity();
  return ProductMetric::weighted_max({f1.dom(), f1.cod(), f2.cod()}, {1.0, m, w2});
}

SetMap build_R(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, const std::optional<ProductMetric>& pm_in) {
  check_composable(f1, f2, g);
  const ProductMetric pm = pm_in ? *pm_in : r_domain_metric(f1, f2);
  if (pm.factors.size() != 3 || pm.factors[0] != f1.dom() || pm.factors[1] != f1.cod() || pm.factors[2] != f2.cod())
    throw DomainMismatch("build_R: product metric factors must be (X, Y1, Y2)");
  SpaceRef dom = product_space(pm);
  std::vector<std::pair<Index, Index>> out;
  for (Index x = 0; x < f1.dom()->size(); ++x)
    for (Index a : f1.fiber(x))
      for (Index b : f2.fiber(x)) {
        const Index c[3] = {x, a, b};
        const Index t = pm.encode(c);
        for (Index z : g.fiber(a, b)) out.emplace_back(t, z);
      }
  return SetMap(std::move(dom), g.cod(), std::move(out));
}

SetMap slice(const BiParamSetMap& g, SliceSide which, Index value) {
  const bool first = which == SliceSide::fix_first;
  const SpaceRef& fixed = first ? g.dom1() : g.dom2();
  if (value >= fixed->size()) throw InputError("slice: value out of range");
  const SpaceRef& moving = first ? g.dom2() : g.dom1();
  std::vector<std::pair<Index, Index>> out;
  for (Index u = 0; u < moving->size(); ++u)
    for (Index z : first ? g.fiber(value, u) : g.fiber(u, value)) out.emplace_back(u, z);
  return SetMap(moving, g.cod(), std::move(out));
}

}  // namespace regmod
