#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "regmod/ext_real.hpp"
#include "regmod/report.hpp"
#include "regmod/tolerance.hpp"

namespace regmod {

using Index = std::size_t;

// Finite metric space: labelled points and a dense distance matrix.
// The constructor checks shape and entry sanity (finite, nonnegative); the metric
// axioms are checked by validate_metric, and make_space refuses spaces that fail it.
class MetricSpace {
 public:
  MetricSpace(std::vector<std::string> labels, std::vector<double> dist_row_major);

  [[nodiscard]] std::size_t size() const { return labels_.size(); }
  [[nodiscard]] double d(Index i, Index j) const { return dist_[i * size() + j]; }
  [[nodiscard]] std::span<const double> row(Index i) const {
    return {dist_.data() + i * size(), size()};
  }
  [[nodiscard]] const std::string& label(Index i) const { return labels_.at(i); }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] std::vector<std::vector<double>> matrix() const;

  // Largest pairwise distance (0 for a one-point space).
  [[nodiscard]] double diameter() const;
  // Distance from i to its nearest other point; +inf for a one-point space.
  [[nodiscard]] double isolation_radius(Index i) const;
  // Sorted distinct positive pairwise distances.
  [[nodiscard]] std::vector<double> realized_distances() const;
  // Largest distance from i to any point.
  [[nodiscard]] double eccentricity(Index i) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> dist_;
};

using SpaceRef = std::shared_ptr<const MetricSpace>;

// Builds a space and refuses it unless validate_metric passes.
SpaceRef make_space(std::vector<std::string> labels, std::vector<std::vector<double>> dist,
                    const Tolerance& tol = default_tolerance());
// Points of the real line at the given coordinates, |.| distances, labels from coordinates.
SpaceRef line_space(const std::vector<double>& coords);
// origin + k*step for k = 0..n-1.
SpaceRef grid_line(std::size_t n, double step = 1.0, double origin = 0.0);
// Points in R^k with the Euclidean distance.
SpaceRef euclidean_space(const std::vector<std::vector<double>>& points);

AuditReport validate_metric(const MetricSpace& m, const Tolerance& tol = default_tolerance());

// Subset of a space's points. Members are kept sorted and unique.
class PointSet {
 public:
  PointSet(SpaceRef space, std::vector<Index> members);
  static PointSet empty(SpaceRef space) { return PointSet(std::move(space), {}); }
  static PointSet all(SpaceRef space);

  [[nodiscard]] const SpaceRef& space() const { return space_; }
  [[nodiscard]] std::span<const Index> members() const { return members_; }
  [[nodiscard]] bool contains(Index i) const;
  [[nodiscard]] bool is_empty() const { return members_.empty(); }
  [[nodiscard]] std::size_t size() const { return members_.size(); }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.space_ == b.space_ && a.members_ == b.members_;
  }

 private:
  SpaceRef space_;
  std::vector<Index> members_;
};

// Distance from a point to a set given by sorted indices; +inf for the empty set.
ExtReal dist_to(const MetricSpace& m, Index x, std::span<const Index> set);
// Excess between index sets of one space; 0 when a is empty.
ExtReal excess_of(const MetricSpace& m, std::span<const Index> a, std::span<const Index> b);

ExtReal dist_point_set(Index x, const PointSet& a);
ExtReal excess(const PointSet& a, const PointSet& b);
PointSet ball(const SpaceRef& space, Index x, double r, bool closed);
// Indices with d(x,.) < r (or <= r when closed); used by enumeration loops.
std::vector<Index> ball_indices(const MetricSpace& m, Index x, double r, bool closed = false);

enum class Combiner { sum, weighted_max };

// Metric on a Cartesian product. Weights multiply factor distances; a weight of +inf
// is allowed for on-the-fly evaluation (the limit metric that separates distinct
// values of that factor infinitely), but such products cannot be materialized.
struct ProductMetric {
  std::vector<SpaceRef> factors;
  std::vector<double> weights;
  Combiner combiner = Combiner::sum;

  static ProductMetric additive(std::vector<SpaceRef> factors);
  static ProductMetric weighted_max(std::vector<SpaceRef> factors, std::vector<double> weights);

  [[nodiscard]] std::size_t point_count() const;
  [[nodiscard]] double distance(std::span<const Index> a, std::span<const Index> b) const;
  // Mixed-radix encoding, first factor most significant.
  [[nodiscard]] Index encode(std::span<const Index> coords) const;
  [[nodiscard]] std::vector<Index> decode(Index flat) const;
};

// Materializes the product; throws BudgetExceeded when the point count exceeds the
// enumeration budget (or the explicit budget when nonzero).
SpaceRef product_space(const ProductMetric& pm, std::size_t budget = 0);

}  // namespace regmod
