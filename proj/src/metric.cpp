#include "regmod/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "regmod/errors.hpp"

namespace regmod {

namespace {

std::string coord_label(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void require_same_space(const SpaceRef& a, const SpaceRef& b, const char* what) {
  if (a != b) throw DomainMismatch(std::string(what) + ": operands live in different spaces");
}

}  // namespace

MetricSpace::MetricSpace(std::vector<std::string> labels, std::vector<double> dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw InputError("metric space must have at least one point");
  if (dist_.size() != n * n) throw InputError("distance matrix is not square with one row per label");
  for (double v : dist_) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("distance entries must be finite and nonnegative");
  }
}

std::vector<std::vector<double>> MetricSpace::matrix() const {
  std::vector<std::vector<double>> out(size());
  for (Index i = 0; i < size(); ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

double MetricSpace::diameter() const {
  return dist_.empty() ? 0.0 : *std::max_element(dist_.begin(), dist_.end());
}

double MetricSpace::isolation_radius(Index i) const {
  double best = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < size(); ++j) {
    if (j != i) best = std::min(best, d(i, j));
  }
  return best;
}

double MetricSpace::eccentricity(Index i) const {
  auto r = row(i);
  return *std::max_element(r.begin(), r.end());
}

std::vector<double> MetricSpace::realized_distances() const {
  std::vector<double> out;
  for (Index i = 0; i < size(); ++i)
    for (Index j = i + 1; j < size(); ++j) out.push_back(d(i, j));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AuditReport validate_metric(const MetricSpace& m, const Tolerance& tol) {
  AuditReport rep;
  rep.kind = "validate_metric";
  const std::size_t n = m.size();
  for (Index i = 0; i < n; ++i) {
    if (m.d(i, i) > tol.abs) {
      rep.fail_with("nonzero-diagonal", {double(i)});
      return rep;
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::fabs(m.d(i, j) - m.d(j, i)) > tol.abs) {
        rep.fail_with("asymmetry", {double(i), double(j)});
        return rep;
      }
      if (m.d(i, j) <= tol.abs) {
        rep.fail_with("indiscernible-pair", {double(i), double(j)});
        return rep;
      }
    }
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) {
        if (m.d(i, k) > m.d(i, j) + m.d(j, k) + tol.abs) {
          rep.fail_with("triangle", {double(i), double(j), double(k)});
          return rep;
        }
      }
  return rep;
}

SpaceRef make_space(std::vector<std::string> labels, std::vector<std::vector<double>> dist,
                    const Tolerance& tol) {
  std::vector<double> flat;
  for (const auto& r : dist) {
    if (r.size() != dist.size()) throw InputError("distance matrix is not square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  auto space = std::make_shared<const MetricSpace>(std::move(labels), std::move(flat));
  AuditReport rep = validate_metric(*space, tol);
  if (!rep.passed()) {
    std::ostringstream os;
    os << "not a metric: " << rep.witnesses.front().role;
    for (double v : rep.witnesses.front().values) os << ' ' << v;
    throw InputError(os.str());
  }
  return space;
}

SpaceRef line_space(const std::vector<double>& coords) {
  const std::size_t n = coords.size();
  std::vector<std::string> labels;
  std::vector<double> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(coord_label(coords[i]));
    for (std::size_t j = 0; j < n; ++j) flat[i * n + j] = std::fabs(coords[i] - coords[j]);
  }
  auto space = std::make_shared<const MetricSpace>(std::move(labels), std::move(flat));
  if (!validate_metric(*space).passed()) throw InputError("line_space: repeated coordinates");
  return space;
}

SpaceRef grid_line(std::size_t n, double step, double origin) {
  std::vector<double> coords(n);
  for (std::size_t k = 0; k < n; ++k) coords[k] = origin + double(k) * step;
  return line_space(coords);
}

SpaceRef euclidean_space(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  std::vector<std::string> labels;
  std::vector<double> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string lab = "(";
    for (std::size_t c = 0; c < points[i].size(); ++c) lab += (c ? "," : "") + coord_label(points[i][c]);
    labels.push_back(lab + ")");
    for (std::size_t j = 0; j < n; ++j) {
      if (points[j].size() != points[i].size()) throw InputError("euclidean_space: mixed dimensions");
      double s = 0.0;
      for (std::size_t c = 0; c < points[i].size(); ++c) s += (points[i][c] - points[j][c]) * (points[i][c] - points[j][c]);
      flat[i * n + j] = std::sqrt(s);
    }
  }
  auto space = std::make_shared<const MetricSpace>(std::move(labels), std::move(flat));
  if (!validate_metric(*space).passed()) throw InputError("euclidean_space: repeated points");
  return space;
}

PointSet::PointSet(SpaceRef space, std::vector<Index> members) : space_(std::move(space)), members_(std::move(members)) {
  if (!space_) throw InputError("PointSet without a space");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.back() >= space_->size()) throw InputError("PointSet member out of range");
}

PointSet PointSet::all(SpaceRef space) {
  std::vector<Index> m(space->size());
  for (Index i = 0; i < m.size(); ++i) m[i] = i;
  return PointSet(std::move(space), std::move(m));
}

bool PointSet::contains(Index i) const { return std::binary_search(members_.begin(), members_.end(), i); }

ExtReal dist_to(const MetricSpace& m, Index x, std::span<const Index> set) {
  if (set.empty()) return ExtReal::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (Index a : set) best = std::min(best, m.d(x, a));
  return ExtReal(best);
}

ExtReal excess_of(const MetricSpace& m, std::span<const Index> a, std::span<const Index> b) {
  ExtReal worst = ExtReal::zero();
  for (Index p : a) {
    worst = max(worst, dist_to(m, p, b));
    if (worst.is_infinite()) break;
  }
  return worst;
}

ExtReal dist_point_set(Index x, const PointSet& a) {
  if (x >= a.space()->size()) throw DomainMismatch("dist_point_set: point not in the set's space");
  return dist_to(*a.space(), x, a.members());
}

ExtReal excess(const PointSet& a, const PointSet& b) {
  require_same_space(a.space(), b.space(), "excess");
  return excess_of(*a.space(), a.members(), b.members());
}

std::vector<Index> ball_indices(const MetricSpace& m, Index x, double r, bool closed) {
  std::vector<Index> out;
  auto row = m.row(x);
  for (Index u = 0; u < m.size(); ++u) {
    if (closed ? row[u] <= r : row[u] < r) out.push_back(u);
  }
  return out;
}

PointSet ball(const SpaceRef& space, Index x, double r, bool closed) {
  if (!(r > 0.0)) throw PreconditionError("ball: radius must be positive");
  if (x >= space->size()) throw InputError("ball: center out of range");
  return PointSet(space, ball_indices(*space, x, r, closed));
}

ProductMetric ProductMetric::additive(std::vector<SpaceRef> factors) {
  std::vector<double> w(factors.size(), 1.0);
  return {std::move(factors), std::move(w), Combiner::sum};
}

ProductMetric ProductMetric::weighted_max(std::vector<SpaceRef> factors, std::vector<double> weights) {
  return {std::move(factors), std::move(weights), Combiner::weighted_max};
}

std::size_t ProductMetric::point_count() const {
  std::size_t n = 1;
  for (const auto& f : factors) {
    if (n > std::numeric_limits<std::size_t>::max() / f->size()) return std::numeric_limits<std::size_t>::max();
    n *= f->size();
  }
  return n;
}

double ProductMetric::distance(std::span<const Index> a, std::span<const Index> b) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const double dk = factors[k]->d(a[k], b[k]);
    const double term = dk == 0.0 ? 0.0 : weights[k] * dk;
    acc = combiner == Combiner::sum ? acc + term : std::max(acc, term);
  }
  return acc;
}

Index ProductMetric::encode(std::span<const Index> coords) const {
  Index flat = 0;
  for (std::size_t k = 0; k < factors.size(); ++k) flat = flat * factors[k]->size() + coords[k];
  return flat;
}

std::vector<Index> ProductMetric::decode(Index flat) const {
  std::vector<Index> c(factors.size());
  for (std::size_t k = factors.size(); k-- > 0;) {
    c[k] = flat % factors[k]->size();
    flat /= factors[k]->size();
  }
  return c;
}

SpaceRef product_space(const ProductMetric& pm, std::size_t budget) {
  if (pm.factors.empty()) throw InputError("product_space: no factors");
  if (pm.weights.size() != pm.factors.size()) throw InputError("product_space: one weight per factor required");
  for (double w : pm.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("product_space: weights must be positive and finite");
  }
  const std::size_t limit = budget ? budget : enumeration_budget();
  const std::size_t n = pm.point_count();
  if (n > limit) throw BudgetExceeded("product_space: " + std::to_string(n) + " points exceeds budget " + std::to_string(limit));
  std::vector<std::vector<Index>> coords(n);
  std::vector<std::string> labels(n);
  for (Index p = 0; p < n; ++p) {
    coords[p] = pm.decode(p);
    std::string lab = "(";
    for (std::size_t k = 0; k < coords[p].size(); ++k) lab += (k ? "," : "") + pm.factors[k]->label(coords[p][k]);
    labels[p] = lab + ")";
  }
  std::vector<double> flat(n * n);
  for (Index p = 0; p < n; ++p)
    for (Index q = p; q < n; ++q) flat[p * n + q] = flat[q * n + p] = pm.distance(coords[p], coords[q]);
  return std::make_shared<const MetricSpace>(std::move(labels), std::move(flat));
}

}  // namespace regmod
