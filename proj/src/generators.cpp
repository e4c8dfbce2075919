#include "regmod/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <Eigen/SVD>

#include "regmod/errors.hpp"

namespace regmod {

namespace {

using Rng = std::mt19937_64;

std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  // Portable across standard libraries, unlike uniform_int_distribution.
  return lo + rng() % (hi - lo + 1);
}

double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

template <class T>
T param(const Json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("generator parameter '") + key + "' has the wrong type");
  }
}

void check_size(std::size_t n, const char* what) {
  if (n == 0) throw InputError(std::string(what) + ": size must be positive");
  if (n > enumeration_budget()) throw BudgetExceeded(std::string(what) + ": size exceeds the budget");
}

// Random dyadic weights in {1/8, ..., 2}, repaired to a metric.
SpaceRef random_metric_space(Rng& rng, std::size_t n) {
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w[i][j] = w[j][i] = double(uniform_int(rng, 1, 16)) / 8.0;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
  return make_space(std::move(labels), shortest_path_metric(std::move(w)));
}

SpaceRef integer_line(long lo, long hi, double h) {
  std::vector<double> c;
  for (long k = lo; k <= hi; ++k) c.push_back(double(k) * h);
  return line_space(c);
}

long floor_div(long a, long q) { return a >= 0 ? a / q : -((-a + q - 1) / q); }

// F(x) = {floor(a x)} on 0..n-1, or {floor(x / q)}; the codomain is the image.
Instance grid_linear(const Json& p) {
  const long n = param<long>(p, "n", 5);
  const long a = param<long>(p, "a", 0), q = param<long>(p, "q", 0);
  const double h = param<double>(p, "step", 1.0);
  if ((a > 0) == (q > 0)) throw InputError("grid-linear: give exactly one positive integer of 'a' and 'q'");
  if (!(h > 0.0)) throw InputError("grid-linear: step must be positive");
  if (param<bool>(p, "composition", false)) {
    // F1 as above on -N..N, F2(x) = b x, G(y1, y2) = y1 + kappa y2, base at 0.
    const long N = param<long>(p, "half_width", 200);
    const double hc = param<double>(p, "step", 1.0 / 64.0);
    const long b = param<long>(p, "b", 0), kappa = param<long>(p, "kappa", 0);
    check_size(std::size_t(2 * N + 1), "grid-linear");
    if (b < 0 || kappa < 0 || kappa > 1) throw InputError("grid-linear: need b >= 0 and kappa in {0, 1}");
    if (b * kappa != 0) throw InputError("grid-linear: composition suite needs b * kappa = 0");
    auto f1k = [&](long k) { return a > 0 ? a * k : floor_div(k, q); };
    Instance inst;
    auto X = integer_line(-N, N, hc);
    // Y1 is the image of F1; with a > 1 it is the sublattice a Z.
    std::vector<double> y1c, y2c;
    for (long k = -N; k <= N; ++k) y1c.push_back(double(f1k(k)) * hc);
    y1c.erase(std::unique(y1c.begin(), y1c.end()), y1c.end());
    for (long k = -N; k <= N; ++k) y2c.push_back(double(b * k) * hc);
    std::sort(y2c.begin(), y2c.end());
    y2c.erase(std::unique(y2c.begin(), y2c.end()), y2c.end());
    auto Y1 = line_space(y1c), Y2 = line_space(y2c);
    std::set<double> zc;
    for (double u : y1c)
      for (double v : y2c) zc.insert(u + double(kappa) * v);
    auto Z = line_space({zc.begin(), zc.end()});
    auto index_of = [](const std::vector<double>& c, double v) {
      return Index(std::lower_bound(c.begin(), c.end(), v) - c.begin());
    };
    const std::vector<double> zv(zc.begin(), zc.end());
    inst.spaces = {{"X", X}, {"Y1", Y1}, {"Y2", Y2}, {"Z", Z}};
    inst.maps.emplace("F1", SetMap::from_rule(X, Y1, [&](Index i) {
      return std::vector<Index>{index_of(y1c, double(f1k(long(i) - N)) * hc)};
    }));
    inst.maps.emplace("F2", SetMap::from_rule(X, Y2, [&](Index i) {
      return std::vector<Index>{index_of(y2c, double(b * (long(i) - N)) * hc)};
    }));
    inst.bimaps.emplace("G", BiParamSetMap::from_rule(Y1, Y2, Z, [&](Index u, Index v) {
      return std::vector<Index>{index_of(zv, y1c[u] + double(kappa) * y2c[v])};
    }));
    const double m = a > 0 ? 1.0 / double(a) : double(q);
    inst.meta["base"] = {Index(N), index_of(y1c, 0.0), index_of(y2c, 0.0), index_of(zv, 0.0)};
    inst.meta["oracle"] = {{"m", m}, {"l", double(b)}, {"lambda", 1.0}, {"eta", double(kappa)}, {"rho0", m}};
    inst.meta["window"] = double(N) * hc / 2.0;
    return inst;
  }
  check_size(std::size_t(n), "grid-linear");
  auto fk = [&](long k) { return a > 0 ? a * k : k / q; };
  std::vector<double> yc;
  for (long k = 0; k < n; ++k) yc.push_back(double(fk(k)) * h);
  yc.erase(std::unique(yc.begin(), yc.end()), yc.end());
  Instance inst;
  auto X = integer_line(0, n - 1, h);
  auto Y = line_space(yc);
  inst.spaces = {{"X", X}, {"Y", Y}};
  inst.maps.emplace("F", SetMap::from_rule(X, Y, [&](Index i) {
    return std::vector<Index>{Index(std::lower_bound(yc.begin(), yc.end(), double(fk(long(i))) * h) - yc.begin())};
  }));
  const double lip = a > 0 ? double(a) : (n > q ? 1.0 : 0.0);
  const double reg = a > 0 ? 1.0 / double(a) : double(q);
  inst.meta["base"] = {0, 0};
  inst.meta["oracle"] = {{"lip", lip}, {"reg", reg}, {"lop", 1.0 / reg}};
  return inst;
}

Instance random_metric(const Json& p, Rng& rng) {
  const auto n = param<std::size_t>(p, "n", 6);
  check_size(n, "random-metric");
  Instance inst;
  auto X = random_metric_space(rng, n);
  inst.spaces = {{"X", X}};
  // A field with dyadic values, some of them nonpositive and occasionally +inf.
  std::vector<double> f(n);
  for (auto& v : f) {
    const auto k = uniform_int(rng, 0, 19);
    v = k == 19 ? std::numeric_limits<double>::infinity() : double(int(k) - 4) / 4.0;
  }
  if (std::all_of(f.begin(), f.end(), [](double v) { return std::isinf(v); })) f[0] = 0.0;
  inst.fields.emplace("f", ScalarField(X, std::move(f)));
  return inst;
}

Instance random_relation(const Json& p, Rng& rng) {
  const auto nd = param<std::size_t>(p, "n_dom", 5), nc = param<std::size_t>(p, "n_cod", 5);
  const double density = param<double>(p, "density", 0.4);
  check_size(nd * nc, "random-relation");
  if (!(density >= 0.0 && density <= 1.0)) throw InputError("random-relation: density must lie in [0, 1]");
  Instance inst;
  auto X = random_metric_space(rng, nd);
  auto Y = random_metric_space(rng, nc);
  std::vector<std::pair<Index, Index>> pairs;
  for (Index x = 0; x < nd; ++x)
    for (Index y = 0; y < nc; ++y)
      if (uniform01(rng) < density) pairs.emplace_back(x, y);
  if (pairs.empty()) pairs.emplace_back(0, 0);
  inst.meta["base"] = {pairs.front().first, pairs.front().second};
  inst.spaces = {{"X", X}, {"Y", Y}};
  inst.maps.emplace("F", SetMap(X, Y, std::move(pairs)));
  return inst;
}

MatrixXd dyadic_matrix(Rng& rng, int rows, int cols) {
  MatrixXd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = double(int(uniform_int(rng, 0, 16)) - 8) / 4.0;
  return a;
}

Instance polyhedral_linear(const Json& p, Rng& rng) {
  Instance inst;
  if (param<bool>(p, "composition", false)) {
    // F1 = alpha x, F2 = beta x, G = y1 + kappa y2 on the line.
    const double alpha = param<double>(p, "alpha", 2.0), beta = param<double>(p, "beta", 0.5),
                 kappa = param<double>(p, "kappa", -1.0);
    if (alpha == 0.0) throw InputError("polyhedral-linear: alpha must be nonzero");
    inst.polymaps.emplace("F1", PolyMap::linear(MatrixXd::Constant(1, 1, alpha)));
    inst.polymaps.emplace("F2", PolyMap::linear(MatrixXd::Constant(1, 1, beta)));
    MatrixXd g(1, 2);
    g << 1.0, kappa;
    inst.polymaps.emplace("G", PolyMap::linear(g));
    inst.meta["oracle"] = {{"L", 1.0 / std::fabs(alpha)},
                           {"C", 1.0},
                           {"M", std::fabs(beta)},
                           {"D", std::fabs(kappa)},
                           {"c_limit", std::fabs(alpha) - std::fabs(beta * kappa)}};
    return inst;
  }
  const int m = param<int>(p, "rows", int(uniform_int(rng, 1, 3)));
  const int n = param<int>(p, "cols", int(uniform_int(rng, std::uint64_t(m), 3)));
  if (m <= 0 || n <= 0 || m > n) throw InputError("polyhedral-linear: need 0 < rows <= cols");
  MatrixXd a;
  Eigen::VectorXd sv;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) throw SolverError("polyhedral-linear: no well-conditioned draw");
    a = dyadic_matrix(rng, m, n);
    sv = Eigen::JacobiSVD<MatrixXd>(a).singularValues();
    if (sv.minCoeff() >= 0.25) break;
  }
  inst.polymaps.emplace("F", PolyMap::linear(a));
  inst.meta["A"] = matrix_to_json(a);
  inst.meta["oracle"] = {{"aubin_alpha", sv.maxCoeff()}, {"open_alpha", sv.minCoeff()}};
  return inst;
}

// F1(x) = a x onto Y = a h Z, F2 = {c}; Fix = {c / a}.
Instance fixedpoint_pair(const Json& p, Rng& rng) {
  const long N = param<long>(p, "half_width", 160);
  const double h = param<double>(p, "step", 1.0 / 128.0);
  const long a = param<long>(p, "a", long(uniform_int(rng, 1, 2)));
  const long c = param<long>(p, "c", long(uniform_int(rng, 0, 4)) - 2);
  const long k0 = param<long>(p, "x_offset", long(uniform_int(rng, 1, 2)) * (uniform_int(rng, 0, 1) ? 1 : -1));
  check_size(std::size_t(2 * N + 1), "fixedpoint-pair");
  if (a <= 0 || std::labs(c) > N || std::labs(k0) > N) throw InputError("fixedpoint-pair: parameters out of range");
  Instance inst;
  auto X = integer_line(-N, N, h);
  std::vector<double> yc;
  for (long k = -N; k <= N; ++k) yc.push_back(double(a * k) * h);
  auto Y = line_space(yc);
  inst.spaces = {{"X", X}, {"Y", Y}};
  inst.maps.emplace("F1", SetMap::from_rule(X, Y, [](Index i) { return std::vector<Index>{i}; }));
  inst.maps.emplace("F2", SetMap::from_rule(X, Y, [&](Index) { return std::vector<Index>{Index(c + N)}; }));
  // x = k0 h + c / a sits off Fix unless k0 = 0; keep it on the X lattice.
  const long xk = c + k0;
  if (std::labs(xk) > N) throw InputError("fixedpoint-pair: base outside the grid");
  inst.meta["base"] = {Index(xk + N), Index(xk + N), Index(c + N)};
  inst.meta["window"] = double(N) * h / 2.0;
  inst.meta["oracle"] = {{"m", 1.0 / double(a)}, {"l", 0.0}, {"fix", double(c) * h}};
  return inst;
}

Instance tangency_adversarial(const Json& p) {
  const double theta = param<double>(p, "theta", 0.05);
  if (!(theta > 0.0)) throw InputError("tangency-adversarial: theta must be positive");
  Instance inst;
  MatrixXd a1(1, 2), a2(1, 2);
  a1 << 0.0, 1.0;
  a2 << theta, -1.0;
  inst.polyhedra.emplace("S1", Polyhedron(a1, VectorXd::Zero(1)));
  inst.polyhedra.emplace("S2", Polyhedron(a2, VectorXd::Zero(1)));
  inst.meta["xbar"] = {0.0, 0.0};
  inst.meta["oracle"] = {{"worst_ratio", std::sqrt(1.0 + theta * theta) / theta}};
  return inst;
}

}  // namespace

std::vector<std::vector<double>> shortest_path_metric(std::vector<std::vector<double>> w) {
  const std::size_t n = w.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i][j] = std::min(w[i][j], w[i][k] + w[k][j]);
  return w;
}

const std::vector<std::string>& generator_families() {
  static const std::vector<std::string> f{"grid-linear",       "random-metric",   "random-relation",
                                          "polyhedral-linear", "fixedpoint-pair", "tangency-adversarial"};
  return f;
}

Instance generate(const GeneratorSpec& spec) {
  Rng rng(spec.seed);
  if (!spec.params.is_object()) throw InputError("generator params must be an object");
  Instance inst;
  if (spec.family == "grid-linear") inst = grid_linear(spec.params);
  else if (spec.family == "random-metric") inst = random_metric(spec.params, rng);
  else if (spec.family == "random-relation") inst = random_relation(spec.params, rng);
  else if (spec.family == "polyhedral-linear") inst = polyhedral_linear(spec.params, rng);
  else if (spec.family == "fixedpoint-pair") inst = fixedpoint_pair(spec.params, rng);
  else if (spec.family == "tangency-adversarial") inst = tangency_adversarial(spec.params);
  else throw InputError("unknown generator family '" + spec.family + "'");
  inst.meta["family"] = spec.family;
  inst.meta["seed"] = spec.seed;
  inst.meta["params"] = spec.params;
  // Validate on emit: re-parse the serialized bundle through the checked loaders.
  return instance_from_json(instance_to_json(inst));
}

}  // namespace regmod
