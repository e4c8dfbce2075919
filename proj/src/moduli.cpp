#include "regmod/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regmod/errors.hpp"

namespace regmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_on_graph(const SetMap& f, std::pair<Index, Index> base) {
  if (base.first >= f.dom()->size() || base.second >= f.cod()->size() || !f.contains(base.first, base.second))
    throw PreconditionError("base point is not on the graph");
}

ModulusReport make_report(ModulusKind kind, const ModulusValue& v, const ScaleWindow& w, std::vector<Index> base) {
  ModulusReport r;
  r.kind = kind;
  r.value = v.value;
  r.window = w;
  r.basepoint = std::move(base);
  r.vacuous = v.vacuous;
  if (!v.witness.empty()) r.witnesses.push_back({kind == ModulusKind::lip || kind == ModulusKind::lip_x_unif ? "x,u,ratio"
                                                 : kind == ModulusKind::reg || kind == ModulusKind::reg_x_unif ? "x,y,ratio"
                                                                                                                : "x,y,rho,y',rate",
                                                 v.witness});
  return r;
}

// 1/v with 1/0 = inf and 1/inf = 0.
double reciprocal(double v) {
  if (v == 0.0) return kInf;
  if (std::isinf(v)) return 0.0;
  return 1.0 / v;
}

}  // namespace

void ScaleWindow::validate() const {
  if (!(r_dom > 0.0) || !(r_cod > 0.0) || !(eps > 0.0) || (r_param && !(*r_param > 0.0)))
    throw PreconditionError("scale window radii must be positive");
}

const char* to_string(ModulusKind k) {
  switch (k) {
    case ModulusKind::lop: return "lop";
    case ModulusKind::lip: return "lip";
    case ModulusKind::reg: return "reg";
    case ModulusKind::lop_x_unif: return "lop_x_unif";
    case ModulusKind::lip_x_unif: return "lip_x_unif";
    case ModulusKind::reg_x_unif: return "reg_x_unif";
  }
  return "?";
}

ModulusValue reg_value(const SetMap& f, Index xc, Index yc, double r_dom, double r_cod) {
  const auto us = ball_indices(*f.dom(), xc, r_dom);
  const auto vs = ball_indices(*f.cod(), yc, r_cod);
  ModulusValue out;
  double best = 0.0;
  for (Index x : us) {
    if (f.fiber(x).empty()) continue;  // d(y,F(x)) = inf: no finite constraint
    for (Index y : vs) {
      const ExtReal den = f.dist_to_image(x, y);
      if (den.value() == 0.0) continue;
      out.vacuous = false;
      const ExtReal num = f.dist_to_preimage(x, y);
      if (num.is_infinite()) {
        out.value = ExtReal::infinity();
        out.witness = {double(x), double(y), kInf};
        return out;
      }
      const double q = num.value() / den.value();
      if (q > best || out.witness.empty()) {
        best = std::max(best, q);
        out.witness = {double(x), double(y), q};
      }
    }
  }
  out.value = ExtReal(best);
  return out;
}

ModulusValue lip_value(const SetMap& f, Index xc, Index yc, double r_dom, double r_cod) {
  const MetricSpace& dom = *f.dom();
  const auto us = ball_indices(dom, xc, r_dom);
  ModulusValue out;
  double best = 0.0;
  std::vector<Index> local;
  for (Index x : us) {
    local.clear();
    for (Index y : f.fiber(x))
      if (f.cod()->d(y, yc) < r_cod) local.push_back(y);
    if (local.empty()) continue;
    for (Index u : us) {
      if (u == x) continue;
      out.vacuous = false;
      const ExtReal e = excess_of(*f.cod(), local, f.fiber(u));
      if (e.is_infinite()) {
        out.value = ExtReal::infinity();
        out.witness = {double(x), double(u), kInf};
        return out;
      }
      const double q = e.value() / dom.d(x, u);
      if (q > best || out.witness.empty()) {
        best = std::max(best, q);
        out.witness = {double(x), double(u), q};
      }
    }
  }
  out.value = ExtReal(best);
  return out;
}

std::vector<double> openness_radii(const MetricSpace& dom, double eps) {
  const auto dists = dom.realized_distances();
  std::vector<double> rho;
  double prev = 0.0;
  for (double r : dists) {
    const double mid = 0.5 * (prev + r);
    if (mid > 0.0 && mid < eps) rho.push_back(mid);
    if (r < eps) rho.push_back(r);
    prev = r;
  }
  rho.push_back(eps);
  std::sort(rho.begin(), rho.end());
  rho.erase(std::unique(rho.begin(), rho.end()), rho.end());
  return rho;
}

ModulusValue lop_value(const SetMap& f, Index xc, Index yc, double r_dom, double r_cod, double eps) {
  const MetricSpace& dom = *f.dom();
  const MetricSpace& cod = *f.cod();
  const auto rhos = openness_radii(dom, eps);
  ModulusValue out;
  out.value = ExtReal::infinity();
  double best = kInf;
  std::vector<Index> by_dist(dom.size());
  std::vector<char> covered(cod.size());
  for (Index x : ball_indices(dom, xc, r_dom)) {
    std::vector<Index> ys;
    for (Index y : f.fiber(x))
      if (cod.d(y, yc) < r_cod) ys.push_back(y);
    if (ys.empty()) continue;
    for (Index u = 0; u < dom.size(); ++u) by_dist[u] = u;
    std::sort(by_dist.begin(), by_dist.end(), [&](Index a, Index b) { return dom.d(x, a) < dom.d(x, b); });
    std::fill(covered.begin(), covered.end(), 0);
    std::size_t added = 0;
    for (double rho : rhos) {
      // F(B(x,rho)) grows monotonically with rho.
      while (added < by_dist.size() && dom.d(x, by_dist[added]) < rho) {
        for (Index y : f.fiber(by_dist[added])) covered[y] = 1;
        ++added;
      }
      for (Index y : ys) {
        for (Index yp = 0; yp < cod.size(); ++yp) {
          if (covered[yp]) continue;
          out.vacuous = false;
          const double rate = cod.d(y, yp) / rho;
          if (rate < best) {
            best = rate;
            out.witness = {double(x), double(y), rho, double(yp), rate};
          }
        }
      }
    }
  }
  if (!out.vacuous) out.value = ExtReal(best);
  return out;
}

ModulusReport reg_at_scale(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w) {
  w.validate();
  require_on_graph(f, base);
  return make_report(ModulusKind::reg, reg_value(f, base.first, base.second, w.r_dom, w.r_cod), w,
                     {base.first, base.second});
}

ModulusReport lip_at_scale(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w) {
  w.validate();
  require_on_graph(f, base);
  return make_report(ModulusKind::lip, lip_value(f, base.first, base.second, w.r_dom, w.r_cod), w,
                     {base.first, base.second});
}

ModulusReport lop_at_scale(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w) {
  w.validate();
  require_on_graph(f, base);
  return make_report(ModulusKind::lop, lop_value(f, base.first, base.second, w.r_dom, w.r_cod, w.eps), w,
                     {base.first, base.second});
}

ModulusReport partial_moduli(const BiParamSetMap& g, std::array<Index, 3> base, const ScaleWindow& w,
                             PartialKind which) {
  w.validate();
  const auto [y1, y2, z] = base;
  if (y1 >= g.dom1()->size() || y2 >= g.dom2()->size() || z >= g.cod()->size() || !g.contains(y1, y2, z))
    throw PreconditionError("base triple is not on the graph of G");

  const bool lip = which == PartialKind::lip_in_second;
  const bool lop = which == PartialKind::lop_in_first;
  const SpaceRef& param_space = lip ? g.dom1() : g.dom2();
  const Index param_center = lip ? y1 : y2;
  const Index moving_center = lip ? y2 : y1;

  ModulusValue agg;
  agg.value = lop ? ExtReal::infinity() : ExtReal::zero();
  for (Index p : ball_indices(*param_space, param_center, w.param_radius())) {
    const SetMap s = slice(g, lip ? SliceSide::fix_first : SliceSide::fix_second, p);
    ModulusValue v = lip   ? lip_value(s, moving_center, z, w.r_dom, w.r_cod)
                     : lop ? lop_value(s, moving_center, z, w.r_dom, w.r_cod, w.eps)
                           : reg_value(s, moving_center, z, w.r_dom, w.r_cod);
    if (v.vacuous) continue;
    const bool better = agg.vacuous || (lop ? v.value < agg.value : v.value > agg.value);
    agg.vacuous = false;
    if (better) {
      agg.value = v.value;
      agg.witness = v.witness;
      agg.witness.insert(agg.witness.begin(), double(p));
    }
  }
  const ModulusKind kind = lip ? ModulusKind::lip_x_unif : lop ? ModulusKind::lop_x_unif : ModulusKind::reg_x_unif;
  ModulusReport r = make_report(kind, agg, w, {y1, y2, z});
  if (!r.witnesses.empty()) r.witnesses.front().role = "param," + r.witnesses.front().role;
  return r;
}

AuditReport link_audit(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w) {
  w.validate();
  require_on_graph(f, base);
  const auto [xb, yb] = base;
  AuditReport rep;
  rep.kind = "link_audit";
  rep.window = {{"r_dom", w.r_dom}, {"r_cod", w.r_cod}, {"eps", w.eps}};

  const ModulusValue reg = reg_value(f, xb, yb, w.r_dom, w.r_cod);
  const ModulusValue lip_inv = lip_value(inverse(f), yb, xb, w.r_cod, w.r_dom);
  ModulusValue lop = lop_value(f, xb, yb, w.r_dom, w.r_cod, w.eps);

  const bool saturated = w.r_dom > f.dom()->eccentricity(xb) && w.r_cod > f.cod()->eccentricity(yb) &&
                         w.eps > f.dom()->diameter();
  bool surjective = true;
  for (Index y = 0; y < f.cod()->size(); ++y) surjective = surjective && !f.preimage(y).empty();
  if (saturated && !surjective) {
    // Every radius contributes up to eps; the openness bound of a non-surjective map
    // on the whole space decays like 1/eps, and its limit is 0.
    lop.value = ExtReal::zero();
    rep.notes.push_back("F is not onto: lop taken as its eps -> inf limit, 0");
  }

  rep.constants["reg"] = reg.value.value();
  rep.constants["lip_inverse"] = lip_inv.value.value();
  rep.constants["lop"] = lop.value.value();
  rep.constants["lop_inverse"] = reciprocal(lop.value.value());
  rep.constants["saturated"] = saturated ? 1.0 : 0.0;
  rep.value = reg.value.value();
  if (!reg.witness.empty()) rep.add_witness("reg:x,y,ratio", reg.witness);
  if (!lip_inv.witness.empty()) rep.add_witness("lip_inverse:y,v,ratio", lip_inv.witness);
  if (!lop.witness.empty()) rep.add_witness("lop:x,y,rho,y',rate", lop.witness);

  const Tolerance tol = default_tolerance();
  const double r = reg.value.value();
  const bool agree = approx_eq(reciprocal(lop.value.value()), r, tol) && approx_eq(lip_inv.value.value(), r, tol);
  if (!saturated) {
    rep.verdict = Verdict::scale_mismatch;
    rep.notes.push_back(agree ? "values agree, but the window is not saturated"
                              : "values differ at a non-saturated window");
  } else if (!agree) {
    rep.verdict = Verdict::fail;
    rep.notes.push_back("saturated window but lop^-1, lip(F^-1) and reg disagree");
  }
  return rep;
}

ExtReal lsc_envelope(const SetMap& f, Index x, Index y, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("lsc_envelope: delta must be positive");
  ExtReal best = ExtReal::infinity();
  for (Index u : ball_indices(*f.dom(), x, delta, true)) best = min(best, f.dist_to_image(u, y));
  return best;
}

ExtReal phi_R(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, std::array<Index, 3> tuple, Index z,
              double delta, const ProductMetric& pm) {
  if (!(delta > 0.0)) throw PreconditionError("phi_R: delta must be positive");
  check_composable(f1, f2, g);
  const auto [x, y1, y2] = tuple;
  if (!f1.contains(x, y1) || !f2.contains(x, y2)) return ExtReal::infinity();
  ExtReal best = ExtReal::infinity();
  for (Index xp = 0; xp < f1.dom()->size(); ++xp) {
    if (f1.dom()->d(x, xp) > delta) continue;  // every combiner dominates the X-distance
    for (Index a : f1.fiber(xp))
      for (Index b : f2.fiber(xp)) {
        const Index c[3] = {xp, a, b};
        if (pm.distance(tuple, c) > delta) continue;
        best = min(best, dist_to(*g.cod(), z, g.fiber(a, b)));
      }
  }
  return best;
}

ExtReal phi_R(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, std::array<Index, 3> tuple, Index z,
              double delta) {
  return phi_R(f1, f2, g, tuple, z, delta, r_domain_metric(f1, f2));
}

AuditReport envelope_zeroset_audit(const SetMap& f, Index y) {
  if (y >= f.cod()->size()) throw InputError("envelope_zeroset_audit: point out of range");
  AuditReport rep;
  rep.kind = "envelope_zeroset_audit";
  std::vector<Index> zero;
  for (Index x = 0; x < f.dom()->size(); ++x) {
    const double iso = f.dom()->isolation_radius(x);
    const double delta = std::isinf(iso) ? 1.0 : 0.5 * iso;
    if (lsc_envelope(f, x, y, delta).value() == 0.0) zero.push_back(x);
  }
  const auto pre = f.preimage(y);
  rep.value = double(zero.size());
  rep.constants["zero_set_size"] = double(zero.size());
  rep.constants["preimage_size"] = double(pre.size());
  if (!std::equal(zero.begin(), zero.end(), pre.begin(), pre.end())) {
    std::vector<Index> diff;
    std::set_symmetric_difference(zero.begin(), zero.end(), pre.begin(), pre.end(), std::back_inserter(diff));
    rep.fail_with("symmetric-difference", std::vector<double>(diff.begin(), diff.end()));
  }
  return rep;
}

double rho0(const Rho0Inputs& in) {
  const bool finite = std::isfinite(in.m) && std::isfinite(in.l) && std::isfinite(in.lambda) && std::isfinite(in.eta);
  if (!finite || !(in.m > 0.0) || !(in.lambda > 0.0) || in.l < 0.0 || in.eta < 0.0)
    throw HypothesisViolation("rho0: need finite m, lambda > 0 and l, eta >= 0");
  const double product = in.m * in.l * in.lambda * in.eta;
  if (!(product < 1.0)) throw HypothesisViolation("rho0: m*l*lambda*eta = " + std::to_string(product) + " is not below 1");
  return in.m * in.lambda / (1.0 - product);
}

}  // namespace regmod
