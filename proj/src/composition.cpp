#include "regmod/composition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "regmod/errors.hpp"

namespace regmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Tuple = std::array<Index, 3>;

// Feasible tuples (x, y1, y2) grouped by z in G(y1, y2): the sets R^-1(z).
std::vector<std::vector<Tuple>> r_preimages(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g) {
  std::vector<std::vector<Tuple>> out(g.cod()->size());
  for (Index x = 0; x < f1.dom()->size(); ++x)
    for (Index a : f1.fiber(x))
      for (Index b : f2.fiber(x))
        for (Index z : g.fiber(a, b)) out[z].push_back({x, a, b});
  return out;
}

double dist_to_tuples(const ProductMetric& pm, const Tuple& t, const std::vector<Tuple>& set) {
  double best = kInf;
  for (const Tuple& s : set) best = std::min(best, pm.distance(t, s));
  return best;
}

std::vector<Index> in_ball(std::span<const Index> fiber, const MetricSpace& m, Index center, double r) {
  std::vector<Index> out;
  for (Index y : fiber)
    if (m.d(y, center) < r) out.push_back(y);
  return out;
}

// d(z, G(A, B)) for index sets A, B.
double dist_to_G(const BiParamSetMap& g, Index z, std::span<const Index> as, std::span<const Index> bs) {
  double best = kInf;
  for (Index a : as)
    for (Index b : bs) best = std::min(best, dist_to(*g.cod(), z, g.fiber(a, b)).value());
  return best;
}

double iso_or_inf(const MetricSpace& m, Index i) { return m.isolation_radius(i); }

}  // namespace

void check_base(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, const CompositionBase& b) {
  check_composable(f1, f2, g);
  if (b.x >= f1.dom()->size() || b.y1 >= f1.cod()->size() || b.y2 >= f2.cod()->size() || b.z >= g.cod()->size())
    throw PreconditionError("base point out of range");
  if (!f1.contains(b.x, b.y1) || !f2.contains(b.x, b.y2) || !g.contains(b.y1, b.y2, b.z))
    throw PreconditionError("base point is not consistent with the graphs of F1, F2 and G");
}

AuditReport StabilityResult::to_report() const {
  AuditReport rep;
  rep.kind = "composition_stability";
  rep.value = delta;
  rep.constants["delta"] = delta;
  if (counterexample) rep.add_witness("x,z", {double(counterexample->first), double(counterexample->second)});
  if (!stable) {
    rep.verdict = Verdict::fail;
    rep.notes.push_back("only windows with singleton balls admit witnesses");
  }
  return rep;
}

StabilityResult composition_stability(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                                      const CompositionBase& base, double eps) {
  return composition_stability(f1, f2, g, base, eps, eps);
}

StabilityResult composition_stability(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                                      const CompositionBase& base, double eps1, double eps2) {
  check_base(f1, f2, g, base);
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw PreconditionError("composition_stability: eps must be positive");
  const MetricSpace& X = *f1.dom();
  const MetricSpace& Z = *g.cod();
  StabilityResult res;
  res.delta = kInf;
  std::vector<char> reached(Z.size()), witnessed(Z.size());
  for (Index x = 0; x < X.size(); ++x) {
    std::fill(reached.begin(), reached.end(), 0);
    std::fill(witnessed.begin(), witnessed.end(), 0);
    for (Index a : f1.fiber(x)) {
      const bool near_a = f1.cod()->d(a, base.y1) < eps1;
      for (Index b : f2.fiber(x)) {
        const bool near = near_a && f2.cod()->d(b, base.y2) < eps2;
        for (Index z : g.fiber(a, b)) {
          reached[z] = 1;
          if (near) witnessed[z] = 1;
        }
      }
    }
    for (Index z = 0; z < Z.size(); ++z) {
      if (!reached[z] || witnessed[z]) continue;
      const double d = std::max(X.d(x, base.x), Z.d(z, base.z));
      if (d < res.delta) {
        res.delta = d;
        res.counterexample = std::make_pair(x, z);
      }
    }
  }
  res.stable = res.delta > std::min(iso_or_inf(X, base.x), iso_or_inf(Z, base.z));
  return res;
}

AuditReport stability_sufficient_usc(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                                     const CompositionBase& base) {
  check_base(f1, f2, g, base);
  AuditReport rep;
  rep.kind = "stability_sufficient_usc";
  if (f1.fiber(base.x).size() != 1 || f2.fiber(base.x).size() != 1) {
    rep.verdict = Verdict::not_applicable;
    rep.notes.push_back("F1(x) or F2(x) is not a singleton");
    return rep;
  }
  const MetricSpace& X = *f1.dom();
  std::vector<double> grid = f1.cod()->realized_distances();
  const auto d2 = f2.cod()->realized_distances();
  grid.insert(grid.end(), d2.begin(), d2.end());
  grid.push_back(std::max(f1.cod()->diameter(), f2.cod()->diameter()) + 1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // Largest delta with F(B(x, delta)) inside B(y, eps).
  auto usc_delta = [&](const SetMap& f, Index yb, double eps) {
    double d = kInf;
    for (Index x = 0; x < X.size(); ++x)
      for (Index y : f.fiber(x))
        if (!(f.cod()->d(y, yb) < eps)) d = std::min(d, X.d(x, base.x));
    return d;
  };
  double worst_gap = kInf;
  for (double eps : grid) {
    const double du = std::min({usc_delta(f1, base.y1, eps), usc_delta(f2, base.y2, eps), eps});
    const StabilityResult st = composition_stability(f1, f2, g, base, eps);
    worst_gap = std::min(worst_gap, st.delta - du);
    if (!(du > 0.0)) {
      rep.fail_with("usc-delta-not-positive", {eps});
      return rep;
    }
    if (st.delta < du) {
      rep.fail_with("eps,usc_delta,stability_delta", {eps, du, st.delta});
      return rep;
    }
  }
  rep.constants["eps_checked"] = double(grid.size());
  rep.constants["min_slack"] = worst_gap;
  return rep;
}

AuditReport proMT_audit(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, const CompositionBase& base,
                        const ScaleWindow& w, double tau, Combiner combiner) {
  check_base(f1, f2, g, base);
  w.validate();
  if (!(tau > 0.0)) throw PreconditionError("proMT_audit: tau must be positive");
  const MetricSpace& X = *f1.dom();
  const MetricSpace& Y1 = *f1.cod();
  const MetricSpace& Y2 = *f2.cod();
  const MetricSpace& Z = *g.cod();
  const ProductMetric pm{{f1.dom(), f1.cod(), f2.cod()}, {1.0, 1.0, 1.0}, combiner};
  const double rp = w.param_radius();
  const Tolerance tol = default_tolerance();

  AuditReport rep;
  rep.kind = "proMT_audit";
  rep.window = {{"r_dom", w.r_dom}, {"r_param", rp}, {"r_cod", w.r_cod}};
  rep.constants["tau"] = tau;

  const auto rinv = r_preimages(f1, f2, g);
  const auto us = ball_indices(X, base.x, w.r_dom);
  const auto ws = ball_indices(Z, base.z, w.r_cod);

  // (i): tau_min = max d(t, R^-1(z)) / d(z, G(y1,y2)) over the window.
  double tau_min = 0.0;
  std::vector<double> arg_i;
  for (Index x : us) {
    for (Index a : in_ball(f1.fiber(x), Y1, base.y1, rp))
      for (Index b : in_ball(f2.fiber(x), Y2, base.y2, rp)) {
        const Tuple t{x, a, b};
        for (Index z : ws) {
          const double den = dist_to(Z, z, g.fiber(a, b)).value();
          if (den == 0.0 || std::isinf(den)) continue;
          const double q = dist_to_tuples(pm, t, rinv[z]) / den;
          if (q > tau_min || arg_i.empty()) {
            tau_min = std::max(tau_min, q);
            arg_i = {double(x), double(a), double(b), double(z), q};
          }
        }
      }
  }
  rep.constants["tau_min"] = tau_min;
  if (!arg_i.empty()) rep.add_witness("i:x,y1,y2,z,ratio", arg_i);
  if (!approx_leq(tau_min, tau, tol)) {
    rep.verdict = Verdict::not_established;
    rep.notes.push_back("(i) does not hold at this tau; implications not audited");
    return rep;
  }

  // (ii): d(x, H^-1(z)) <= tau d(z, G(F1(x) n V1, F2(x) n V2)).
  const SetMap h = compose_H(f1, f2, g);
  double worst_ii = 0.0;
  for (Index x : us) {
    const auto as = in_ball(f1.fiber(x), Y1, base.y1, rp);
    const auto bs = in_ball(f2.fiber(x), Y2, base.y2, rp);
    for (Index z : ws) {
      const double den = dist_to_G(g, z, as, bs);
      if (std::isinf(den)) continue;
      const double num = h.dist_to_preimage(x, z).value();
      if (den > 0.0) worst_ii = std::max(worst_ii, num / den);
      if (!approx_leq(num, tau * den, tol)) {
        rep.fail_with("ii:x,z,lhs,rhs", {double(x), double(z), num, tau * den});
        rep.notes.push_back("(i) holds but (ii) fails");
        return rep;
      }
    }
  }
  rep.constants["ratio_ii"] = worst_ii;

  // (iii): with delta the smallest radius and eps = delta tau/(tau+1), a violation at
  // (x, z, z') for some rho in (0, eps) exists iff tau d(z,z') < min(d(x, H^-1(z')), eps).
  const double delta = std::min({w.r_dom, rp, w.r_cod});
  const double eps3 = delta * tau / (tau + 1.0);
  rep.constants["eps_iii"] = eps3;
  std::size_t checked = 0;
  for (Index x : ball_indices(X, base.x, eps3)) {
    const auto as = in_ball(f1.fiber(x), Y1, base.y1, eps3);
    const auto bs = in_ball(f2.fiber(x), Y2, base.y2, eps3);
    for (Index z : ball_indices(Z, base.z, eps3)) {
      bool feasible = false;
      for (Index a : as)
        for (Index b : bs) feasible = feasible || g.contains(a, b, z);
      if (!feasible) continue;
      for (Index zp = 0; zp < Z.size(); ++zp) {
        ++checked;
        const double reach = std::min(h.dist_to_preimage(x, zp).value(), eps3);
        if (tau * Z.d(z, zp) < reach && !approx_leq(reach, tau * Z.d(z, zp), tol)) {
          rep.fail_with("iii:x,z,z'", {double(x), double(z), double(zp)});
          rep.notes.push_back("(ii) holds but the ball inclusion (iii) fails");
          return rep;
        }
      }
    }
  }
  rep.constants["checked_iii"] = double(checked);
  rep.value = tau_min;
  return rep;
}

AuditReport mainresult_audit(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                             const CompositionBase& base, const MainWindows& win) {
  check_base(f1, f2, g, base);
  for (double r : {win.r_F1, win.r_F2, win.r_Greg, win.r_Glip})
    if (!(r > 0.0)) throw PreconditionError("mainresult_audit: window radii must be positive");

  AuditReport rep;
  rep.kind = "mainresult_audit";
  rep.window = {{"r_F1", win.r_F1}, {"r_F2", win.r_F2}, {"r_Greg", win.r_Greg}, {"r_Glip", win.r_Glip}};

  const double m = reg_value(f1, base.x, base.y1, win.r_F1, win.r_F1).value.value();
  const double l = lip_value(f2, base.x, base.y2, win.r_F2, win.r_F2).value.value();
  const std::array<Index, 3> gb{base.y1, base.y2, base.z};
  const double lambda =
      partial_moduli(g, gb, {win.r_Greg, win.r_Greg, win.r_Greg, win.r_Greg}, PartialKind::reg_in_first).value.value();
  const double eta =
      partial_moduli(g, gb, {win.r_Glip, win.r_Glip, win.r_Glip, win.r_Glip}, PartialKind::lip_in_second).value.value();
  rep.constants["m"] = m;
  rep.constants["l"] = l;
  rep.constants["lambda"] = lambda;
  rep.constants["eta"] = eta;
  const double rho = rho0({m, l, lambda, eta});  // throws on hypothesis (v)
  rep.constants["product"] = m * l * lambda * eta;
  rep.constants["rho0"] = rho;

  // Radii from the proof, shrunk slightly so open-ball strictness survives rounding.
  const double shrink = 1.0 - 1e-6;
  const double delta = shrink * std::min({win.r_F2 / 2.0, win.r_Glip / 2.0, win.r_Greg, win.r_F1 / 2.0});
  const double mll = m * lambda * l;
  const double gamma = std::min({delta / lambda, delta / (m * lambda), mll > 0.0 ? delta / mll : kInf});
  const double s = std::min({delta, delta / (6.0 * rho), delta * m / (6.0 * rho),
                             l > 0.0 ? delta / (6.0 * l * rho) : kInf, gamma / 4.0});
  rep.constants["delta"] = delta;
  rep.constants["gamma"] = gamma;
  rep.constants["s"] = s;

  // (aim) on B0(base, 2 s rho) x B(z, s) with d0 = max{d_X, m d_Y1, d_Y2 / l}.
  const ProductMetric d0 = d0_metric(f1, f2, m, l);
  const auto rinv = r_preimages(f1, f2, g);
  const MetricSpace& Z = *g.cod();
  const Tuple bt{base.x, base.y1, base.y2};
  const double r0 = 2.0 * s * rho;
  const auto zs = ball_indices(Z, base.z, s);
  const Tolerance tol = default_tolerance();
  double worst = 0.0;
  std::size_t active = 0;
  for (Index x : ball_indices(*f1.dom(), base.x, r0)) {
    for (Index a : f1.fiber(x))
      for (Index b : f2.fiber(x)) {
        const Tuple t{x, a, b};
        if (!(d0.distance(t, bt) < r0)) continue;
        for (Index z : zs) {
          const double phi = dist_to(Z, z, g.fiber(a, b)).value();
          if (phi == 0.0 || std::isinf(phi)) continue;
          ++active;
          const double lhs = dist_to_tuples(d0, t, rinv[z]);
          worst = std::max(worst, lhs / phi);
          if (!approx_leq(lhs, rho * phi, tol)) {
            rep.fail_with("aim:x,y1,y2,z,lhs,rhs", {double(x), double(a), double(b), double(z), lhs, rho * phi});
            rep.notes.push_back("inequality (aim) violated under verified hypotheses");
            return rep;
          }
        }
      }
  }
  rep.constants["aim_active_pairs"] = double(active);
  rep.constants["aim_worst_ratio"] = worst;
  rep.value = worst;

  // Box inside B0(base, 2 s rho) and the z-window s: the windows of the (ii)-type bound for H.
  const double box_x = std::min(r0, s);
  const double box_y1 = std::min(r0 / m, s);
  const double box_y2 = l > 0.0 ? std::min(r0 * l, s) : std::numeric_limits<double>::denorm_min();
  const double box = std::min(box_x, box_y1);
  const StabilityResult st = composition_stability(f1, f2, g, base, box_y1, box_y2);
  rep.constants["stability_delta"] = st.delta;
  if (!st.stable) {
    rep.notes.push_back("composition stability not established; reg H not audited");
    return rep;
  }
  const double eta_star = std::min({st.delta, box, 2.0 * box / rho}) * (1.0 - 1e-9);
  const double hx = std::min(eta_star / 2.0, rho * eta_star / 4.0);
  const double hz = eta_star / 4.0;
  const SetMap h = compose_H(f1, f2, g);
  const ModulusValue reg_h = reg_value(h, base.x, base.z, hx, hz);
  rep.constants["h_radius_x"] = hx;
  rep.constants["h_radius_z"] = hz;
  rep.constants["reg_H"] = reg_h.value.value();
  rep.constants["reg_H_vacuous"] = reg_h.vacuous ? 1.0 : 0.0;
  if (win.h_window)
    rep.constants["reg_H_at_h_window"] = reg_value(h, base.x, base.z, *win.h_window, *win.h_window).value.value();
  if (!approx_leq(reg_h.value.value(), rho + 1e-7, Tolerance{0.0, 0.0})) {
    rep.fail_with("reg_H:x,y,ratio", reg_h.witness);
    rep.notes.push_back("reg H exceeds rho0 under verified hypotheses");
  }
  return rep;
}

AuditReport fixedpoint_audit(const SetMap& f1, const SetMap& f2, const CompositionBase& base, const ScaleWindow& w) {
  w.validate();
  if (f1.dom() != f2.dom() || f1.cod() != f2.cod()) throw DomainMismatch("fixedpoint_audit: F1, F2 must share spaces");
  if (base.y1 == base.y2) throw PreconditionError("fixedpoint_audit: needs y1 != y2");
  if (!f1.contains(base.x, base.y1) || !f2.contains(base.x, base.y2))
    throw PreconditionError("fixedpoint_audit: base not on the graphs");
  const SpaceRef& Y = f1.cod();

  std::vector<double> values = Y->realized_distances();
  values.insert(values.begin(), 0.0);
  if (values.size() > enumeration_budget())
    throw BudgetExceeded("fixedpoint_audit: " + std::to_string(values.size()) + " distance values exceed the budget");
  const SpaceRef Zs = line_space(values);
  auto value_index = [&](double v) {
    return Index(std::lower_bound(values.begin(), values.end(), v) - values.begin());
  };
  const BiParamSetMap g = BiParamSetMap::from_rule(Y, Y, Zs, [&](Index a, Index b) {
    return std::vector<Index>{value_index(Y->d(a, b))};
  });
  const CompositionBase full{base.x, base.y1, base.y2, value_index(Y->d(base.y1, base.y2))};
  const double zbar = Y->d(base.y1, base.y2);

  AuditReport rep;
  rep.kind = "fixedpoint_audit";
  rep.window = {{"r", w.r_dom}};
  AuditReport main;
  try {
    main = mainresult_audit(f1, f2, g, full, {w.r_dom, w.r_dom, w.r_dom, w.r_dom, std::nullopt});
  } catch (const HypothesisViolation& e) {
    rep.verdict = Verdict::not_applicable;
    rep.notes.push_back(std::string("hypothesis fails: ") + e.what());
    return rep;
  }
  rep.constants = main.constants;
  rep.constants["z_bar"] = zbar;
  if (!main.passed()) {
    rep.verdict = main.verdict;
    rep.witnesses = main.witnesses;
    rep.notes = main.notes;
    return rep;
  }
  const double rho = main.constants["rho0"];
  const double s = main.constants["s"];
  const double m = main.constants["m"];
  const double l = main.constants["l"];
  if (!(zbar < s)) {
    rep.verdict = Verdict::not_applicable;
    rep.notes.push_back("0 lies outside the theorem's z-window: d(y1,y2) >= s");
    return rep;
  }
  const double r0 = 2.0 * s * rho;
  const double v1 = r0 / m;
  const double v2 = l > 0.0 ? r0 * l : std::numeric_limits<double>::denorm_min();
  rep.window["x_radius"] = r0;
  rep.window["v1_radius"] = v1;
  rep.window["v2_radius"] = v2;

  std::vector<Index> fix;
  for (Index x = 0; x < f1.dom()->size(); ++x) {
    auto a = f1.fiber(x), b = f2.fiber(x);
    std::vector<Index> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (!common.empty()) fix.push_back(x);
  }
  rep.constants["fix_size"] = double(fix.size());
  const Tolerance tol = default_tolerance();
  double worst = 0.0;
  std::size_t audited = 0;
  for (Index x : ball_indices(*f1.dom(), base.x, r0)) {
    const auto as = in_ball(f1.fiber(x), *Y, base.y1, v1);
    const auto bs = in_ball(f2.fiber(x), *Y, base.y2, v2);
    double gap = kInf;
    for (Index a : as)
      for (Index b : bs) gap = std::min(gap, Y->d(a, b));
    ++audited;
    if (std::isinf(gap)) continue;
    const double lhs = dist_to(*f1.dom(), x, fix).value();
    if (gap > 0.0) worst = std::max(worst, lhs / gap);
    if (!approx_leq(lhs, rho * gap, tol)) {
      rep.fail_with("x,d_fix,rho_gap", {double(x), lhs, rho * gap});
      return rep;
    }
  }
  rep.constants["audited_points"] = double(audited);
  rep.constants["worst_ratio"] = worst;
  rep.value = worst;
  return rep;
}

}  // namespace regmod
