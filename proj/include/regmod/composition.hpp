#pragma once

#include <optional>
#include <utility>

#include "regmod/moduli.hpp"

namespace regmod {

// (x, y1, y2, z) with (y1,y2) in F1(x) x F2(x) and z in G(y1,y2).
struct CompositionBase {
  Index x = 0;
  Index y1 = 0;
  Index y2 = 0;
  Index z = 0;
};

// Throws PreconditionError when the base is not consistent with the three graphs.
void check_base(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, const CompositionBase& b);

struct StabilityResult {
  bool stable = false;
  // Largest delta for which every x in B(x,delta), z in H(x) n B(z,delta) has a witness
  // within the eps-balls; +inf when every delta works.
  double delta = 0.0;
  std::optional<std::pair<Index, Index>> counterexample;  // (x, z) attaining delta

  [[nodiscard]] AuditReport to_report() const;
};

// On a finite instance some delta always works (the balls shrink to the base), so
// "stable" means a delta works whose x- or z-ball is not a singleton.
StabilityResult composition_stability(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                                      const CompositionBase& base, double eps);
StabilityResult composition_stability(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                                      const CompositionBase& base, double eps1, double eps2);

AuditReport stability_sufficient_usc(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                                     const CompositionBase& base);

// Levels (i), (ii), (iii) at window U = B(x, r_dom), V_i = B(y_i, r_param), W = B(z, r_cod).
AuditReport proMT_audit(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, const CompositionBase& base,
                        const ScaleWindow& w, double tau, Combiner combiner = Combiner::sum);

// Radii at which the four hypotheses are measured.
struct MainWindows {
  double r_F1 = 1.0;    // reg F1, both radii
  double r_F2 = 1.0;    // lip F2, both radii
  double r_Greg = 1.0;  // reg of G in y1, every radius
  double r_Glip = 1.0;  // lip of G in y2, every radius
  std::optional<double> h_window;  // extra radius at which reg H is reported
};

// Throws HypothesisViolation when the measured moduli violate the product condition.
AuditReport mainresult_audit(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g,
                             const CompositionBase& base, const MainWindows& windows);

// G(y1,y2) = d(y1,y2) into the realized distance values; Fix = {x : F1(x) n F2(x) nonempty}.
// base.z is ignored.
AuditReport fixedpoint_audit(const SetMap& f1, const SetMap& f2, const CompositionBase& base, const ScaleWindow& w);

}  // namespace regmod
