#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "regmod/ext_real.hpp"
#include "regmod/report.hpp"
#include "regmod/setmap.hpp"

namespace regmod {

// Explicit neighbourhood scale: U = B(base_x, r_dom), V = B(base_y, r_cod), and the
// eps bounding the openness radii. r_param is the parameter radius for partial moduli.
struct ScaleWindow {
  double r_dom = 1.0;
  double r_cod = 1.0;
  double eps = 1.0;
  std::optional<double> r_param;

  void validate() const;  // throws PreconditionError on a non-positive radius
  [[nodiscard]] double param_radius() const { return r_param.value_or(r_dom); }
};

enum class ModulusKind { lop, lip, reg, lop_x_unif, lip_x_unif, reg_x_unif };
const char* to_string(ModulusKind k);

struct ModulusReport {
  ModulusKind kind = ModulusKind::reg;
  ExtReal value;
  ScaleWindow window;
  std::vector<Witness> witnesses;
  std::vector<Index> basepoint;
  bool vacuous = false;  // no competitor pair: value is 0 for lip/reg, +inf for lop
};

// Window-centred values. The centres need not lie on the graph; the public
// operations below add that check.
struct ModulusValue {
  ExtReal value;
  bool vacuous = true;
  std::vector<double> witness;
};
ModulusValue reg_value(const SetMap& f, Index xc, Index yc, double r_dom, double r_cod);
ModulusValue lip_value(const SetMap& f, Index xc, Index yc, double r_dom, double r_cod);
ModulusValue lop_value(const SetMap& f, Index xc, Index yc, double r_dom, double r_cod, double eps);

// Openness radii examined by lop: realized domain distances below eps, their midpoints,
// and eps itself (the open-ball limit as the radius increases to eps).
std::vector<double> openness_radii(const MetricSpace& dom, double eps);

ModulusReport reg_at_scale(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w);
ModulusReport lip_at_scale(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w);
ModulusReport lop_at_scale(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w);

enum class PartialKind { reg_in_first, lip_in_second, lop_in_first };

// Moduli of G in one argument, uniformly over the other argument in its r_param ball.
// The moving argument uses r_dom, the value space r_cod.
ModulusReport partial_moduli(const BiParamSetMap& g, std::array<Index, 3> base, const ScaleWindow& w,
                             PartialKind which);

// lop(F)^-1, lip(F^-1) and reg(F) at one window. Equality is only asserted when the
// window is saturated (U = X, V = Y, eps > diam X); otherwise the verdict is scale-mismatch.
AuditReport link_audit(const SetMap& f, std::pair<Index, Index> base, const ScaleWindow& w);

// min over u in the closed ball B(x, delta) of d(y, F(u)).
ExtReal lsc_envelope(const SetMap& f, Index x, Index y, double delta);

// Envelope of R at tuple (x,y1,y2): +inf off F1(x) x F2(x), otherwise the min of
// d(z, G(y1',y2')) over feasible tuples within delta under pm.
ExtReal phi_R(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, std::array<Index, 3> tuple,
              Index z, double delta, const ProductMetric& pm);
ExtReal phi_R(const SetMap& f1, const SetMap& f2, const BiParamSetMap& g, std::array<Index, 3> tuple,
              Index z, double delta);

// Zero set of the envelope at half the isolation radius of each point, against F^-1(y).
AuditReport envelope_zeroset_audit(const SetMap& f, Index y);

struct Rho0Inputs {
  double m = 0.0;       // reg F1
  double l = 0.0;       // lip F2
  double lambda = 0.0;  // reg of G in y1, uniform in y2
  double eta = 0.0;     // lip of G in y2, uniform in y1
};

// m*lambda / (1 - m*l*lambda*eta). Throws HypothesisViolation unless m, lambda > 0,
// l, eta >= 0 and the product is below 1.
double rho0(const Rho0Inputs& in);

}  // namespace regmod
