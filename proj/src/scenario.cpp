#include "regmod/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "regmod/composition.hpp"
#include "regmod/errors.hpp"
#include "regmod/generators.hpp"

namespace regmod {

namespace {

using Params = Json;

const Json& require(const Params& p, const Instance& inst, const char* key, const char* meta_key = nullptr) {
  if (p.contains(key)) return p.at(key);
  const char* mk = meta_key ? meta_key : key;
  if (inst.meta.contains(mk)) return inst.meta.at(mk);
  throw InputError(std::string("audit parameter '") + key + "' is missing");
}

std::string id(const Params& p, const char* key, const char* fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_string()) throw InputError(std::string("'") + key + "' must be an id string");
  return p.at(key).get<std::string>();
}

double num(const Params& p, const char* key, double fallback) {
  return p.contains(key) ? number_from_json(p.at(key)) : fallback;
}

double num_req(const Params& p, const Instance& inst, const char* key, const char* meta_key = nullptr) {
  return number_from_json(require(p, inst, key, meta_key));
}

std::vector<Index> indices(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) throw InputError(std::string(what) + " must be an array of " + std::to_string(n));
  std::vector<Index> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw InputError(std::string(what) + ": bad index");
    out.push_back(v.get<Index>());
  }
  return out;
}

Index point(const Json& j, const SpaceRef& s, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0 || j.get<std::size_t>() >= s->size())
    throw InputError(std::string(what) + ": point index out of range");
  return j.get<Index>();
}

void check_range(const std::vector<Index>& v, std::initializer_list<std::size_t> sizes, const char* what) {
  std::size_t k = 0;
  for (std::size_t s : sizes) {
    if (v[k] >= s) throw InputError(std::string(what) + ": index out of range");
    ++k;
  }
}

std::pair<Index, Index> map_base(const Params& p, const Instance& inst, const SetMap& f) {
  auto b = indices(require(p, inst, "base"), 2, "base");
  check_range(b, {f.dom()->size(), f.cod()->size()}, "base");
  return {b[0], b[1]};
}

ScaleWindow window(const Params& p, const Instance& inst) {
  const double fallback = inst.meta.contains("window") ? number_from_json(inst.meta.at("window")) : 1.0;
  ScaleWindow w;
  w.r_dom = num(p, "r_dom", fallback);
  w.r_cod = num(p, "r_cod", w.r_dom);
  w.eps = num(p, "eps", fallback);
  if (p.contains("r_param")) w.r_param = number_from_json(p.at("r_param"));
  return w;
}

struct Triple {
  const SetMap& f1;
  const SetMap& f2;
  const BiParamSetMap& g;
};

Triple composition(const Params& p, const Instance& inst) {
  return {inst.map(id(p, "f1", "F1")), inst.map(id(p, "f2", "F2")), inst.bimap(id(p, "g", "G"))};
}

CompositionBase comp_base(const Params& p, const Instance& inst, std::size_t n) {
  auto b = indices(require(p, inst, "base"), n, "base");
  return {b[0], b[1], b[2], n > 3 ? b[3] : 0};
}

AuditReport modulus_report(const ModulusReport& m, const Params& p) {
  AuditReport r;
  r.kind = to_string(m.kind);
  r.value = m.value.value();
  r.window = {{"r_dom", m.window.r_dom}, {"r_cod", m.window.r_cod}, {"eps", m.window.eps}};
  if (m.window.r_param) r.window["r_param"] = *m.window.r_param;
  r.witnesses = m.witnesses;
  if (m.vacuous) r.notes.push_back("vacuous window");
  if (p.contains("oracle")) {
    const double want = number_from_json(p.at("oracle"));
    r.constants["oracle"] = want;
    const double got = m.value.value();
    if (!(got == want || (std::isfinite(got) && std::isfinite(want) && approx_eq(got, want)))) r.verdict = Verdict::fail;
  }
  return r;
}

std::vector<Polyhedron> polyhedra(const Params& p, const Instance& inst) {
  std::vector<Polyhedron> out;
  const Json& ids = p.contains("sets") ? p.at("sets") : Json::array();
  if (ids.empty()) {
    for (const auto& [k, v] : inst.polyhedra) out.push_back(v);
  } else {
    for (const auto& s : ids) out.push_back(inst.polyhedron(s.get<std::string>()));
  }
  if (out.empty()) throw InputError("no polyhedra in the instance");
  return out;
}

CompositionPoint poly_base(const Params& p, const Instance& inst, const PolyMap& f1, const PolyMap& f2,
                           const PolyMap& g) {
  if (!p.contains("base")) {
    return {VectorXd::Zero(f1.n), VectorXd::Zero(f1.m), VectorXd::Zero(f2.m), VectorXd::Zero(g.m)};
  }
  const Json& b = p.at("base");
  (void)inst;
  return {vector_from_json(b.at("x")), vector_from_json(b.at("y1")), vector_from_json(b.at("y2")),
          vector_from_json(b.at("z"))};
}

using AuditFn = std::function<AuditReport(const Instance&, const Params&)>;

const std::map<std::string, AuditFn>& registry() {
  static const std::map<std::string, AuditFn> r = {
      {"validate_metric",
       [](const Instance& i, const Params& p) { return validate_metric(*i.space(id(p, "space", "X"))); }},
      {"reg_at_scale",
       [](const Instance& i, const Params& p) {
         const SetMap& f = i.map(id(p, "map", "F"));
         return modulus_report(reg_at_scale(f, map_base(p, i, f), window(p, i)), p);
       }},
      {"lip_at_scale",
       [](const Instance& i, const Params& p) {
         const SetMap& f = i.map(id(p, "map", "F"));
         return modulus_report(lip_at_scale(f, map_base(p, i, f), window(p, i)), p);
       }},
      {"lop_at_scale",
       [](const Instance& i, const Params& p) {
         const SetMap& f = i.map(id(p, "map", "F"));
         return modulus_report(lop_at_scale(f, map_base(p, i, f), window(p, i)), p);
       }},
      {"link_audit",
       [](const Instance& i, const Params& p) {
         const SetMap& f = i.map(id(p, "map", "F"));
         return link_audit(f, map_base(p, i, f), window(p, i));
       }},
      {"partial_moduli",
       [](const Instance& i, const Params& p) {
         const BiParamSetMap& g = i.bimap(id(p, "bimap", "G"));
         // A four-entry composition base (x, y1, y2, z) is accepted with x dropped.
         Json bj = require(p, i, "base");
         if (bj.is_array() && bj.size() == 4) bj.erase(bj.begin());
         auto b = indices(bj, 3, "base");
         check_range(b, {g.dom1()->size(), g.dom2()->size(), g.cod()->size()}, "base");
         const std::string which = p.value("which", "reg_in_first");
         PartialKind k = which == "reg_in_first"    ? PartialKind::reg_in_first
                         : which == "lip_in_second" ? PartialKind::lip_in_second
                         : which == "lop_in_first"  ? PartialKind::lop_in_first
                                                    : throw InputError("unknown partial modulus '" + which + "'");
         return modulus_report(partial_moduli(g, {b[0], b[1], b[2]}, window(p, i), k), p);
       }},
      {"envelope_zeroset_audit",
       [](const Instance& i, const Params& p) {
         const SetMap& f = i.map(id(p, "map", "F"));
         if (p.contains("y")) return envelope_zeroset_audit(f, point(p.at("y"), f.cod(), "y"));
         AuditReport all;
         all.kind = "envelope_zeroset_audit";
         for (Index y = 0; y < f.cod()->size(); ++y) {
           AuditReport r = envelope_zeroset_audit(f, y);
           if (!r.passed()) return r;
         }
         all.constants["codomain_points"] = double(f.cod()->size());
         return all;
       }},
      {"rho0",
       [](const Instance& i, const Params& p) {
         AuditReport r;
         r.kind = "rho0";
         const Rho0Inputs in{num_req(p, i, "m"), num_req(p, i, "l"), num_req(p, i, "lambda"), num_req(p, i, "eta")};
         r.constants = {{"m", in.m}, {"l", in.l}, {"lambda", in.lambda}, {"eta", in.eta}};
         r.value = rho0(in);
         r.constants["rho0"] = *r.value;
         return r;
       }},
      {"composition_stability",
       [](const Instance& i, const Params& p) {
         const Triple t = composition(p, i);
         const CompositionBase b = comp_base(p, i, 4);
         if (p.contains("eps1"))
           return composition_stability(t.f1, t.f2, t.g, b, num_req(p, i, "eps1"), num_req(p, i, "eps2")).to_report();
         return composition_stability(t.f1, t.f2, t.g, b, num(p, "eps", 1.0)).to_report();
       }},
      {"stability_sufficient_usc",
       [](const Instance& i, const Params& p) {
         const Triple t = composition(p, i);
         return stability_sufficient_usc(t.f1, t.f2, t.g, comp_base(p, i, 4));
       }},
      {"proMT_audit",
       [](const Instance& i, const Params& p) {
         const Triple t = composition(p, i);
         const std::string c = p.value("combiner", "sum");
         if (c != "sum" && c != "weighted_max") throw InputError("combiner must be sum or weighted_max");
         return proMT_audit(t.f1, t.f2, t.g, comp_base(p, i, 4), window(p, i), num_req(p, i, "tau"),
                            c == "sum" ? Combiner::sum : Combiner::weighted_max);
       }},
      {"mainresult_audit",
       [](const Instance& i, const Params& p) {
         const Triple t = composition(p, i);
         const double r = num(p, "r_dom", i.meta.contains("window") ? number_from_json(i.meta.at("window")) : 1.0);
         MainWindows w{num(p, "r_F1", r), num(p, "r_F2", r), num(p, "r_Greg", r), num(p, "r_Glip", r), std::nullopt};
         if (p.contains("h_window")) w.h_window = number_from_json(p.at("h_window"));
         return mainresult_audit(t.f1, t.f2, t.g, comp_base(p, i, 4), w);
       }},
      {"fixedpoint_audit",
       [](const Instance& i, const Params& p) {
         const SetMap& f1 = i.map(id(p, "f1", "F1"));
         const SetMap& f2 = i.map(id(p, "f2", "F2"));
         return fixedpoint_audit(f1, f2, comp_base(p, i, 3), window(p, i));
       }},
      {"error_bound_audit",
       [](const Instance& i, const Params& p) {
         const ScalarField& f = i.field(id(p, "field", "f"));
         return error_bound_audit(f, point(require(p, i, "xbar"), f.space(), "xbar"));
       }},
      {"ekeland",
       [](const Instance& i, const Params& p) {
         const ScalarField& f = i.field(id(p, "field", "f"));
         const EvpCertificate c =
             ekeland(f, point(require(p, i, "x0"), f.space(), "x0"), num_req(p, i, "s"), num_req(p, i, "rate"));
         AuditReport r;
         r.kind = "ekeland";
         r.value = double(c.result);
         r.constants = {{"start", double(c.start)}, {"result", double(c.result)}, {"iterations", double(c.iterations)},
                        {"s", c.s}, {"rate", c.rate}};
         if (!c.valid())
           r.fail_with("decrease,distance,stationarity",
                       {double(c.decrease_ok), double(c.distance_ok), double(c.stationarity_ok)});
         return r;
       }},
      {"alliedness_certificate",
       [](const Instance& i, const Params& p) {
         return alliedness_certificate(polyhedra(p, i), vector_from_json(require(p, i, "xbar")), num(p, "r", 1.0))
             .to_report();
       }},
      {"metric_inequality_audit",
       [](const Instance& i, const Params& p) {
         return metric_inequality_audit(polyhedra(p, i), vector_from_json(require(p, i, "xbar")), num(p, "r", 1.0),
                                        num_req(p, i, "tau"), num(p, "grid_step", 0.05));
       }},
      {"intersection_rule_audit",
       [](const Instance& i, const Params& p) {
         return intersection_rule_audit(polyhedra(p, i), vector_from_json(require(p, i, "xbar")), num(p, "r", 1.0),
                                        num(p, "eps", 1e-9));
       }},
      {"condition_C_value",
       [](const Instance& i, const Params& p) {
         const PolyMap& f1 = i.polymap(id(p, "f1", "F1"));
         const PolyMap& f2 = i.polymap(id(p, "f2", "F2"));
         const PolyMap& g = i.polymap(id(p, "g", "G"));
         const double r = num(p, "r", 1.0), delta = num(p, "delta", 1e-3);
         const ConditionCResult c = condition_C_value(f1, f2, g, poly_base(p, i, f1, f2, g), r, delta);
         AuditReport rep;
         rep.kind = "condition_C_value";
         rep.window = {{"r", r}, {"delta", delta}};
         rep.value = c.c;
         rep.constants = {{"c", c.c}, {"boundary_attained", double(c.boundary_attained)},
                          {"degenerate", double(c.degenerate)}, {"combinations", double(c.combinations)}};
         if (c.degenerate) rep.notes.push_back("c vanishes: condition (C) carries no information");
         if (p.contains("min_c") && !(c.c >= number_from_json(p.at("min_c")))) rep.verdict = Verdict::fail;
         return rep;
       }},
      {"condition_C_openness_audit",
       [](const Instance& i, const Params& p) {
         const PolyMap& f1 = i.polymap(id(p, "f1", "F1"));
         const PolyMap& f2 = i.polymap(id(p, "f2", "F2"));
         const PolyMap& g = i.polymap(id(p, "g", "G"));
         return condition_C_openness_audit(f1, f2, g, poly_base(p, i, f1, f2, g), num_req(p, i, "a"), num(p, "eps", 1.0),
                                           num(p, "grid_step", 0.05));
       }},
      {"estim_coder_audit",
       [](const Instance& i, const Params& p) {
         const PolyMap& f = i.polymap(id(p, "map", "F"));
         const std::string which = p.value("which", "aubin_upper");
         if (which != "aubin_upper" && which != "open_lower") throw InputError("which must be aubin_upper or open_lower");
         const VectorXd x = p.contains("x") ? vector_from_json(p.at("x")) : VectorXd::Zero(f.n);
         const VectorXd y = p.contains("y") ? vector_from_json(p.at("y")) : VectorXd::Zero(f.m);
         double alpha = 0.0;
         if (p.contains("alpha")) {
           alpha = number_from_json(p.at("alpha"));
         } else {
           const char* key = which == "aubin_upper" ? "aubin_alpha" : "open_alpha";
           if (!i.meta.contains("oracle") || !i.meta["oracle"].contains(key))
             throw InputError("estim_coder_audit: no alpha given");
           alpha = number_from_json(i.meta["oracle"][key]);
         }
         return estim_coder_audit(f, x, y, num(p, "r", 1.0), alpha,
                                  which == "aubin_upper" ? EstimKind::aubin_upper : EstimKind::open_lower);
       }},
  };
  return r;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string constants_field(const AuditReport& r) {
  std::string out;
  for (const auto& [k, v] : r.constants) {
    if (!out.empty()) out += ';';
    out += k + "=" + format_number(v);
  }
  return out;
}

const Json& audits_of(const Json& scenario) {
  if (!scenario.is_object()) throw InputError("scenario must be a JSON object");
  if (!scenario.contains("audits") || !scenario.at("audits").is_array()) throw InputError("scenario needs an 'audits' array");
  for (const auto& a : scenario.at("audits")) {
    if (!a.is_object() || !a.contains("audit") || !a.at("audit").is_string())
      throw InputError("each audit entry needs an 'audit' name");
    if (!registry().count(a.at("audit").get<std::string>()))
      throw InputError("unknown audit '" + a.at("audit").get<std::string>() + "'");
    if (a.contains("params") && !a.at("params").is_object()) throw InputError("audit params must be an object");
  }
  return scenario.at("audits");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& audit_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

AuditReport run_audit(const Instance& inst, const std::string& audit, const Json& params) {
  auto it = registry().find(audit);
  if (it == registry().end()) throw InputError("unknown audit '" + audit + "'");
  const Json p = params.is_null() ? Json::object() : params;
  try {
    return it->second(inst, p);
  } catch (const HypothesisViolation& e) {
    AuditReport r;
    r.kind = audit;
    r.verdict = Verdict::not_applicable;
    r.notes.push_back(std::string("hypothesis fails: ") + e.what());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("audit '") + audit + "': bad parameter: " + e.what());
  } catch (const PreconditionError& e) {
    throw InputError(std::string("audit '") + audit + "': " + e.what());
  } catch (const DomainMismatch& e) {
    throw InputError(std::string("audit '") + audit + "': " + e.what());
  }
}

int ScenarioResult::exit_code() const {
  for (const auto& o : outcomes)
    if (!o.matched()) return 1;
  return 0;
}

Instance scenario_instance(const Json& scenario, const std::filesystem::path& base_dir,
                           std::optional<std::uint64_t> seed) {
  if (!scenario.is_object() || !scenario.contains("instance")) throw InputError("scenario needs an 'instance'");
  const Json& src = scenario.at("instance");
  try {
    if (src.contains("file")) {
      std::filesystem::path f = src.at("file").get<std::string>();
      if (f.is_relative()) f = base_dir / f;
      return load_instance(f);
    }
    if (src.contains("generator")) {
      const Json& g = src.at("generator");
      GeneratorSpec spec;
      spec.family = g.at("family").get<std::string>();
      spec.params = g.value("params", Json::object());
      spec.seed = seed ? *seed : scenario.value("seed", std::uint64_t{0});
      return generate(spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad instance source: ") + e.what());
  }
  throw InputError("instance needs 'file' or 'generator'");
}

ScenarioResult run_scenario(const Json& scenario, const std::filesystem::path& base_dir, const RunOptions& opt) {
  const Json& audits = audits_of(scenario);
  const Instance inst = scenario_instance(scenario, base_dir, opt.seed);
  ScenarioResult res;
  res.name = scenario.value("name", "scenario");
  for (const auto& a : audits) {
    AuditOutcome o;
    o.audit = a.at("audit").get<std::string>();
    o.expected = verdict_from_string(a.value("expect", "pass"));
    o.report = run_audit(inst, o.audit, a.value("params", Json::object()));
    res.outcomes.push_back(std::move(o));
  }
  std::optional<std::filesystem::path> dir = opt.out_dir;
  if (!dir && scenario.contains("outputs") && scenario.at("outputs").contains("dir")) {
    dir = std::filesystem::path(scenario.at("outputs").at("dir").get<std::string>());
    if (dir->is_relative()) dir = base_dir / *dir;
  }
  if (dir) {
    std::filesystem::create_directories(*dir);
    std::ostringstream csv;
    csv << "index,audit,expected,verdict,matched,value\n";
    for (std::size_t k = 0; k < res.outcomes.size(); ++k) {
      const auto& o = res.outcomes[k];
      Json j = report_to_json(o.report);
      j["audit"] = o.audit;
      j["expected"] = to_string(o.expected);
      j["scenario"] = res.name;
      if (opt.timestamp) j["generated_at"] = timestamp();
      char name[16];
      std::snprintf(name, sizeof name, "%03zu_", k);
      write_json_file(j, *dir / (std::string(name) + o.audit + ".json"));
      csv << k << ',' << o.audit << ',' << to_string(o.expected) << ',' << to_string(o.report.verdict) << ','
          << (o.matched() ? "yes" : "no") << ',' << (o.report.value ? format_number(*o.report.value) : "") << '\n';
    }
    std::ofstream(*dir / "summary.csv") << csv.str();
  }
  return res;
}

std::vector<SweepRow> sweep(const Json& scenario, const std::filesystem::path& base_dir, const std::string& parameter,
                            const std::vector<double>& values, const RunOptions& opt) {
  const Json& audits = audits_of(scenario);
  bool applies = false;
  for (const auto& a : audits) applies |= a.contains("params") && a.at("params").contains(parameter);
  if (!applies) throw InputError("parameter '" + parameter + "' applies to no audit in the scenario");
  const Instance inst = scenario_instance(scenario, base_dir, opt.seed);
  std::vector<SweepRow> rows;
  for (double v : values) {
    for (const auto& a : audits) {
      if (!a.contains("params") || !a.at("params").contains(parameter)) continue;
      Json p = a.at("params");
      p[parameter] = number_to_json(v);
      rows.push_back({v, a.at("audit").get<std::string>(), p, run_audit(inst, a.at("audit").get<std::string>(), p)});
    }
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "param_value,audit,r_dom,r_cod,eps,value,verdict,constants\n";
  auto col = [](const Json& p, const char* k) {
    return p.contains(k) ? format_number(number_from_json(p.at(k))) : std::string();
  };
  for (const auto& r : rows) {
    out << format_number(r.param_value) << ',' << r.audit << ',' << col(r.params, "r_dom") << ','
        << col(r.params, "r_cod") << ',' << col(r.params, "eps") << ','
        << (r.report.value ? format_number(*r.report.value) : "") << ',' << to_string(r.report.verdict) << ','
        << csv_field(constants_field(r.report)) << '\n';
  }
  return out.str();
}

Json sweep_to_json(const std::vector<SweepRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json j = report_to_json(r.report);
    j["param_value"] = number_to_json(r.param_value);
    j["audit"] = r.audit;
    j["params"] = r.params;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace regmod
