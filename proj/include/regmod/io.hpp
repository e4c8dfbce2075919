#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "regmod/coderiv.hpp"
#include "regmod/report.hpp"
#include "regmod/setmap.hpp"
#include "regmod/varprinciples.hpp"

namespace regmod {

using Json = nlohmann::json;

// Named objects of one experiment. Maps and fields refer to spaces by id, so objects
// that name the same space share one SpaceRef.
struct Instance {
  std::map<std::string, SpaceRef> spaces;
  std::map<std::string, SetMap> maps;
  std::map<std::string, BiParamSetMap> bimaps;
  std::map<std::string, ScalarField> fields;
  std::map<std::string, Polyhedron> polyhedra;
  std::map<std::string, PolyMap> polymaps;
  Json meta = Json::object();

  [[nodiscard]] const SpaceRef& space(const std::string& id) const;
  [[nodiscard]] const SetMap& map(const std::string& id) const;
  [[nodiscard]] const BiParamSetMap& bimap(const std::string& id) const;
  [[nodiscard]] const ScalarField& field(const std::string& id) const;
  [[nodiscard]] const Polyhedron& polyhedron(const std::string& id) const;
  [[nodiscard]] const PolyMap& polymap(const std::string& id) const;
};

// Numbers with the "inf" / "-inf" string tokens for infinities.
Json number_to_json(double v);
double number_from_json(const Json& j);

Json space_to_json(const MetricSpace& m);
// Accepts {"labels", "dist"} or {"line": [coords]}; refuses non-metrics with InputError.
SpaceRef space_from_json(const Json& j);

Json instance_to_json(const Instance& inst);
// Every object is validated while parsing; any problem is an InputError.
Instance instance_from_json(const Json& j);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

Json report_to_json(const AuditReport& r);

VectorXd vector_from_json(const Json& j);
MatrixXd matrix_from_json(const Json& j);
Json vector_to_json(const VectorXd& v);
Json matrix_to_json(const MatrixXd& m);

}  // namespace regmod
