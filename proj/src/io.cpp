#include "regmod/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "regmod/errors.hpp"

namespace regmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class M>
const typename M::mapped_type& lookup(const M& m, const std::string& id, const char* what) {
  auto it = m.find(id);
  if (it == m.end()) throw InputError(std::string("unknown ") + what + " '" + id + "'");
  return it->second;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

Index index_from_json(const Json& j, std::size_t bound, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0 || std::size_t(j.get<long long>()) >= bound)
    throw InputError(std::string(what) + ": index out of range");
  return j.get<Index>();
}

}  // namespace

const SpaceRef& Instance::space(const std::string& id) const { return lookup(spaces, id, "space"); }
const SetMap& Instance::map(const std::string& id) const { return lookup(maps, id, "map"); }
const BiParamSetMap& Instance::bimap(const std::string& id) const { return lookup(bimaps, id, "bimap"); }
const ScalarField& Instance::field(const std::string& id) const { return lookup(fields, id, "field"); }
const Polyhedron& Instance::polyhedron(const std::string& id) const { return lookup(polyhedra, id, "polyhedron"); }
const PolyMap& Instance::polymap(const std::string& id) const { return lookup(polymaps, id, "polymap"); }

Json number_to_json(double v) {
  if (std::isnan(v)) throw InputError("NaN cannot be serialized");
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    if (j == "inf") return kInf;
    if (j == "-inf") return -kInf;
  }
  throw InputError("expected a number or an infinity token, got " + j.dump());
}

VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = number_from_json(j[i]);
  return v;
}

MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected a matrix (array of rows)");
  if (j.empty()) return MatrixXd(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InputError("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) m(Eigen::Index(i), Eigen::Index(k)) = number_from_json(j[i][k]);
  }
  return m;
}

Json vector_to_json(const VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(number_to_json(v(i)));
  return j;
}

Json matrix_to_json(const MatrixXd& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(vector_to_json(m.row(i).transpose()));
  return j;
}

Json space_to_json(const MetricSpace& m) { return {{"labels", m.labels()}, {"dist", m.matrix()}}; }

SpaceRef space_from_json(const Json& j) {
  if (j.is_object() && j.contains("line")) {
    std::vector<double> coords;
    for (const auto& c : field(j, "line")) coords.push_back(number_from_json(c));
    return line_space(coords);
  }
  const Json& d = field(j, "dist");
  if (!d.is_array()) throw InputError("dist must be a matrix");
  std::vector<std::vector<double>> dist;
  for (const auto& row : d) {
    if (!row.is_array()) throw InputError("dist must be a matrix");
    std::vector<double> r;
    for (const auto& x : row) r.push_back(number_from_json(x));
    dist.push_back(std::move(r));
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const auto& l : j.at("labels")) {
      if (!l.is_string()) throw InputError("labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < dist.size(); ++i) labels.push_back(std::to_string(i));
  }
  return make_space(std::move(labels), std::move(dist));
}

Json instance_to_json(const Instance& inst) {
  // Spaces are written under their ids; objects refer to them by pointer identity.
  auto space_id = [&](const SpaceRef& s) -> std::string {
    for (const auto& [id, sp] : inst.spaces)
      if (sp == s) return id;
    throw InputError("object refers to a space that is not in the bundle");
  };
  Json j;
  j["spaces"] = Json::object();
  for (const auto& [id, s] : inst.spaces) j["spaces"][id] = space_to_json(*s);
  j["maps"] = Json::object();
  for (const auto& [id, f] : inst.maps) {
    Json pairs = Json::array();
    for (const auto& [x, y] : f.graph()) pairs.push_back({x, y});
    j["maps"][id] = {{"dom", space_id(f.dom())}, {"cod", space_id(f.cod())}, {"pairs", pairs}};
  }
  j["bimaps"] = Json::object();
  for (const auto& [id, g] : inst.bimaps) {
    Json triples = Json::array();
    for (const auto& t : g.graph()) triples.push_back({t[0], t[1], t[2]});
    j["bimaps"][id] = {{"dom1", space_id(g.dom1())},
                       {"dom2", space_id(g.dom2())},
                       {"cod", space_id(g.cod())},
                       {"triples", triples}};
  }
  j["fields"] = Json::object();
  for (const auto& [id, f] : inst.fields) {
    Json vals = Json::array();
    for (double v : f.values()) vals.push_back(number_to_json(v));
    j["fields"][id] = {{"space", space_id(f.space())}, {"values", vals}};
  }
  j["polyhedra"] = Json::object();
  for (const auto& [id, p] : inst.polyhedra) j["polyhedra"][id] = {{"A", matrix_to_json(p.A())}, {"b", vector_to_json(p.b())}};
  j["polymaps"] = Json::object();
  for (const auto& [id, p] : inst.polymaps)
    j["polymaps"][id] = {{"n", p.n}, {"m", p.m}, {"A", matrix_to_json(p.graph.A())}, {"b", vector_to_json(p.graph.b())}};
  j["meta"] = inst.meta;
  return j;
}

Instance instance_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("instance bundle must be a JSON object");
  Instance inst;
  auto section = [&](const char* key) -> const Json& {
    static const Json empty = Json::object();
    if (!j.contains(key)) return empty;
    if (!j.at(key).is_object()) throw InputError(std::string("section '") + key + "' must be an object");
    return j.at(key);
  };
  try {
    for (const auto& [id, s] : section("spaces").items()) inst.spaces.emplace(id, space_from_json(s));
    for (const auto& [id, m] : section("maps").items()) {
      const SpaceRef& dom = inst.space(field(m, "dom").get<std::string>());
      const SpaceRef& cod = inst.space(field(m, "cod").get<std::string>());
      std::vector<std::pair<Index, Index>> pairs;
      for (const auto& p : field(m, "pairs")) {
        if (!p.is_array() || p.size() != 2) throw InputError("map pairs must be [x, y]");
        pairs.emplace_back(index_from_json(p[0], dom->size(), "map pair"), index_from_json(p[1], cod->size(), "map pair"));
      }
      inst.maps.emplace(id, SetMap(dom, cod, std::move(pairs)));
    }
    for (const auto& [id, m] : section("bimaps").items()) {
      const SpaceRef& d1 = inst.space(field(m, "dom1").get<std::string>());
      const SpaceRef& d2 = inst.space(field(m, "dom2").get<std::string>());
      const SpaceRef& cod = inst.space(field(m, "cod").get<std::string>());
      std::vector<std::array<Index, 3>> triples;
      for (const auto& t : field(m, "triples")) {
        if (!t.is_array() || t.size() != 3) throw InputError("bimap triples must be [y1, y2, z]");
        triples.push_back({index_from_json(t[0], d1->size(), "bimap triple"), index_from_json(t[1], d2->size(), "bimap triple"),
                           index_from_json(t[2], cod->size(), "bimap triple")});
      }
      inst.bimaps.emplace(id, BiParamSetMap(d1, d2, cod, std::move(triples)));
    }
    for (const auto& [id, f] : section("fields").items()) {
      std::vector<double> vals;
      for (const auto& v : field(f, "values")) vals.push_back(number_from_json(v));
      inst.fields.emplace(id, ScalarField(inst.space(field(f, "space").get<std::string>()), std::move(vals)));
    }
    for (const auto& [id, p] : section("polyhedra").items())
      inst.polyhedra.emplace(id, Polyhedron(matrix_from_json(field(p, "A")), vector_from_json(field(p, "b"))));
    for (const auto& [id, p] : section("polymaps").items()) {
      const int n = field(p, "n").get<int>(), m = field(p, "m").get<int>();
      MatrixXd A = matrix_from_json(field(p, "A"));
      if (A.rows() == 0) A.resize(0, n + m);
      inst.polymaps.emplace(id, PolyMap(n, m, Polyhedron(std::move(A), vector_from_json(field(p, "b")))));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed instance: ") + e.what());
  } catch (const PreconditionError& e) {
    throw InputError(std::string("invalid instance: ") + e.what());
  } catch (const DomainMismatch& e) {
    throw InputError(std::string("invalid instance: ") + e.what());
  }
  if (j.contains("meta")) inst.meta = j.at("meta");
  return inst;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

Instance load_instance(const std::filesystem::path& path) { return instance_from_json(read_json_file(path)); }

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  write_json_file(instance_to_json(inst), path);
}

Json report_to_json(const AuditReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["verdict"] = to_string(r.verdict);
  j["value"] = r.value ? number_to_json(*r.value) : Json(nullptr);
  j["window"] = Json::object();
  for (const auto& [k, v] : r.window) j["window"][k] = number_to_json(v);
  j["constants"] = Json::object();
  for (const auto& [k, v] : r.constants) j["constants"][k] = std::isnan(v) ? Json(nullptr) : number_to_json(v);
  j["witnesses"] = Json::array();
  for (const auto& w : r.witnesses) {
    Json vals = Json::array();
    for (double v : w.values) vals.push_back(std::isnan(v) ? Json(nullptr) : number_to_json(v));
    j["witnesses"].push_back({{"role", w.role}, {"values", vals}});
  }
  j["notes"] = r.notes;
  return j;
}

}  // namespace regmod
