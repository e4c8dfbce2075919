// Command-line front end: generate instances, run and sweep scenarios, validate files.
// Exit codes: 0 all verdicts as expected, 1 unexpected audit verdict, 2 usage or input error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regmod/errors.hpp"
#include "regmod/generators.hpp"
#include "regmod/scenario.hpp"

namespace {

using regmod::Json;

Json parse_param_value(const std::string& v) {
  try {
    return Json::parse(v);
  } catch (const nlohmann::json::exception&) {
    return v;  // bare strings
  }
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(regmod::number_from_json(parse_param_value(item)));
  }
  return out;
}

void emit(const std::string& text, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_file);
  if (!f) throw regmod::InputError("cannot write '" + out_file + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-space and polyhedral audits of regularity moduli"};
  app.require_subcommand(1);
  std::size_t budget = 0;
  app.add_option("--budget", budget, "enumeration budget (overrides REGMOD_BUDGET)");

  auto* gen = app.add_subcommand("generate", "write a generated instance bundle");
  std::string family, params_json = "{}", out_file, out_dir;
  std::vector<std::string> kv;
  std::uint64_t seed = 0;
  gen->add_option("--family", family, "generator family")->required();
  gen->add_option("--param", kv, "family parameter as key=value (repeatable)");
  gen->add_option("--params-json", params_json, "family parameters as a JSON object");
  gen->add_option("--seed", seed, "64-bit seed");
  gen->add_option("--out", out_file, "output file (default stdout)");
  gen->add_option("--out-dir", out_dir, "write <family>-<seed>.json into this directory");

  auto* run = app.add_subcommand("run", "run a scenario");
  std::string scenario_file;
  std::optional<std::uint64_t> seed_override;
  bool no_timestamp = false;
  run->add_option("scenario", scenario_file, "scenario JSON")->required();
  run->add_option("--seed", seed_override, "override the scenario seed");
  run->add_option("--out-dir", out_dir, "directory for reports and summary.csv");
  run->add_flag("--no-timestamp", no_timestamp, "omit generated_at from reports");

  auto* sw = app.add_subcommand("sweep", "vary one audit parameter over a list of values");
  std::string parameter, values, format = "csv";
  sw->add_option("scenario", scenario_file, "scenario JSON")->required();
  sw->add_option("--param", parameter, "parameter key, e.g. r_dom, r_cod, eps, delta")->required();
  sw->add_option("--values", values, "comma-separated values; an empty list gives the header only")
      ->required()
      ->expected(0, 1);
  sw->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sw->add_option("--seed", seed_override, "override the scenario seed");
  sw->add_option("--out", out_file, "output file (default stdout)");
  sw->add_option("--out-dir", out_dir, "write sweep.<format> into this directory");

  auto* val = app.add_subcommand("validate", "check an instance bundle or a scenario");
  std::string file;
  val->add_option("file", file, "instance or scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (budget > 0) regmod::set_enumeration_budget(budget);
    regmod::RunOptions opt;
    opt.seed = seed_override;
    opt.timestamp = !no_timestamp;
    if (!out_dir.empty()) opt.out_dir = out_dir;

    if (*gen) {
      regmod::GeneratorSpec spec{family, Json::parse(params_json), seed};
      for (const auto& item : kv) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw regmod::InputError("--param expects key=value, got '" + item + "'");
        spec.params[item.substr(0, eq)] = parse_param_value(item.substr(eq + 1));
      }
      const Json bundle = regmod::instance_to_json(regmod::generate(spec));
      if (!out_dir.empty()) {
        const auto path = std::filesystem::path(out_dir) / (family + "-" + std::to_string(seed) + ".json");
        regmod::write_json_file(bundle, path);
        std::cout << path.string() << '\n';
      } else {
        emit(bundle.dump(2) + "\n", out_file);
      }
      return 0;
    }
    if (*run) {
      const Json sc = regmod::read_json_file(scenario_file);
      const auto res = regmod::run_scenario(sc, std::filesystem::path(scenario_file).parent_path(), opt);
      for (const auto& o : res.outcomes) {
        std::cout << (o.matched() ? "ok   " : "FAIL ") << o.audit << ": " << regmod::to_string(o.report.verdict)
                  << " (expected " << regmod::to_string(o.expected) << ")";
        if (o.report.value) std::cout << " value=" << regmod::format_number(*o.report.value);
        std::cout << '\n';
      }
      return res.exit_code();
    }
    if (*sw) {
      const Json sc = regmod::read_json_file(scenario_file);
      const auto rows = regmod::sweep(sc, std::filesystem::path(scenario_file).parent_path(), parameter,
                                      parse_values(values), opt);
      const std::string text =
          format == "csv" ? regmod::sweep_to_csv(rows) : regmod::sweep_to_json(rows).dump(2) + "\n";
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        out_file = (std::filesystem::path(out_dir) / ("sweep." + format)).string();
      }
      emit(text, out_file);
      return 0;
    }
    if (*val) {
      const Json j = regmod::read_json_file(file);
      if (j.is_object() && j.contains("audits")) {
        regmod::scenario_instance(j, std::filesystem::path(file).parent_path());
        for (const auto& a : j.at("audits")) {
          const std::string name = a.value("audit", "");
          const auto& names = regmod::audit_names();
          if (std::find(names.begin(), names.end(), name) == names.end())
            throw regmod::InputError("unknown audit '" + name + "'");
        }
        std::cout << "valid scenario\n";
      } else {
        const auto inst = regmod::instance_from_json(j);
        std::cout << "valid instance: " << inst.spaces.size() << " spaces, " << inst.maps.size() << " maps, "
                  << inst.polyhedra.size() << " polyhedra, " << inst.polymaps.size() << " polymaps\n";
      }
      return 0;
    }
  } catch (const regmod::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const regmod::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
