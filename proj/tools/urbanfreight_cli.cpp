#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "urbanfreight/urbanfreight.hpp"

namespace uf = urbanfreight;

namespace {

enum Exit { kOk = 0, kValidation = 2, kInfeasible = 3, kInternal = 4 };

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw uf::DomainError(what + ": cannot read '" + s + "'");
  }
}

struct Common {
  std::string scenario;
  std::string output;
  std::string format = "table";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "scenario file")->required();
  cmd->add_option("--output,-o", c.output, "output file (default stdout)");
  cmd->add_option("--format", c.format, "table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
}

std::size_t layer_index(int layer, const uf::SchemeSpec& s) {
  if (layer < 1 || static_cast<std::size_t>(layer) > s.layers.size())
    throw uf::DomainError("--layer " + std::to_string(layer) + " out of range (scheme '" + s.name +
                          "' has " + std::to_string(s.layers.size()) + " layers)");
  return static_cast<std::size_t>(layer - 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urbanfreight: multi-echelon urban freight scheme evaluation"};
  app.require_subcommand(1);

  Common common;

  std::string scheme;
  auto* evaluate = app.add_subcommand("evaluate", "KPIs of one scheme");
  add_common(evaluate, common);
  evaluate->add_option("--scheme", scheme, "scheme name")->required();

  std::string schemes;
  std::string baseline;
  auto* compare = app.add_subcommand("compare", "KPI table with deltas against a baseline");
  add_common(compare, common);
  compare->add_option("--schemes", schemes, "comma-separated scheme names")->required();
  compare->add_option("--baseline", baseline, "baseline scheme (default: first)");

  int layer = 0;
  std::string vehicles;
  std::uint64_t seed = 0;
  bool oracle = false;
  bool trace = false;
  auto* optimize = app.add_subcommand("optimize", "allocate unit types to vehicle types in one layer");
  add_common(optimize, common);
  optimize->add_option("--scheme", scheme, "scheme name")->required();
  optimize->add_option("--layer", layer, "layer number, starting at 1")->required();
  optimize->add_option("--vehicles", vehicles, "comma-separated vehicle ids")->required();
  auto* seed_opt = optimize->add_option("--seed", seed, "random seed");
  optimize->add_flag("--oracle", oracle, "also run the exhaustive grid search");
  optimize->add_flag("--trace", trace, "include the best-so-far trace");

  std::string param;
  std::string range;
  auto* sweep = app.add_subcommand("sweep", "one-dimensional parameter sweep over a layer");
  add_common(sweep, common);
  sweep->add_option("--scheme", scheme, "scheme name")->required();
  sweep->add_option("--layer", layer, "layer number, starting at 1")->required();
  sweep->add_option("--param", param, "parameter name")->required();
  sweep->add_option("--range", range, "start:stop:step")->required();

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--scenario", common.scenario, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const auto sc = uf::load_scenario(common.scenario);
    const auto fmt = uf::parse_format(common.format);

    if (*validate) {
      std::cout << "ok: " << sc.name << ": " << sc.vehicles.size() << " vehicles, "
                << sc.units.size() << " unit types, " << sc.suppliers.size() << " suppliers, "
                << sc.schemes.size() << " schemes\n";
      return kOk;
    }

    if (*evaluate) {
      const auto report = uf::evaluate_scheme(uf::build_scheme(sc, scheme));
      uf::write_output(common.output, uf::render(report, fmt));
      return kOk;
    }

    if (*compare) {
      auto names = split(schemes, ',');
      if (!baseline.empty()) {
        names.erase(std::remove(names.begin(), names.end(), baseline), names.end());
        names.insert(names.begin(), baseline);
      }
      std::vector<uf::SchemeSpec> specs;
      for (const auto& n : names) specs.push_back(uf::build_scheme(sc, n));
      uf::write_output(common.output, uf::render(uf::compare_schemes(specs), fmt));
      return kOk;
    }

    if (*optimize) {
      const auto spec = uf::build_scheme(sc, scheme);
      const auto idx = layer_index(layer, spec);
      std::vector<uf::VehicleType> fleet;
      for (const auto& id : split(vehicles, ',')) {
        const auto* v = sc.find_vehicle(id);
        if (!v)
          throw uf::ValidationError(uf::ValidationError::Kind::unresolved_reference,
                                    "unknown vehicle '" + id + "'");
        fleet.push_back(*v);
      }
      auto config = sc.sa;
      if (*seed_opt) config.seed = seed;

      uf::OptimizationReport rep;
      rep.scheme = spec.name;
      rep.layer_index = idx;
      rep.problem = uf::problem_from_layer(spec.layers[idx], fleet, spec.external_factors);
      rep.result = uf::simulated_annealing(rep.problem, config);
      if (oracle) rep.oracle = uf::brute_force_grid(rep.problem, config.grid_step);
      rep.include_trace = trace;
      if (rep.result.feasible) {
        const auto replaced = uf::with_layer(
            spec, idx, uf::apply_allocation(spec.layers[idx], rep.problem, rep.result.allocation));
        rep.scheme_totals = uf::evaluate_scheme(replaced).totals;
      }
      uf::write_output(common.output, uf::render(rep, fmt));
      if (!rep.result.feasible) {
        std::cerr << "error: no feasible allocation found; reporting the least-violating one\n";
        return kInfeasible;
      }
      return kOk;
    }

    if (*sweep) {
      const auto parts = split(range, ':');
      if (parts.size() != 3) throw uf::DomainError("--range must be start:stop:step");
      uf::SweepSpec s;
      s.parameter = param;
      s.start = parse_double(parts[0], "--range start");
      s.stop = parse_double(parts[1], "--range stop");
      s.step = parse_double(parts[2], "--range step");
      s.target = uf::build_scheme(sc, scheme);
      s.layer_index = layer_index(layer, s.target);
      uf::write_output(common.output, uf::render(uf::sweep_parameter(s), fmt));
      return kOk;
    }
  } catch (const uf::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const uf::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const uf::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const uf::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << " [binding: " << uf::to_string(e.constraint())
              << "]\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
