#include "cstarreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <variant>

#include "CLI11.hpp"

#include "cstarreg/constructpi.hpp"
#include "cstarreg/error.hpp"
#include "cstarreg/gallery.hpp"
#include "cstarreg/harness.hpp"
#include "cstarreg/io.hpp"
#include "cstarreg/random.hpp"
#include "cstarreg/regularity.hpp"

namespace cstarreg::cli {

using io::Json;

namespace {

const std::vector<std::string> kCommands{"polar", "mp", "cutdown", "lemma3", "dist", "theorem", "suite"};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string source_name(const RunConfig& c) { return c.gallery.empty() ? c.input : c.gallery; }

using Loaded = std::variant<ComplexMatrix, gridalg::GridElement>;

// Gallery names win over files only when no such file exists.
Loaded load_input(const RunConfig& c) {
  const std::string name = source_name(c);
  if (name.empty()) throw Error(ErrorCode::InputParse, "no --input or --gallery given");
  if (!c.gallery.empty() || !std::filesystem::exists(name)) {
    return gallery::make(name, c.gridN);
  }
  const std::string text = io::read_file(name);
  if (ends_with(name, ".csv")) {
    const auto first = text.substr(0, text.find('\n'));
    if (first.rfind("interval", 0) == 0 || first.rfind("disk", 0) == 0) return io::grid_from_csv(text);
    return io::matrix_from_csv(text);
  }
  const Json j = io::parse_json(text);
  if (j.contains("domain")) return io::grid_from_json(j);
  return io::matrix_from_json(j);
}

ComplexMatrix load_matrix(const RunConfig& c) {
  if (source_name(c).empty()) {
    Rng rng(c.seed);
    return rng.gaussian(c.n, c.n);
  }
  Loaded in = load_input(c);
  if (auto* m = std::get_if<ComplexMatrix>(&in)) return *m;
  throw Error(ErrorCode::InputParse, "this command needs a matrix input");
}

gridalg::GridElement load_grid(const RunConfig& c) {
  Loaded in = load_input(c);
  if (auto* g = std::get_if<gridalg::GridElement>(&in)) return std::move(*g);
  throw Error(ErrorCode::InputParse, "this command needs a grid element input");
}

Json run_polar(const RunConfig& c) {
  const ComplexMatrix a = load_matrix(c);
  const opcore::PolarParts p = opcore::polar(a);
  const double scale = std::max(1.0, opcore::op_norm(a));
  return Json{{"command", "polar"},
              {"input", io::to_json(a)},
              {"rank", p.rank},
              {"singularValues", std::vector<double>(p.singularValues.begin(), p.singularValues.end())},
              {"v", io::to_json(p.v)},
              {"absA", io::to_json(p.absA)},
              {"reconstructionError", opcore::op_norm(a - p.v * p.absA) / scale}};
}

Json run_mp(const RunConfig& c) {
  const ComplexMatrix a = load_matrix(c);
  const regularity::RegularityReport rep = regularity::is_regular(a);
  const regularity::PenroseResiduals r = regularity::penrose_residuals(a, *rep.mpInverse);
  return Json{{"command", "mp"},
              {"input", io::to_json(a)},
              {"isRegular", rep.isRegular},
              {"gap", {{"epsilon", std::isfinite(rep.gap->epsilon) ? Json(rep.gap->epsilon) : Json(nullptr)},
                       {"zeroTol", rep.gap->zeroTol}}},
              {"mpInverse", io::to_json(*rep.mpInverse)},
              {"penrose", {{"aba", r.aba}, {"bab", r.bab}, {"abProjection", r.abProj},
                           {"baProjection", r.baProj}, {"scale", r.scale}}}};
}

Json run_cutdown(const RunConfig& c) {
  const double delta = c.deltas.front();
  if (source_name(c).empty()) {
    const ComplexMatrix a = load_matrix(c);
    return Json{{"command", "cutdown"}, {"delta", delta}, {"input", io::to_json(a)},
                {"cutdown", io::to_json(opcore::cutdown(a, delta))}};
  }
  Loaded in = load_input(c);
  if (auto* m = std::get_if<ComplexMatrix>(&in)) {
    return Json{{"command", "cutdown"}, {"delta", delta}, {"input", io::to_json(*m)},
                {"cutdown", io::to_json(opcore::cutdown(*m, delta))}};
  }
  const auto& ge = std::get<gridalg::GridElement>(in);
  const gridalg::GridElement cut = gridalg::lift_cutdown(ge, delta);
  return Json{{"command", "cutdown"},
              {"delta", delta},
              {"element", source_name(c)},
              {"supDistance", gridalg::sup_distance(ge, cut)},
              {"cutdown", io::to_json(cut)}};
}

Json run_lemma3(const RunConfig& c) {
  ComplexMatrix a, x;
  double delta = c.deltas.empty() ? 0.5 : c.deltas.front();
  Json instance;
  if (!source_name(c).empty()) {
    const Json j = io::parse_json(io::read_file(source_name(c)));
    try {
      a = io::matrix_from_json(j.at("a"));
      x = io::matrix_from_json(j.at("x"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InputParse, std::string("lemma3 input needs \"a\" and \"x\": ") + e.what());
    }
    instance = Json{{"source", source_name(c)}, {"delta", delta}};
  } else {
    Rng rng(c.seed);
    const gallery::ConstructionInstance inst =
        gallery::random_construction_instance(rng, c.n, delta, c.ratio);
    a = inst.a;
    x = inst.x;
    delta = inst.delta;
    instance = Json{{"seed", c.seed}, {"n", c.n}, {"ratio", c.ratio}, {"delta", delta},
                    {"beta", inst.beta}};
  }
  const constructpi::PipelineTrace t = constructpi::construct_partial_isometry(a, x, delta);
  const double err = opcore::op_norm(a - t.w * t.absA);
  return Json{{"command", "lemma3"},
              {"instance", instance},
              {"trace", io::to_json(t)},
              {"approxPolarError", err},
              {"approxPolarBound", 2.0 * delta}};
}

Json run_dist(const RunConfig& c) {
  const gridalg::GridElement ge = load_grid(c);
  const gridalg::DistBracket b = gridalg::dist_to_regular(ge, c.tol);
  return Json{{"command", "dist"},
              {"element", source_name(c)},
              {"gridN", c.gridN},
              {"tol", c.tol},
              {"gridSpacing", ge.domain().spacing()},
              {"supNorm", gridalg::sup_norm(ge)},
              {"cond1", io::to_json(b)}};
}

harness::EquivalenceReport theorem_report(const gridalg::GridElement& ge, const std::string& name,
                                          double gamma, std::vector<double> deltas,
                                          const gridalg::DistBracket& bracket) {
  if (deltas.empty()) deltas = harness::default_delta_grid(ge, gamma);
  return harness::check_equivalences(ge, name, gamma, deltas, bracket);
}

}  // namespace

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown command '" + c.command + "'");
  }
  if (!(c.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
  if (c.gridN < gridalg::kMinIntervalPoints) {
    throw Error(ErrorCode::InvalidArgument, "--gridN must be at least 16");
  }
  if (c.format != "json" && c.format != "csv") {
    throw Error(ErrorCode::InvalidArgument, "--format must be json or csv");
  }
  if (c.format == "csv" && c.command != "theorem") {
    throw Error(ErrorCode::InvalidArgument, "csv output is only available for theorem sweeps");
  }
  if (c.command == "cutdown" && c.deltas.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "cutdown needs exactly one --delta");
  }
  if ((c.command == "dist" || c.command == "theorem") && source_name(c).empty()) {
    throw Error(ErrorCode::InvalidArgument, c.command + " needs --input or --gallery");
  }
  if (c.command == "lemma3" && (c.n < 1 || !(c.ratio > 0.0 && c.ratio < 1.0))) {
    throw Error(ErrorCode::InvalidArgument, "lemma3 needs --n >= 1 and 0 < --ratio < 1");
  }
  if (!(c.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "--epsilon must be positive");
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::string body;
  int code = kExitOk;
  try {
    validate(c);
    Json report;
    if (c.command == "polar") {
      report = run_polar(c);
    } else if (c.command == "mp") {
      report = run_mp(c);
    } else if (c.command == "cutdown") {
      report = run_cutdown(c);
    } else if (c.command == "lemma3") {
      report = run_lemma3(c);
    } else if (c.command == "dist") {
      report = run_dist(c);
    } else if (c.command == "theorem") {
      const gridalg::GridElement ge = load_grid(c);
      const gridalg::DistBracket bracket = gridalg::dist_to_regular(ge, c.tol);
      const harness::EquivalenceReport rep =
          theorem_report(ge, source_name(c), c.gamma.value_or(0.0), c.deltas, bracket);
      if (!rep.consistent()) code = kExitInconsistent;
      report = io::to_json(rep);
      if (c.format == "csv") body = io::sweep_csv(rep);
    } else {
      Json reports = Json::array();
      bool allConsistent = true;
      for (const std::string& name : gallery::names()) {
        const int n = name == "disk-z" ? std::min(c.gridN, 64) : c.gridN;
        const gridalg::GridElement ge = gallery::make(name, n);
        const gridalg::DistBracket bracket = gridalg::dist_to_regular(ge, c.tol);
        for (double gamma : harness::default_gamma_probes(bracket)) {
          const harness::EquivalenceReport rep = theorem_report(ge, name, gamma, {}, bracket);
          allConsistent = allConsistent && rep.consistent();
          reports.push_back(io::to_json(rep));
        }
      }
      if (!allConsistent) code = kExitInconsistent;
      report = Json{{"command", "suite"}, {"gridN", c.gridN}, {"tol", c.tol},
                    {"consistent", allConsistent}, {"reports", reports}};
    }
    if (body.empty()) body = report.dump(2) + "\n";
  } catch (const Error& e) {
    code = e.code() == ErrorCode::InconsistentVerdict ? kExitInconsistent : kExitInputError;
    body = Json{{"command", c.command},
                {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.message()}}}}
               .dump(2) +
           "\n";
    err << e.what() << "\n";
  }

  if (c.outPath.empty()) {
    out << body;
  } else {
    try {
      io::write_file(c.outPath, body);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return kExitInputError;
    }
  }
  return code;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Regularity and polar-decomposition workbench for matrix and grid algebras"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", config.input, "Input file (JSON or CSV) or gallery name");
    sub->add_option("--gallery", config.gallery, "Gallery element name");
    sub->add_option("--delta", config.deltas, "Threshold(s) delta")->expected(1, -1);
    sub->add_option("--gamma", config.gamma, "Distance probe gamma");
    sub->add_option("--epsilon", config.epsilon, "Approximant offset epsilon");
    sub->add_option("--gridN", config.gridN, "Grid resolution");
    sub->add_option("--tol", config.tol, "Bisection tolerance");
    sub->add_option("--seed", config.seed, "Random seed");
    sub->add_option("--n", config.n, "Matrix size for generated inputs");
    sub->add_option("--ratio", config.ratio, "||a - x|| / delta for generated lemma3 inputs");
    sub->add_option("--out", config.outPath, "Report path (stdout if omitted)");
    sub->add_option("--format", config.format, "json or csv");
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"polar", "Canonical polar decomposition of a matrix"},
      {"mp", "Moore-Penrose inverse and Penrose residuals"},
      {"cutdown", "delta cut-down of a matrix or grid element"},
      {"lemma3", "Partial isometry construction from a nearby regular element"},
      {"dist", "Bracket for the distance to the regular elements"},
      {"theorem", "Equivalence check over a delta sweep"},
      {"suite", "Equivalence checks over the whole gallery"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    sub->callback([&config, name = name] { config.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }
  return run(config, std::cout, std::cerr);
}

}  // namespace cstarreg::cli
