#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "cstarreg/cli.hpp"
#include "cstarreg/error.hpp"
#include "cstarreg/gallery.hpp"
#include "cstarreg/io.hpp"
#include "cstarreg/random.hpp"

using namespace cstarreg;
using cli::RunConfig;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  io::Json json() const { return io::parse_json(out); }
};

Outcome run(const RunConfig& c) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(c, out, err);
  return {code, out.str()};
}

Outcome run_binary(const std::string& args) {
  const std::string cmd = std::string(CSTARREG_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cstarreg_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("gallery") {
  CHECK(gallery::names().size() == 5);
  const auto osc = gallery::make("osc", 1024);
  CHECK(osc.is_scalar());
  // |f(t_k)| = t_k up to the rounding of one complex multiply.
  for (std::size_t k = 0; k < osc.size(); ++k) {
    CHECK(std::abs(std::abs(osc.scalar(k)) - osc.domain().t(k)) <= 4e-16 * osc.domain().t(k));
  }
  const auto one = gallery::make("const-unitary", 32);
  for (std::size_t k = 0; k < one.size(); ++k) CHECK(one.scalar(k) == Complex(1.0));
  const auto z = gallery::make("disk-z", 128);
  CHECK(z.domain().angular() == 256);
  for (std::size_t k = 0; k < z.size(); ++k) CHECK(std::abs(z.scalar(k) - z.domain().point(k)) == 0.0);
  try {
    gallery::make("nope", 32);
    FAIL("expected UnknownGalleryName");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownGalleryName);
  }
}

TEST_CASE("seeded generators are reproducible") {
  Rng a(9);
  Rng b(9);
  const auto fa = gallery::random_scalar_1d(a, 64);
  const auto fb = gallery::random_scalar_1d(b, 64);
  CHECK(gridalg::sup_distance(fa, fb) == 0.0);
  const auto ia = gallery::random_construction_instance(a, 5, 0.5, 0.5);
  const auto ib = gallery::random_construction_instance(b, 5, 0.5, 0.5);
  CHECK(ia.a == ib.a);
  CHECK(ia.beta == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("dist on disk-z") {
  RunConfig c;
  c.command = "dist";
  c.input = "disk-z";
  c.gridN = 128;
  c.tol = 1e-3;
  const Outcome o = run(c);
  CHECK(o.code == cli::kExitOk);
  const io::Json j = o.json();
  CHECK(j["cond1"]["lower"].get<double>() >= 0.9);
  CHECK(j["cond1"]["upper"].get<double>() <= 1.1);
}

TEST_CASE("mp on a projection file") {
  Rng rng(61);
  const ComplexMatrix p = rng.projection(4, 2);
  const auto path = scratch("projection.json");
  io::write_file(path.string(), io::to_json(p).dump());
  RunConfig c;
  c.command = "mp";
  c.input = path.string();
  const Outcome o = run(c);
  REQUIRE(o.code == cli::kExitOk);
  const ComplexMatrix b = io::matrix_from_json(o.json()["mpInverse"]);
  CHECK(opcore::op_norm(b - p) <= 1e-10);

  // Same matrix through CSV.
  const auto csvPath = scratch("projection.csv");
  io::write_file(csvPath.string(), io::matrix_to_csv(p));
  c.input = csvPath.string();
  CHECK(run(c).code == cli::kExitOk);
}

TEST_CASE("lemma3 report") {
  RunConfig c;
  c.command = "lemma3";
  c.seed = 7;
  c.n = 8;
  c.deltas = {0.5};
  const Outcome o = run(c);
  REQUIRE(o.code == cli::kExitOk);
  const io::Json j = o.json();
  CHECK(j["trace"]["passed"].get<bool>());
  for (const auto& [name, check] : j["trace"]["checks"].items()) {
    INFO(name);
    CHECK(check["residual"].get<double>() <= 1e-7);
  }
  CHECK(j["approxPolarError"].get<double>() <= j["approxPolarBound"].get<double>());
}

TEST_CASE("reports are byte-identical across runs") {
  RunConfig c;
  c.command = "theorem";
  c.input = "osc";
  c.gridN = 128;
  c.tol = 1e-3;
  c.gamma = 0.0;
  CHECK(run(c).out == run(c).out);
  c.command = "lemma3";
  c.input.clear();
  c.seed = 3;
  c.deltas = {0.4};
  CHECK(run(c).out == run(c).out);

  const Outcome first = run_binary("lemma3 --seed 11 --n 6 --delta 0.5");
  const Outcome second = run_binary("lemma3 --seed 11 --n 6 --delta 0.5");
  CHECK(first.code == 0);
  CHECK(first.out == second.out);
  CHECK_FALSE(first.out.empty());
}

TEST_CASE("theorem as a CSV sweep") {
  RunConfig c;
  c.command = "theorem";
  c.gallery = "disk-z";
  c.gridN = 32;
  c.tol = 1e-3;
  c.gamma = 0.9;
  c.deltas = {0.95, 1.2};
  c.format = "csv";
  const Outcome o = run(c);
  CHECK(o.code == cli::kExitOk);
  std::istringstream lines(o.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "delta,cond2,cond3,cond4,residual");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("exit codes") {
  RunConfig c;
  c.command = "dist";
  c.input = "no-such-element";
  Outcome o = run(c);
  CHECK(o.code == cli::kExitInputError);
  CHECK(o.json()["error"]["code"] == "UnknownGalleryName");

  const auto bad = scratch("bad.json");
  io::write_file(bad.string(), "{\"rows\": 2");
  c.command = "mp";
  c.input = bad.string();
  o = run(c);
  CHECK(o.code == cli::kExitInputError);
  CHECK(o.json()["error"]["code"] == "InputParse");

  c.command = "cutdown";
  c.input = "osc";
  c.deltas = {};
  CHECK(run(c).code == cli::kExitInputError);
  c.deltas = {0.1};
  c.gridN = 8;
  CHECK(run(c).code == cli::kExitInputError);
  c.gridN = 64;
  c.format = "csv";
  CHECK(run(c).code == cli::kExitInputError);

  CHECK(run_binary("dist --input osc --tol -1").code == cli::kExitInputError);
  CHECK(run_binary("frobnicate").code != 0);
}

TEST_CASE("report written to --out") {
  const auto path = scratch("cut.json");
  std::filesystem::remove(path);
  const Outcome o = run_binary("cutdown --input osc --gridN 32 --delta 0.1 --out " + path.string());
  CHECK(o.code == 0);
  CHECK(o.out.empty());
  const io::Json j = io::parse_json(io::read_file(path.string()));
  CHECK(j["command"] == "cutdown");
  const auto cut = io::grid_from_json(j["cutdown"]);
  CHECK(gridalg::sup_norm(cut) == doctest::Approx(0.9));
}
