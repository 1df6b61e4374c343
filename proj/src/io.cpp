#include "cstarreg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "cstarreg/error.hpp"

namespace cstarreg::io {

using gridalg::DomainKind;
using gridalg::GridDomain;
using gridalg::GridElement;

namespace {

// JSON has no infinities; they are written as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InputParse, "expected an integer, got '" + s + "'");
  }
  return v;
}

void append_row(std::string& out, const ComplexMatrix& m, Eigen::Index i) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j > 0) out += ',';
    out += format_double(m(i, j).real());
    out += ',';
    out += format_double(m(i, j).imag());
  }
}

// Structural errors found while building an element from input become
// parse errors of that input.
template <typename Fn>
GridElement as_input(Fn&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InputParse) throw;
    throw Error(ErrorCode::InputParse, e.message());
  }
}

}  // namespace

static GridElement grid_from_json_unchecked(const Json& j);
static GridElement grid_from_csv_unchecked(const std::string& text);

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InputParse, "expected a number, got '" + s + "'");
  }
  return v;
}

Json to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json reRow = Json::array();
    Json imRow = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      reRow.push_back(m(i, j).real());
      imRow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(reRow));
    im.push_back(std::move(imRow));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    if (rows <= 0 || cols <= 0) throw Error(ErrorCode::InputParse, "rows and cols must be positive");
    // Accepts nested rows or a flat row-major list; "im" may be omitted.
    auto read = [&](const char* key) {
      std::vector<double> flat;
      if (!j.contains(key)) {
        if (std::string(key) == "im") return std::vector<double>(static_cast<std::size_t>(rows * cols), 0.0);
        throw Error(ErrorCode::InputParse, std::string("matrix JSON lacks \"") + key + "\"");
      }
      const Json& data = j.at(key);
      if (!data.is_array()) throw Error(ErrorCode::InputParse, std::string(key) + " must be an array");
      if (!data.empty() && data.front().is_array()) {
        if (data.size() != static_cast<std::size_t>(rows)) {
          throw Error(ErrorCode::InputParse, std::string(key) + " has the wrong number of rows");
        }
        for (const auto& row : data) {
          if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
            throw Error(ErrorCode::InputParse, std::string(key) + " has a row of the wrong length");
          }
          for (const auto& v : row) flat.push_back(v.get<double>());
        }
      } else {
        for (const auto& v : data) flat.push_back(v.get<double>());
      }
      if (flat.size() != static_cast<std::size_t>(rows * cols)) {
        throw Error(ErrorCode::InputParse, std::string(key) + " does not hold rows * cols entries");
      }
      return flat;
    };
    const std::vector<double> re = read("re");
    const std::vector<double> im = read("im");
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        const auto idx = static_cast<std::size_t>(i * cols + c);
        m(i, c) = Complex(re[idx], im[idx]);
      }
    }
    if (!opcore::is_finite(m)) throw Error(ErrorCode::InputParse, "matrix entries must be finite");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InputParse, std::string("bad matrix JSON: ") + e.what());
  }
}

Json to_json(const GridDomain& d) {
  if (d.kind() == DomainKind::Interval) return Json{{"kind", "interval"}, {"n", d.n()}};
  return Json{{"kind", "disk"}, {"radial", d.radial()}, {"angular", d.angular()}};
}

Json to_json(const GridElement& ge) {
  Json points = Json::array();
  for (const auto& m : ge.values()) points.push_back(to_json(m));
  return Json{{"domain", to_json(ge.domain())},
              {"shape", {ge.rows(), ge.cols()}},
              {"points", points}};
}

GridElement grid_from_json(const Json& j) {
  return as_input([&] { return grid_from_json_unchecked(j); });
}

static GridElement grid_from_json_unchecked(const Json& j) {
  try {
    const Json& dj = j.at("domain");
    const std::string kind = dj.at("kind").get<std::string>();
    GridDomain dom = kind == "interval" ? GridDomain::interval(dj.at("n").get<int>())
                     : kind == "disk"
                         ? GridDomain::disk(dj.at("radial").get<int>(), dj.at("angular").get<int>())
                         : throw Error(ErrorCode::InputParse, "unknown domain kind '" + kind + "'");
    const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 2) throw Error(ErrorCode::InputParse, "shape must have two entries");
    std::vector<ComplexMatrix> values;
    for (const auto& p : j.at("points")) {
      values.push_back(matrix_from_json(p));
      if (values.back().rows() != shape[0] || values.back().cols() != shape[1]) {
        throw Error(ErrorCode::InputParse, "point does not match the declared shape");
      }
    }
    return GridElement(std::move(dom), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InputParse, std::string("bad grid element JSON: ") + e.what());
  }
}

Json to_json(const gridalg::DistBracket& b) {
  return Json{{"lower", number(b.lower)},
              {"upper", number(b.upper)},
              {"certified", b.certified},
              {"epsilon", b.certifiedEpsilon},
              {"probeDelta", b.probeDelta}};
}

Json to_json(const constructpi::PipelineTrace& t) {
  Json checks = Json::object();
  for (const auto& [name, c] : t.checks) {
    checks[name] = Json{{"residual", c.residual}, {"tolerance", c.tolerance}, {"passed", c.passed()}};
  }
  Json groups = Json::object();
  for (const auto& [g, ok] : t.group_status()) groups[g] = ok;
  return Json{{"beta", t.beta},
              {"gamma", t.gamma},
              {"delta", t.delta},
              {"mu1", t.mu1},
              {"shortCircuit", t.shortCircuit},
              {"passed", t.passed()},
              {"worstRatio", number(t.worst_ratio())},
              {"groups", groups},
              {"checks", checks},
              {"w", to_json(t.w)}};
}

Json to_json(const harness::EquivalenceReport& r) {
  Json cond2 = Json::array();
  Json cond3 = Json::array();
  Json cond4 = Json::array();
  Json witnesses = Json::array();
  for (const auto& ev : r.evaluations) {
    cond2.push_back(ev.cond2);
    cond3.push_back(ev.cond3);
    cond4.push_back(ev.cond4);
    witnesses.push_back(Json{{"delta", ev.delta},
                             {"effectiveDelta", ev.effectiveDelta},
                             {"undecided", ev.undecided},
                             {"rampsTested", ev.rampsTested},
                             {"rampsExtended", ev.rampsExtended},
                             {"transportResidual", ev.transportResidual},
                             {"witnessModulus", ev.witnessModulus},
                             {"modulusBound", number(ev.modulusBound)},
                             {"windings", ev.windings},
                             {"obstruction", ev.obstruction}});
  }
  Json cond1 = to_json(r.cond1);
  cond1["atGamma"] = harness::to_string(r.cond1AtGamma);
  return Json{{"element", r.element},
              {"gamma", r.gamma},
              {"gridSpacing", r.gridSpacing},
              {"deltas", r.deltas},
              {"cond1", cond1},
              {"cond2", cond2},
              {"cond3", cond3},
              {"cond4", cond4},
              {"witnesses", witnesses},
              {"verdict", r.verdict()},
              {"violations", r.violations}};
}

std::string matrix_to_csv(const ComplexMatrix& m) {
  std::string out = std::to_string(m.rows()) + "," + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    append_row(out, m, i);
    out += '\n';
  }
  return out;
}

ComplexMatrix matrix_from_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorCode::InputParse, "empty matrix CSV");
  const auto head = split(lines[0], ',');
  if (head.size() != 2) throw Error(ErrorCode::InputParse, "matrix CSV header must be rows,cols");
  const int rows = parse_int(head[0]);
  const int cols = parse_int(head[1]);
  if (rows <= 0 || cols <= 0 || static_cast<int>(lines.size()) != rows + 1) {
    throw Error(ErrorCode::InputParse, "matrix CSV row count does not match the header");
  }
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto cells = split(lines[i + 1], ',');
    if (static_cast<int>(cells.size()) != 2 * cols) {
      throw Error(ErrorCode::InputParse, "matrix CSV row " + std::to_string(i) + " has wrong length");
    }
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(parse_double(cells[2 * j]), parse_double(cells[2 * j + 1]));
  }
  return m;
}

std::string grid_to_csv(const GridElement& ge) {
  const GridDomain& d = ge.domain();
  std::string out = d.kind() == DomainKind::Interval
                        ? "interval," + std::to_string(d.n()) + "\n"
                        : "disk," + std::to_string(d.radial()) + "," + std::to_string(d.angular()) + "\n";
  out += std::to_string(ge.rows()) + "," + std::to_string(ge.cols()) + "\n";
  for (const auto& m : ge.values()) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i > 0) out += ',';
      append_row(out, m, i);
    }
    out += '\n';
  }
  return out;
}

GridElement grid_from_csv(const std::string& text) {
  return as_input([&] { return grid_from_csv_unchecked(text); });
}

static GridElement grid_from_csv_unchecked(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw Error(ErrorCode::InputParse, "grid CSV needs domain and shape lines");
  const auto dl = split(lines[0], ',');
  GridDomain dom = (dl.size() == 2 && dl[0] == "interval") ? GridDomain::interval(parse_int(dl[1]))
                   : (dl.size() == 3 && dl[0] == "disk")
                       ? GridDomain::disk(parse_int(dl[1]), parse_int(dl[2]))
                       : throw Error(ErrorCode::InputParse, "bad grid CSV domain line");
  const auto sl = split(lines[1], ',');
  if (sl.size() != 2) throw Error(ErrorCode::InputParse, "bad grid CSV shape line");
  const int rows = parse_int(sl[0]);
  const int cols = parse_int(sl[1]);
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::InputParse, "shape must be positive");
  std::vector<ComplexMatrix> values;
  for (std::size_t l = 2; l < lines.size(); ++l) {
    const auto cells = split(lines[l], ',');
    if (static_cast<int>(cells.size()) != 2 * rows * cols) {
      throw Error(ErrorCode::InputParse, "grid CSV node line has wrong length");
    }
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const std::size_t at = 2 * static_cast<std::size_t>(i * cols + j);
        m(i, j) = Complex(parse_double(cells[at]), parse_double(cells[at + 1]));
      }
    }
    values.push_back(std::move(m));
  }
  return GridElement(std::move(dom), std::move(values));
}

std::string sweep_csv(const harness::EquivalenceReport& r) {
  std::string out = "delta,cond2,cond3,cond4,residual\n";
  for (const auto& ev : r.evaluations) {
    out += format_double(ev.effectiveDelta) + "," + (ev.cond2 ? "1" : "0") + "," +
           (ev.cond3 ? "1" : "0") + "," + (ev.cond4 ? "1" : "0") + "," +
           format_double(ev.transportResidual) + "\n";
  }
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InputParse, std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InputParse, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InputParse, "cannot write '" + path + "'");
  out << content;
}

}  // namespace cstarreg::io
