#pragma once

// JSON and CSV encodings. Doubles are written in shortest round-trip form,
// so write-then-read reproduces every value bit for bit.

#include <string>

#include "json.hpp"

#include "cstarreg/constructpi.hpp"
#include "cstarreg/gridalg.hpp"
#include "cstarreg/harness.hpp"

namespace cstarreg::io {

using Json = nlohmann::ordered_json;

/// {"rows", "cols", "re": [[row], ...], "im": [[row], ...]}
Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// {"domain": {...}, "shape": [rows, cols], "points": [matrix, ...]}
Json to_json(const gridalg::GridDomain& d);
Json to_json(const gridalg::GridElement& ge);
gridalg::GridElement grid_from_json(const Json& j);

Json to_json(const gridalg::DistBracket& b);
Json to_json(const constructpi::PipelineTrace& t);
Json to_json(const harness::EquivalenceReport& r);

/// Header "rows,cols", then one line per row of re,im pairs.
std::string matrix_to_csv(const ComplexMatrix& m);
ComplexMatrix matrix_from_csv(const std::string& text);

/// Domain line ("interval,N" or "disk,NR,NTHETA"), shape line, then one
/// line per node with the row-major re,im pairs.
std::string grid_to_csv(const gridalg::GridElement& ge);
gridalg::GridElement grid_from_csv(const std::string& text);

/// Columns delta, cond2, cond3, cond4, residual.
std::string sweep_csv(const harness::EquivalenceReport& r);

std::string format_double(double x);
double parse_double(const std::string& s);

/// Parses text as JSON; throws InputParse with the parser's message.
Json parse_json(const std::string& text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace cstarreg::io
