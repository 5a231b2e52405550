#pragma once

// Text formats.
//
// Matrix: a line with n, then n lines of n whitespace-separated decimals.
//
// Problem file: key=value header lines, then the matrices C_1..C_p and
// D_1..D_q in matrix format. Recognized keys:
//   g    quadlogdet | logdetcomposite | finitesum   (default quadlogdet)
//   p, q number of C and D matrices                  (default 1, 1)
//   k                      quadlogdet coefficient    (default 0)
//   a, b1, b2, c           logdetcomposite parameters
//   h, s                   finitesum: per-sample g (quadlogdet) and sample
//                          count; p = q = s
// Other keys (n, seed) are kept as metadata. '#' starts a comment line.
//
// Config file: key=value lines with the same comment rule.
//
// Doubles are written with 17 significant digits so values round-trip.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spdsd/matrix.hpp"
#include "spdsd/objective.hpp"
#include "spdsd/problem.hpp"
#include "spdsd/solvers.hpp"

namespace spdsd {

using KeyValues = std::map<std::string, std::string>;

std::string format_double(double v);
/// strtod over the whole token; accepts nan/inf. Throws IoError.
double parse_double(const std::string& token, const std::string& context);

void write_matrix(std::ostream& os, const Matrix& m);
/// Throws IoError on malformed input; `context` prefixes messages.
Matrix read_matrix(std::istream& is, const std::string& context = "matrix");
void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

/// Reads key=value lines. Stops (without consuming) at the first line that
/// is neither blank, a comment nor key=value when `stop_at_other` is set;
/// otherwise such a line throws IoError.
KeyValues read_key_values(std::istream& is, const std::string& context, bool stop_at_other = false);
KeyValues load_config(const std::filesystem::path& path);

struct ProblemFile {
  ObjectiveSpec spec;
  KeyValues header;
};

/// Throws IoError for unreadable or malformed files, ConfigError for bad
/// header values.
ProblemFile load_problem(const std::filesystem::path& path);
ProblemFile read_problem(std::istream& is, const std::string& context);
void save_problem(const std::filesystem::path& path, const ProblemInstance& inst);
void write_problem(std::ostream& os, const ProblemInstance& inst);
/// Builds the spec from an already-parsed header and matrices.
ObjectiveSpec spec_from_header(const KeyValues& header, std::vector<SymMatrix> c, std::vector<SymMatrix> d);

inline constexpr const char* kRunCsvHeader = "iter,f_value,gap,cum_directions,cum_F_entries,cum_flops,elapsed_ns";

void write_run_csv(std::ostream& os, const std::vector<RunRow>& rows);
void save_run_csv(const std::filesystem::path& path, const std::vector<RunRow>& rows);
std::vector<RunRow> read_run_csv(std::istream& is, const std::string& context = "csv");
std::vector<RunRow> load_run_csv(const std::filesystem::path& path);

}  // namespace spdsd
