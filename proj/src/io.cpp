#include "spdsd/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spdsd/error.hpp"

namespace spdsd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::uint64_t parse_u64(const std::string& token, const std::string& context) {
  if (token.empty() || token[0] == '-') throw IoError(context + ": expected a non-negative integer, got '" + token + "'");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
  if (errno != 0 || end != token.c_str() + token.size())
    throw IoError(context + ": expected a non-negative integer, got '" + token + "'");
  return v;
}

double header_double(const KeyValues& h, const std::string& key, double fallback) {
  const auto it = h.find(key);
  if (it == h.end()) return fallback;
  try {
    return parse_double(it->second, "problem header '" + key + "'");
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

std::size_t header_count(const KeyValues& h, const std::string& key, std::size_t fallback) {
  const auto it = h.find(key);
  if (it == h.end()) return fallback;
  try {
    return parse_u64(it->second, "problem header '" + key + "'");
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

std::shared_ptr<const OuterFunction> simple_g(const std::string& name, const KeyValues& h) {
  if (name == "quadlogdet") return std::make_shared<QuadLogDet>(header_double(h, "k", 0.0));
  if (name == "logdetcomposite") {
    try {
      return std::make_shared<LogDetComposite>(header_double(h, "a", 1.0), header_double(h, "b1", 1.0),
                                               header_double(h, "b2", 1.0), header_double(h, "c", 1.0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown outer function g='" + name + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  // Underflow to a subnormal is fine; overflow is not.
  if (token.empty() || end != token.c_str() + token.size() || (errno == ERANGE && std::abs(v) == HUGE_VAL))
    throw IoError(context + ": bad number '" + token + "'");
  return v;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.n() << '\n';
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.n(); ++j) os << (j ? " " : "") << format_double(m(i, j));
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is, const std::string& context) {
  std::string line;
  bool found = false;
  while (!found && std::getline(is, line)) found = !trim(line).empty();
  if (!found) throw IoError(context + ": missing dimension line");
  const std::size_t n = parse_u64(trim(line), context + ": dimension");
  if (n == 0) throw IoError(context + ": dimension must be positive");
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw IoError(context + ": expected " + std::to_string(n) + " rows, got " + std::to_string(i));
    std::istringstream row(line);
    std::string tok;
    std::size_t j = 0;
    while (row >> tok) {
      if (j == n) throw IoError(context + ": row " + std::to_string(i + 1) + " has more than " + std::to_string(n) + " values");
      m(i, j++) = parse_double(tok, context + ": row " + std::to_string(i + 1));
    }
    if (j != n) throw IoError(context + ": row " + std::to_string(i + 1) + " has " + std::to_string(j) + " values, expected " + std::to_string(n));
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  write_matrix(out, m);
  check_written(out, path);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_matrix(in, path.string());
}

KeyValues read_key_values(std::istream& is, const std::string& context, bool stop_at_other) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (true) {
    const std::streampos pos = is.tellg();
    if (!std::getline(is, line)) break;
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      if (stop_at_other) {
        is.clear();
        is.seekg(pos);
        break;
      }
      throw IoError(context + ":" + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw IoError(context + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues load_config(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_key_values(in, path.string());
}

ObjectiveSpec spec_from_header(const KeyValues& h, std::vector<SymMatrix> c, std::vector<SymMatrix> d) {
  const auto git = h.find("g");
  const std::string g = git == h.end() ? "quadlogdet" : git->second;
  ObjectiveSpec spec;
  spec.c = std::move(c);
  spec.d = std::move(d);
  if (g == "finitesum") {
    const auto hit = h.find("h");
    const std::size_t s = header_count(h, "s", spec.c.size());
    spec.g = std::make_shared<FiniteSum>(simple_g(hit == h.end() ? "quadlogdet" : hit->second, h), s);
  } else {
    spec.g = simple_g(g, h);
  }
  try {
    spec.validate();
  } catch (const DimensionMismatch& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  return spec;
}

ProblemFile read_problem(std::istream& is, const std::string& context) {
  ProblemFile pf;
  pf.header = read_key_values(is, context, true);
  const bool fs = pf.header.count("g") && pf.header.at("g") == "finitesum";
  const std::size_t s = fs ? header_count(pf.header, "s", 1) : 0;
  const std::size_t p = header_count(pf.header, "p", fs ? s : 1);
  const std::size_t q = header_count(pf.header, "q", fs ? s : 1);
  std::vector<SymMatrix> c, d;
  auto read_sym = [&](const std::string& what) {
    const Matrix m = read_matrix(is, context + ": " + what);
    try {
      return SymMatrix(m);
    } catch (const std::invalid_argument& e) {
      throw IoError(context + ": " + what + ": " + e.what());
    }
  };
  for (std::size_t k = 0; k < p; ++k) c.push_back(read_sym("C" + std::to_string(k + 1)));
  for (std::size_t k = 0; k < q; ++k) d.push_back(read_sym("D" + std::to_string(k + 1)));
  pf.spec = spec_from_header(pf.header, std::move(c), std::move(d));
  return pf;
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_problem(in, path.string());
}

void write_problem(std::ostream& os, const ProblemInstance& inst) {
  os << "g=quadlogdet\n";
  os << "k=" << format_double(inst.k) << '\n';
  os << "p=1\nq=1\n";
  os << "n=" << inst.n << '\n';
  os << "seed=" << inst.seed << '\n';
  write_matrix(os, inst.c.matrix());
  write_matrix(os, inst.d.matrix());
}

void save_problem(const std::filesystem::path& path, const ProblemInstance& inst) {
  std::ofstream out = open_out(path);
  write_problem(out, inst);
  check_written(out, path);
}

void write_run_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << kRunCsvHeader << '\n';
  for (const RunRow& r : rows) {
    os << r.iter << ',' << format_double(r.f_value) << ',' << format_double(r.gap) << ',' << r.cum_directions << ','
       << r.cum_F_entries << ',' << r.cum_flops << ',' << r.elapsed_ns << '\n';
  }
}

void save_run_csv(const std::filesystem::path& path, const std::vector<RunRow>& rows) {
  std::ofstream out = open_out(path);
  write_run_csv(out, rows);
  check_written(out, path);
}

std::vector<RunRow> read_run_csv(std::istream& is, const std::string& context) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kRunCsvHeader) throw IoError(context + ": missing or wrong header");
  std::vector<RunRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(trim(line));
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    const std::string where = context + ":" + std::to_string(lineno);
    if (f.size() != 7) throw IoError(where + ": expected 7 fields, got " + std::to_string(f.size()));
    RunRow r;
    r.iter = parse_u64(f[0], where);
    r.f_value = parse_double(f[1], where);
    r.gap = parse_double(f[2], where);
    r.cum_directions = parse_u64(f[3], where);
    r.cum_F_entries = parse_u64(f[4], where);
    r.cum_flops = parse_u64(f[5], where);
    r.elapsed_ns = static_cast<std::int64_t>(parse_u64(f[6], where));
    rows.push_back(r);
  }
  return rows;
}

std::vector<RunRow> load_run_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return read_run_csv(in, path.string());
}

}  // namespace spdsd
