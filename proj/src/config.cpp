#include "divstab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace divstab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] void missing(const std::string& section, const std::string& key) {
  throw ConfigError("[" + section + "] is missing key '" + key + "'");
}

}  // namespace

double parse_double_strict(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || t.empty())
    throw ConfigError(context + ": '" + text + "' is not a number");
  return v;
}

Matrix parse_matrix(const std::string& text, const std::string& context) {
  const std::vector<std::string> rows = split(strip_quotes(trim(text)), ';');
  if (rows.empty() || rows.front().empty())
    throw ConfigError(context + ": empty matrix");
  std::vector<std::vector<double>> values;
  for (const std::string& row : rows) {
    std::vector<double> r;
    for (const std::string& cell : split(row, ','))
      r.push_back(parse_double_strict(cell, context));
    if (!values.empty() && r.size() != values.front().size())
      throw ConfigError(context + ": ragged matrix rows");
    values.push_back(std::move(r));
  }
  Matrix m(values.size(), values.front().size());
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values[i].size(); ++j) m(i, j) = values[i][j];
  return m;
}

bool IniFile::has(const std::string& section) const {
  return sections.count(section) > 0;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

std::string IniFile::get_string(const std::string& section,
                                const std::string& key) const {
  auto it = sections.find(section);
  if (it == sections.end()) throw ConfigError("missing [" + section + "] section");
  auto kt = it->second.find(key);
  if (kt == it->second.end()) missing(section, key);
  return strip_quotes(kt->second);
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
  return parse_double_strict(get_string(section, key), "[" + section + "] " + key);
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int IniFile::get_int(const std::string& section, const std::string& key) const {
  const std::string t = get_string(section, key);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("[" + section + "] " + key + ": '" + t + "' is not an integer");
  return v;
}

int IniFile::get_int(const std::string& section, const std::string& key,
                     int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t IniFile::get_u64(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string t = get_string(section, key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("[" + section + "] " + key + ": '" + t +
                      "' is not an unsigned integer");
  return v;
}

Matrix IniFile::get_matrix(const std::string& section, const std::string& key) const {
  return parse_matrix(get_string(section, key), "[" + section + "] " + key);
}

std::vector<Vector> IniFile::get_points(const std::string& section,
                                        const std::string& key) const {
  const Matrix m = get_matrix(section, key);
  std::vector<Vector> pts;
  pts.reserve(m.rows());
  for (int i = 0; i < m.rows(); ++i) pts.push_back(m.row(i).transpose());
  return pts;
}

Expr IniFile::get_expr(const std::string& section, const std::string& key,
                       int dim) const {
  const std::string t = get_string(section, key);
  try {
    return parse_expr(t, dim);
  } catch (const ParseError& e) {
    throw ConfigError("[" + section + "] " + key + ": " + e.what());
  }
}

IniFile parse_ini(const std::string& text) {
  IniFile ini;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      ini.sections[section];  // a section may legitimately stay empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    ini.sections[section][key] = value;
  }
  return ini;
}

IniFile load_ini(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_ini(buf.str());
}

// ---------------------------------------------------------------------------

namespace {

ExprMatrix parse_expr_matrix(const IniFile& ini, const std::string& section,
                             const std::string& key, int dim) {
  // Expressions contain no ',' or ';', so matrix splitting is unambiguous.
  const std::string text = ini.get_string(section, key);
  const std::vector<std::string> rows = split(strip_quotes(trim(text)), ';');
  if (static_cast<int>(rows.size()) != dim)
    throw ConfigError("[" + section + "] " + key + ": expected " +
                      std::to_string(dim) + " rows");
  std::vector<std::vector<std::string>> cells;
  for (const std::string& row : rows) {
    cells.push_back(split(row, ','));
    if (cells.back().size() != cells.front().size() || cells.back().empty())
      throw ConfigError("[" + section + "] " + key + ": ragged rows");
  }
  ExprMatrix g(dim, static_cast<int>(cells.front().size()));
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      try {
        g(i, j) = parse_expr(strip_quotes(cells[i][j]), dim);
      } catch (const ParseError& e) {
        throw ConfigError("[" + section + "] " + key + " entry (" +
                          std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          "): " + e.what());
      }
    }
  }
  return g;
}

DensityFunction parse_density(const IniFile& ini, int dim,
                              std::optional<ScalarFunction>* S_out) {
  if (!ini.has("density")) throw ConfigError("missing [density] section");
  const std::string family = ini.get_string("density", "family");
  if (family == "norm-power")
    return norm_power_density(ini.get_double("density", "alpha"), dim);
  if (family == "quadratic-form")
    return quadratic_form_density(ini.get_matrix("density", "P"),
                                  ini.get_double("density", "alpha"));
  if (family == "grad-norm") {
    ScalarFunction S{dim, ini.get_expr("density", "S", dim)};
    if (S_out) *S_out = S;
    return grad_norm_density(S);
  }
  if (family == "custom")
    return custom_density(dim, ini.get_expr("density", "rho", dim),
                          ini.get_expr("density", "rho_inv", dim));
  throw ConfigError("[density] family '" + family +
                    "' is not one of norm-power, quadratic-form, grad-norm, custom");
}

}  // namespace

AnalysisSetup build_analysis(const IniFile& ini) {
  if (!ini.has("system")) throw ConfigError("missing [system] section");
  const int dim = ini.get_int("system", "dim");
  if (dim < 1) throw ConfigError("[system] dim must be at least 1");

  std::vector<Expr> comps;
  comps.reserve(dim);
  for (int i = 1; i <= dim; ++i)
    comps.push_back(ini.get_expr("system", "f" + std::to_string(i), dim));

  AnalysisSetup setup{VectorField(dim, std::move(comps)),
                      std::nullopt,
                      {},
                      DensityFunction{},
                      std::nullopt,
                      "",
                      1,
                      Region{},
                      CheckConfig{}};

  if (ini.has("system", "g")) {
    setup.g = parse_expr_matrix(ini, "system", "g", dim);
    const std::string utext = ini.get_string("system", "u");
    const std::vector<std::string> ucells = split(strip_quotes(trim(utext)), ';');
    if (static_cast<int>(ucells.size()) != setup.g->cols)
      throw ConfigError("[system] u: expected " + std::to_string(setup.g->cols) +
                        " entries to match the columns of g");
    for (const std::string& cell : ucells) {
      try {
        setup.u.push_back(parse_expr(strip_quotes(cell), dim));
      } catch (const ParseError& e) {
        throw ConfigError(std::string("[system] u: ") + e.what());
      }
    }
  }

  setup.density = parse_density(ini, dim, &setup.S);

  if (!ini.has("check")) throw ConfigError("missing [check] section");
  setup.test = ini.get_string("check", "test");
  static const char* kTests[] = {"necessary-c1", "necessary-c2", "sufficient",
                                 "theorem1", "closed-loop"};
  bool known = false;
  for (const char* t : kTests) known = known || setup.test == t;
  if (!known)
    throw ConfigError("[check] test '" + setup.test + "' is not recognized");

  setup.which_case = ini.get_int("check", "case", 1);
  setup.region.dim = dim;
  setup.region.r_min = ini.get_double("check", "r_min", 0.1);
  setup.region.r_max = ini.get_double("check", "r_max", 2.0);
  if (!(setup.region.r_min > 0.0) || !(setup.region.r_max > setup.region.r_min))
    throw ConfigError("[check] needs 0 < r_min < r_max");
  if (ini.has("check", "box_lo") != ini.has("check", "box_hi"))
    throw ConfigError("[check] box_lo and box_hi must be given together");
  if (ini.has("check", "box_lo")) {
    const Matrix lo = ini.get_matrix("check", "box_lo");
    const Matrix hi = ini.get_matrix("check", "box_hi");
    if (lo.rows() != 1 || hi.rows() != 1 || lo.cols() != dim || hi.cols() != dim)
      throw ConfigError("[check] box bounds must be single rows of length dim");
    setup.region.box = {lo.row(0).transpose(), hi.row(0).transpose()};
  }

  setup.check.samples = ini.get_int("check", "samples", 2000);
  if (setup.check.samples < 1) throw ConfigError("[check] samples must be positive");
  setup.check.tolerance = ini.get_double("check", "tolerance", 1e-9);
  if (!(setup.check.tolerance > 0.0))
    throw ConfigError("[check] tolerance must be positive");
  setup.check.seed = ini.get_u64("check", "seed", 1);
  setup.check.beta = ini.get_double("check", "beta", 1.0);

  if (setup.test == "closed-loop" && !setup.g)
    throw ConfigError("[check] test closed-loop needs g and u in [system]");
  if (setup.test == "theorem1" && !setup.S)
    throw ConfigError("[check] test theorem1 needs the grad-norm density family");
  return setup;
}

LinearSetup build_linear(const IniFile& ini) {
  if (!ini.has("linear")) throw ConfigError("missing [linear] section");
  LinearSetup setup;
  setup.A = ini.get_matrix("linear", "A");
  if (setup.A.rows() != setup.A.cols())
    throw ConfigError("[linear] A must be square");

  const std::string mode = ini.get_string("linear", "mode", "corollary1");
  if (mode == "rantzer-eq7") {
    setup.condition = LinearCondition::rantzer_eq7(ini.get_double("linear", "alpha"));
  } else if (mode == "eq07") {
    setup.condition = LinearCondition::eq07(ini.get_double("linear", "alpha"));
  } else if (mode == "theorem7") {
    setup.condition = LinearCondition::theorem7(ini.get_double("linear", "kappa"));
  } else if (mode == "corollary1") {
    setup.condition = LinearCondition::corollary1(ini.get_double("linear", "gamma", 1.0));
  } else {
    throw ConfigError("[linear] mode '" + mode +
                      "' is not one of rantzer-eq7, eq07, theorem7, corollary1");
  }

  if (ini.has("linear", "B")) setup.B = ini.get_matrix("linear", "B");
  if (ini.has("linear", "K")) setup.K = ini.get_matrix("linear", "K");
  if (ini.has("linear", "P")) setup.P = ini.get_matrix("linear", "P");
  setup.synth_gamma = ini.get_double("linear", "gamma", 1.0);
  if (ini.has("linear", "target_poles")) {
    const Matrix row = ini.get_matrix("linear", "target_poles");
    if (row.rows() != 1)
      throw ConfigError("[linear] target_poles must be a single row");
    std::vector<double> poles(row.cols());
    for (int i = 0; i < row.cols(); ++i) poles[i] = row(0, i);
    setup.target_poles = poles;
  }
  setup.seed = ini.get_u64("linear", "seed", 1);
  return setup;
}

SimulateSetup build_simulate(const IniFile& ini) {
  if (!ini.has("system")) throw ConfigError("missing [system] section");
  const int dim = ini.get_int("system", "dim");
  if (dim < 1) throw ConfigError("[system] dim must be at least 1");
  std::vector<Expr> comps;
  for (int i = 1; i <= dim; ++i)
    comps.push_back(ini.get_expr("system", "f" + std::to_string(i), dim));

  if (!ini.has("simulate")) throw ConfigError("missing [simulate] section");
  SimulateSetup setup{VectorField(dim, std::move(comps)), {}, 0, 0, 0, 0, 0};
  setup.starts = ini.get_points("simulate", "x0");
  for (const Vector& s : setup.starts) {
    if (s.size() != dim)
      throw ConfigError("[simulate] x0 rows must have length dim");
  }
  setup.dt = ini.get_double("simulate", "dt", 1e-3);
  setup.t_final = ini.get_double("simulate", "T", 10.0);
  setup.delta_c = ini.get_double("simulate", "delta_c", 1e-3);
  setup.big_r = ini.get_double("simulate", "R", 1e6);
  setup.escape_radius = ini.get_double("simulate", "escape_radius", 1e6);
  if (!(setup.dt > 0.0) || !(setup.t_final > 0.0))
    throw ConfigError("[simulate] needs dt > 0 and T > 0");
  if (!(setup.delta_c > 0.0) || !(setup.big_r > setup.delta_c))
    throw ConfigError("[simulate] needs 0 < delta_c < R");
  return setup;
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace divstab
