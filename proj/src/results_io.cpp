#include "sparsest/results_io.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "sparsest/errors.hpp"

namespace sparsest::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// JSON has no inf or nan; those travel as strings.
json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

double number_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    char* end = nullptr;
    const double x = std::strtod(text.c_str(), &end);
    if (end != text.c_str() && *end == '\0') return x;
  }
  throw ParseError("manifest: '" + what + "' is not a number");
}

std::vector<double> numbers_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError("manifest: '" + what + "' is not an array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number_from_json(e, what));
  return out;
}

const json& field(const json& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError("manifest: missing field '" + name + "'");
  return j.at(name);
}

template <class T>
T get(const json& j, const std::string& name) {
  try {
    return field(j, name).get<T>();
  } catch (const json::exception&) {
    throw ParseError("manifest: field '" + name + "' has the wrong type");
  }
}

json selectors_to_json(const std::vector<recovery::SelectorSpec>& selectors) {
  json out = json::array();
  for (const auto& sel : selectors) {
    out.push_back({{"name", std::string(recovery::selector_name(sel.kind))},
                   {"epsilon", sel.epsilon},
                   {"zero_tol", sel.zero_tol}});
  }
  return out;
}

std::vector<recovery::SelectorSpec> selectors_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("manifest: 'selectors' is not an array");
  std::vector<recovery::SelectorSpec> out;
  for (const auto& e : j) {
    try {
      out.push_back(recovery::parse_selector(get<std::string>(e, "name"), get<double>(e, "epsilon"),
                                             get<double>(e, "zero_tol")));
    } catch (const ContractViolation& err) {
      throw ParseError(std::string("manifest: ") + err.what());
    }
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string kind_name(const AnyResult& result) {
  static const char* names[] = {"phase", "baseline", "scaling", "stability"};
  return names[result.index()];
}

// ---- CSV ------------------------------------------------------------------

std::string join_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + '\n';
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

struct CsvTable {
  std::string name;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const fs::path& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  CsvTable table;
  table.name = path.filename().string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(table.name + ": empty file, expected a header");
  const auto got = split_row(line);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c >= got.size()) throw ParseError(table.name + ": missing column '" + header[c] + "'");
    if (got[c] != header[c]) {
      throw ParseError(table.name + ": unexpected column '" + got[c] + "' at position " + std::to_string(c + 1) +
                       ", expected '" + header[c] + "'");
    }
  }
  if (got.size() > header.size()) {
    throw ParseError(table.name + ": unexpected extra column '" + got[header.size()] + "'");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw ParseError(table.name + ": row " + std::to_string(table.rows.size() + 1) + " has " +
                       std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::size_t parse_count(const CsvTable& t, std::size_t row, std::size_t col, const std::string& column) {
  const std::string& text = t.rows[row][col];
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(t.name + ": row " + std::to_string(row + 1) + " column '" + column +
                     "' is not a nonnegative integer: '" + text + "'");
  }
  return value;
}

double parse_real(const CsvTable& t, std::size_t row, std::size_t col, const std::string& column) {
  const std::string& text = t.rows[row][col];
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    throw ParseError(t.name + ": row " + std::to_string(row + 1) + " column '" + column + "' is not a number: '" +
                     text + "'");
  }
  return value;
}

void expect(bool ok, const CsvTable& t, std::size_t row, const std::string& what) {
  if (!ok) throw ParseError(t.name + ": row " + std::to_string(row + 1) + " disagrees with the manifest (" + what + ")");
}

void expect_rows(const CsvTable& t, std::size_t count) {
  if (t.rows.size() != count) {
    throw ParseError(t.name + ": " + std::to_string(t.rows.size()) + " data rows, manifest implies " +
                     std::to_string(count));
  }
}

const std::vector<std::string> kPhaseHeader{"selector", "k", "s", "trials", "successes", "probability",
                                            "failures_numerical"};
const std::vector<std::string> kCurveKHeader{"k", "trials", "median_value"};
const std::vector<std::string> kCurveNHeader{"n", "trials", "median_value"};
const std::vector<std::string> kStabilityHeader{"delta", "trials", "median_error", "ratio"};

// ---- writers --------------------------------------------------------------

using FileMap = std::vector<std::pair<std::string, std::string>>;

std::string curve_csv(const std::vector<std::string>& header, const std::vector<std::size_t>& xs, std::size_t trials,
                      const std::vector<double>& ys) {
  std::string out = join_row(header);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += join_row({std::to_string(xs[i]), std::to_string(trials), format_number(ys[i])});
  }
  return out;
}

FileMap phase_files(const PhaseDiagramResult& r) {
  const auto& c = r.config;
  FileMap files;
  std::string csv = join_row(kPhaseHeader);
  for (std::size_t j = 0; j < c.selectors.size(); ++j) {
    const std::string name(recovery::selector_name(c.selectors[j].kind));
    for (std::size_t ki = 0; ki < c.k_grid.size(); ++ki) {
      for (std::size_t si = 0; si < c.s_grid.size(); ++si) {
        const std::size_t at = r.offset(j, ki, si);
        csv += join_row({name, std::to_string(c.k_grid[ki]), std::to_string(c.s_grid[si]), std::to_string(c.trials),
                         std::to_string(r.successes[at]), format_number(r.probability(j, ki, si)),
                         std::to_string(r.numerical_failures[at])});
      }
    }
  }
  files.emplace_back("phase.csv", std::move(csv));

  for (std::size_t j = 0; j < c.selectors.size(); ++j) {
    const std::string name(recovery::selector_name(c.selectors[j].kind));
    std::string pgm = "P2\n# " + name + ": gray = round(255 * probability), rows k ascending, columns s ascending\n";
    pgm += std::to_string(c.s_grid.size()) + ' ' + std::to_string(c.k_grid.size()) + "\n255\n";
    for (std::size_t ki = 0; ki < c.k_grid.size(); ++ki) {
      for (std::size_t si = 0; si < c.s_grid.size(); ++si) {
        if (si) pgm += ' ';
        pgm += std::to_string(static_cast<int>(std::lround(255.0 * r.probability(j, ki, si))));
      }
      pgm += '\n';
    }
    files.emplace_back("heatmap_" + name + ".pgm", std::move(pgm));
  }
  return files;
}

FileMap result_files(const AnyResult& result) {
  return std::visit(
      Overloaded{
          [](const PhaseDiagramResult& r) { return phase_files(r); },
          [](const BaselineCurveResult& r) {
            return FileMap{{"curve.csv", curve_csv(kCurveKHeader, r.config.k_grid, r.config.trials, r.median_value)}};
          },
          [](const ScalingResult& r) {
            return FileMap{
                {"curve_k.csv", curve_csv(kCurveKHeader, r.config.k_grid, r.config.trials, r.median_by_k)},
                {"curve_n.csv", curve_csv(kCurveNHeader, r.config.n_grid, r.config.trials, r.median_by_n)}};
          },
          [](const StabilityResult& r) {
            std::string csv = join_row(kStabilityHeader);
            for (std::size_t i = 0; i < r.config.delta_grid.size(); ++i) {
              csv += join_row({format_number(r.config.delta_grid[i]), std::to_string(r.config.trials),
                               format_number(r.median_error[i]), format_number(r.error_over_delta[i])});
            }
            return FileMap{{"stability.csv", std::move(csv)}};
          },
      },
      result);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

fs::path strip_trailing_separator(fs::path dir) {
  if (dir.empty()) throw IoError("output path is empty");
  if (!dir.has_filename()) dir = dir.parent_path();
  return dir;
}

fs::path sibling(const fs::path& dir, const std::string& tag) {
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  return parent / ("." + dir.filename().string() + "." + tag + "-" + std::to_string(::getpid()));
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view baseline_mode_name(BaselineMode mode) {
  return mode == BaselineMode::FixedIndex ? "fixed-index" : "min-ratio";
}

BaselineMode parse_baseline_mode(std::string_view name) {
  if (name == "fixed-index") return BaselineMode::FixedIndex;
  if (name == "min-ratio") return BaselineMode::MinRatio;
  throw ContractViolation("unknown baseline mode '" + std::string(name) + "' (expected fixed-index or min-ratio)");
}

json RunManifest::to_json() const {
  return {{"schema_version", schema_version}, {"kind", kind},         {"parameters", parameters},
          {"master_seed", master_seed},       {"code_version", code_version}, {"timestamp", timestamp},
          {"tallies", tallies}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.schema_version = get<int>(j, "schema_version");
  if (m.schema_version != kSchemaVersion) {
    throw ParseError("manifest: schema version " + std::to_string(m.schema_version) + " is not supported");
  }
  m.kind = get<std::string>(j, "kind");
  m.parameters = field(j, "parameters");
  m.master_seed = get<std::uint64_t>(j, "master_seed");
  m.code_version = get<std::string>(j, "code_version");
  m.timestamp = get<std::string>(j, "timestamp");
  m.tallies = field(j, "tallies");
  return m;
}

RunManifest make_manifest(const AnyResult& result) {
  RunManifest m;
  m.kind = kind_name(result);
  m.timestamp = utc_timestamp();
  std::visit(Overloaded{
                 [&](const PhaseDiagramResult& r) {
                   const auto& c = r.config;
                   m.parameters = {{"n", c.n},         {"k_grid", c.k_grid}, {"s_grid", c.s_grid},
                                   {"trials", c.trials}, {"delta", c.delta},   {"tau", c.tau},
                                   {"selectors", selectors_to_json(c.selectors)},
                                   {"audit", c.audit},  {"workers", c.workers}};
                   m.master_seed = c.master_seed;
                   std::size_t failures = 0;
                   for (std::size_t f : r.numerical_failures) failures += f;
                   m.tallies = {{"numerical_failures", failures},
                                {"audit_exact", r.audit_exact},
                                {"audit_violations", r.audit_violations}};
                 },
                 [&](const BaselineCurveResult& r) {
                   const auto& c = r.config;
                   m.parameters = {{"n", c.n},
                                   {"k_grid", c.k_grid},
                                   {"trials", c.trials},
                                   {"mode", std::string(baseline_mode_name(c.mode))},
                                   {"workers", c.workers}};
                   m.master_seed = c.master_seed;
                   json scores = json::array();
                   for (double x : r.median_score) scores.push_back(json_number(x));
                   m.tallies = {{"numerical_failures", r.numerical_failures}, {"median_score", scores}};
                 },
                 [&](const ScalingResult& r) {
                   const auto& c = r.config;
                   m.parameters = {{"n_fixed", c.n_fixed}, {"k_grid", c.k_grid}, {"k_fixed", c.k_fixed},
                                   {"n_grid", c.n_grid},   {"trials", c.trials}, {"workers", c.workers}};
                   m.master_seed = c.master_seed;
                   m.tallies = {{"numerical_failures", r.numerical_failures},
                                {"slope_k", json_number(r.slope_k)},
                                {"slope_n", json_number(r.slope_n)}};
                 },
                 [&](const StabilityResult& r) {
                   const auto& c = r.config;
                   m.parameters = {{"n", c.n},           {"k", c.k},           {"s", c.s},
                                   {"delta_grid", c.delta_grid}, {"trials", c.trials}, {"workers", c.workers}};
                   m.master_seed = c.master_seed;
                   m.tallies = {{"numerical_failures", r.numerical_failures}};
                 },
             },
             result);
  return m;
}

AnyConfig config_from_manifest(const RunManifest& m) {
  const json& p = m.parameters;
  if (m.kind == "phase") {
    PhaseDiagramConfig c;
    c.n = get<std::size_t>(p, "n");
    c.k_grid = get<std::vector<std::size_t>>(p, "k_grid");
    c.s_grid = get<std::vector<std::size_t>>(p, "s_grid");
    c.trials = get<std::size_t>(p, "trials");
    c.delta = get<double>(p, "delta");
    c.tau = get<double>(p, "tau");
    c.selectors = selectors_from_json(field(p, "selectors"));
    c.audit = get<bool>(p, "audit");
    c.workers = get<std::size_t>(p, "workers");
    c.master_seed = m.master_seed;
    return c;
  }
  if (m.kind == "baseline") {
    BaselineCurveConfig c;
    c.n = get<std::size_t>(p, "n");
    c.k_grid = get<std::vector<std::size_t>>(p, "k_grid");
    c.trials = get<std::size_t>(p, "trials");
    try {
      c.mode = parse_baseline_mode(get<std::string>(p, "mode"));
    } catch (const ContractViolation& err) {
      throw ParseError(std::string("manifest: ") + err.what());
    }
    c.workers = get<std::size_t>(p, "workers");
    c.master_seed = m.master_seed;
    return c;
  }
  if (m.kind == "scaling") {
    ScalingConfig c;
    c.n_fixed = get<std::size_t>(p, "n_fixed");
    c.k_grid = get<std::vector<std::size_t>>(p, "k_grid");
    c.k_fixed = get<std::size_t>(p, "k_fixed");
    c.n_grid = get<std::vector<std::size_t>>(p, "n_grid");
    c.trials = get<std::size_t>(p, "trials");
    c.workers = get<std::size_t>(p, "workers");
    c.master_seed = m.master_seed;
    return c;
  }
  if (m.kind == "stability") {
    StabilityConfig c;
    c.n = get<std::size_t>(p, "n");
    c.k = get<std::size_t>(p, "k");
    c.s = get<std::size_t>(p, "s");
    c.delta_grid = get<std::vector<double>>(p, "delta_grid");
    c.trials = get<std::size_t>(p, "trials");
    c.workers = get<std::size_t>(p, "workers");
    c.master_seed = m.master_seed;
    return c;
  }
  throw ParseError("manifest: unknown experiment kind '" + m.kind + "'");
}

AnyResult run(const AnyConfig& config) {
  return std::visit(Overloaded{
                        [](const PhaseDiagramConfig& c) -> AnyResult { return phase_diagram(c); },
                        [](const BaselineCurveConfig& c) -> AnyResult { return baseline_curve(c); },
                        [](const ScalingConfig& c) -> AnyResult { return scaling_fit(c); },
                        [](const StabilityConfig& c) -> AnyResult { return stability_sweep(c); },
                    },
                    config);
}

void ensure_writable(const fs::path& target) {
  const fs::path dir = strip_trailing_separator(target);
  std::error_code ec;
  if (fs::exists(dir, ec) && !fs::is_directory(dir, ec)) {
    throw IoError("output path '" + dir.string() + "' exists and is not a directory");
  }
  if (dir.has_parent_path()) {
    fs::create_directories(dir.parent_path(), ec);
    if (ec) throw IoError("cannot create '" + dir.parent_path().string() + "': " + ec.message());
  }
  const fs::path probe = sibling(dir, "probe");
  fs::create_directory(probe, ec);
  if (ec) throw IoError("output location for '" + dir.string() + "' is not writable: " + ec.message());
  fs::remove(probe, ec);
}

void write_results(const AnyResult& result, const RunManifest& manifest, const fs::path& target) {
  const fs::path dir = strip_trailing_separator(target);
  ensure_writable(dir);
  const fs::path staging = sibling(dir, "staging");
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directory(staging, ec);
  if (ec) throw IoError("cannot create staging directory '" + staging.string() + "': " + ec.message());
  try {
    write_file(staging / "manifest.json", manifest.to_json().dump(2) + "\n");
    for (const auto& [name, content] : result_files(result)) write_file(staging / name, content);

    if (fs::exists(dir)) {
      const fs::path old = sibling(dir, "old");
      fs::remove_all(old);
      fs::rename(dir, old);
      fs::rename(staging, dir);
      fs::remove_all(old);
    } else {
      fs::rename(staging, dir);
    }
  } catch (const fs::filesystem_error& err) {
    fs::remove_all(staging, ec);
    throw IoError("cannot place results at '" + dir.string() + "': " + err.code().message());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

LoadedRun read_results(const fs::path& target) {
  const fs::path dir = strip_trailing_separator(target);
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open '" + manifest_path.string() + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& err) {
    throw ParseError("manifest.json: " + std::string(err.what()));
  }
  LoadedRun loaded{RunManifest::from_json(j), PhaseDiagramResult{}};
  const RunManifest& m = loaded.manifest;
  const AnyConfig config = config_from_manifest(m);

  loaded.result = std::visit(
      Overloaded{
          [&](const PhaseDiagramConfig& c) -> AnyResult {
            PhaseDiagramResult r;
            r.config = c;
            const CsvTable t = read_csv(dir / "phase.csv", kPhaseHeader);
            const std::size_t nk = c.k_grid.size();
            const std::size_t ns = c.s_grid.size();
            expect_rows(t, c.selectors.size() * nk * ns);
            r.successes.resize(t.rows.size());
            r.numerical_failures.resize(t.rows.size());
            for (std::size_t row = 0; row < t.rows.size(); ++row) {
              const std::size_t j = row / (nk * ns);
              const std::size_t ki = (row / ns) % nk;
              const std::size_t si = row % ns;
              expect(t.rows[row][0] == recovery::selector_name(c.selectors[j].kind), t, row, "selector");
              expect(parse_count(t, row, 1, "k") == c.k_grid[ki], t, row, "k");
              expect(parse_count(t, row, 2, "s") == c.s_grid[si], t, row, "s");
              expect(parse_count(t, row, 3, "trials") == c.trials, t, row, "trials");
              r.successes[row] = parse_count(t, row, 4, "successes");
              expect(r.successes[row] <= c.trials, t, row, "successes exceed trials");
              parse_real(t, row, 5, "probability");
              r.numerical_failures[row] = parse_count(t, row, 6, "failures_numerical");
            }
            r.audit_exact = get<std::size_t>(m.tallies, "audit_exact");
            r.audit_violations = get<std::size_t>(m.tallies, "audit_violations");
            return r;
          },
          [&](const BaselineCurveConfig& c) -> AnyResult {
            BaselineCurveResult r;
            r.config = c;
            const CsvTable t = read_csv(dir / "curve.csv", kCurveKHeader);
            expect_rows(t, c.k_grid.size());
            for (std::size_t row = 0; row < t.rows.size(); ++row) {
              expect(parse_count(t, row, 0, "k") == c.k_grid[row], t, row, "k");
              expect(parse_count(t, row, 1, "trials") == c.trials, t, row, "trials");
              r.median_value.push_back(parse_real(t, row, 2, "median_value"));
            }
            r.median_score = numbers_from_json(field(m.tallies, "median_score"), "median_score");
            if (r.median_score.size() != c.k_grid.size()) throw ParseError("manifest: median_score length mismatch");
            r.numerical_failures = get<std::size_t>(m.tallies, "numerical_failures");
            return r;
          },
          [&](const ScalingConfig& c) -> AnyResult {
            ScalingResult r;
            r.config = c;
            const CsvTable tk = read_csv(dir / "curve_k.csv", kCurveKHeader);
            expect_rows(tk, c.k_grid.size());
            for (std::size_t row = 0; row < tk.rows.size(); ++row) {
              expect(parse_count(tk, row, 0, "k") == c.k_grid[row], tk, row, "k");
              expect(parse_count(tk, row, 1, "trials") == c.trials, tk, row, "trials");
              r.median_by_k.push_back(parse_real(tk, row, 2, "median_value"));
            }
            const CsvTable tn = read_csv(dir / "curve_n.csv", kCurveNHeader);
            expect_rows(tn, c.n_grid.size());
            for (std::size_t row = 0; row < tn.rows.size(); ++row) {
              expect(parse_count(tn, row, 0, "n") == c.n_grid[row], tn, row, "n");
              expect(parse_count(tn, row, 1, "trials") == c.trials, tn, row, "trials");
              r.median_by_n.push_back(parse_real(tn, row, 2, "median_value"));
            }
            r.slope_k = number_from_json(field(m.tallies, "slope_k"), "slope_k");
            r.slope_n = number_from_json(field(m.tallies, "slope_n"), "slope_n");
            r.numerical_failures = get<std::size_t>(m.tallies, "numerical_failures");
            return r;
          },
          [&](const StabilityConfig& c) -> AnyResult {
            StabilityResult r;
            r.config = c;
            const CsvTable t = read_csv(dir / "stability.csv", kStabilityHeader);
            expect_rows(t, c.delta_grid.size());
            for (std::size_t row = 0; row < t.rows.size(); ++row) {
              expect(parse_real(t, row, 0, "delta") == c.delta_grid[row], t, row, "delta");
              expect(parse_count(t, row, 1, "trials") == c.trials, t, row, "trials");
              r.median_error.push_back(parse_real(t, row, 2, "median_error"));
              r.error_over_delta.push_back(parse_real(t, row, 3, "ratio"));
            }
            r.numerical_failures = get<std::size_t>(m.tallies, "numerical_failures");
            return r;
          },
      },
      config);
  return loaded;
}

}  // namespace sparsest::experiments
