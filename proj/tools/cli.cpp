#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhimp/acceptance.hpp"
#include "nhimp/analysis.hpp"
#include "nhimp/errors.hpp"
#include "nhimp/spectral.hpp"

namespace nhimp::cli {

using json = nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<double> Range::values() const {
  std::vector<double> v;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) v.push_back(start + (stop - start) * i / (count - 1));
  v.back() = stop;
  return v;
}

namespace {

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(std::string(what) + ": cannot parse '" + text + "' as a number");
  }
}

int parse_int(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(std::string(what) + ": cannot parse '" + text + "' as an integer");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_int(item, what));
  return out;
}

Command parse_command(const std::string& text) {
  if (text == "spectrum") return Command::spectrum;
  if (text == "corr") return Command::corr;
  if (text == "ee") return Command::ee;
  if (text == "fit") return Command::fit;
  if (text == "sweep") return Command::sweep;
  if (text == "verify") return Command::verify;
  throw InvalidArgument("unknown command '" + text + "' (spectrum, corr, ee, fit, sweep, verify)");
}

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  throw InvalidArgument("format must be csv or json, got '" + text + "'");
}

Grid parse_grid(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw InvalidArgument("grid must be 'tR_start:tR_stop:count,tL_start:tL_stop:count'");
  return {parse_range(parts[0]), parse_range(parts[1])};
}

// Values in a config file may be numbers or strings; both map onto the flag text.
std::string config_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + config_text(v[i]);
    return s;
  }
  if (v.is_object() && v.contains("tR") && v.contains("tL")) return config_text(v["tR"]) + "," + config_text(v["tL"]);
  throw InvalidArgument("config: unsupported value " + v.dump());
}

// --- output table -------------------------------------------------------------

using Cell = std::variant<double, long long, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::logic_error("table row width mismatch");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string cell_text(const Cell& c, Format f) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (f == Format::json && !std::isfinite(*d)) return "null";
    return format_number(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  return f == Format::json ? json(s).dump() : csv_field(s);
}

void write_header(std::ostream& os, const Table& t, Format f) {
  if (f != Format::csv) return;
  for (std::size_t i = 0; i < t.columns().size(); ++i) os << (i ? "," : "") << t.columns()[i];
  os << '\n';
}

void write_row(std::ostream& os, const Table& t, const std::vector<Cell>& row, Format f) {
  if (f == Format::csv) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i], f);
  } else {
    os << '{';
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << json(t.columns()[i]).dump() << ':' << cell_text(row[i], f);
    os << '}';
  }
  os << '\n';
}

void write_table(std::ostream& os, const Table& t, Format f) {
  write_header(os, t, f);
  for (const auto& row : t.rows()) write_row(os, t, row, f);
}

// --- per-command tables -----------------------------------------------------

const std::vector<std::string> kEchoColumns = {"t", "t_R", "t_L", "mu", "N", "partition", "L0", "route"};

std::vector<Cell> echo(const RunConfig& c, const ModelParams& p) {
  return {p.t, p.tR, p.tL, p.mu, static_cast<long long>(p.N), to_string(c.partition),
          static_cast<long long>(c.partition == PartitionKind::II ? c.L0 : 0), to_string(c.route)};
}

std::vector<std::string> with_echo(std::vector<std::string> cols) {
  cols.insert(cols.end(), kEchoColumns.begin(), kEchoColumns.end());
  return cols;
}

void append(std::vector<Cell>& row, const std::vector<Cell>& more) { row.insert(row.end(), more.begin(), more.end()); }

std::vector<int> window_of(const RunConfig& c) {
  return c.LAList.empty() ? default_window(c.partition, c.L0) : c.LAList;
}

std::string window_text(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? ";" : "") + std::to_string(w[i]);
  return s;
}

FitSettings fit_settings(const RunConfig& c) {
  FitSettings s;
  s.route = c.route;
  s.window = window_of(c);
  return s;
}

Table spectrum_table(const RunConfig& c) {
  Table t(with_echo({"kind", "index", "re_energy", "im_energy", "occupied", "re_z", "im_z", "nonstandard"}));
  const EigenSystem es = solve_biorthogonal(build_hamiltonian(c.params));
  const double nan = std::nan("");
  for (Eigen::Index i = 0; i < es.energies.size(); ++i) {
    std::vector<Cell> row = {std::string("eigen"), static_cast<long long>(i), es.energies(i).real(),
                             es.energies(i).imag(), static_cast<long long>(es.occupied[i] ? 1 : 0), nan, nan, 0LL};
    append(row, echo(c, c.params));
    t.add(std::move(row));
  }
  long long idx = 0;
  for (const BoundState& b : bound_states(c.params)) {
    std::vector<Cell> row = {std::string("bound"), idx++, b.energy.real(), b.energy.imag(),
                             static_cast<long long>(b.occupied ? 1 : 0), b.z.real(), b.z.imag(),
                             static_cast<long long>(b.nonstandard ? 1 : 0)};
    append(row, echo(c, c.params));
    t.add(std::move(row));
  }
  return t;
}

Table corr_table(const RunConfig& c) {
  const int LA = c.LAList.empty() ? 64 : *std::max_element(c.LAList.begin(), c.LAList.end());
  const Partition part{c.partition, LA, c.partition == PartitionKind::II ? c.L0 : 0};
  const CorrelationMatrix C = assemble_correlation(c.params, part, c.route, AssemblyOptions{true, true, {}});
  Table t(with_echo({"row", "col", "re", "im", "hermitian"}));
  for (int i = 0; i < LA; ++i)
    for (int j = 0; j < LA; ++j) {
      std::vector<Cell> row = {static_cast<long long>(C.offset + i), static_cast<long long>(C.offset + j),
                               C.entries(i, j).real(), C.entries(i, j).imag(),
                               static_cast<long long>(C.hermitian ? 1 : 0)};
      append(row, echo(c, c.params));
      t.add(std::move(row));
    }
  return t;
}

Table ee_table(const RunConfig& c) {
  const auto series =
      entropy_series(c.params, c.partition, c.L0, window_of(c), c.route, AssemblyOptions{true, true, {}});
  Table t(with_echo({"L_A", "re_S", "im_S", "norm", "re_xi_min", "re_xi_max", "max_abs_im_xi", "branch"}));
  for (const auto& ee : series) {
    const auto re = ee.xi.real();
    std::vector<Cell> row = {static_cast<long long>(ee.partition.LA), ee.S.real(), ee.S.imag(), ee.norm,
                             re.minCoeff(), re.maxCoeff(), ee.xi.imag().cwiseAbs().maxCoeff(),
                             ee.branchConvention};
    append(row, echo(c, c.params));
    t.add(std::move(row));
  }
  return t;
}

Table fit_table(const RunConfig& c) {
  const FitResult f = fit_point(c.params, c.partition, c.L0, fit_settings(c));
  const double nan = std::nan("");
  const double T = c.params.product();
  cplx unitary_c(nan, nan), complex_c(nan, nan), cont(nan, nan);
  if (T > 0.0) unitary_c = c_eff_unitary(T, 1.0).cEffPredicted;
  if (T < 0.0 && T != -1.0) {
    complex_c = c_eff_complex(T, 1.0).cEffPredicted;
    cont = c_eff_continuation(T, 1.0).cEffPredicted;
  }
  Table t(with_echo({"re_ceff", "im_ceff", "re_g", "im_g", "rms_residual", "window", "re_unitary", "im_unitary",
                     "re_complex", "im_complex", "re_continuation", "im_continuation"}));
  std::vector<Cell> row = {f.cEff.real(), f.cEff.imag(), f.g.real(), f.g.imag(), f.rmsResidual,
                           window_text(f.window), unitary_c.real(), unitary_c.imag(), complex_c.real(), complex_c.imag(),
                           cont.real(), cont.imag()};
  append(row, echo(c, c.params));
  t.add(std::move(row));
  return t;
}

void run_sweep(const RunConfig& c, std::ostream& os) {
  if (!c.grid) throw InvalidArgument("sweep needs a grid (--grid, or ranges in --tR/--tL)");
  std::vector<ModelParams> points;
  for (const double tR : c.grid->tR.values())
    for (const double tL : c.grid->tL.values()) {
      ModelParams p = c.params;
      p.tR = tR;
      p.tL = tL;
      points.push_back(p);
    }

  Table t({"t_R", "t_L", "re_ceff", "im_ceff", "norm", "phase", "re_formula", "im_formula", "t", "mu", "N",
           "partition", "L0", "route", "window"});
  write_header(os, t, c.format);

  const FitSettings settings = fit_settings(c);
  const std::string window = window_text(settings.window);
  std::vector<std::optional<std::vector<Cell>>> slots(points.size());
  std::exception_ptr failure;
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      std::vector<Cell> row;
      try {
        const PhasePoint pp = phase_point(points[i], c.partition, c.L0, settings);
        row = {pp.tR, pp.tL, pp.cEffFit.real(), pp.cEffFit.imag(), pp.norm, to_string(pp.phase),
               pp.cEffFormula.real(), pp.cEffFormula.imag(), points[i].t, points[i].mu,
               static_cast<long long>(points[i].N), to_string(c.partition),
               static_cast<long long>(c.partition == PartitionKind::II ? c.L0 : 0), to_string(c.route), window};
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = points.size();
        ready.notify_all();
        return;
      }
      std::lock_guard lock(mu);
      slots[i] = std::move(row);
      ready.notify_all();
    }
  };

  const int nthreads = std::max(1, std::min<int>(c.threads, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);

  // Single ordered sink: rows leave in grid order whatever order they finish in.
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[i].has_value() || failure; });
    if (failure) break;
    const std::vector<Cell> row = std::move(*slots[i]);
    slots[i].reset();
    lock.unlock();
    write_row(os, t, row, c.format);
    os.flush();
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

int run_verify(const RunConfig& c, std::ostream& os, std::ostream& log) {
  const auto results = run_acceptance(log, c.criteria);
  Table t({"criterion", "title", "pass", "seconds", "detail"});
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    t.add({static_cast<long long>(r.id), r.title, std::string(r.pass ? "PASS" : "FAIL"), r.seconds, r.detail});
  }
  write_table(os, t, c.format);
  return all ? 0 : 3;
}

void apply_config_file(const std::string& path, std::map<std::string, std::string>& values) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidArgument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) values[key] = config_text(value);
}

}  // namespace

Range parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  Range r;
  if (parts.size() == 1) {
    r.start = r.stop = parse_double(parts[0], "range");
    return r;
  }
  if (parts.size() != 3) throw InvalidArgument("range must be start:stop:count, got '" + text + "'");
  r.start = parse_double(parts[0], "range start");
  r.stop = parse_double(parts[1], "range stop");
  r.count = parse_int(parts[2], "range count");
  if (r.count < 1) throw InvalidArgument("range count must be positive");
  if (r.count == 1 && r.start != r.stop) throw InvalidArgument("range with count 1 needs start == stop");
  return r;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Entanglement of a free-fermion ring with a non-Hermitian impurity bond", "nhimp"};

  // Every flag is captured as text so config-file values and flags go through one parser.
  std::map<std::string, std::string> flags;
  const std::vector<std::pair<std::string, std::string>> option_help = {
      {"tR", "impurity hopping t_R (sweep: start:stop:count)"},
      {"tL", "impurity hopping t_L (sweep: start:stop:count)"},
      {"t", "bulk hopping (default 1)"},
      {"mu", "chemical potential (default 0)"},
      {"N", "chain length (numeric route and spectrum)"},
      {"partition", "I or II"},
      {"L0", "impurity-subsystem distance for partition II"},
      {"LA-list", "comma-separated subsystem sizes"},
      {"route", "numeric | analytic | asymptotic"},
      {"grid", "tR_start:tR_stop:count,tL_start:tL_stop:count"},
      {"out", "output file (default stdout)"},
      {"format", "csv | json"},
      {"threads", "sweep worker threads"},
      {"criteria", "verify: comma-separated criterion ids"},
  };
  std::string command, config;
  app.add_option("command", command, "spectrum | corr | ee | fit | sweep | verify");
  app.add_option("--config", config, "JSON file with default values (flags override)");
  std::map<std::string, CLI::Option*> options;
  for (const auto& [name, help] : option_help) options[name] = app.add_option("--" + name, flags[name], help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(e.what());
  }

  std::map<std::string, std::string> values;
  if (!config.empty()) apply_config_file(config, values);
  for (const auto& [name, opt] : options)
    if (opt->count() > 0) values[name] = flags[name];
  if (!command.empty()) values["command"] = command;

  for (const auto& [key, _] : values)
    if (key != "command" && !options.count(key)) throw InvalidArgument("unknown config key '" + key + "'");

  RunConfig c;
  c.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (!values.count("command")) throw InvalidArgument("missing command (spectrum, corr, ee, fit, sweep, verify)");
  c.command = parse_command(values["command"]);

  auto has = [&](const char* k) { return values.count(k) > 0; };
  if (has("t")) c.params.t = parse_double(values["t"], "--t");
  if (has("mu")) c.params.mu = parse_double(values["mu"], "--mu");
  if (has("N")) c.params.N = parse_int(values["N"], "--N");
  if (has("partition")) c.partition = parse_partition_kind(values["partition"]);
  if (has("L0")) c.L0 = parse_int(values["L0"], "--L0");
  if (has("LA-list")) c.LAList = parse_int_list(values["LA-list"], "--LA-list");
  if (has("route")) c.route = parse_route(values["route"]);
  if (has("out")) c.output = values["out"];
  if (has("format")) c.format = parse_format(values["format"]);
  if (has("threads")) c.threads = parse_int(values["threads"], "--threads");
  if (has("criteria")) c.criteria = parse_int_list(values["criteria"], "--criteria");
  if (c.threads < 1) throw InvalidArgument("--threads must be at least 1");
  if (c.partition == PartitionKind::I && c.L0 != 0) throw InvalidArgument("--L0 applies to partition II only");

  if (c.command == Command::sweep) {
    if (has("grid")) {
      c.grid = parse_grid(values["grid"]);
    } else if (has("tR") && has("tL")) {
      c.grid = Grid{parse_range(values["tR"]), parse_range(values["tL"])};
    } else {
      throw InvalidArgument("sweep needs --grid or range values for both --tR and --tL");
    }
  } else {
    if (has("tR")) c.params.tR = parse_double(values["tR"], "--tR");
    if (has("tL")) c.params.tL = parse_double(values["tL"], "--tL");
    if (has("grid")) throw InvalidArgument("--grid only applies to sweep");
  }
  c.params.validate_couplings();
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& log) {
  std::ofstream file;
  if (!config.output.empty()) {
    file.open(config.output, std::ios::binary);
    if (!file) throw InvalidArgument("cannot write output file '" + config.output + "'");
  }
  std::ostream& os = config.output.empty() ? out : file;

  switch (config.command) {
    case Command::spectrum: write_table(os, spectrum_table(config), config.format); break;
    case Command::corr: write_table(os, corr_table(config), config.format); break;
    case Command::ee: write_table(os, ee_table(config), config.format); break;
    case Command::fit: write_table(os, fit_table(config), config.format); break;
    case Command::sweep: run_sweep(config, os); break;
    case Command::verify: return run_verify(config, os, log);
  }
  return 0;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto config = parse_args(argc, argv, out);
    if (!config) return 0;
    return run(*config, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure in " << e.operation() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace nhimp::cli
