#include "psomle/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "psomle/error.hpp"

namespace psomle {
namespace {

using json = nlohmann::ordered_json;

// --- CSV tokenizer -----------------------------------------------------------

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRow> tokenize_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  bool quoted = false, field_started = false;
  row.line = line;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty())
          throw ParseError("unexpected quote inside an unquoted field", line);
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_row();
        break;
      default:
        field += ch;
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line);
  if (field_started || !row.fields.empty()) end_row();
  return rows;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view cell) {
  cell = trim(cell);
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan";
}

double parse_number(std::string_view cell, std::size_t line, const std::string& column) {
  const auto t = trim(cell);
  double v = 0.0;
  const char* begin = t.data();
  if (!t.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw ParseError("non-numeric value '" + std::string(t) + "' in column '" + column + "'", line);
  if (!std::isfinite(v))
    throw ParseError("non-finite value in column '" + column + "'", line);
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// --- JSON helpers --------------------------------------------------------------

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, got " + j.dump());
}

json nums(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_nums(const json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(get_num(e));
  return v;
}

json intervals(std::span<const Interval> v) {
  json a = json::array();
  for (const auto& b : v) a.push_back(json::array({num(b.lo), num(b.hi)}));
  return a;
}

std::vector<Interval> get_intervals(const json& j) {
  std::vector<Interval> v;
  for (const auto& e : j) v.push_back({get_num(e.at(0)), get_num(e.at(1))});
  return v;
}

template <class E>
E enum_from(const json& j, std::initializer_list<std::pair<E, const char*>> table) {
  const auto s = j.get<std::string>();
  for (auto [e, name] : table)
    if (s == name) return e;
  throw ParseError("unknown enumerator '" + s + "'");
}

template <class E>
std::string enum_to(E e, std::initializer_list<std::pair<E, const char*>> table) {
  for (auto [v, name] : table)
    if (v == e) return name;
  return "unknown";
}

const std::initializer_list<std::pair<InertiaKind, const char*>> kInertia = {
    {InertiaKind::linear, "linear"},
    {InertiaKind::logarithmic, "logarithmic"},
    {InertiaKind::constant, "constant"}};
const std::initializer_list<std::pair<BoundMode, const char*>> kBoundMode = {
    {BoundMode::rerandomize_full, "rerandomize_full"},
    {BoundMode::rerandomize_near_edge, "rerandomize_near_edge"},
    {BoundMode::none_with_penalty, "none_with_penalty"}};
const std::initializer_list<std::pair<Topology::Kind, const char*>> kTopology = {
    {Topology::Kind::global_best, "global_best"}, {Topology::Kind::local_best, "local_best"}};
const std::initializer_list<std::pair<VelocityInit, const char*>> kVelocity = {
    {VelocityInit::zero, "zero"}, {VelocityInit::uniform, "uniform"}};
const std::initializer_list<std::pair<Trend, const char*>> kTrend = {
    {Trend::stable, "stable"},
    {Trend::divergent_up, "divergent_up"},
    {Trend::divergent_down, "divergent_down"}};

json config_json(const SwarmConfig& c) {
  json j;
  j["swarm_size"] = c.swarm_size;
  j["max_iterations"] = c.max_iterations;
  j["c1"] = num(c.c1);
  j["c2"] = num(c.c2);
  j["constriction"] = num(c.constriction);
  j["inertia"] = {{"kind", enum_to(c.inertia.kind, kInertia)}, {"weight", num(c.inertia.weight)}};
  j["bounds"] = intervals(c.bounds);
  j["bound_policy"] = {{"mode", enum_to(c.bound_policy.mode, kBoundMode)},
                       {"lower_edge_width", num(c.bound_policy.lower_edge_width)},
                       {"upper_edge_width", num(c.bound_policy.upper_edge_width)}};
  j["topology"] = {{"kind", enum_to(c.topology.kind, kTopology)},
                   {"neighbor_count", c.topology.neighbor_count}};
  j["seed"] = c.seed;
  j["init_box"] = intervals(c.init_box);
  j["per_dimension_draws"] = c.per_dimension_draws;
  j["velocity_init"] = enum_to(c.velocity_init, kVelocity);
  j["v_max"] = c.v_max ? num(*c.v_max) : json(nullptr);
  j["stagnation"] = c.stagnation ? json{{"window", c.stagnation->window},
                                        {"tolerance", num(c.stagnation->tolerance)}}
                                 : json(nullptr);
  j["threads"] = c.threads;
  return j;
}

SwarmConfig config_from(const json& j) {
  SwarmConfig c;
  c.swarm_size = j.at("swarm_size").get<std::size_t>();
  c.max_iterations = j.at("max_iterations").get<std::size_t>();
  c.c1 = get_num(j.at("c1"));
  c.c2 = get_num(j.at("c2"));
  c.constriction = get_num(j.at("constriction"));
  c.inertia.kind = enum_from(j.at("inertia").at("kind"), kInertia);
  c.inertia.weight = get_num(j.at("inertia").at("weight"));
  c.bounds = get_intervals(j.at("bounds"));
  c.bound_policy.mode = enum_from(j.at("bound_policy").at("mode"), kBoundMode);
  c.bound_policy.lower_edge_width = get_num(j.at("bound_policy").at("lower_edge_width"));
  c.bound_policy.upper_edge_width = get_num(j.at("bound_policy").at("upper_edge_width"));
  c.topology.kind = enum_from(j.at("topology").at("kind"), kTopology);
  c.topology.neighbor_count = j.at("topology").at("neighbor_count").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init_box = get_intervals(j.at("init_box"));
  c.per_dimension_draws = j.at("per_dimension_draws").get<bool>();
  c.velocity_init = enum_from(j.at("velocity_init"), kVelocity);
  if (!j.at("v_max").is_null()) c.v_max = get_num(j.at("v_max"));
  if (!j.at("stagnation").is_null())
    c.stagnation = StagnationStop{j["stagnation"].at("window").get<std::size_t>(),
                                  get_num(j["stagnation"].at("tolerance"))};
  c.threads = j.at("threads").get<std::size_t>();
  return c;
}

json fit_json(const FitResult& r) {
  json j;
  j["objective"] = r.objective;
  j["data_source"] = r.data_source;
  j["best_params"] = nums(r.best_params);
  j["best_fitness"] = num(r.best_fitness);
  j["evaluations"] = r.evaluations;
  j["nonfinite_evaluations"] = r.nonfinite_evaluations;
  j["config"] = config_json(r.config);
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back(json::array({t.iteration, num(t.fitness)}));
  j["trace"] = std::move(trace);
  return j;
}

FitResult fit_from(const json& j) {
  FitResult r;
  r.objective = j.at("objective").get<std::string>();
  r.data_source = j.at("data_source").get<std::string>();
  r.best_params = get_nums(j.at("best_params"));
  r.best_fitness = get_num(j.at("best_fitness"));
  r.evaluations = j.at("evaluations").get<std::uint64_t>();
  r.nonfinite_evaluations = j.at("nonfinite_evaluations").get<std::uint64_t>();
  r.config = config_from(j.at("config"));
  for (const auto& t : j.at("trace"))
    r.trace.push_back({t.at(0).get<std::size_t>(), get_num(t.at(1))});
  return r;
}

json study_json(const StudyReport& s) {
  json j;
  const auto& d = s.design;
  j["design"] = {{"beta0", num(d.beta0)},
                 {"beta1", num(d.beta1)},
                 {"x_lo", num(d.x_lo)},
                 {"x_hi", num(d.x_hi)},
                 {"n_per_sample", d.n_per_sample},
                 {"max_replicates", d.max_replicates},
                 {"seed", d.seed}};
  j["target"] = s.target;
  j["samples_generated"] = s.samples_generated;
  j["nonconvergent"] = s.nonconvergent;
  j["inadmissible"] = s.inadmissible;
  j["nonconvergence_rate"] = num(s.nonconvergence_rate);
  j["mean_converged_fitness"] = num(s.mean_converged_fitness);
  j["complete"] = s.complete;
  const auto& m = s.summary;
  j["summary"] = {{"mean_delta", num(m.mean_delta)},
                  {"sd_delta", num(m.sd_delta)},
                  {"min_delta", num(m.min_delta)},
                  {"max_delta", num(m.max_delta)},
                  {"mean_abs_gap_b0", num(m.mean_abs_gap_b0)},
                  {"mean_abs_gap_b1", num(m.mean_abs_gap_b1)},
                  {"mean_baseline_fitness", num(m.mean_baseline_fitness)},
                  {"mean_pso_fitness", num(m.mean_pso_fitness)},
                  {"relative_bias_pso_b0", num(m.relative_bias_pso_b0)},
                  {"relative_bias_pso_b1", num(m.relative_bias_pso_b1)},
                  {"relative_bias_baseline_b0", num(m.relative_bias_baseline_b0)},
                  {"relative_bias_baseline_b1", num(m.relative_bias_baseline_b1)},
                  {"pso_not_worse", m.pso_not_worse}};
  json recs = json::array();
  for (const auto& r : s.records)
    recs.push_back({{"replicate", r.replicate},
                    {"baseline_params", nums(r.baseline_params)},
                    {"pso_params", nums(r.pso_params)},
                    {"baseline_fitness", num(r.baseline_fitness)},
                    {"pso_fitness", num(r.pso_fitness)},
                    {"delta", num(r.delta)}});
  j["records"] = std::move(recs);
  return j;
}

StudyReport study_from(const json& j) {
  StudyReport s;
  const auto& d = j.at("design");
  s.design.beta0 = get_num(d.at("beta0"));
  s.design.beta1 = get_num(d.at("beta1"));
  s.design.x_lo = get_num(d.at("x_lo"));
  s.design.x_hi = get_num(d.at("x_hi"));
  s.design.n_per_sample = d.at("n_per_sample").get<std::size_t>();
  s.design.max_replicates = d.at("max_replicates").get<std::size_t>();
  s.design.seed = d.at("seed").get<std::uint64_t>();
  s.target = j.at("target").get<std::size_t>();
  s.samples_generated = j.at("samples_generated").get<std::size_t>();
  s.nonconvergent = j.at("nonconvergent").get<std::size_t>();
  s.inadmissible = j.at("inadmissible").get<std::size_t>();
  s.nonconvergence_rate = get_num(j.at("nonconvergence_rate"));
  s.mean_converged_fitness = get_num(j.at("mean_converged_fitness"));
  s.complete = j.at("complete").get<bool>();
  const auto& m = j.at("summary");
  auto& o = s.summary;
  o.mean_delta = get_num(m.at("mean_delta"));
  o.sd_delta = get_num(m.at("sd_delta"));
  o.min_delta = get_num(m.at("min_delta"));
  o.max_delta = get_num(m.at("max_delta"));
  o.mean_abs_gap_b0 = get_num(m.at("mean_abs_gap_b0"));
  o.mean_abs_gap_b1 = get_num(m.at("mean_abs_gap_b1"));
  o.mean_baseline_fitness = get_num(m.at("mean_baseline_fitness"));
  o.mean_pso_fitness = get_num(m.at("mean_pso_fitness"));
  o.relative_bias_pso_b0 = get_num(m.at("relative_bias_pso_b0"));
  o.relative_bias_pso_b1 = get_num(m.at("relative_bias_pso_b1"));
  o.relative_bias_baseline_b0 = get_num(m.at("relative_bias_baseline_b0"));
  o.relative_bias_baseline_b1 = get_num(m.at("relative_bias_baseline_b1"));
  o.pso_not_worse = m.at("pso_not_worse").get<std::size_t>();
  for (const auto& r : j.at("records"))
    s.records.push_back({r.at("replicate").get<std::size_t>(), get_nums(r.at("baseline_params")),
                         get_nums(r.at("pso_params")), get_num(r.at("baseline_fitness")),
                         get_num(r.at("pso_fitness")), get_num(r.at("delta"))});
  return s;
}

json divergence_json(const DivergenceReport& d) {
  json j;
  j["fitness_span"] = num(d.fitness_span);
  j["fitness_nondecreasing"] = d.fitness_nondecreasing;
  j["rel_change_threshold"] = num(d.rel_change_threshold);
  j["fitness_flat_threshold"] = num(d.fitness_flat_threshold);
  json ps = json::array();
  for (const auto& p : d.parameters)
    ps.push_back({{"name", p.name},
                  {"classification", enum_to(p.classification, kTrend)},
                  {"window", nums(p.window)},
                  {"monotone", p.monotone},
                  {"relative_change", num(p.relative_change)}});
  j["parameters"] = std::move(ps);
  return j;
}

DivergenceReport divergence_from(const json& j) {
  DivergenceReport d;
  d.fitness_span = get_num(j.at("fitness_span"));
  d.fitness_nondecreasing = j.at("fitness_nondecreasing").get<bool>();
  d.rel_change_threshold = get_num(j.at("rel_change_threshold"));
  d.fitness_flat_threshold = get_num(j.at("fitness_flat_threshold"));
  for (const auto& p : j.at("parameters")) {
    ParameterEvidence ev;
    ev.name = p.at("name").get<std::string>();
    ev.classification = enum_from(p.at("classification"), kTrend);
    ev.window = get_nums(p.at("window"));
    ev.monotone = p.at("monotone").get<bool>();
    ev.relative_change = get_num(p.at("relative_change"));
    d.parameters.push_back(std::move(ev));
  }
  return d;
}

json profile_json(const ProfileGrid& g) {
  json j;
  j["objective"] = g.objective;
  json fixed = json::array();
  for (const auto& [name, v] : g.fixed) fixed.push_back({{"name", name}, {"value", num(v)}});
  j["fixed"] = std::move(fixed);
  j["axis1"] = {{"name", g.axis1.name}, {"grid", nums(g.axis1.grid)}};
  j["axis2"] = {{"name", g.axis2.name}, {"grid", nums(g.axis2.grid)}};
  j["values"] = nums(g.values);
  j["flagged"] = g.flagged;
  return j;
}

ProfileGrid profile_from(const json& j) {
  ProfileGrid g;
  g.objective = j.at("objective").get<std::string>();
  for (const auto& f : j.at("fixed"))
    g.fixed.emplace_back(f.at("name").get<std::string>(), get_num(f.at("value")));
  g.axis1 = {j.at("axis1").at("name").get<std::string>(), get_nums(j.at("axis1").at("grid"))};
  g.axis2 = {j.at("axis2").at("name").get<std::string>(), get_nums(j.at("axis2").at("grid"))};
  g.values = get_nums(j.at("values"));
  g.flagged = j.at("flagged").get<std::vector<unsigned char>>();
  if (g.values.size() != g.axis1.grid.size() * g.axis2.grid.size() ||
      g.flagged.size() != g.values.size())
    throw ParseError("profile grid values do not match the axis lengths");
  return g;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// --- CSV ------------------------------------------------------------------------

Dataset parse_csv(std::string_view text, const CsvSchema& schema, std::string name) {
  const auto rows = tokenize_csv(text);
  if (rows.empty()) throw DomainError("CSV input '" + name + "' is empty");
  const auto& header = rows.front().fields;
  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t c = 0; c < header.size(); ++c) col.emplace(std::string(trim(header[c])), c);
  auto column = [&](const std::string& n) {
    auto it = col.find(n);
    if (it == col.end()) throw ParseError("missing column '" + n + "'", rows.front().line);
    return it->second;
  };
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].fields.size() != header.size())
      throw ParseError("row has " + std::to_string(rows[r].fields.size()) + " fields, header has " +
                           std::to_string(header.size()),
                       rows[r].line);
  if (rows.size() < 2) throw DomainError("CSV input '" + name + "' has no data rows");

  if (const auto* uni = std::get_if<UnivariateSchema>(&schema)) {
    const std::size_t c = uni->column.empty() ? 0 : column(uni->column);
    const std::string cname(trim(header[c]));
    std::vector<double> values;
    for (std::size_t r = 1; r < rows.size(); ++r)
      values.push_back(parse_number(rows[r].fields[c], rows[r].line, cname));
    return Dataset{std::move(name), DataSource::file, std::move(values)};
  }

  const auto& reg = std::get<RegressionSchema>(schema);
  if (reg.response.empty()) throw ConfigError("regression schema needs a response column");
  const std::size_t yc = column(reg.response);
  std::optional<std::size_t> tc;
  if (reg.trials) tc = column(*reg.trials);
  std::vector<std::size_t> xc;
  std::vector<std::string> names;
  if (reg.add_intercept) names.push_back("intercept");
  if (reg.covariates.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != yc && (!tc || c != *tc)) {
        xc.push_back(c);
        names.emplace_back(trim(header[c]));
      }
  } else {
    for (const auto& n : reg.covariates) {
      xc.push_back(column(n));
      names.push_back(n);
    }
  }
  const std::size_t cols = xc.size() + (reg.add_intercept ? 1 : 0);
  if (cols == 0) throw ConfigError("regression schema selects no covariates");

  std::vector<double> design, y, trials;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t line = rows[r].line;
    if (reg.drop_incomplete_rows) {
      bool missing = is_missing(f[yc]) || (tc && is_missing(f[*tc]));
      for (auto c : xc) missing = missing || is_missing(f[c]);
      if (missing) continue;
    }
    const double yi = parse_number(f[yc], line, reg.response);
    const double ni = tc ? parse_number(f[*tc], line, *reg.trials) : 1.0;
    if (ni < 1.0 || std::floor(ni) != ni)
      throw ParseError("trials must be a positive integer", line);
    if (yi < 0.0 || yi > ni || std::floor(yi) != yi)
      throw ParseError(tc ? "response must be an integer in [0, trials]"
                          : "response must be 0 or 1 without a trials column",
                       line);
    if (reg.add_intercept) design.push_back(1.0);
    for (std::size_t k = 0; k < xc.size(); ++k)
      design.push_back(parse_number(f[xc[k]], line, std::string(trim(header[xc[k]]))));
    y.push_back(yi);
    trials.push_back(ni);
  }
  if (y.empty()) throw DomainError("CSV input '" + name + "' has no complete rows");
  return Dataset{std::move(name), DataSource::file,
                 RegressionData::from_rows(design, cols, std::move(y), std::move(trials),
                                           std::move(names))};
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  return parse_csv(read_file(path), schema, path.string());
}

void write_csv(const Dataset& data, std::ostream& out) {
  if (data.univariate()) {
    out << "x\n";
    for (double v : data.sample()) out << format_number(v) << '\n';
    return;
  }
  const auto& reg = data.regression();
  for (std::size_t c = 0; c < reg.cols(); ++c)
    out << (c < reg.names().size() ? reg.names()[c] : "x" + std::to_string(c)) << ',';
  out << "y,trials\n";
  for (std::size_t r = 0; r < reg.rows(); ++r) {
    for (std::size_t c = 0; c < reg.cols(); ++c) out << format_number(reg.x(r, c)) << ',';
    out << format_number(reg.y()[r]) << ',' << format_number(reg.trials()[r]) << '\n';
  }
}

Dataset resolve_data(std::string_view spec, const CsvSchema& schema) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.substr(0, prefix.size()) == prefix) return builtin_dataset(spec.substr(prefix.size()));
  return load_csv(std::filesystem::path(std::string(spec)), schema);
}

void write_profile_csv(const ProfileGrid& grid, std::ostream& out) {
  out << "axis1,axis2,loglik\n";
  for (std::size_t i = 0; i < grid.axis1.grid.size(); ++i)
    for (std::size_t j = 0; j < grid.axis2.grid.size(); ++j) {
      out << format_number(grid.axis1.grid[i]) << ',' << format_number(grid.axis2.grid[j]) << ',';
      if (!grid.is_flagged(i, j)) out << format_number(grid.at(i, j));
      out << '\n';
    }
}

void write_convergence_map_csv(const ConvergenceMap& map, std::ostream& out) {
  out << "b0,b1,state\n";
  for (std::size_t i = 0; i < map.b0_grid.size(); ++i)
    for (std::size_t j = 0; j < map.b1_grid.size(); ++j)
      out << format_number(map.b0_grid[i]) << ',' << format_number(map.b1_grid[j]) << ','
          << to_string(map.at(i, j)) << '\n';
}

// --- JSON -------------------------------------------------------------------------

std::string to_json(const PersistedResult& result, int indent) {
  json j;
  j["schema_version"] = kSchemaVersion;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FitResult>) {
          j["type"] = "fit_result";
          j["data"] = fit_json(r);
        } else if constexpr (std::is_same_v<T, StudyReport>) {
          j["type"] = "study_report";
          j["data"] = study_json(r);
        } else if constexpr (std::is_same_v<T, DivergenceReport>) {
          j["type"] = "divergence_report";
          j["data"] = divergence_json(r);
        } else {
          j["type"] = "profile_grid";
          j["data"] = profile_json(r);
        }
      },
      result);
  return j.dump(indent);
}

PersistedResult from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("schema_version"))
      throw ParseError("JSON document has no schema_version");
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) throw IncompatibleVersion(version, kSchemaVersion);
    const auto type = j.at("type").get<std::string>();
    const auto& data = j.at("data");
    if (type == "fit_result") return fit_from(data);
    if (type == "study_report") return study_from(data);
    if (type == "divergence_report") return divergence_from(data);
    if (type == "profile_grid") return profile_from(data);
    throw ParseError("unknown result type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed result document: ") + e.what());
  }
}

void persist_result(const PersistedResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << to_json(result) << '\n';
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

PersistedResult load_result(const std::filesystem::path& path) {
  return from_json(read_file(path));
}

FitResult load_fit_result(const std::filesystem::path& path) {
  auto r = load_result(path);
  if (auto* fit = std::get_if<FitResult>(&r)) return std::move(*fit);
  throw ParseError("'" + path.string() + "' does not hold a fit result");
}

}  // namespace psomle
