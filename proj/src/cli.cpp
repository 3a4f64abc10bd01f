#include "treedisp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "treedisp/decay_fit.hpp"
#include "treedisp/discrete_kernel.hpp"
#include "treedisp/errors.hpp"
#include "treedisp/stationary_phase.hpp"
#include "treedisp/version.hpp"

namespace treedisp::cli {

using nlohmann::json;

namespace {

const std::map<std::string, Task>& task_table() {
  static const std::map<std::string, Task> table = {
      {"discrete-kernel", Task::discrete_kernel}, {"quantum-kernel", Task::quantum_kernel},
      {"bands", Task::bands},                     {"sp-check", Task::sp_check},
      {"decay-fit", Task::decay_fit},             {"line-check", Task::line_check},
  };
  return table;
}

void require_one_of(const std::string& key, const std::string& value,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  throw ConfigError(key + " must be one of " + list + " (got '" + value + "')");
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("trailing characters in " + what + ": '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

/// Runs body(i) for i in [0, count); results land in caller-owned slots.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(threads, count); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::shared_ptr<const BandTable> make_band_table(const RunConfig& c) {
  QuantumTreeModel model;
  model.q = TreeDegree(c.q);
  model.L = c.edge_length;
  model.alpha = c.alpha;
  model.W = Potential::parse(c.potential, c.edge_length);
  auto solver = std::make_shared<const EdgeSolver>(model, c.grid_size);
  return std::make_shared<const BandTable>(solver, c.n_bands);
}

BandQuadrature route_of(const RunConfig& c) {
  return c.route == "theta" ? BandQuadrature::theta_inversion : BandQuadrature::chebyshev_bessel;
}

std::vector<double> regular_grid(const RunConfig& c) {
  if (!c.t_list.empty()) return c.t_list;
  if (c.t_count == 1) return {c.t_min};
  if (c.t_spacing == "log") return fit::log_spaced(c.t_min, c.t_max, c.t_count);
  std::vector<double> grid(c.t_count);
  for (int i = 0; i < c.t_count; ++i) {
    grid[i] = c.t_min + (c.t_max - c.t_min) * i / (c.t_count - 1);
  }
  return grid;
}

std::vector<double> band_peaks(const Band& band, double lo, double hi) {
  // The two edge terms of a band align when (b - a)t ≡ 3π/2 mod 2π.
  const double w = band.b - band.a;
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double t = (2.0 * std::numbers::pi * k + 1.5 * std::numbers::pi) / w;
    if (t > hi) break;
    if (t >= lo) out.push_back(t);
  }
  return out;
}

std::vector<double> line_peaks(int n, double lo, double hi) {
  // |cos(2t - nπ/2 - π/4)| = 1.
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double t = (k * std::numbers::pi + n * std::numbers::pi / 2 + std::numbers::pi / 4) / 2;
    if (t > hi) break;
    if (t >= lo) out.push_back(t);
  }
  return out;
}

std::vector<double> peak_grid(std::vector<double> peaks, const RunConfig& c) {
  if (peaks.size() < 2) throw ConfigError("fewer than two phase peaks in [t_min, t_max]");
  return fit::log_subsample(peaks, c.t_count);
}

Table discrete_task(const RunConfig& c) {
  const TreeDegree q(c.q);
  const std::vector<double> grid =
      c.t_peaks ? peak_grid(discrete::phase_peaks(c.distance, q, c.t_min, c.t_max), c)
                : regular_grid(c);
  Table table;
  table.columns = {"t", "n", "re", "im", "abs", "main_re", "main_im", "residual"};
  table.rows.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), c.threads, [&](int i) {
    const double t = grid[i];
    const auto k = discrete::kernel_numeric(t, c.distance, q);
    const auto m = t > 0.0 ? discrete::kernel_main_term(t, c.distance, q)
                           : std::complex<double>(NAN, NAN);
    table.rows[i] = {t, c.distance, k.real(), k.imag(), std::abs(k),
                     number(m.real()), number(m.imag()), number(std::abs(k - m))};
  });
  return table;
}

Table quantum_task(const RunConfig& c) {
  const auto bands = make_band_table(c);
  const QuantumKernel kernel(bands);
  const KernelQuery query = parse_query(c.query, c.edge_length);
  const std::vector<double> grid =
      c.t_peaks ? peak_grid(band_peaks(bands->bands().front(), c.t_min, c.t_max), c)
                : regular_grid(c);
  Table table;
  table.columns = {"t",       "re",       "im",         "abs",         "main_re",
                   "main_im", "residual", "tail_bound", "tail_warning"};
  table.rows.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), c.threads, [&](int i) {
    const double t = grid[i];
    const KernelValue k = kernel.kernel_numeric(t, query, c.n_bands, route_of(c));
    const KernelValue m = kernel.kernel_main_term(t, query, c.n_bands);
    table.rows[i] = {t,
                     k.value.real(),
                     k.value.imag(),
                     std::abs(k.value),
                     m.value.real(),
                     m.value.imag(),
                     std::abs(k.value - m.value),
                     number(k.tail_bound),
                     k.tail_warning};
  });
  return table;
}

Table bands_task(const RunConfig& c) {
  const auto bands = make_band_table(c);
  Table table;
  table.columns = {"n", "a", "b", "delta", "w_sign", "dw_a", "dw_b", "delta_below"};
  for (const Band& b : bands->bands()) {
    table.rows.push_back({b.index, b.a, b.b, b.dirichlet_above, b.w_sign, b.dw_a, b.dw_b,
                          number(b.dirichlet_below)});
  }
  return table;
}

Table sp_task(const RunConfig& c) {
  const sp::PhaseProblem prob =
      c.problem == "tree" ? sp::tree_problem(c.q) : sp::fresnel_problem(c.fresnel_alpha, c.cutoff);
  sp::validate(prob);
  const std::vector<double> grid = regular_grid(c);
  Table table;
  table.columns = {"t",       "numeric_re", "numeric_im", "main_re",       "main_im",
                   "error",   "bound",      "bound_relaxed", "bound_satisfied"};
  table.rows.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), c.threads, [&](int i) {
    const double t = grid[i];
    const auto est = sp::endpoint_estimate(prob, t, c.tv_tol);
    const auto num = sp::integrate_numeric(prob, t);
    const double err = std::abs(num - est.main);
    table.rows[i] = {t,   num.real(), num.imag(),        est.main.real(), est.main.imag(),
                     err, est.bound,  est.bound_relaxed, err <= est.bound};
  });
  return table;
}

Table decay_task(const RunConfig& c) {
  const bool residual = c.fit_of == "residual";
  std::function<double(double)> measure;
  std::vector<double> peaks;
  double beat = 0.0;

  std::shared_ptr<const BandTable> bands;
  std::shared_ptr<const QuantumKernel> kernel;
  KernelQuery query;

  if (c.source == "discrete") {
    const TreeDegree q(c.q);
    const int n = c.distance;
    measure = [=](double t) {
      const auto k = discrete::kernel_numeric(t, n, q);
      return residual ? std::abs(k - discrete::kernel_main_term(t, n, q)) : std::abs(k);
    };
    beat = std::numbers::pi / std::sqrt(c.q);
    if (c.t_peaks) peaks = discrete::phase_peaks(n, q, c.t_min, c.t_max);
  } else if (c.source == "quantum") {
    bands = make_band_table(c);
    kernel = std::make_shared<const QuantumKernel>(bands);
    query = parse_query(c.query, c.edge_length);
    if (c.band > bands->size()) throw ConfigError("band exceeds n_bands");
    const Band& ref = bands->bands()[std::max(c.band, 1) - 1];
    beat = 2.0 * std::numbers::pi / (ref.b - ref.a);
    if (c.t_peaks) peaks = band_peaks(ref, c.t_min, c.t_max);
    const int band = c.band;
    const int n_bands = c.n_bands;
    const BandQuadrature route = route_of(c);
    measure = [=](double t) {
      if (band > 0) {
        if (!residual) return std::abs(kernel->band_integral(band, t, query, route));
        const BandContribution bc = kernel->band_contribution(band, t, query);
        return std::abs(bc.numeric - bc.main);
      }
      const auto k = kernel->kernel_numeric(t, query, n_bands, route).value;
      if (!residual) return std::abs(k);
      return std::abs(k - kernel->kernel_main_term(t, query, n_bands).value);
    };
  } else {
    const int n = c.distance;
    measure = [=](double t) {
      const auto k = discrete::line_kernel(t, n);
      if (!residual) return std::abs(k);
      const double lead = std::cos(2 * t - n * std::numbers::pi / 2 - std::numbers::pi / 4) /
                          std::sqrt(std::numbers::pi * t);
      std::complex<double> in = 1.0;
      for (int j = 0; j < n % 4; ++j) in *= std::complex<double>(0, 1);
      return std::abs(k - in * lead);
    };
    beat = std::numbers::pi;
    if (c.t_peaks) peaks = line_peaks(n, c.t_min, c.t_max);
  }

  const std::vector<double> grid = c.t_peaks ? peak_grid(peaks, c) : regular_grid(c);
  std::vector<double> mags(grid.size());
  parallel_for(static_cast<int>(grid.size()), c.threads, [&](int i) {
    mags[i] = c.window > 0.0 ? fit::window_max(measure, grid[i], c.window * beat, c.window_samples)
                             : measure(grid[i]);
  });

  std::vector<std::pair<double, double>> samples;
  for (std::size_t i = 0; i < grid.size(); ++i) samples.emplace_back(grid[i], mags[i]);
  const fit::FitResult f = fit::decay_fit(samples);

  Table table;
  table.columns = {"t", "magnitude", "fit_residual"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table.rows.push_back({grid[i], mags[i], f.residuals[i]});
  }
  table.summary = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
  return table;
}

Table line_task(const RunConfig& c) {
  const std::vector<double> grid = regular_grid(c);
  Table table;
  table.rows.resize(grid.size());
  if (c.line == "z") {
    table.columns = {"t", "n", "quad_re", "quad_im", "bessel_re", "bessel_im", "error"};
    parallel_for(static_cast<int>(grid.size()), c.threads, [&](int i) {
      const double t = grid[i];
      const int n = c.distance;
      const auto quad = discrete::line_kernel(t, n);
      std::complex<double> in = 1.0;
      for (int j = 0; j < n % 4; ++j) in *= std::complex<double>(0, 1);
      const auto ref = in * bessel_sequence(n + 1, 2 * t)[n];
      table.rows[i] = {t,          n,          quad.real(),          quad.imag(),
                       ref.real(), ref.imag(), std::abs(quad - ref)};
    });
  } else {
    table.columns = {"t", "v", "closed_re", "closed_im", "numeric_re", "numeric_im", "error"};
    parallel_for(static_cast<int>(grid.size()), c.threads, [&](int i) {
      const FreeLineKernel k = free_line_kernel(grid[i], c.velocity);
      table.rows[i] = {grid[i],
                       c.velocity,
                       k.closed_form.real(),
                       k.closed_form.imag(),
                       k.numeric.real(),
                       k.numeric.imag(),
                       std::abs(k.numeric - k.closed_form)};
    });
  }
  return table;
}

std::string csv_cell(const json& cell) {
  return cell.is_string() ? cell.get<std::string>() : cell.dump();
}

}  // namespace

std::string task_name(Task task) {
  for (const auto& [name, t] : task_table()) {
    if (t == task) return name;
  }
  return "?";
}

Task parse_task(const std::string& name) {
  const auto it = task_table().find(name);
  if (it == task_table().end()) throw ConfigError("unknown task '" + name + "'");
  return it->second;
}

json RunConfig::to_json() const {
  return {
      {"task", task_name(task)},
      {"q", q},
      {"edge_length", edge_length},
      {"alpha", alpha},
      {"potential", potential},
      {"n_bands", n_bands},
      {"grid_size", grid_size},
      {"t_list", t_list},
      {"t_min", t_min},
      {"t_max", t_max},
      {"t_count", t_count},
      {"t_spacing", t_spacing},
      {"t_peaks", t_peaks},
      {"distance", distance},
      {"query", query},
      {"route", route},
      {"problem", problem},
      {"fresnel_alpha", fresnel_alpha},
      {"cutoff", cutoff},
      {"tv_tol", tv_tol},
      {"source", source},
      {"fit_of", fit_of},
      {"band", band},
      {"window", window},
      {"window_samples", window_samples},
      {"line", line},
      {"velocity", velocity},
      {"format", format},
      {"out", out},
      {"threads", threads},
  };
}

RunConfig RunConfig::from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const json known = c.to_json();
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    auto take = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
    take("q", c.q);
    take("edge_length", c.edge_length);
    take("alpha", c.alpha);
    take("potential", c.potential);
    take("n_bands", c.n_bands);
    take("grid_size", c.grid_size);
    take("t_list", c.t_list);
    take("t_min", c.t_min);
    take("t_max", c.t_max);
    take("t_count", c.t_count);
    take("t_spacing", c.t_spacing);
    take("t_peaks", c.t_peaks);
    take("distance", c.distance);
    take("query", c.query);
    take("route", c.route);
    take("problem", c.problem);
    take("fresnel_alpha", c.fresnel_alpha);
    take("cutoff", c.cutoff);
    take("tv_tol", c.tv_tol);
    take("source", c.source);
    take("fit_of", c.fit_of);
    take("band", c.band);
    take("window", c.window);
    take("window_samples", c.window_samples);
    take("line", c.line);
    take("velocity", c.velocity);
    take("format", c.format);
    take("out", c.out);
    take("threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json(const json& j) { return from_json(j, RunConfig{}); }

void RunConfig::validate() const {
  if (q < 2) throw ConfigError("q must be >= 2");
  if (!(edge_length > 0.0)) throw ConfigError("edge_length must be positive");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  if (n_bands < 1) throw ConfigError("n_bands must be >= 1");
  if (grid_size < 16) throw ConfigError("grid_size must be >= 16");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (distance < 0) throw ConfigError("distance must be >= 0");
  require_one_of("t_spacing", t_spacing, {"linear", "log"});
  require_one_of("route", route, {"chebyshev", "theta"});
  require_one_of("problem", problem, {"fresnel", "tree"});
  require_one_of("source", source, {"discrete", "quantum", "line"});
  require_one_of("fit_of", fit_of, {"envelope", "residual"});
  require_one_of("line", line, {"free", "z"});
  require_one_of("format", format, {"csv", "json"});
  if (band < 0) throw ConfigError("band must be >= 0");
  if (window < 0.0) throw ConfigError("window must be >= 0");
  if (window_samples < 2) throw ConfigError("window_samples must be >= 2");
  if (!(tv_tol > 0.0)) throw ConfigError("tv_tol must be positive");
  if (!(cutoff > 0.0)) throw ConfigError("cutoff must be positive");
  if (fresnel_alpha == 0.0) throw ConfigError("fresnel_alpha must be nonzero");

  const bool allow_zero = task == Task::discrete_kernel || (task == Task::line_check && line == "z");
  auto check_t = [&](double t) {
    if (!std::isfinite(t) || t < 0.0 || (t == 0.0 && !allow_zero)) {
      throw ConfigError("times must be positive for task " + task_name(task));
    }
  };
  if (!t_list.empty()) {
    if (t_peaks) throw ConfigError("t_list and t_peaks are mutually exclusive");
    for (std::size_t i = 0; i < t_list.size(); ++i) {
      check_t(t_list[i]);
      if (i > 0 && !(t_list[i] > t_list[i - 1])) throw ConfigError("t_list must be strictly increasing");
    }
  } else {
    check_t(t_min);
    if (t_count < 1) throw ConfigError("t_count must be >= 1");
    if (t_count > 1 && !(t_max > t_min)) throw ConfigError("t_max must exceed t_min");
    if (t_spacing == "log" && !(t_min > 0.0)) throw ConfigError("log spacing needs t_min > 0");
  }
  if (t_peaks && task != Task::discrete_kernel && task != Task::quantum_kernel &&
      task != Task::decay_fit) {
    throw ConfigError("t_peaks is not available for task " + task_name(task));
  }
  if (task == Task::decay_fit) {
    if (!t_peaks && t_list.empty() && t_count < 8) throw ConfigError("decay-fit needs >= 8 times");
    if (source == "discrete" && fit_of == "residual" && t_peaks) {
      throw ConfigError("residual fits use a regular grid, not phase peaks");
    }
  }
  if (task == Task::quantum_kernel || (task == Task::decay_fit && source == "quantum")) {
    parse_query(query, edge_length);
  }
}

KernelQuery parse_query(const std::string& text, double edge_length) {
  KernelQuery query;
  if (text == "diag") {
    query = KernelQuery::diagonal();
  } else if (text.rfind("same-edge:", 0) == 0) {
    const auto parts = split(text.substr(10), ',');
    if (parts.size() != 2) throw ConfigError("same-edge query needs x,y");
    query = KernelQuery::same_edge(parse_number(parts[0], "x"), parse_number(parts[1], "y"));
  } else if (text.rfind("edges:", 0) == 0) {
    const auto parts = split(text.substr(6), ',');
    if (parts.size() != 3) throw ConfigError("edges query needs k,x,y");
    const double k = parse_number(parts[0], "k");
    if (k != std::floor(k)) throw ConfigError("edges query: k must be an integer");
    query = KernelQuery::distinct_edges(static_cast<int>(k), parse_number(parts[1], "x"),
                                        parse_number(parts[2], "y"));
  } else {
    throw ConfigError("query must be diag, same-edge:x,y or edges:k,x,y (got '" + text + "')");
  }
  try {
    query.validate(edge_length);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return query;
}

Table run_task(const RunConfig& config) {
  config.validate();
  switch (config.task) {
    case Task::discrete_kernel: return discrete_task(config);
    case Task::quantum_kernel: return quantum_task(config);
    case Task::bands: return bands_task(config);
    case Task::sp_check: return sp_task(config);
    case Task::decay_fit: return decay_task(config);
    case Task::line_check: return line_task(config);
  }
  throw ConfigError("unhandled task");
}

void write_table(const Table& table, const RunConfig& config, std::ostream& os) {
  json cfg = config.to_json();
  cfg.erase("out");
  cfg.erase("threads");
  if (config.format == "json") {
    json doc = {{"version", kVersion}, {"config", cfg}, {"columns", table.columns}};
    doc["rows"] = table.rows;
    if (!table.summary.empty()) doc["summary"] = table.summary;
    os << doc.dump(1) << '\n';
    return;
  }
  os << "# treedisp " << kVersion << '\n';
  os << "# config " << cfg.dump() << '\n';
  if (!table.summary.empty()) os << "# summary " << table.summary.dump() << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

namespace {

struct Flags {
  std::string config_path;
  RunConfig values;
};

void add_model_flags(CLI::App* app, Flags& f) {
  app->add_option("--q", f.values.q, "Branching parameter q (degree q+1)");
  app->add_option("--edge-length", f.values.edge_length, "Edge length L");
  app->add_option("--alpha", f.values.alpha, "Vertex coupling constant");
  app->add_option("--potential", f.values.potential, "zero | cosine:A | well:depth,width | table:PATH");
  app->add_option("--n-bands", f.values.n_bands, "Number of bands");
  app->add_option("--grid-size", f.values.grid_size, "Magnus steps per edge");
}

void add_time_flags(CLI::App* app, Flags& f) {
  app->add_option("--t-min", f.values.t_min);
  app->add_option("--t-max", f.values.t_max);
  app->add_option("--t-count", f.values.t_count);
  app->add_option("--t-spacing", f.values.t_spacing, "linear | log");
  app->add_option("--t-list", f.values.t_list, "Explicit times")->delimiter(',');
}

void add_peaks_flag(CLI::App* app, Flags& f) {
  app->add_flag("--t-peaks", f.values.t_peaks, "Use main-term phase peaks in [t-min, t-max]");
}

void add_output_flags(CLI::App* app, Flags& f) {
  app->add_option("--format", f.values.format, "csv | json");
  app->add_option("--out", f.values.out, "Output path (default stdout)");
  app->add_option("--threads", f.values.threads, "Worker threads over the time grid");
  app->add_option("--config", f.config_path, "JSON config; flags override it");
}

/// Copies every flag given on the command line from `given` onto `base`.
RunConfig overlay(const CLI::App& sub, const RunConfig& given, RunConfig base) {
  json g = given.to_json();
  json b = base.to_json();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_lnames().empty()) continue;
    std::string key = opt->get_lnames().front();
    std::replace(key.begin(), key.end(), '-', '_');
    if (b.contains(key)) b[key] = g[key];
  }
  return RunConfig::from_json(b, base);
}

}  // namespace

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 2;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  if (dynamic_cast<const InvariantViolation*>(&e)) return 4;
  return 1;
}

int main(int argc, char** argv) {
  CLI::App app{"Dispersive estimates on regular trees and quantum trees"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Flags flags;
  std::map<CLI::App*, Task> tasks;

  auto* dk = app.add_subcommand("discrete-kernel", "e^{itA}(v,w) on the tree, with the main term");
  add_model_flags(dk, flags);
  add_time_flags(dk, flags);
  add_peaks_flag(dk, flags);
  dk->add_option("--distance", flags.values.distance, "Graph distance n");
  add_output_flags(dk, flags);
  tasks[dk] = Task::discrete_kernel;

  auto* qk = app.add_subcommand("quantum-kernel", "AC-part kernel on the quantum tree");
  add_model_flags(qk, flags);
  add_time_flags(qk, flags);
  add_peaks_flag(qk, flags);
  qk->add_option("--query", flags.values.query, "diag | same-edge:x,y | edges:k,x,y");
  qk->add_option("--route", flags.values.route, "chebyshev | theta");
  add_output_flags(qk, flags);
  tasks[qk] = Task::quantum_kernel;

  auto* bd = app.add_subcommand("bands", "Band edges and Dirichlet values");
  add_model_flags(bd, flags);
  add_output_flags(bd, flags);
  tasks[bd] = Task::bands;

  auto* spc = app.add_subcommand("sp-check", "Endpoint stationary phase against quadrature");
  spc->add_option("--problem", flags.values.problem, "fresnel | tree");
  spc->add_option("--fresnel-alpha", flags.values.fresnel_alpha);
  spc->add_option("--cutoff", flags.values.cutoff, "Fresnel interval length A");
  spc->add_option("--q", flags.values.q);
  spc->add_option("--tv-tol", flags.values.tv_tol);
  add_time_flags(spc, flags);
  add_output_flags(spc, flags);
  tasks[spc] = Task::sp_check;

  auto* df = app.add_subcommand("decay-fit", "Log-log slope of a kernel envelope or residual");
  add_model_flags(df, flags);
  add_time_flags(df, flags);
  add_peaks_flag(df, flags);
  df->add_option("--source", flags.values.source, "discrete | quantum | line");
  df->add_option("--fit-of", flags.values.fit_of, "envelope | residual");
  df->add_option("--distance", flags.values.distance);
  df->add_option("--query", flags.values.query);
  df->add_option("--route", flags.values.route);
  df->add_option("--band", flags.values.band, "Single band (quantum source), 0 = all");
  df->add_option("--window", flags.values.window, "Window width in beat periods");
  df->add_option("--window-samples", flags.values.window_samples);
  add_output_flags(df, flags);
  tasks[df] = Task::decay_fit;

  auto* lc = app.add_subcommand("line-check", "Free-line and lattice kernels against closed forms");
  lc->add_option("--line", flags.values.line, "free | z");
  lc->add_option("--velocity", flags.values.velocity, "v = |x-y|/t (free line)");
  lc->add_option("--distance", flags.values.distance, "Site offset (z)");
  add_time_flags(lc, flags);
  add_output_flags(lc, flags);
  tasks[lc] = Task::line_check;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    RunConfig base;
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      if (!in) throw ConfigError("cannot open config " + flags.config_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
      }
      base = RunConfig::from_json(j, base);
    }
    RunConfig config = overlay(*sub, flags.values, base);
    config.task = tasks.at(sub);
    const Table table = run_task(config);
    if (config.out.empty()) {
      write_table(table, config, std::cout);
    } else {
      std::ofstream os(config.out);
      if (!os) throw ConfigError("cannot write " + config.out);
      write_table(table, config, os);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "treedisp: " << e.what() << '\n';
    return exit_code(e);
  }
}

}  // namespace treedisp::cli
