#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "treedisp/quantum_kernel.hpp"

namespace treedisp::cli {

enum class Task { discrete_kernel, quantum_kernel, bands, sp_check, decay_fit, line_check };

std::string task_name(Task task);
Task parse_task(const std::string& name);

/// Fully resolved run description. Every numerical knob has a default.
struct RunConfig {
  Task task = Task::discrete_kernel;

  // model
  int q = 2;
  double edge_length = 1.0;
  double alpha = 0.0;
  std::string potential = "zero";
  int n_bands = 40;
  int grid_size = 512;

  // time grid: explicit list, or [t_min, t_max] with t_count points, or phase peaks
  std::vector<double> t_list;
  double t_min = 1.0;
  double t_max = 10.0;
  int t_count = 10;
  std::string t_spacing = "linear";  // linear | log
  bool t_peaks = false;

  int distance = 0;
  std::string query = "diag";
  std::string route = "chebyshev";  // chebyshev | theta

  // sp-check
  std::string problem = "fresnel";  // fresnel | tree
  double fresnel_alpha = 1.0;
  double cutoff = 1.0;
  double tv_tol = 1e-9;

  // decay-fit
  std::string source = "discrete";  // discrete | quantum | line
  std::string fit_of = "envelope";   // envelope | residual
  int band = 0;                      // quantum source: 0 = full kernel, else one band
  double window = 0.0;               // window width in beat periods, 0 = pointwise
  int window_samples = 33;

  // line-check
  std::string line = "free";  // free | z
  double velocity = 0.0;

  std::string format = "csv";  // csv | json
  std::string out;             // empty: stdout
  int threads = 1;

  nlohmann::json to_json() const;
  /// Overlays the keys present in `j` on `base`. Unknown keys are a ConfigError.
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
  static RunConfig from_json(const nlohmann::json& j);
  /// Throws ConfigError on inconsistent or out-of-range settings.
  void validate() const;
};

/// "diag", "same-edge:x,y" or "edges:k,x,y".
KernelQuery parse_query(const std::string& text, double edge_length);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  nlohmann::json summary = nlohmann::json::object();  // e.g. fitted slope
};

/// Evaluates the task. Deterministic for a given config, whatever the thread count.
Table run_task(const RunConfig& config);

/// CSV with '#' header lines, or one JSON document. Both carry the version and config.
void write_table(const Table& table, const RunConfig& config, std::ostream& os);

/// Exit status for an exception escaping run_task: 2 config or domain error,
/// 3 non-convergence, 4 invariant violation, 1 anything else.
int exit_code(const std::exception& e);

/// Command-line entry point. Exit codes: 0 ok, 2 config, 3 non-convergence,
/// 4 invariant violation, 1 anything else.
int main(int argc, char** argv);

}  // namespace treedisp::cli
