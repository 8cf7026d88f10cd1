#include <linesfm/experiment.hpp>

#include <linesfm/errors.hpp>
#include <linesfm/stability.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace linesfm {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list element in '" + value + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

double parse_double(const std::string& text) {
  // Accepts plain numbers and simple fractions such as 1/30.
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return parse_double(trim(text.substr(0, slash))) / parse_double(trim(text.substr(slash + 1)));
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::logic_error&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("not a number: '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::logic_error&) {
    throw ConfigError("not an integer: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

std::string_view kind_name(ObserverKind kind) {
  switch (kind) {
    case ObserverKind::MloMP: return "mlo_mp";
    case ObserverKind::MloSphere: return "mlo_sphere";
    case ObserverKind::MhoMP: return "mho_mp";
    case ObserverKind::MhoSphere: return "mho_sphere";
  }
  return "unknown";
}

ObserverKind kind_from_name(const std::string& name) {
  for (ObserverKind k : {ObserverKind::MloMP, ObserverKind::MloSphere, ObserverKind::MhoMP,
                         ObserverKind::MhoSphere}) {
    if (kind_name(k) == name) return k;
  }
  throw ConfigError("unknown observer kind '" + name + "'");
}

json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (observers.empty()) throw ConfigError("at least one observer is required");
  if (noise_levels.empty() || trajectories.empty()) {
    throw ConfigError("noise_std and trajectory lists must not be empty");
  }
  for (double s : noise_levels) {
    if (!(s >= 0.0)) throw ConfigError("noise_std must be non-negative");
  }
  scenario.validate();
  scenario.simplex.validate();
}

std::vector<std::string> ExperimentSpec::warnings() const {
  std::vector<std::string> out;
  for (const ObserverConfig& obs : observers) {
    if (!obs.is_mho()) continue;
    OperatingEnvelope env;
    env.max_nu = scenario.velocity_cap;
    env.max_omega = scenario.velocity_cap;
    env.dt = scenario.dt;
    env.horizon = obs.horizon;
    const StabilityCertificate cert = certificate(env);
    if (obs.mu > cert.mu_max) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "%s: mu = %g exceeds the certified bound %.4f for N = %d",
                    obs.label().c_str(), obs.mu, cert.mu_max, obs.horizon);
      out.emplace_back(buf);
    }
  }
  return out;
}

ExperimentSpec parse_experiment(std::istream& in) {
  ExperimentSpec spec;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    try {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (value.empty()) throw ConfigError("missing value for '" + key + "'");

      ScenarioConfig& sc = spec.scenario;
      if (key == "name") {
        spec.name = value;
      } else if (key == "runs") {
        spec.runs = static_cast<int>(parse_integer(value));
      } else if (key == "seed") {
        const long long s = parse_integer(value);
        if (s < 0) throw ConfigError("seed must be non-negative");
        sc.seed = static_cast<std::uint64_t>(s);
      } else if (key == "duration") {
        sc.duration = parse_double(value);
      } else if (key == "dt") {
        sc.dt = parse_double(value);
      } else if (key == "cube_side") {
        sc.cube_side = parse_double(value);
      } else if (key == "velocity_cap") {
        sc.velocity_cap = parse_double(value);
      } else if (key == "min_depth") {
        sc.min_depth = parse_double(value);
      } else if (key == "init_chi_bound") {
        sc.init_chi_bound = parse_double(value);
      } else if (key == "x_tol") {
        sc.simplex.x_tol = parse_double(value);
      } else if (key == "f_tol") {
        sc.simplex.f_tol = parse_double(value);
      } else if (key == "simplex_termination") {
        if (value == "both") sc.simplex.termination = SimplexTermination::Both;
        else if (value == "either") sc.simplex.termination = SimplexTermination::Either;
        else throw ConfigError("simplex_termination must be 'both' or 'either'");
      } else if (key == "noise_std") {
        spec.noise_levels.clear();
        for (const auto& v : split_list(value)) spec.noise_levels.push_back(parse_double(v));
      } else if (key == "trajectory") {
        spec.trajectories.clear();
        for (const auto& v : split_list(value)) {
          spec.trajectories.push_back(trajectory_from_string(v));
        }
      } else if (key == "observer") {
        spec.observers.push_back(parse_observer(value));
      } else if (key == "write_runs") {
        spec.write_runs = parse_bool(value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file '" + path.string() + "'");
  return parse_experiment(in);
}

std::string run_file_stem(Trajectory trajectory, double noise_std, std::uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s_noise%g_seed%llu", std::string(to_string(trajectory)).c_str(),
                noise_std, static_cast<unsigned long long>(seed));
  return buf;
}

std::vector<SummaryRow> run_batch(const ExperimentSpec& spec, const BatchOptions& options) {
  spec.validate();

  struct Job {
    Trajectory trajectory;
    double noise;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Trajectory traj : spec.trajectories) {
    for (double noise : spec.noise_levels) {
      for (int i = 0; i < spec.runs; ++i) {
        jobs.push_back({traj, noise,
                        spec.scenario.seed + options.seed_offset + static_cast<std::uint64_t>(i)});
      }
    }
  }

  if (options.run_dir && spec.write_runs) std::filesystem::create_directories(*options.run_dir);

  std::vector<std::vector<SummaryRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      {
        std::lock_guard lock(error_mutex);
        if (error) return;
      }
      try {
        ScenarioConfig cfg = spec.scenario;
        cfg.seed = jobs[j].seed;
        cfg.noise_std = jobs[j].noise;
        cfg.trajectory = jobs[j].trajectory;
        const RunRecord rec = run_scenario(cfg, spec.observers);

        if (options.run_dir && spec.write_runs) {
          const auto path = *options.run_dir /
                            (run_file_stem(cfg.trajectory, cfg.noise_std, cfg.seed) + ".csv");
          std::ofstream out(path);
          if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
          write_run_csv(out, rec);
        }

        auto& rows = results[j];
        for (const ObserverTrace& tr : rec.observers) {
          SummaryRow row;
          row.seed = cfg.seed;
          row.observer = tr.config.label();
          row.config = tr.config;
          row.trajectory = cfg.trajectory;
          row.noise_std = cfg.noise_std;
          row.convergence_time = tr.convergence_time;
          row.eps_d = tr.eps_d_summary;
          row.eps_l = tr.eps_l_summary;
          row.failure = tr.failure;
          row.solver_calls = tr.solver_calls;
          row.solver_nonconverged = tr.solver_nonconverged;
          row.cost_above_prediction = tr.cost_above_prediction;
          row.fallbacks = tr.fallbacks;
          rows.push_back(std::move(row));
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  unsigned workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<SummaryRow> out;
  for (auto& rows : results) {
    for (auto& r : rows) out.push_back(std::move(r));
  }
  return out;
}

void write_summary_jsonl(std::ostream& os, const std::vector<SummaryRow>& rows) {
  for (const SummaryRow& r : rows) {
    json j;
    j["seed"] = r.seed;
    j["observer"] = r.observer;
    j["convergence_time_s"] = optional_number(r.convergence_time);
    j["eps_d_rad"] = finite_or_null(r.eps_d);
    j["eps_l_m"] = finite_or_null(r.eps_l);
    j["kind"] = kind_name(r.config.kind);
    if (r.config.is_mho()) {
      j["N"] = r.config.horizon;
      j["mu"] = r.config.mu;
    } else {
      j["alpha"] = r.config.alpha;
    }
    j["trajectory"] = to_string(r.trajectory);
    j["noise_std"] = r.noise_std;
    j["failure"] = r.failure ? json(*r.failure) : json(nullptr);
    j["solver_calls"] = r.solver_calls;
    j["solver_nonconverged"] = r.solver_nonconverged;
    j["cost_above_prediction"] = r.cost_above_prediction;
    j["fallbacks"] = r.fallbacks;
    os << j.dump() << '\n';
  }
}

std::vector<SummaryRow> read_summary_jsonl(std::istream& in) {
  std::vector<SummaryRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      SummaryRow r;
      r.seed = j.at("seed").get<std::uint64_t>();
      r.observer = j.at("observer").get<std::string>();
      if (j.contains("kind")) {
        r.config.kind = kind_from_name(j.at("kind").get<std::string>());
        if (r.config.is_mho()) {
          r.config.horizon = j.at("N").get<int>();
          r.config.mu = j.at("mu").get<double>();
        } else {
          r.config.alpha = j.at("alpha").get<double>();
        }
      }
      if (j.contains("trajectory")) {
        r.trajectory = trajectory_from_string(j.at("trajectory").get<std::string>());
      }
      if (j.contains("noise_std")) r.noise_std = j.at("noise_std").get<double>();
      const json& ct = j.at("convergence_time_s");
      if (ct.is_number()) r.convergence_time = ct.get<double>();
      r.eps_d = number_or_nan(j.at("eps_d_rad"));
      r.eps_l = number_or_nan(j.at("eps_l_m"));
      if (j.contains("failure") && j["failure"].is_string()) {
        r.failure = j["failure"].get<std::string>();
      }
      r.solver_calls = j.value("solver_calls", 0);
      r.solver_nonconverged = j.value("solver_nonconverged", 0);
      r.cost_above_prediction = j.value("cost_above_prediction", 0);
      r.fallbacks = j.value("fallbacks", 0);
      rows.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ConfigError("summary line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::optional<PlotMetric> plot_metric_from_string(std::string_view name) {
  if (name == "convergence_time") return PlotMetric::ConvergenceTime;
  if (name == "direction_error") return PlotMetric::DirectionError;
  if (name == "depth_error") return PlotMetric::DepthError;
  return std::nullopt;
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<PlotRow> aggregate(const std::vector<SummaryRow>& rows, PlotMetric metric) {
  struct Group {
    PlotRow row;
    std::vector<double> values;
  };
  std::vector<Group> groups;
  std::map<std::tuple<std::string, std::string, double>, std::size_t> index;

  for (const SummaryRow& r : rows) {
    const std::string traj(to_string(r.trajectory));
    const auto key = std::make_tuple(r.observer, traj, r.noise_std);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      Group g;
      g.row.observer = r.observer;
      g.row.trajectory = traj;
      g.row.noise_std = r.noise_std;
      groups.push_back(std::move(g));
    }
    Group& g = groups[it->second];
    ++g.row.runs;
    double v = std::numeric_limits<double>::quiet_NaN();
    switch (metric) {
      case PlotMetric::ConvergenceTime:
        if (r.convergence_time) v = *r.convergence_time;
        break;
      case PlotMetric::DirectionError: v = r.eps_d; break;
      case PlotMetric::DepthError: v = r.eps_l; break;
    }
    if (std::isfinite(v)) g.values.push_back(v);
  }

  std::vector<PlotRow> out;
  for (Group& g : groups) {
    g.row.valid = static_cast<int>(g.values.size());
    if (!g.values.empty()) {
      double sum = 0.0;
      for (double v : g.values) sum += v;
      g.row.mean = sum / static_cast<double>(g.values.size());
    }
    g.row.median = median(std::move(g.values));
    out.push_back(std::move(g.row));
  }
  return out;
}

void write_plot_csv(std::ostream& os, const std::vector<PlotRow>& rows) {
  os << "observer,trajectory,noise_std,runs,valid,median,mean\n";
  char buf[64];
  auto num = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
  };
  for (const PlotRow& r : rows) {
    os << r.observer << ',' << r.trajectory << ',' << num(r.noise_std) << ',' << r.runs << ','
       << r.valid << ',' << num(r.median) << ',' << num(r.mean) << '\n';
  }
}

}  // namespace linesfm
