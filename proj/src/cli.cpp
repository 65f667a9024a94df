#include "bchain/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bchain/config_io.hpp"
#include "bchain/csv_io.hpp"
#include "bchain/experiments.hpp"
#include "bchain/limit_process.hpp"
#include "bchain/parallel.hpp"
#include "bchain/telegraph_kernel.hpp"

#ifndef BCHAIN_VERSION
#define BCHAIN_VERSION "unknown"
#endif

namespace bchain::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

inline constexpr int kManifestVersion = 1;

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Output files staged under temporary names. commit() renames them into
/// place; anything not committed is deleted on destruction.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    std::error_code ec;
    for (auto& f : files_) {
      f.stream.reset();
      fs::remove(f.temp, ec);
      if (!committed_) {
        fs::remove(dir_ / f.name, ec);
      }
    }
  }

  std::ostream& open(const std::string& name) {
    File f;
    f.name = name;
    f.temp = dir_ / ("." + name + ".tmp");
    f.stream = std::make_unique<std::ofstream>(f.temp, std::ios::binary | std::ios::trunc);
    if (!*f.stream) {
      throw ConfigError("--out", "cannot write " + f.temp.string());
    }
    files_.push_back(std::move(f));
    return *files_.back().stream;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) {
      out.push_back(f.name);
    }
    return out;
  }

  /// Renames every staged file, the manifest last.
  void commit() {
    for (auto& f : files_) {
      f.stream->close();
      if (!*f.stream) {
        throw std::runtime_error("failed writing " + f.temp.string());
      }
    }
    for (auto& f : files_) {
      fs::rename(f.temp, dir_ / f.name);
    }
    committed_ = true;
  }

 private:
  struct File {
    std::string name;
    fs::path temp;
    std::unique_ptr<std::ofstream> stream;
  };
  fs::path dir_;
  std::vector<File> files_;
  bool committed_ = false;
};

struct Context {
  std::string command;
  RunSettings settings;
  std::size_t threads = 0;
  fs::path out_dir;
};

// Each command stages its CSV files and returns a JSON summary.
using Command = json (*)(const Context&, OutputSet&);

void require_system(const RunSettings& s) {
  s.require({"n_particles", "epsilon", "lambda", "energies"});
}

json cmd_simulate(const Context& ctx, OutputSet& outputs) {
  const RunSettings& s = ctx.settings;
  require_system(s);
  if (!(s.horizon_macro > 0.0 && s.horizon_macro <= 1.0)) {
    throw ConfigError("horizon_macro", "must lie in (0, 1]");
  }
  const auto runs = experiments::simulate_replicas(s.system, s.horizon_macro, ctx.threads);
  std::ostream& col = outputs.open("collisions.csv");
  std::ostream& path = outputs.open("paths.csv");
  csv::write_collision_header(col);
  csv::write_path_header(path, s.system.n_particles);
  std::size_t collisions = 0;
  std::size_t jumps = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    csv::write_collisions(col, r, runs[r].log);
    csv::write_path(path, r, runs[r].path);
    collisions += runs[r].log.records.size();
    jumps += runs[r].path.jump_count();
  }
  return {{"collisions", collisions}, {"energy_jumps", jumps}};
}

json cmd_limit(const Context& ctx, OutputSet& outputs) {
  const RunSettings& s = ctx.settings;
  s.require({"energies"});
  const limit::LimitChain chain = limit::build_chain(s.system.energies, s.state_cap);
  json times = json::array();
  for (std::size_t i = 0; i < s.t_list.size(); ++i) {
    if (!(s.t_list[i] >= 0.0) || !std::isfinite(s.t_list[i])) {
      throw ConfigError("t_list", "times must be finite and nonnegative");
    }
    const auto dist = limit::solve_distribution(chain, s.t_list[i]);
    csv::write_distribution(outputs.open("limit_t" + std::to_string(i) + ".csv"), chain.states, dist);
    times.push_back(s.t_list[i]);
  }
  if (s.limit_paths > 0) {
    if (!(s.horizon_macro > 0.0) || !std::isfinite(s.horizon_macro)) {
      throw ConfigError("horizon_macro", "must be positive and finite");
    }
    const auto paths = map_replicas(s.limit_paths, ctx.threads, [&](std::size_t r) {
      RngStream rng(s.system.seed, r);
      return limit::gillespie_run(s.system.energies, s.horizon_macro, rng);
    });
    std::ostream& out = outputs.open("limit_paths.csv");
    csv::write_path_header(out, s.system.energies.size());
    for (std::size_t r = 0; r < paths.size(); ++r) {
      csv::write_path(out, r, paths[r]);
    }
  }
  return {{"states", chain.size()}, {"t_list", times}};
}

json cmd_compare(const Context& ctx, OutputSet& outputs) {
  RunSettings s = ctx.settings;
  s.require({"n_particles", "lambda", "energies", "epsilon_ladder"});
  if (s.epsilon_ladder.empty()) {
    throw ConfigError("epsilon_ladder", "must list at least one value");
  }
  const auto reference =
      s.reference == "gillespie" ? experiments::Reference::Gillespie : experiments::Reference::Uniformization;
  std::vector<experiments::CompareRow> rows;
  try {
    rows = experiments::compare_ladder(s.system, s.epsilon_ladder, s.t_list, ctx.threads, reference, s.state_cap);
  } catch (const NumericalError& e) {
    if (reference == experiments::Reference::Uniformization) {
      throw NumericalError(std::string(e.what()) +
                           "; set \"reference\": \"gillespie\" to compare against a Gillespie ensemble");
    }
    throw;
  }
  csv::write_compare(outputs.open("compare.csv"), rows);
  return {{"rows", rows.size()}, {"reference", s.reference}};
}

json cmd_kernel(const Context& ctx, OutputSet& outputs) {
  const RunSettings& s = ctx.settings;
  const double lambda = s.system.lambda;
  if (!(s.kernel_t > 0.0) || !std::isfinite(s.kernel_t)) {
    throw ConfigError("kernel_t", "t > 0 required");
  }
  if (!(lambda > 0.0)) {
    throw ConfigError("lambda", "must be positive");
  }
  if (!(s.kernel_speed > 0.0)) {
    throw ConfigError("kernel_speed", "must be positive");
  }
  if (!(s.kernel_q >= 0.0 && s.kernel_q <= 1.0)) {
    throw ConfigError("kernel_q", "must lie in [0, 1]");
  }
  if (s.kernel_grid == 0) {
    throw ConfigError("kernel_grid", "must be positive");
  }
  const telegraph::SmoothKernel g(lambda, s.kernel_speed, s.kernel_t);
  const double atom = g.atom_weight();
  const telegraph::FlowPoint image =
      telegraph::deterministic_flow(s.kernel_q, s.kernel_p_sign * s.kernel_speed, s.kernel_t);
  std::ostream& out = outputs.open("kernel.csv");
  out << "q,p_sign,q_prime,p_prime_sign,t,atom_weight,smooth_density\n";
  for (int sign_prime : {1, -1}) {
    for (std::size_t i = 0; i < s.kernel_grid; ++i) {
      const double qp = (static_cast<double>(i) + 0.5) / static_cast<double>(s.kernel_grid);
      out << csv::format_double(s.kernel_q) << ',' << s.kernel_p_sign << ',' << csv::format_double(qp) << ','
          << sign_prime << ',' << csv::format_double(s.kernel_t) << ',' << csv::format_double(atom) << ','
          << csv::format_double(g(s.kernel_q, s.kernel_p_sign, qp, sign_prime)) << '\n';
    }
  }
  return {{"atom_weight", atom}, {"atom_q", image.q}, {"atom_p", image.p}};
}

json cmd_doeblin(const Context& ctx, OutputSet& outputs) {
  const RunSettings& s = ctx.settings;
  const double lambda = s.system.lambda;
  if (!(lambda > 0.0)) {
    throw ConfigError("lambda", "must be positive");
  }
  if (!(s.t0 > 0.0)) {
    throw ConfigError("t0", "must be positive");
  }
  if (s.doeblin_speeds.empty()) {
    throw ConfigError("doeblin_speeds", "must list at least one speed");
  }
  std::ostream& cert = outputs.open("doeblin.csv");
  std::ostream& decay = outputs.open("mixing.csv");
  cert << "lambda,speed,t0,grid,alpha,decay_rate\n";
  decay << "speed,t,l1_distance,atom_weight\n";
  json summary = json::array();
  for (double speed : s.doeblin_speeds) {
    if (!(speed > 0.0)) {
      throw ConfigError("doeblin_speeds", "speeds must be positive");
    }
    telegraph::MixingCertificate c = telegraph::doeblin_scan(lambda, speed, s.t0, s.doeblin_grid);
    const telegraph::DecayTable table = telegraph::mixing_decay(lambda, speed, 0.5, 1, s.mixing_times);
    c.decay_rate = table.rate;
    cert << csv::format_double(lambda) << ',' << csv::format_double(speed) << ',' << csv::format_double(s.t0)
         << ',' << c.grid << ',' << csv::format_double(c.alpha) << ',' << csv::format_double(c.decay_rate) << '\n';
    for (const auto& row : table.rows) {
      decay << csv::format_double(speed) << ',' << csv::format_double(row.t) << ','
            << csv::format_double(row.l1_distance) << ',' << csv::format_double(row.atom_weight) << '\n';
    }
    summary.push_back({{"speed", speed}, {"alpha", c.alpha}, {"decay_rate", c.decay_rate}});
  }
  return summary;
}

std::vector<double> ladder_or_epsilon(const RunSettings& s) {
  if (s.has("epsilon_ladder")) {
    return s.epsilon_ladder;
  }
  s.require({"epsilon"});
  return {s.system.epsilon};
}

json cmd_rates(const Context& ctx, OutputSet& outputs) {
  RunSettings s = ctx.settings;
  s.require({"n_particles", "lambda", "energies"});
  const auto ladder = ladder_or_epsilon(s);
  const std::vector<double> lambdas = s.has("lambda_list") ? s.lambda_list : std::vector<double>{s.system.lambda};
  const auto rows = experiments::rate_sweep(s.system, ladder, lambdas, s.horizon_macro, ctx.threads);
  csv::write_rates(outputs.open("rates.csv"), rows);
  json summary = json::array();
  for (const auto& r : rows) {
    summary.push_back({{"epsilon", r.epsilon},
                       {"lambda", r.lambda},
                       {"events", r.estimate.events},
                       {"exposure", r.estimate.exposure},
                       {"count_tail", r.count_tail}});
  }
  return summary;
}

json cmd_recollisions(const Context& ctx, OutputSet& outputs) {
  RunSettings s = ctx.settings;
  s.require({"n_particles", "lambda", "energies"});
  const auto ladder = ladder_or_epsilon(s);
  const auto rows = experiments::recollision_sweep(s.system, ladder, s.window_micro, s.horizon_macro, ctx.threads);
  csv::write_recollisions(outputs.open("recollisions.csv"), rows);
  json summary = json::array();
  for (const auto& r : rows) {
    summary.push_back({{"epsilon", r.epsilon},
                       {"collisions", r.report.collisions},
                       {"recollisions", r.report.recollisions},
                       {"window_micro", r.report.window_micro}});
  }
  return summary;
}

int execute(const Context& ctx, Command command, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  fs::create_directories(ctx.out_dir);

  OutputSet outputs(ctx.out_dir);
  const json summary = command(ctx, outputs);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json manifest = {
      {"manifest_version", kManifestVersion},
      {"csv_schema_version", csv::kSchemaVersion},
      {"code_version", BCHAIN_VERSION},
      {"command", ctx.command},
      {"seed", ctx.settings.system.seed},
      {"replicas", ctx.settings.system.replicas},
      {"config", settings_to_json(ctx.settings)},
      {"outputs", outputs.names()},
      {"summary", summary},
      {"wall_clock", {{"started_utc", started_utc}, {"finished_utc", utc_now()}, {"seconds", wall}}},
  };
  outputs.open(ctx.command + ".manifest.json") << manifest.dump(2) << '\n';
  outputs.commit();
  out << ctx.command << ": wrote";
  for (const auto& name : outputs.names()) {
    out << ' ' << (ctx.out_dir / name).string();
  }
  out << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noisy billiard chain simulator and limit-process tools", "bchain"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::size_t threads = 0;
  std::string out_dir = ".";

  const std::vector<std::pair<const char*, Command>> commands = {
      {"simulate", cmd_simulate}, {"limit", cmd_limit},   {"compare", cmd_compare},
      {"kernel", cmd_kernel},     {"doeblin", cmd_doeblin}, {"rates", cmd_rates},
      {"recollisions", cmd_recollisions},
  };
  const std::map<std::string, const char*> descriptions = {
      {"simulate", "Microscopic runs: collision log and energy path per replica"},
      {"limit", "Transient law of the limit jump chain by uniformization"},
      {"compare", "TV distance between microscopic and limit laws over an epsilon ladder"},
      {"kernel", "Single-cell telegraph kernel on a grid of end points"},
      {"doeblin", "Doeblin lower bound and L1 mixing decay of the single-cell kernel"},
      {"rates", "First-collision rate fits over epsilon and lambda"},
      {"recollisions", "Recollision fractions within a micro-time window"},
  };
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_path, "JSON config file or run manifest");
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--replicas", replicas, "Override the replica count");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sub->add_option("--out", out_dir, "Output directory");
  }

  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) {
      ctx.settings = load_settings(config_path);
    }
    if (seed) {
      ctx.settings.system.seed = *seed;
    }
    if (replicas) {
      ctx.settings.system.replicas = *replicas;
    }
    ctx.threads = threads;
    ctx.out_dir = out_dir;
    for (const auto& [name, fn] : commands) {
      if (ctx.command == name) {
        return execute(ctx, fn, out);
      }
    }
    throw InternalError("unhandled subcommand " + ctx.command);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace bchain::cli
