#include "opdyn/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "opdyn/pipeline.hpp"

namespace opdyn {

namespace {

namespace fs = std::filesystem;

struct CliOptions {
  std::string config_file;
  std::string model = "ising";
  Eigen::Index n = 12;
  double j = 1.0;
  double h = 1.0;
  double delta_aniso = 0.0;
  double delta = 0.0;  // resolved per model when not given
  Eigen::Index steps = 500;
  Eigen::Index max_bond = 200;
  double cutoff = 0.0;
  Eigen::Index window = 4;
  Eigen::Index hidden = 32;
  std::vector<Eigen::Index> train_pairs = {110};
  double lr = kDefaultLearningRate;
  Eigen::Index max_epochs = kDefaultMaxEpochs;
  double target_mae = kDefaultTargetMae;
  std::string reference = "tebd";
  std::string observable = "sz";
  std::uint64_t seed_init = kDefaultSeedInit;
  std::uint64_t seed_shuffle = kDefaultSeedShuffle;
  std::vector<Eigen::Index> sizes;
  std::string out = "opdyn_out";
};

void add_model_flags(CLI::App* sub, CliOptions& opt) {
  // --h is a model parameter, so help is long-form only
  sub->set_help_flag("--help", "Print help and exit");
  sub->add_option("--model", opt.model, "Spin model")
      ->check(CLI::IsMember({"ising", "xxz"}))
      ->capture_default_str();
  sub->add_option("--n", opt.n, "Number of sites")->capture_default_str();
  sub->add_option("--j", opt.j, "Exchange coupling J")->capture_default_str();
  sub->add_option("--h", opt.h, "Transverse field h")->capture_default_str();
  sub->add_option("--delta-aniso", opt.delta_aniso,
                  "XXZ uniaxial anisotropy (ignored for ising)")
      ->capture_default_str();
  sub->add_option("--delta", opt.delta,
                  "Trotter time step (default 0.05 ising, 0.01 xxz)");
  sub->add_option("--observable", opt.observable, "Recorded observable")
      ->check(CLI::IsMember({"sz", "sx"}))
      ->capture_default_str();
  sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
  sub->add_option("--config", opt.config_file,
                  "Read options from a key=value file (explicit flags win)");
}

void add_tebd_flags(CLI::App* sub, CliOptions& opt) {
  sub->add_option("--steps", opt.steps, "Number of time steps")
      ->capture_default_str();
  sub->add_option("--max-bond", opt.max_bond, "Maximum MPS bond dimension")
      ->capture_default_str();
  sub->add_option("--cutoff", opt.cutoff,
                  "Relative squared singular-value cutoff")
      ->capture_default_str();
}

void add_train_flags(CLI::App* sub, CliOptions& opt) {
  sub->add_option("--window", opt.window, "Training window size p")
      ->capture_default_str();
  sub->add_option("--hidden", opt.hidden, "Hidden layer width m")
      ->capture_default_str();
  sub->add_option("--train-pairs", opt.train_pairs,
                  "Training pairs (one value, or one per size for bench)")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--lr", opt.lr, "SGD learning rate")->capture_default_str();
  sub->add_option("--max-epochs", opt.max_epochs, "SGD epoch budget")
      ->capture_default_str();
  sub->add_option("--target-mae", opt.target_mae,
                  "Stop training at this epoch-mean absolute error")
      ->capture_default_str();
  sub->add_option("--seed-init", opt.seed_init, "Weight initialization seed")
      ->capture_default_str();
  sub->add_option("--seed-shuffle", opt.seed_shuffle, "Epoch shuffle seed")
      ->capture_default_str();
}

std::vector<Eigen::Index> parse_index_list(const std::string& text) {
  std::vector<Eigen::Index> out;
  std::size_t at = 0;
  while (at < text.size()) {
    std::size_t comma = text.find(',', at);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stoll(text.substr(at, comma - at)));
    at = comma + 1;
  }
  return out;
}

// Applies key=value lines from the echoed-config format. Keys use the flag
// names without dashes; values for keys also given on the command line are
// ignored (explicit flags win).
void apply_config_file(const CLI::App* sub, CliOptions& opt) {
  std::ifstream in(opt.config_file);
  if (!in)
    throw std::invalid_argument("cannot open config file: " + opt.config_file);

  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"model", [&](const std::string& v) { opt.model = v; }},
      {"n", [&](const std::string& v) { opt.n = std::stoll(v); }},
      {"j", [&](const std::string& v) { opt.j = std::stod(v); }},
      {"h", [&](const std::string& v) { opt.h = std::stod(v); }},
      {"delta-aniso", [&](const std::string& v) { opt.delta_aniso = std::stod(v); }},
      {"delta", [&](const std::string& v) { opt.delta = std::stod(v); }},
      {"steps", [&](const std::string& v) { opt.steps = std::stoll(v); }},
      {"max-bond", [&](const std::string& v) { opt.max_bond = std::stoll(v); }},
      {"cutoff", [&](const std::string& v) { opt.cutoff = std::stod(v); }},
      {"window", [&](const std::string& v) { opt.window = std::stoll(v); }},
      {"hidden", [&](const std::string& v) { opt.hidden = std::stoll(v); }},
      {"train-pairs",
       [&](const std::string& v) { opt.train_pairs = parse_index_list(v); }},
      {"lr", [&](const std::string& v) { opt.lr = std::stod(v); }},
      {"max-epochs", [&](const std::string& v) { opt.max_epochs = std::stoll(v); }},
      {"target-mae", [&](const std::string& v) { opt.target_mae = std::stod(v); }},
      {"reference", [&](const std::string& v) { opt.reference = v; }},
      {"observable", [&](const std::string& v) { opt.observable = v; }},
      {"seed-init", [&](const std::string& v) { opt.seed_init = std::stoull(v); }},
      {"seed-shuffle",
       [&](const std::string& v) { opt.seed_shuffle = std::stoull(v); }},
      {"sizes", [&](const std::string& v) { opt.sizes = parse_index_list(v); }},
      {"out", [&](const std::string& v) { opt.out = v; }},
  };

  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  " is not key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto setter = setters.find(key);
    if (setter == setters.end())
      throw std::invalid_argument("unknown config key: " + key);
    const std::string flag = "--" + key;
    if (sub->get_option_no_throw(flag) == nullptr)
      throw std::invalid_argument("config key not valid here: " + key);
    if (sub->count(flag) > 0) continue;  // explicit flag wins
    try {
      setter->second(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad config value for " + key + ": " + value);
    }
  }
}

ModelSpec model_spec_from(const CliOptions& opt) {
  ModelSpec spec;
  spec.model = model_from_string(opt.model);
  spec.n_sites = opt.n;
  spec.j = opt.j;
  spec.h = opt.h;
  spec.delta_aniso = opt.delta_aniso;
  return spec;
}

double resolved_delta(const CliOptions& opt) {
  if (opt.delta > 0) return opt.delta;
  return model_from_string(opt.model) == Model::xxz ? 0.01 : 0.05;
}

HybridConfig hybrid_config_from(const CliOptions& opt) {
  HybridConfig cfg;
  cfg.model = model_spec_from(opt);
  cfg.delta = resolved_delta(opt);
  cfg.total_steps = opt.steps;
  if (opt.train_pairs.size() != 1)
    throw std::invalid_argument("--train-pairs takes a single value here");
  cfg.train_pairs = opt.train_pairs[0];
  cfg.window = opt.window;
  cfg.hidden = opt.hidden;
  cfg.max_bond = opt.max_bond;
  cfg.cutoff = opt.cutoff;
  cfg.observable = opt.observable;
  cfg.learning_rate = opt.lr;
  cfg.max_epochs = opt.max_epochs;
  cfg.target_mae = opt.target_mae;
  cfg.seed_init = opt.seed_init;
  cfg.seed_shuffle = opt.seed_shuffle;
  cfg.reference = reference_from_string(opt.reference);
  return cfg;
}

fs::path prepare_out_dir(const CliOptions& opt) {
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  return dir;
}

std::string simulate_config_echo(const CliOptions& opt) {
  std::string out;
  out += "model = " + opt.model + "\n";
  out += "n = " + std::to_string(opt.n) + "\n";
  out += "j = " + format_double(opt.j) + "\n";
  out += "h = " + format_double(opt.h) + "\n";
  out += "delta-aniso = " + format_double(opt.delta_aniso) + "\n";
  out += "delta = " + format_double(resolved_delta(opt)) + "\n";
  out += "steps = " + std::to_string(opt.steps) + "\n";
  out += "observable = " + opt.observable + "\n";
  return out;
}

int do_simulate(const CliOptions& opt) {
  const fs::path dir = prepare_out_dir(opt);
  const ModelSpec spec = model_spec_from(opt);
  const LocalOperator obs = observable_from_name(opt.observable);
  const TrotterSchedule sched =
      build_trotter_schedule(build_bond_terms(spec), resolved_delta(opt));

  MpsState state = polarized_state(spec.n_sites);
  const EvolveRecord record =
      evolve_record(state, sched, opt.steps, obs, opt.max_bond, opt.cutoff);
  write_csv(record.series, dir / "series.csv");

  std::string report = "# simulate report\n\n[config]\n";
  report += simulate_config_echo(opt);
  report += "max-bond = " + std::to_string(opt.max_bond) + "\n";
  report += "cutoff = " + format_double(opt.cutoff) + "\n";
  report += "\n[timings]\ngeneration_seconds = " +
            format_double(record.wall_seconds) + "\n";
  report += "\n[truncation]\ntruncation_weight = " +
            format_double(record.truncation_weight) + "\n";
  report += "max_bond_dim_reached = " + std::to_string(state.max_bond_dim()) + "\n";
  write_text_atomic(dir / "report.txt", report);
  return 0;
}

int do_exact(const CliOptions& opt) {
  const fs::path dir = prepare_out_dir(opt);
  const ModelSpec spec = model_spec_from(opt);
  const LocalOperator obs = observable_from_name(opt.observable);

  const EvolveRecord record =
      exact_evolve_record(spec, dense_polarized_state(spec.n_sites),
                          resolved_delta(opt), opt.steps, obs);
  write_csv(record.series, dir / "series.csv");

  std::string report = "# exact report\n\n[config]\n";
  report += simulate_config_echo(opt);
  report += "\n[timings]\ngeneration_seconds = " +
            format_double(record.wall_seconds) + "\n";
  write_text_atomic(dir / "report.txt", report);
  return 0;
}

int do_hybrid(const CliOptions& opt) {
  const fs::path dir = prepare_out_dir(opt);
  const HybridConfig cfg = hybrid_config_from(opt);
  const RunReport report = hybrid_run(cfg);

  write_text_atomic(dir / "report.txt", report_text(report));
  write_csv(report.series_pred, dir / "series_pred.csv");
  if (report.series_ref.size() > 0) {
    write_csv(report.series_ref, dir / "series_ref.csv");
    write_csv(report.epsilon, dir / "epsilon.csv");
  }
  save_mlp(report.mlp, dir / "mlp_checkpoint.txt");

  if (report.failed) {
    std::cerr << "error: " << report.failure_reason << "\n";
    return 1;
  }
  return 0;
}

int do_bench(const CliOptions& opt) {
  if (opt.sizes.empty())
    throw std::invalid_argument("bench requires --sizes");
  std::vector<Eigen::Index> pairs = opt.train_pairs;
  if (pairs.size() == 1 && opt.sizes.size() > 1)
    pairs.assign(opt.sizes.size(), pairs[0]);
  if (pairs.size() != opt.sizes.size())
    throw std::invalid_argument("--train-pairs must match --sizes");

  const fs::path dir = prepare_out_dir(opt);
  CliOptions base_opt = opt;
  base_opt.train_pairs = {pairs[0]};
  HybridConfig base = hybrid_config_from(base_opt);
  base.reference = ReferenceKind::none;

  const std::vector<BenchRow> rows = bench_scaling(opt.sizes, base, pairs);
  write_text_atomic(dir / "bench.csv", bench_csv(rows));

  auto join = [](const std::vector<Eigen::Index>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
      out += (i ? "," : "") + std::to_string(values[i]);
    return out;
  };
  // bench has no --reference flag (it always times against reference=none
  // plus the explicit full-TEBD baseline), so drop that line from the echo
  std::string echo;
  std::istringstream echo_stream(config_echo(base));
  for (std::string line; std::getline(echo_stream, line);)
    if (line.rfind("reference =", 0) != 0) echo += line + "\n";

  std::string report = "# bench report\n\n[config]\n";
  report += echo;
  // bench-specific keys; on re-read these override the base echo above
  report += "sizes = " + join(opt.sizes) + "\n";
  report += "train-pairs = " + join(pairs) + "\n";
  report += "\n[rows]\n";
  bool any_failed = false;
  for (const BenchRow& row : rows) {
    report += "n = " + std::to_string(row.n_sites) +
              ", train_pairs = " + std::to_string(row.train_pairs);
    if (row.failed) {
      report += ", failed: " + row.failure_reason + "\n";
      any_failed = true;
      continue;
    }
    report += ", generation_s = " + format_double(row.generation_seconds) +
              ", train_predict_s = " + format_double(row.train_predict_seconds) +
              ", full_tebd_s = " + format_double(row.full_tebd_seconds) +
              ", train_epochs = " + std::to_string(row.train_epochs) +
              ", final_train_mae = " + format_double(row.final_train_mae) + "\n";
  }
  write_text_atomic(dir / "report.txt", report);
  if (any_failed) {
    std::cerr << "error: one or more bench rows failed\n";
    return 1;
  }
  return 0;
}

void write_failure_stub(const CliOptions& opt, const std::string& reason) {
  try {
    const fs::path dir = prepare_out_dir(opt);
    std::string report = "# run failed\n\n[config]\n";
    report += simulate_config_echo(opt);
    report += "\n[status]\nfailed = true\nfailure_reason = " + reason + "\n";
    write_text_atomic(dir / "report.txt", report);
  } catch (...) {
    // stub writing is best effort
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("opdyn");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Spin-chain operator dynamics: short-time TEBD generation with "
               "autoregressive MLP extrapolation"};
  app.set_help_flag("--help", "Print help and exit");
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Evolve an MPS with second-order Trotter steps and record "
                  "the site-averaged observable");
  add_model_flags(simulate, opt);
  add_tebd_flags(simulate, opt);

  CLI::App* exact = app.add_subcommand(
      "exact", "Dense state-vector evolution with the exact step propagator "
               "(small chains)");
  add_model_flags(exact, opt);
  exact->add_option("--steps", opt.steps, "Number of time steps")
      ->capture_default_str();

  CLI::App* hybrid = app.add_subcommand(
      "hybrid", "Generate a short TEBD prefix, train the regressor, roll it "
                "out and compare against a reference");
  add_model_flags(hybrid, opt);
  add_tebd_flags(hybrid, opt);
  add_train_flags(hybrid, opt);
  hybrid->add_option("--reference", opt.reference, "Reference series")
      ->check(CLI::IsMember({"tebd", "exact", "none"}))
      ->capture_default_str();

  CLI::App* bench = app.add_subcommand(
      "bench", "Hybrid run plus full-TEBD baseline per system size, serially");
  add_model_flags(bench, opt);
  add_tebd_flags(bench, opt);
  add_train_flags(bench, opt);
  bench->add_option("--sizes", opt.sizes, "System sizes, comma separated")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help requested
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return 2;
  }

  try {
    CLI::App* chosen = simulate->parsed()   ? simulate
                       : exact->parsed()    ? exact
                       : hybrid->parsed()   ? hybrid
                                            : bench;
    if (!opt.config_file.empty()) apply_config_file(chosen, opt);
    if (simulate->parsed()) return do_simulate(opt);
    if (exact->parsed()) return do_exact(opt);
    if (hybrid->parsed()) return do_hybrid(opt);
    return do_bench(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    write_failure_stub(opt, e.what());
    return 1;
  }
}

}  // namespace opdyn
