#include "opdyn/pipeline.hpp"

#include <chrono>
#include <cmath>

namespace opdyn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

TimeSeries slice_from(const TimeSeries& series, Eigen::Index start) {
  TimeSeries out;
  out.times.assign(series.times.begin() + start, series.times.end());
  out.values.assign(series.values.begin() + start, series.values.end());
  return out;
}

}  // namespace

ReferenceKind reference_from_string(std::string_view name) {
  if (name == "tebd") return ReferenceKind::tebd_full;
  if (name == "exact") return ReferenceKind::exact;
  if (name == "none") return ReferenceKind::none;
  throw std::invalid_argument("unknown reference kind: " + std::string(name));
}

std::string to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::tebd_full: return "tebd";
    case ReferenceKind::exact: return "exact";
    case ReferenceKind::none: return "none";
  }
  throw std::invalid_argument("unknown reference kind");
}

void validate(const HybridConfig& cfg) {
  validate(cfg.model);
  if (!(cfg.delta > 0))
    throw std::invalid_argument("HybridConfig: delta must be > 0");
  if (cfg.window < 1)
    throw std::invalid_argument("HybridConfig: window must be >= 1");
  if (cfg.train_pairs < 1)
    throw std::invalid_argument("HybridConfig: train_pairs must be >= 1");
  if (cfg.hidden < 1)
    throw std::invalid_argument("HybridConfig: hidden must be >= 1");
  if (cfg.max_bond < 1)
    throw std::invalid_argument("HybridConfig: max_bond must be >= 1");
  if (cfg.cutoff < 0)
    throw std::invalid_argument("HybridConfig: cutoff must be >= 0");
  if (cfg.total_steps + 1 < cfg.generated_points())
    throw std::invalid_argument(
        "HybridConfig: total_steps too small for train_pairs + window samples");
  if (!(cfg.learning_rate > 0))
    throw std::invalid_argument("HybridConfig: lr must be > 0");
  if (cfg.max_epochs < 1)
    throw std::invalid_argument("HybridConfig: max_epochs must be >= 1");
  observable_from_name(cfg.observable);  // throws on unknown names
  if (cfg.reference == ReferenceKind::exact && cfg.model.n_sites > kMaxDenseSites)
    throw std::invalid_argument("HybridConfig: exact reference limited to n <= " +
                                std::to_string(kMaxDenseSites));
}

SeriesComparison compare_series(const TimeSeries& a, const TimeSeries& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("compare_series: length mismatch");
  SeriesComparison cmp;
  cmp.epsilon.times = a.times;
  cmp.epsilon.values.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-9)
      throw std::invalid_argument("compare_series: time grids differ");
    const double eps = std::abs(a.values[i] - b.values[i]);
    cmp.epsilon.values[i] = eps;
    cmp.mean_abs += eps;
    cmp.max_abs = std::max(cmp.max_abs, eps);
  }
  cmp.mean_abs /= static_cast<double>(a.size());
  return cmp;
}

RunReport hybrid_run(const HybridConfig& cfg) {
  validate(cfg);

  RunReport report;
  report.config = cfg;
  const Eigen::Index p = cfg.window;
  const Eigen::Index gen_points = cfg.generated_points();
  report.prediction_start = gen_points;

  const LocalOperator obs = observable_from_name(cfg.observable);
  const BondTermList terms = build_bond_terms(cfg.model);
  const TrotterSchedule sched = build_trotter_schedule(terms, cfg.delta);

  // (1) short-time generation
  MpsState state = polarized_state(cfg.model.n_sites);
  EvolveRecord generated =
      evolve_record(state, sched, gen_points - 1, obs, cfg.max_bond, cfg.cutoff);
  report.generation_seconds = generated.wall_seconds;
  report.generation_truncation_weight = generated.truncation_weight;
  const std::vector<double>& gen_values = generated.series.values;

  // (2) window construction and training
  auto t0 = Clock::now();
  const WindowSet windows = build_windows(generated.series, p, cfg.train_pairs);
  report.mlp = init_mlp(p, cfg.hidden, cfg.seed_init);
  try {
    report.train = train_sgd(report.mlp, windows, cfg.learning_rate,
                             cfg.max_epochs, cfg.target_mae, cfg.seed_shuffle);
  } catch (const TrainingDivergedError& e) {
    report.training_seconds = seconds_since(t0);
    report.failed = true;
    report.failure_reason = e.what();
    report.series_pred = uniform_series(
        cfg.delta, std::vector<double>(gen_values.begin(), gen_values.end()));
    return report;
  }
  report.training_seconds = seconds_since(t0);

  // (3) model series over the full grid: seed points, one-step predictions
  // across the training region, then the closed-loop rollout
  t0 = Clock::now();
  std::vector<double> pred(gen_values.begin(), gen_values.begin() + p);
  pred.reserve(cfg.total_steps + 1);
  Eigen::VectorXd buf(p);
  for (Eigen::Index i = p; i < gen_points; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) buf(k) = gen_values[i - p + k];
    pred.push_back(forward(report.mlp, buf));
  }
  for (Eigen::Index k = 0; k < p; ++k) buf(k) = gen_values[gen_points - p + k];
  try {
    const std::vector<double> tail = predict_autoregressive(
        report.mlp, buf, cfg.total_steps + 1 - gen_points);
    pred.insert(pred.end(), tail.begin(), tail.end());
  } catch (const RolloutDivergedError& e) {
    report.prediction_seconds = seconds_since(t0);
    report.failed = true;
    report.failure_reason = e.what();
    report.series_pred = uniform_series(cfg.delta, std::move(pred));
    return report;
  }
  report.prediction_seconds = seconds_since(t0);
  report.series_pred = uniform_series(cfg.delta, std::move(pred));

  // (4) reference evolution and deviation statistics
  if (cfg.reference == ReferenceKind::none) return report;

  EvolveRecord ref;
  if (cfg.reference == ReferenceKind::tebd_full) {
    MpsState ref_state = polarized_state(cfg.model.n_sites);
    ref = evolve_record(ref_state, sched, cfg.total_steps, obs, cfg.max_bond,
                        cfg.cutoff);
  } else {
    ref = exact_evolve_record(cfg.model, dense_polarized_state(cfg.model.n_sites),
                              cfg.delta, cfg.total_steps, obs);
  }
  report.reference_seconds = ref.wall_seconds;
  report.reference_truncation_weight = ref.truncation_weight;
  report.series_ref = std::move(ref.series);

  const SeriesComparison full = compare_series(report.series_ref, report.series_pred);
  report.epsilon = full.epsilon;
  report.mean_epsilon = full.mean_abs;
  report.max_epsilon = full.max_abs;

  if (static_cast<std::size_t>(report.prediction_start) < report.series_ref.size()) {
    const SeriesComparison tail =
        compare_series(slice_from(report.series_ref, report.prediction_start),
                       slice_from(report.series_pred, report.prediction_start));
    report.mean_epsilon_prediction = tail.mean_abs;
    report.max_epsilon_prediction = tail.max_abs;
  }
  return report;
}

std::string config_echo(const HybridConfig& cfg) {
  std::string out;
  out += "model = " + to_string(cfg.model.model) + "\n";
  out += "n = " + std::to_string(cfg.model.n_sites) + "\n";
  out += "j = " + format_double(cfg.model.j) + "\n";
  out += "h = " + format_double(cfg.model.h) + "\n";
  out += "delta-aniso = " + format_double(cfg.model.delta_aniso) + "\n";
  out += "delta = " + format_double(cfg.delta) + "\n";
  out += "steps = " + std::to_string(cfg.total_steps) + "\n";
  out += "max-bond = " + std::to_string(cfg.max_bond) + "\n";
  out += "cutoff = " + format_double(cfg.cutoff) + "\n";
  out += "window = " + std::to_string(cfg.window) + "\n";
  out += "hidden = " + std::to_string(cfg.hidden) + "\n";
  out += "train-pairs = " + std::to_string(cfg.train_pairs) + "\n";
  out += "lr = " + format_double(cfg.learning_rate) + "\n";
  out += "max-epochs = " + std::to_string(cfg.max_epochs) + "\n";
  out += "target-mae = " + format_double(cfg.target_mae) + "\n";
  out += "reference = " + to_string(cfg.reference) + "\n";
  out += "observable = " + cfg.observable + "\n";
  out += "seed-init = " + std::to_string(cfg.seed_init) + "\n";
  out += "seed-shuffle = " + std::to_string(cfg.seed_shuffle) + "\n";
  return out;
}

std::string report_text(const RunReport& report) {
  std::string out = "# hybrid run report\n\n[config]\n";
  out += config_echo(report.config);

  out += "\n[timings]\n";
  out += "generation_seconds = " + format_double(report.generation_seconds) + "\n";
  out += "training_seconds = " + format_double(report.training_seconds) + "\n";
  out += "prediction_seconds = " + format_double(report.prediction_seconds) + "\n";
  out += "reference_seconds = " + format_double(report.reference_seconds) + "\n";

  out += "\n[training]\n";
  out += "epochs_run = " + std::to_string(report.train.epochs_run) + "\n";
  out += "final_train_mae = " + format_double(report.train.final_train_mae) + "\n";

  out += "\n[truncation]\n";
  out += "generation_truncation_weight = " +
         format_double(report.generation_truncation_weight) + "\n";
  out += "reference_truncation_weight = " +
         format_double(report.reference_truncation_weight) + "\n";

  out += "\n[deviation]\n";
  out += "prediction_start_index = " + std::to_string(report.prediction_start) + "\n";
  out += "mean_epsilon_full = " + format_double(report.mean_epsilon) + "\n";
  out += "max_epsilon_full = " + format_double(report.max_epsilon) + "\n";
  out += "mean_epsilon_prediction = " +
         format_double(report.mean_epsilon_prediction) + "\n";
  out += "max_epsilon_prediction = " +
         format_double(report.max_epsilon_prediction) + "\n";

  out += "\n[status]\n";
  out += std::string("failed = ") + (report.failed ? "true" : "false") + "\n";
  if (report.failed) out += "failure_reason = " + report.failure_reason + "\n";
  return out;
}

std::vector<BenchRow> bench_scaling(const std::vector<Eigen::Index>& sizes,
                                    const HybridConfig& base,
                                    const std::vector<Eigen::Index>& train_pairs_per_size) {
  if (sizes.empty()) throw std::invalid_argument("bench_scaling: no sizes");
  if (sizes.size() != train_pairs_per_size.size())
    throw std::invalid_argument("bench_scaling: one train-pairs entry per size required");

  std::vector<BenchRow> rows;
  rows.reserve(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    BenchRow row;
    row.n_sites = sizes[i];
    row.train_pairs = train_pairs_per_size[i];
    try {
      HybridConfig cfg = base;
      cfg.model.n_sites = sizes[i];
      cfg.train_pairs = train_pairs_per_size[i];
      cfg.reference = ReferenceKind::none;

      const RunReport report = hybrid_run(cfg);
      if (report.failed) {
        row.failed = true;
        row.failure_reason = report.failure_reason;
        rows.push_back(row);
        continue;
      }
      row.generation_seconds = report.generation_seconds;
      row.train_predict_seconds =
          report.training_seconds + report.prediction_seconds;
      row.train_epochs = report.train.epochs_run;
      row.final_train_mae = report.train.final_train_mae;

      // full-interval TEBD baseline under identical settings
      const LocalOperator obs = observable_from_name(cfg.observable);
      const TrotterSchedule sched =
          build_trotter_schedule(build_bond_terms(cfg.model), cfg.delta);
      MpsState state = polarized_state(cfg.model.n_sites);
      const EvolveRecord full = evolve_record(state, sched, cfg.total_steps, obs,
                                              cfg.max_bond, cfg.cutoff);
      row.full_tebd_seconds = full.wall_seconds;
    } catch (const std::exception& e) {
      row.failed = true;
      row.failure_reason = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "n_sites,train_pairs,generation_s,train_predict_s,full_tebd_s\n";
  for (const BenchRow& row : rows) {
    if (row.failed) {
      out += std::to_string(row.n_sites) + "," + std::to_string(row.train_pairs) +
             ",failed,failed,failed\n";
      continue;
    }
    out += std::to_string(row.n_sites) + "," + std::to_string(row.train_pairs) +
           "," + format_double(row.generation_seconds) + "," +
           format_double(row.train_predict_seconds) + "," +
           format_double(row.full_tebd_seconds) + "\n";
  }
  return out;
}

}  // namespace opdyn
