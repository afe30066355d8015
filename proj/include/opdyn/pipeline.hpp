#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opdyn/exact.hpp"
#include "opdyn/mlp.hpp"
#include "opdyn/tebd.hpp"

namespace opdyn {

enum class ReferenceKind { tebd_full, exact, none };
ReferenceKind reference_from_string(std::string_view name);  // tebd|exact|none
std::string to_string(ReferenceKind kind);

inline constexpr std::uint64_t kDefaultSeedInit = 20240917;
inline constexpr std::uint64_t kDefaultSeedShuffle = 75321;

// Full configuration of one hybrid experiment: generate a short TEBD
// prefix, train the regressor on it, roll the regressor out over the whole
// interval, and optionally compare against a full reference evolution.
struct HybridConfig {
  ModelSpec model;
  double delta = 0.05;
  Eigen::Index total_steps = 500;   // full interval = total_steps * delta
  Eigen::Index train_pairs = 110;
  Eigen::Index window = 4;          // p
  Eigen::Index hidden = 32;         // m
  Eigen::Index max_bond = 200;
  double cutoff = 0.0;
  std::string observable = "sz";
  double learning_rate = kDefaultLearningRate;
  Eigen::Index max_epochs = kDefaultMaxEpochs;
  double target_mae = kDefaultTargetMae;
  std::uint64_t seed_init = kDefaultSeedInit;
  std::uint64_t seed_shuffle = kDefaultSeedShuffle;
  ReferenceKind reference = ReferenceKind::tebd_full;

  // Series samples the generation stage produces (training inputs + labels).
  Eigen::Index generated_points() const { return train_pairs + window; }
};

void validate(const HybridConfig& cfg);

struct SeriesComparison {
  TimeSeries epsilon;  // pointwise |a - b|
  double mean_abs = 0.0;
  double max_abs = 0.0;
};

// Requires identical time grids to 1e-9.
SeriesComparison compare_series(const TimeSeries& a, const TimeSeries& b);

struct RunReport {
  HybridConfig config;

  // Model series over the full grid: the first `window` samples are the
  // generated seed, then one-step predictions over the training region,
  // then the closed-loop rollout from index prediction_start on.
  TimeSeries series_pred;
  TimeSeries series_ref;  // empty when reference == none or the run failed
  TimeSeries epsilon;     // |ref - pred| over the full grid
  double mean_epsilon = 0.0;
  double max_epsilon = 0.0;
  double mean_epsilon_prediction = 0.0;  // closed-loop region only
  double max_epsilon_prediction = 0.0;
  Eigen::Index prediction_start = 0;

  double generation_seconds = 0.0;
  double training_seconds = 0.0;
  double prediction_seconds = 0.0;
  double reference_seconds = 0.0;
  double generation_truncation_weight = 0.0;
  double reference_truncation_weight = 0.0;

  TrainReport train;
  Mlp mlp;

  bool failed = false;
  std::string failure_reason;
};

RunReport hybrid_run(const HybridConfig& cfg);

// Resolved-config echo plus timings, training and deviation statistics.
// The [config] block uses CLI flag names so a run can be reproduced from
// the report alone.
std::string report_text(const RunReport& report);
std::string config_echo(const HybridConfig& cfg);

struct BenchRow {
  Eigen::Index n_sites = 0;
  Eigen::Index train_pairs = 0;
  double generation_seconds = 0.0;
  double train_predict_seconds = 0.0;
  double full_tebd_seconds = 0.0;
  Eigen::Index train_epochs = 0;
  double final_train_mae = 0.0;
  bool failed = false;
  std::string failure_reason;
};

// Runs, strictly serially, one hybrid run plus one full-interval TEBD
// baseline per size. A failed size is marked and the remaining rows still
// run. Benchmarks must not run concurrently with other heavy work or the
// timings lose meaning.
std::vector<BenchRow> bench_scaling(const std::vector<Eigen::Index>& sizes,
                                    const HybridConfig& base,
                                    const std::vector<Eigen::Index>& train_pairs_per_size);

// Columns: n_sites,train_pairs,generation_s,train_predict_s,full_tebd_s
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace opdyn
