#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "opdyn/errors.hpp"
#include "opdyn/time_series.hpp"

namespace opdyn {

// Sliding-window training set: input row i holds p consecutive series
// values starting at index i, and labels(i) is the value that follows.
struct WindowSet {
  Eigen::Index window = 0;   // p
  Eigen::MatrixXd inputs;    // one training example per row
  Eigen::VectorXd labels;
  double source_delta = 0.0;  // time spacing of the source series

  Eigen::Index size() const { return labels.size(); }
};

// All (series length - p) pairs in order of start index; when limit is set,
// only the first `limit` pairs are kept.
WindowSet build_windows(const TimeSeries& series, Eigen::Index p,
                        std::optional<Eigen::Index> limit = std::nullopt);

// Two-layer perceptron with linear activations: a hidden layer of m neurons
// and a single output neuron. Since every activation is the identity, the
// network collapses to one affine map of the input window; the hidden width
// only shapes the optimization landscape.
struct Mlp {
  Eigen::MatrixXd hidden_weights;     // m x p
  Eigen::VectorXd hidden_bias;        // m
  Eigen::RowVectorXd output_weights;  // 1 x m
  double output_bias = 0.0;
  std::uint64_t init_seed = 0;

  Eigen::Index window() const { return hidden_weights.cols(); }
  Eigen::Index hidden_units() const { return hidden_weights.rows(); }
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero,
// deterministic in seed.
Mlp init_mlp(Eigen::Index p, Eigen::Index m, std::uint64_t seed);

double forward(const Mlp& mlp, const Eigen::Ref<const Eigen::VectorXd>& x);

// Subgradient of |forward(x) - y| with respect to every parameter; the
// subgradient at the kink (forward(x) == y) is zero.
struct MlpGradient {
  Eigen::MatrixXd hidden_weights;
  Eigen::VectorXd hidden_bias;
  Eigen::RowVectorXd output_weights;
  double output_bias = 0.0;
};
MlpGradient loss_subgradient(const Mlp& mlp,
                             const Eigen::Ref<const Eigen::VectorXd>& x,
                             double y);

struct TrainReport {
  Eigen::Index epochs_run = 0;
  double final_train_mae = 0.0;
  std::vector<double> cost_history;  // epoch-mean absolute error
  std::uint64_t seed = 0;            // shuffle seed
};

inline constexpr double kDefaultLearningRate = 1e-3;
inline constexpr Eigen::Index kDefaultMaxEpochs = 50000;
inline constexpr double kDefaultTargetMae = 1e-3;

// Plain stochastic gradient descent on the mean-absolute-error cost:
// per-example updates with a constant learning rate, examples visited in a
// freshly shuffled order each epoch (deterministic in `seed`). Each
// example's loss is measured at visit time, before its update; training
// stops once an epoch's mean loss reaches target_mae or after max_epochs.
// Throws TrainingDivergedError when the loss becomes non-finite.
TrainReport train_sgd(Mlp& mlp, const WindowSet& data, double learning_rate,
                      Eigen::Index max_epochs, double target_mae,
                      std::uint64_t seed);

// Closed-loop rollout: each emitted value is appended to the window that
// produces the next one. O(m p) per step, independent of any system size.
// Throws RolloutDivergedError at the first non-finite prediction.
std::vector<double> predict_autoregressive(
    const Mlp& mlp, const Eigen::Ref<const Eigen::VectorXd>& seed_window,
    Eigen::Index n_steps);

// The single affine map the linear network composes to:
// forward(x) == coefficients.dot(x) + intercept.
struct AffineMap {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
};
AffineMap collapse_to_affine(const Mlp& mlp);

// Plain-text checkpoint, bit-exact across a save/load round trip:
//   opdyn-mlp-v1
//   window <p>
//   hidden <m>
//   init_seed <seed>
//   hidden_weights <m*p values, row-major>
//   hidden_bias <m values>
//   output_weights <m values>
//   output_bias <value>
// All values are written with 17 significant digits.
void save_mlp(const Mlp& mlp, const std::filesystem::path& path);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace opdyn
