#include "opdyn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace opdyn {

WindowSet build_windows(const TimeSeries& series, Eigen::Index p,
                        std::optional<Eigen::Index> limit) {
  if (p < 1) throw std::invalid_argument("build_windows: p must be >= 1");
  const Eigen::Index length = static_cast<Eigen::Index>(series.size());
  if (length < p + 1)
    throw std::invalid_argument("build_windows: series shorter than p + 1");

  Eigen::Index pairs = length - p;
  if (limit) {
    if (*limit < 1) throw std::invalid_argument("build_windows: limit must be >= 1");
    pairs = std::min(pairs, *limit);
  }

  WindowSet set;
  set.window = p;
  set.source_delta = series.delta();
  set.inputs.resize(pairs, p);
  set.labels.resize(pairs);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) set.inputs(i, k) = series.values[i + k];
    set.labels(i) = series.values[i + p];
  }
  return set;
}

Mlp init_mlp(Eigen::Index p, Eigen::Index m, std::uint64_t seed) {
  if (p < 1 || m < 1)
    throw std::invalid_argument("init_mlp: layer sizes must be >= 1");

  std::mt19937_64 rng(seed);
  const double hidden_scale = 1.0 / std::sqrt(static_cast<double>(p));
  const double output_scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::uniform_real_distribution<double> hidden_dist(-hidden_scale, hidden_scale);
  std::uniform_real_distribution<double> output_dist(-output_scale, output_scale);

  Mlp mlp;
  mlp.init_seed = seed;
  mlp.hidden_weights.resize(m, p);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < p; ++c) mlp.hidden_weights(r, c) = hidden_dist(rng);
  mlp.hidden_bias = Eigen::VectorXd::Zero(m);
  mlp.output_weights.resize(m);
  for (Eigen::Index c = 0; c < m; ++c) mlp.output_weights(c) = output_dist(rng);
  mlp.output_bias = 0.0;
  return mlp;
}

double forward(const Mlp& mlp, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != mlp.window())
    throw std::invalid_argument("forward: input length does not match window");
  return mlp.output_weights.dot(mlp.hidden_weights * x + mlp.hidden_bias) +
         mlp.output_bias;
}

MlpGradient loss_subgradient(const Mlp& mlp,
                             const Eigen::Ref<const Eigen::VectorXd>& x,
                             double y) {
  if (x.size() != mlp.window())
    throw std::invalid_argument("loss_subgradient: input length does not match window");

  const Eigen::VectorXd hidden = mlp.hidden_weights * x + mlp.hidden_bias;
  const double err = mlp.output_weights.dot(hidden) + mlp.output_bias - y;
  const double sign = (err > 0) - (err < 0);

  MlpGradient grad;
  grad.output_weights = sign * hidden.transpose();
  grad.output_bias = sign;
  const Eigen::VectorXd back = sign * mlp.output_weights.transpose();
  grad.hidden_weights = back * x.transpose();
  grad.hidden_bias = back;
  return grad;
}

TrainReport train_sgd(Mlp& mlp, const WindowSet& data, double learning_rate,
                      Eigen::Index max_epochs, double target_mae,
                      std::uint64_t seed) {
  if (data.size() < 1) throw std::invalid_argument("train_sgd: empty window set");
  if (data.inputs.cols() != mlp.window())
    throw std::invalid_argument("train_sgd: window size does not match the model");
  if (!(learning_rate > 0))
    throw std::invalid_argument("train_sgd: learning_rate must be > 0");
  if (max_epochs < 1)
    throw std::invalid_argument("train_sgd: max_epochs must be >= 1");

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(data.size());
  std::iota(order.begin(), order.end(), Eigen::Index(0));

  const double n_examples = static_cast<double>(data.size());
  Eigen::VectorXd hidden(mlp.hidden_units());
  Eigen::VectorXd back(mlp.hidden_units());

  TrainReport report;
  report.seed = seed;
  report.cost_history.reserve(std::min<Eigen::Index>(max_epochs, 1 << 20));

  for (Eigen::Index epoch = 1; epoch <= max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (const Eigen::Index idx : order) {
      const auto x = data.inputs.row(idx).transpose();
      hidden.noalias() = mlp.hidden_weights * x;
      hidden += mlp.hidden_bias;
      const double err =
          mlp.output_weights.dot(hidden) + mlp.output_bias - data.labels(idx);
      const double loss = std::abs(err);
      if (!std::isfinite(loss))
        throw TrainingDivergedError(
            "train_sgd: loss diverged at epoch " + std::to_string(epoch), epoch);
      loss_sum += loss;

      const double sign = (err > 0) - (err < 0);
      if (sign != 0.0) {
        const double step = learning_rate * sign;
        back = mlp.output_weights.transpose();  // pre-update weights
        mlp.output_weights.noalias() -= step * hidden.transpose();
        mlp.output_bias -= step;
        mlp.hidden_weights.noalias() -= (step * back) * x.transpose();
        mlp.hidden_bias.noalias() -= step * back;
      }
    }
    report.cost_history.push_back(loss_sum / n_examples);
    if (report.cost_history.back() <= target_mae) break;
  }

  report.epochs_run = static_cast<Eigen::Index>(report.cost_history.size());
  report.final_train_mae = report.cost_history.back();
  return report;
}

std::vector<double> predict_autoregressive(
    const Mlp& mlp, const Eigen::Ref<const Eigen::VectorXd>& seed_window,
    Eigen::Index n_steps) {
  const Eigen::Index p = mlp.window();
  if (seed_window.size() != p)
    throw std::invalid_argument(
        "predict_autoregressive: seed window length does not match model");
  if (n_steps < 0)
    throw std::invalid_argument("predict_autoregressive: n_steps must be >= 0");

  std::vector<double> out;
  out.reserve(n_steps);
  Eigen::VectorXd window = seed_window;
  for (Eigen::Index step = 0; step < n_steps; ++step) {
    const double y = forward(mlp, window);
    if (!std::isfinite(y))
      throw RolloutDivergedError(
          "predict_autoregressive: diverged at step " + std::to_string(step), step);
    out.push_back(y);
    for (Eigen::Index k = 0; k + 1 < p; ++k) window(k) = window(k + 1);
    window(p - 1) = y;
  }
  return out;
}

AffineMap collapse_to_affine(const Mlp& mlp) {
  AffineMap map;
  map.coefficients = (mlp.output_weights * mlp.hidden_weights).transpose();
  map.intercept = mlp.output_weights.dot(mlp.hidden_bias) + mlp.output_bias;
  return map;
}

namespace {

constexpr const char* kCheckpointMagic = "opdyn-mlp-v1";

void append_values(std::string& out, const char* key,
                   const double* data, Eigen::Index count) {
  out += key;
  for (Eigen::Index i = 0; i < count; ++i) {
    out += ' ';
    out += format_double(data[i]);
  }
  out += '\n';
}

}  // namespace

void save_mlp(const Mlp& mlp, const std::filesystem::path& path) {
  const Eigen::Index p = mlp.window();
  const Eigen::Index m = mlp.hidden_units();

  std::string text = std::string(kCheckpointMagic) + "\n";
  text += "window " + std::to_string(p) + "\n";
  text += "hidden " + std::to_string(m) + "\n";
  text += "init_seed " + std::to_string(mlp.init_seed) + "\n";

  // row-major weight order
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      hidden_rm = mlp.hidden_weights;
  append_values(text, "hidden_weights", hidden_rm.data(), hidden_rm.size());
  append_values(text, "hidden_bias", mlp.hidden_bias.data(), m);
  append_values(text, "output_weights", mlp.output_weights.data(), m);
  append_values(text, "output_bias", &mlp.output_bias, 1);
  write_text_atomic(path, text);
}

Mlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mlp: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic)
    throw std::invalid_argument("load_mlp: not an mlp checkpoint");

  auto read_keyed_line = [&](const std::string& key) {
    if (!std::getline(in, line))
      throw std::invalid_argument("load_mlp: truncated checkpoint");
    std::istringstream row(line);
    std::string seen;
    row >> seen;
    if (seen != key)
      throw std::invalid_argument("load_mlp: expected key '" + key + "', got '" +
                                  seen + "'");
    return row;
  };

  auto read_scalar = [&](const std::string& key, auto& value) {
    auto row = read_keyed_line(key);
    if (!(row >> value))
      throw std::invalid_argument("load_mlp: malformed value for " + key);
  };

  Eigen::Index p = 0, m = 0;
  Mlp mlp;
  read_scalar("window", p);
  read_scalar("hidden", m);
  read_scalar("init_seed", mlp.init_seed);
  if (p < 1 || m < 1)
    throw std::invalid_argument("load_mlp: invalid dimensions");

  auto read_array = [&](const std::string& key, double* data, Eigen::Index count) {
    auto row = read_keyed_line(key);
    for (Eigen::Index i = 0; i < count; ++i) {
      if (!(row >> data[i]) || !std::isfinite(data[i]))
        throw std::invalid_argument("load_mlp: malformed values for " + key);
    }
    double extra;
    if (row >> extra)
      throw std::invalid_argument("load_mlp: too many values for " + key);
  };

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      hidden_rm(m, p);
  read_array("hidden_weights", hidden_rm.data(), m * p);
  mlp.hidden_weights = hidden_rm;
  mlp.hidden_bias.resize(m);
  read_array("hidden_bias", mlp.hidden_bias.data(), m);
  mlp.output_weights.resize(m);
  read_array("output_weights", mlp.output_weights.data(), m);
  read_array("output_bias", &mlp.output_bias, 1);
  return mlp;
}

}  // namespace opdyn
