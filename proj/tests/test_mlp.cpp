#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "opdyn/mlp.hpp"
#include "oracles.hpp"

using namespace opdyn;

namespace {

Mlp random_mlp(Eigen::Index p, Eigen::Index m, std::uint64_t seed) {
  return init_mlp(p, m, seed);
}

// Realizes forward(x) = x(p-1) exactly.
Mlp pick_last_mlp(Eigen::Index p) {
  Mlp mlp;
  mlp.hidden_weights = Eigen::MatrixXd::Zero(2, p);
  mlp.hidden_weights(0, p - 1) = 1.0;
  mlp.hidden_bias = Eigen::VectorXd::Zero(2);
  mlp.output_weights = Eigen::RowVectorXd::Zero(2);
  mlp.output_weights(0) = 1.0;
  mlp.output_bias = 0.0;
  return mlp;
}

Eigen::VectorXd flatten(const MlpGradient& g) {
  Eigen::VectorXd out(g.hidden_weights.size() + g.hidden_bias.size() +
                      g.output_weights.size() + 1);
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < g.hidden_weights.rows(); ++r)
    for (Eigen::Index c = 0; c < g.hidden_weights.cols(); ++c)
      out(at++) = g.hidden_weights(r, c);
  for (Eigen::Index i = 0; i < g.hidden_bias.size(); ++i) out(at++) = g.hidden_bias(i);
  for (Eigen::Index i = 0; i < g.output_weights.size(); ++i)
    out(at++) = g.output_weights(i);
  out(at) = g.output_bias;
  return out;
}

double batch_cost(const Mlp& mlp, const WindowSet& data) {
  double total = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    total += std::abs(forward(mlp, data.inputs.row(i).transpose()) - data.labels(i));
  return total / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("build_windows enumerates contiguous slices") {
  TimeSeries series = uniform_series(1.0, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  WindowSet set = build_windows(series, 4);
  REQUIRE(set.size() == 2);
  CHECK(set.inputs.row(0).transpose().isApprox(Eigen::Vector4d(0.1, 0.2, 0.3, 0.4)));
  CHECK(set.labels(0) == 0.5);
  CHECK(set.inputs.row(1).transpose().isApprox(Eigen::Vector4d(0.2, 0.3, 0.4, 0.5)));
  CHECK(set.labels(1) == 0.6);
  CHECK(set.source_delta == 1.0);
}

TEST_CASE("constant series yields identical pairs") {
  TimeSeries series = uniform_series(0.5, std::vector<double>(10, 0.7));
  WindowSet set = build_windows(series, 4);
  REQUIRE(set.size() == 6);
  for (Eigen::Index i = 0; i < 6; ++i) {
    CHECK(set.labels(i) == 0.7);
    CHECK((set.inputs.row(i).array() == 0.7).all());
  }
}

TEST_CASE("pair count and limit on a long series") {
  std::vector<double> values(501);
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = std::sin(0.01 * static_cast<double>(i));
  TimeSeries series = uniform_series(0.05, values);
  CHECK(build_windows(series, 4).size() == 497);
  WindowSet limited = build_windows(series, 4, 110);
  REQUIRE(limited.size() == 110);
  // the kept pairs are the first ones, still exact slices of the source
  for (Eigen::Index i = 0; i < limited.size(); ++i) {
    for (Eigen::Index k = 0; k < 4; ++k)
      CHECK(limited.inputs(i, k) == values[i + k]);
    CHECK(limited.labels(i) == values[i + 4]);
  }
}

TEST_CASE("window construction rejects short series") {
  TimeSeries series = uniform_series(1.0, {1.0, 2.0, 3.0, 4.0});
  CHECK_THROWS_AS(build_windows(series, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_windows(series, 0), std::invalid_argument);
}

TEST_CASE("initialization is seed-deterministic and bounded") {
  Mlp a = init_mlp(4, 32, 7);
  Mlp b = init_mlp(4, 32, 7);
  CHECK(a.hidden_weights == b.hidden_weights);
  CHECK(a.output_weights == b.output_weights);
  Mlp c = init_mlp(4, 32, 8);
  CHECK(a.hidden_weights != c.hidden_weights);

  CHECK(a.hidden_weights.cwiseAbs().maxCoeff() <= 0.5);          // 1/sqrt(4)
  CHECK(a.output_weights.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(32.0));
  CHECK(a.hidden_bias.cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.output_bias == 0.0);
  CHECK(forward(a, Eigen::Vector4d::Zero()) == 0.0);
}

TEST_CASE("forward of the pick-last construction") {
  Mlp mlp = pick_last_mlp(4);
  CHECK(forward(mlp, Eigen::Vector4d(1, 2, 3, 4)) == 4.0);
  CHECK_THROWS_AS(forward(mlp, Eigen::Vector3d(1, 2, 3)), std::invalid_argument);
}

TEST_CASE("affine collapse reproduces forward exactly") {
  Mlp zero = pick_last_mlp(3);
  zero.hidden_weights.setZero();
  zero.output_weights.setZero();
  AffineMap zmap = collapse_to_affine(zero);
  CHECK(zmap.coefficients.isZero(0.0));
  CHECK(zmap.intercept == 0.0);

  AffineMap pick = collapse_to_affine(pick_last_mlp(4));
  CHECK(pick.coefficients.isApprox(Eigen::Vector4d(0, 0, 0, 1)));

  auto gen = oracles::rng(61);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Mlp mlp = random_mlp(4, 32, 99);
  mlp.hidden_bias.setRandom();
  mlp.output_bias = 0.37;
  AffineMap map = collapse_to_affine(mlp);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::Vector4d x(dist(gen), dist(gen), dist(gen), dist(gen));
    worst = std::max(worst, std::abs(forward(mlp, x) -
                                     (map.coefficients.dot(x) + map.intercept)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("training stops immediately on already-fit data") {
  Mlp mlp = pick_last_mlp(4);
  TimeSeries series = uniform_series(1.0, {1, 2, 3, 4, 4, 4, 4, 4});
  WindowSet set = build_windows(series, 4);
  // pick-last reproduces every label of this series exactly
  TrainReport report = train_sgd(mlp, set, 1e-3, 100, 1e-3, 5);
  CHECK(report.epochs_run == 1);
  CHECK(report.final_train_mae == 0.0);
  CHECK(report.cost_history.size() == 1);
}

TEST_CASE("training recovers an affine recurrence against the ls oracle") {
  Eigen::VectorXd coeffs(2);
  coeffs << 0.3, 0.5;  // x_{t+1} = 0.5 x_t + 0.3 x_{t-1} + 0.1
  std::vector<double> values =
      oracles::affine_recurrence_series({0.0, 1.0}, coeffs, 0.1, 28);
  WindowSet set = build_windows(uniform_series(1.0, values), 2);

  Mlp mlp = init_mlp(2, 8, 11);
  train_sgd(mlp, set, 1e-4, 50000, 2e-4, 12);
  AffineMap map = collapse_to_affine(mlp);

  auto [ls_coeffs, ls_intercept] =
      oracles::least_squares_affine(set.inputs, set.labels);
  CHECK(std::abs(ls_coeffs(0) - 0.3) <= 1e-9);  // noiseless data: LS is exact
  CHECK(std::abs(ls_coeffs(1) - 0.5) <= 1e-9);
  CHECK(std::abs(ls_intercept - 0.1) <= 1e-9);

  CHECK(std::abs(map.coefficients(0) - ls_coeffs(0)) <= 0.01);
  CHECK(std::abs(map.coefficients(1) - ls_coeffs(1)) <= 0.01);
  CHECK(std::abs(map.intercept - ls_intercept) <= 0.01);
  CHECK(std::abs(map.coefficients(0) - 0.3) <= 0.01);
  CHECK(std::abs(map.coefficients(1) - 0.5) <= 0.01);
  CHECK(std::abs(map.intercept - 0.1) <= 0.01);
}

TEST_CASE("training reaches the efficacy floor on noiseless recurrences") {
  Eigen::VectorXd coeffs(3);
  coeffs << 0.1, -0.2, 0.5;
  std::vector<double> values =
      oracles::affine_recurrence_series({0.5, -0.4, 0.8}, coeffs, 0.05, 40);
  WindowSet set = build_windows(uniform_series(1.0, values), 3);
  Mlp mlp = init_mlp(3, 8, 21);
  TrainReport report = train_sgd(mlp, set, 1e-4, kDefaultMaxEpochs, 1e-4, 22);
  CHECK(report.final_train_mae <= 1e-4);
  CHECK(report.epochs_run < kDefaultMaxEpochs);
}

TEST_CASE("subgradient matches central finite differences away from kinks") {
  auto gen = oracles::rng(67);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mlp mlp = init_mlp(3, 5, 31);
  WindowSet set;
  set.window = 3;
  set.inputs.resize(6, 3);
  set.labels.resize(6);
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) set.inputs(i, k) = dist(gen);
    // labels offset so no example sits near the |.| kink
    set.labels(i) = forward(mlp, set.inputs.row(i).transpose()) +
                    (i % 2 == 0 ? 0.5 : -0.5) * (1.0 + 0.1 * i);
  }

  MlpGradient batch;
  batch.hidden_weights = Eigen::MatrixXd::Zero(5, 3);
  batch.hidden_bias = Eigen::VectorXd::Zero(5);
  batch.output_weights = Eigen::RowVectorXd::Zero(5);
  batch.output_bias = 0.0;
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    MlpGradient g = loss_subgradient(mlp, set.inputs.row(i).transpose(), set.labels(i));
    batch.hidden_weights += g.hidden_weights;
    batch.hidden_bias += g.hidden_bias;
    batch.output_weights += g.output_weights;
    batch.output_bias += g.output_bias;
  }
  Eigen::VectorXd analytic = flatten(batch) / static_cast<double>(set.size());

  const double step = 1e-6;
  auto perturb = [&](Eigen::Index flat, double eps) {
    Mlp copy = mlp;
    const Eigen::Index wsize = copy.hidden_weights.size();
    const Eigen::Index m = copy.hidden_units();
    if (flat < wsize) {
      copy.hidden_weights(flat / 3, flat % 3) += eps;
    } else if (flat < wsize + m) {
      copy.hidden_bias(flat - wsize) += eps;
    } else if (flat < wsize + 2 * m) {
      copy.output_weights(flat - wsize - m) += eps;
    } else {
      copy.output_bias += eps;
    }
    return batch_cost(copy, set);
  };

  for (Eigen::Index flat = 0; flat < analytic.size(); ++flat) {
    const double fd = (perturb(flat, step) - perturb(flat, -step)) / (2 * step);
    const double rel =
        std::abs(analytic(flat) - fd) / std::max(std::abs(fd), 1e-6);
    CHECK(rel <= 1e-4);
  }
}

TEST_CASE("a single sgd update applies the learning-rate-scaled subgradient") {
  Mlp mlp = init_mlp(3, 4, 77);
  WindowSet set;
  set.window = 3;
  set.inputs = Eigen::MatrixXd::Random(1, 3);
  set.labels = Eigen::VectorXd::Constant(1, 0.9);
  MlpGradient g =
      loss_subgradient(mlp, set.inputs.row(0).transpose(), set.labels(0));
  Mlp trained = mlp;
  train_sgd(trained, set, 1e-3, 1, 0.0, 5);
  CHECK((trained.hidden_weights - (mlp.hidden_weights - 1e-3 * g.hidden_weights))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  CHECK((trained.output_weights - (mlp.output_weights - 1e-3 * g.output_weights))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  CHECK(trained.output_bias ==
        doctest::Approx(mlp.output_bias - 1e-3 * g.output_bias));
}

TEST_CASE("training is bit-deterministic in its seeds") {
  std::vector<double> values;
  for (int i = 0; i < 40; ++i) values.push_back(std::cos(0.2 * i));
  WindowSet set = build_windows(uniform_series(1.0, values), 4);

  Mlp a = init_mlp(4, 8, 5);
  Mlp b = init_mlp(4, 8, 5);
  TrainReport ra = train_sgd(a, set, 1e-3, 200, 0.0, 17);
  TrainReport rb = train_sgd(b, set, 1e-3, 200, 0.0, 17);
  CHECK(a.hidden_weights == b.hidden_weights);
  CHECK(a.hidden_bias == b.hidden_bias);
  CHECK(a.output_weights == b.output_weights);
  CHECK(a.output_bias == b.output_bias);
  CHECK(ra.epochs_run == rb.epochs_run);
  CHECK(ra.final_train_mae == rb.final_train_mae);
  CHECK(ra.cost_history == rb.cost_history);

  Mlp c = init_mlp(4, 8, 5);
  train_sgd(c, set, 1e-3, 200, 0.0, 18);  // different shuffle seed
  CHECK(a.hidden_weights != c.hidden_weights);
}

TEST_CASE("autoregressive rollout follows constructed recurrences") {
  Mlp pick = pick_last_mlp(4);
  std::vector<double> flat = predict_autoregressive(pick, Eigen::Vector4d(1, 2, 3, 4), 3);
  CHECK(flat == std::vector<double>{4.0, 4.0, 4.0});

  // x_{t+1} = x_t + 1
  Mlp inc = pick_last_mlp(4);
  inc.hidden_bias(0) = 1.0;
  std::vector<double> ramp = predict_autoregressive(inc, Eigen::Vector4d(1, 2, 3, 4), 3);
  CHECK(ramp == std::vector<double>{5.0, 6.0, 7.0});

  CHECK(predict_autoregressive(pick, Eigen::Vector4d(1, 2, 3, 4), 0).empty());
  CHECK_THROWS_AS(predict_autoregressive(pick, Eigen::Vector3d(1, 2, 3), 2),
                  std::invalid_argument);
}

TEST_CASE("rollout divergence reports the offending step") {
  Mlp doubler = pick_last_mlp(4);
  doubler.output_weights(0) = 2.0;  // x_{t+1} = 2 x_t
  bool threw = false;
  try {
    predict_autoregressive(doubler, Eigen::Vector4d(0, 0, 0, 1e300), 50);
  } catch (const RolloutDivergedError& e) {
    threw = true;
    CHECK(e.step >= 1);
    CHECK(e.step < 50);
  }
  CHECK(threw);
}

TEST_CASE("training divergence reports the epoch") {
  std::vector<double> values;
  for (int i = 0; i < 30; ++i) values.push_back(std::sin(0.3 * i));
  WindowSet set = build_windows(uniform_series(1.0, values), 4);
  Mlp mlp = init_mlp(4, 8, 3);
  bool threw = false;
  try {
    train_sgd(mlp, set, 1e60, 100, 0.0, 4);
  } catch (const TrainingDivergedError& e) {
    threw = true;
    CHECK(e.epoch >= 1);
  }
  CHECK(threw);
}

TEST_CASE("checkpoint round trip is bit exact") {
  std::vector<double> values;
  for (int i = 0; i < 60; ++i) values.push_back(std::cos(0.17 * i) * 0.8);
  WindowSet set = build_windows(uniform_series(0.05, values), 4);
  Mlp mlp = init_mlp(4, 16, 12345);
  train_sgd(mlp, set, 1e-3, 50, 0.0, 999);

  const auto dir = std::filesystem::temp_directory_path() / "opdyn_mlp_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "checkpoint.txt";
  save_mlp(mlp, path);
  Mlp loaded = load_mlp(path);

  CHECK(loaded.init_seed == mlp.init_seed);
  CHECK(loaded.hidden_weights == mlp.hidden_weights);
  CHECK(loaded.hidden_bias == mlp.hidden_bias);
  CHECK(loaded.output_weights == mlp.output_weights);
  CHECK(std::memcmp(&loaded.output_bias, &mlp.output_bias, sizeof(double)) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("checkpoint loader rejects malformed files") {
  const auto dir = std::filesystem::temp_directory_path() / "opdyn_mlp_bad";
  std::filesystem::create_directories(dir);
  const auto path = dir / "bad.txt";
  write_text_atomic(path, "not-a-checkpoint\n");
  CHECK_THROWS_AS(load_mlp(path), std::invalid_argument);
  write_text_atomic(path, "opdyn-mlp-v1\nwindow 4\n");
  CHECK_THROWS_AS(load_mlp(path), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("train_sgd argument validation") {
  WindowSet empty;
  empty.window = 4;
  empty.inputs.resize(0, 4);
  empty.labels.resize(0);
  Mlp mlp = init_mlp(4, 8, 1);
  CHECK_THROWS_AS(train_sgd(mlp, empty, 1e-3, 10, 1e-3, 1), std::invalid_argument);

  TimeSeries series = uniform_series(1.0, {1, 2, 3, 4, 5, 6});
  WindowSet wrong = build_windows(series, 3);
  CHECK_THROWS_AS(train_sgd(mlp, wrong, 1e-3, 10, 1e-3, 1), std::invalid_argument);
  WindowSet ok = build_windows(series, 4);
  CHECK_THROWS_AS(train_sgd(mlp, ok, 0.0, 10, 1e-3, 1), std::invalid_argument);
  CHECK_THROWS_AS(train_sgd(mlp, ok, 1e-3, 0, 1e-3, 1), std::invalid_argument);
}
