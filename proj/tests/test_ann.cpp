// One-hidden-layer networks: forward pass, gradients against central finite
// differences, seeded minibatch training, cross-evaluation tables, and JSON
// round trips, checked against hand-computed fixtures.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "dg/ann.hpp"
#include "dg/error.hpp"
#include "dg/matrix.hpp"
#include "dg/rng.hpp"

using namespace dg;

namespace {

// 20 interleaved points in two tight, well-separated blobs near (0.12, 0.12)
// and (0.87, 0.87), labeled 0 and 1.
void separable_toy(Matrix& x, std::vector<double>& y) {
  const double pts[20][2] = {
      {0.05, 0.10}, {0.80, 0.85}, {0.10, 0.20}, {0.85, 0.95}, {0.15, 0.05},
      {0.90, 0.80}, {0.20, 0.15}, {0.95, 0.90}, {0.10, 0.10}, {0.85, 0.85},
      {0.05, 0.20}, {0.80, 0.95}, {0.20, 0.05}, {0.95, 0.80}, {0.15, 0.20},
      {0.90, 0.95}, {0.08, 0.12}, {0.83, 0.87}, {0.18, 0.08}, {0.93, 0.83}};
  x = Matrix(20, 2);
  y.assign(20, 0.0);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = pts[i][0];
    x(i, 1) = pts[i][1];
    y[i] = static_cast<double>(i % 2);
  }
}

// Central finite difference of the squared-error objective in one parameter;
// `param` must point into `net` itself.
double fd_partial(Network& net, double* param, const std::vector<double>& x, double target) {
  const double h = 1e-5;
  const double saved = *param;
  *param = saved + h;
  const double up = sample_objective(net, x, target);
  *param = saved - h;
  const double down = sample_objective(net, x, target);
  *param = saved;
  return (up - down) / (2.0 * h);
}

void check_close_relative(double analytic, double fd) {
  if (std::fabs(fd) > 1e-6) {
    CHECK(std::fabs(analytic - fd) / std::fabs(fd) <= 1e-4);
  } else {
    CHECK(std::fabs(analytic - fd) <= 1e-8);
  }
}

// Compares every backprop entry against a central finite difference.
void check_gradients(const Network& net, const std::vector<double>& x, double target) {
  const Gradients g = backprop(net, x, target);
  Network probe = net;
  for (std::size_t j = 0; j < net.hidden; ++j) {
    for (std::size_t i = 0; i < net.input; ++i)
      check_close_relative(g.w1(j, i), fd_partial(probe, &probe.w1(j, i), x, target));
    check_close_relative(g.b1[j], fd_partial(probe, &probe.b1[j], x, target));
    check_close_relative(g.w2[j], fd_partial(probe, &probe.w2[j], x, target));
  }
  check_close_relative(g.b2, fd_partial(probe, &probe.b2, x, target));
}

// Smallest |pre-activation| over the hidden layer; the finite-difference
// probe needs every unit clearly on one side of the rectifier kink.
double min_abs_preactivation(const Network& net, const std::vector<double>& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < net.hidden; ++j) {
    double z = net.b1[j];
    for (std::size_t i = 0; i < net.input; ++i) z += net.w1(j, i) * x[i];
    best = std::min(best, std::fabs(z));
  }
  return best;
}

bool networks_identical(const Network& a, const Network& b) {
  if (a.input != b.input || a.hidden != b.hidden || a.b2 != b.b2) return false;
  if (a.b1 != b.b1 || a.w2 != b.w2) return false;
  for (std::size_t j = 0; j < a.hidden; ++j)
    for (std::size_t i = 0; i < a.input; ++i)
      if (a.w1(j, i) != b.w1(j, i)) return false;
  return true;
}

}  // namespace

TEST_CASE("zero network predicts one half exactly") {
  const Network net = make_network(3, 4);
  CHECK(forward(net, {0.0, 0.0, 0.0}) == 0.5);
  CHECK(forward(net, {1.0, -2.0, 10.0}) == 0.5);
  CHECK(forward(net, {-5.0, 0.25, 3.5}) == 0.5);

  CHECK_THROWS_AS(make_network(0, 4), Error);
  CHECK_THROWS_AS(make_network(3, 0), Error);
  try {
    forward(net, {1.0, 2.0});
    FAIL("expected dimension_mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == errc::dimension_mismatch);
  }
}

TEST_CASE("rectifier clamps negative pre-activations") {
  Network net = make_network(1, 1);
  net.w1(0, 0) = 1.0;
  net.w2[0] = 1.0;
  // x = -1: the single hidden unit clamps to zero, so the output is
  // sigmoid(0) = 0.5 regardless of the outgoing weight.
  CHECK(forward(net, {-1.0}) == 0.5);
  // x = +1 passes through: sigmoid(1).
  CHECK(std::fabs(forward(net, {1.0}) - 0.7310585786300049) <= 1e-15);
}

TEST_CASE("hand-computed two-two-one forward pass") {
  Network net = make_network(2, 2);
  net.w1(0, 0) = 0.5;
  net.w1(0, 1) = -0.25;
  net.w1(1, 0) = 1.0;
  net.w1(1, 1) = 0.75;
  net.b1 = {0.1, -0.2};
  net.w2 = {0.3, -0.4};
  net.b2 = 0.05;

  // Hidden pre-activations 0.2 and 1.0, both positive, output pre-activation
  // 0.3*0.2 - 0.4*1.0 + 0.05 = -0.29.
  CHECK(std::fabs(forward(net, {0.6, 0.8}) - 0.42800386706848137) <= 1e-12);
  // Flipping the first input makes both hidden pre-activations negative
  // (-0.4 and -0.2), so only the output bias survives: sigmoid(0.05).
  CHECK(std::fabs(forward(net, {-0.6, 0.8}) - 0.5124973964842103) <= 1e-12);
}

TEST_CASE("pair loss and cumulative loss") {
  CHECK(loss(0.7, 0.7) == 0.0);
  CHECK(loss(0.3, 0.8) == 0.5);
  CHECK(loss(0.8, 0.3) == 0.5);

  const Network net = make_network(2, 3);
  Matrix x(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = -1.0;
  // Zero network predicts 0.5 for both rows; targets 0 and 1 each miss by 0.5.
  CHECK(cumulative_loss(net, x, {0.0, 1.0}) == 0.5);
  CHECK(cumulative_loss(net, x, {0.5, 0.5}) == 0.0);
  CHECK(cumulative_loss(net, Matrix(0, 2), {}) == 0.0);

  try {
    cumulative_loss(net, x, {0.0});
    FAIL("expected dimension_mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == errc::dimension_mismatch);
  }
  CHECK_THROWS_AS(cumulative_loss(net, Matrix(2, 5), {0.0, 1.0}), Error);
}

TEST_CASE("gradient fixture on the five-parameter network") {
  // 2-1-1 network: five parameters in total.
  Network net = make_network(2, 1);
  net.w1(0, 0) = 1.0;
  net.w1(0, 1) = -0.5;
  net.b1 = {0.25};
  net.w2 = {0.8};
  net.b2 = -0.1;
  const std::vector<double> x = {0.5, -0.4};
  const double target = 0.3;

  // Hidden pre-activation 0.95, output pre-activation 0.66,
  // y = sigmoid(0.66) = 0.6592603884513855, objective (y - 0.3)^2.
  CHECK(std::fabs(forward(net, x) - 0.6592603884513855) <= 1e-12);
  CHECK(std::fabs(sample_objective(net, x, target) - 0.1290680267102404) <= 1e-12);

  const Gradients g = backprop(net, x, target);
  CHECK(std::fabs(g.w1(0, 0) - 0.06456229027704989) <= 1e-12);
  CHECK(std::fabs(g.w1(0, 1) - (-0.051649832221639914)) <= 1e-12);
  CHECK(std::fabs(g.b1[0] - 0.12912458055409978) <= 1e-12);
  CHECK(std::fabs(g.w2[0] - 0.15333543940799346) <= 1e-12);
  CHECK(std::fabs(g.b2 - 0.1614057256926247) <= 1e-12);

  check_gradients(net, x, target);
}

TEST_CASE("backprop of the zero network") {
  const Network net = make_network(2, 3);
  // y = 0.5 exactly, hidden activations all zero, so only the output bias
  // receives gradient: 2*(0.5 - 0)*0.5*(1 - 0.5) = 0.25.
  const Gradients g = backprop(net, {1.0, -2.0}, 0.0);
  CHECK(g.b2 == 0.25);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(g.w2[j] == 0.0);
    CHECK(g.b1[j] == 0.0);
    CHECK(g.w1(j, 0) == 0.0);
    CHECK(g.w1(j, 1) == 0.0);
  }
  CHECK_THROWS_AS(backprop(net, {1.0}, 0.0), Error);
}

TEST_CASE("backprop matches central finite differences across architectures") {
  const std::size_t shapes[][2] = {{1, 1}, {2, 1}, {2, 2}, {3, 2}, {5, 4}, {4, 8}};
  for (const auto& shape : shapes) {
    const std::size_t input = shape[0];
    const std::size_t hidden = shape[1];
    // Scan seeds for a fixture whose hidden units all sit clearly away from
    // the rectifier kink, so the finite-difference probe stays one-sided.
    bool found = false;
    for (std::uint64_t seed = 1; seed <= 40 && !found; ++seed) {
      const Network net = random_network(input, hidden, seed);
      Rng rng(seed + 1000);
      std::vector<double> x(input);
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      if (min_abs_preactivation(net, x) < 5e-2) continue;
      found = true;
      check_gradients(net, x, 0.25);
      check_gradients(net, x, 0.9);
    }
    CHECK(found);
  }
}

TEST_CASE("training separates a well-separated toy") {
  Matrix x;
  std::vector<double> y;
  separable_toy(x, y);

  // Batch 32 degenerates to full-batch descent on the 7-row training split,
  // which moves too slowly for a 500-epoch budget; a small minibatch and a
  // larger step fit the toy with a wide margin (tuned knobs, default split).
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.batch = 4;
  cfg.learning_rate = 1e-2;
  cfg.seed = 1;
  const TrainResult result = train(x, y, cfg);

  CHECK(result.report.test_loss <= 0.1);
  CHECK(result.report.epochs >= 1);
  CHECK(result.report.epochs <= 500);
  CHECK(result.report.best_epoch >= 1);
  CHECK(result.report.best_epoch <= result.report.epochs);
  CHECK(result.report.train_losses.size() == result.report.epochs);
  CHECK(result.report.validation_losses.size() == result.report.epochs);
  for (const double v : result.report.train_losses) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  for (const double v : result.report.validation_losses) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  // Sigmoid output stays strictly inside (0, 1) on every row.
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double p = forward(result.net, {x(r, 0), x(r, 1)});
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("constant target is matched closely") {
  Rng rng(11);
  Matrix x(40, 3);
  for (std::size_t r = 0; r < 40; ++r)
    for (std::size_t c = 0; c < 3; ++c) x(r, c) = rng.uniform(-1.0, 1.0);
  const std::vector<double> y(40, 0.5);

  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.batch = 4;
  cfg.learning_rate = 1e-2;
  cfg.seed = 1;
  const TrainResult result = train(x, y, cfg);
  CHECK(result.report.test_loss <= 0.02);
  CHECK(cumulative_loss(result.net, x, y) <= 0.02);

  // The all-zero network already solves this problem (bias-only solution:
  // sigmoid(0) = 0.5) and every gradient vanishes there, so training from it
  // is exactly stationary.
  TrainConfig stay;
  stay.epochs = 50;
  stay.seed = 3;
  const TrainResult fixed = train(make_network(3, 20), x, y, stay);
  CHECK(fixed.report.test_loss == 0.0);
  for (std::size_t r = 0; r < 40; ++r)
    CHECK(forward(fixed.net, {x(r, 0), x(r, 1), x(r, 2)}) == 0.5);
}

TEST_CASE("fixed seed reproduces the training report bitwise") {
  Matrix x;
  std::vector<double> y;
  separable_toy(x, y);

  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 42;
  const TrainResult a = train(x, y, cfg);
  const TrainResult b = train(x, y, cfg);

  CHECK(a.report.epochs == b.report.epochs);
  CHECK(a.report.best_epoch == b.report.best_epoch);
  CHECK(a.report.seed == 42);
  CHECK(a.report.test_loss == b.report.test_loss);
  REQUIRE(a.report.train_losses.size() == b.report.train_losses.size());
  for (std::size_t i = 0; i < a.report.train_losses.size(); ++i) {
    CHECK(a.report.train_losses[i] == b.report.train_losses[i]);
    CHECK(a.report.validation_losses[i] == b.report.validation_losses[i]);
  }
  CHECK(networks_identical(a.net, b.net));

  TrainConfig other = cfg;
  other.seed = 43;
  const TrainResult c = train(x, y, other);
  CHECK(a.report.train_losses.front() != c.report.train_losses.front());
}

TEST_CASE("training rejects bad shapes and tiny sets") {
  Matrix x(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  TrainConfig cfg;
  try {
    train(x, {0.0, 1.0}, cfg);
    FAIL("expected empty_training_set");
  } catch (const Error& err) {
    CHECK(err.code() == errc::empty_training_set);
  }

  Matrix big(5, 2);
  try {
    train(big, {0.0, 1.0, 0.0}, cfg);
    FAIL("expected dimension_mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == errc::dimension_mismatch);
  }

  const Network wrong = make_network(3, 2);
  std::vector<double> y5(5, 0.5);
  try {
    train(wrong, big, y5, cfg);
    FAIL("expected dimension_mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == errc::dimension_mismatch);
  }

  TrainConfig zero_batch;
  zero_batch.batch = 0;
  try {
    train(make_network(2, 2), big, y5, zero_batch);
    FAIL("expected bad_value");
  } catch (const Error& err) {
    CHECK(err.code() == errc::bad_value);
  }
  TrainConfig zero_epochs;
  zero_epochs.epochs = 0;
  CHECK_THROWS_AS(train(make_network(2, 2), big, y5, zero_epochs), Error);
}

TEST_CASE("cross evaluation covers every pairing") {
  Matrix xa;
  std::vector<double> y;
  separable_toy(xa, y);
  // A second input family over the same rows: the coordinates, negated.
  Matrix xb(xa.rows(), xa.cols());
  for (std::size_t r = 0; r < xa.rows(); ++r)
    for (std::size_t c = 0; c < xa.cols(); ++c) xb(r, c) = -xa(r, c);

  const std::vector<ExperimentInput> inputs = {{"blob", xa}, {"mirror", xb}};
  const std::vector<ExperimentOutput> outputs = {{"blob", "pairing", y},
                                                 {"mirror", "pairing", y}};
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.seed = 3;
  const std::vector<ExperimentCell> cells = evaluate_experiment(inputs, outputs, cfg);

  REQUIRE(cells.size() == 4);
  CHECK(cells[0].input_tag == "blob");
  CHECK(cells[0].output_tag == "blob");
  CHECK(cells[0].diagonal);
  CHECK(cells[1].input_tag == "blob");
  CHECK(cells[1].output_tag == "mirror");
  CHECK_FALSE(cells[1].diagonal);
  CHECK(cells[2].input_tag == "mirror");
  CHECK(cells[2].output_tag == "blob");
  CHECK_FALSE(cells[2].diagonal);
  CHECK(cells[3].diagonal);
  for (const ExperimentCell& cell : cells) {
    CHECK(std::isfinite(cell.test_loss));
    CHECK(cell.test_loss >= 0.0);
    CHECK(cell.epochs >= 1);
    CHECK(cell.truth == "pairing");
  }

  try {
    evaluate_experiment({}, outputs, cfg);
    FAIL("expected empty_input");
  } catch (const Error& err) {
    CHECK(err.code() == errc::empty_input);
  }
  Matrix short_x(5, 2);
  try {
    evaluate_experiment({{"short", short_x}}, outputs, cfg);
    FAIL("expected dimension_mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == errc::dimension_mismatch);
  }
}

TEST_CASE("experiment table serializes to csv") {
  std::vector<ExperimentCell> cells(2);
  cells[0] = {"inc", "inc", "kmeans", true, 0.25, 17};
  cells[1] = {"inc", "qrt", "graph", false, 0.5, 300};
  CHECK(experiment_to_csv(cells) ==
        "input,output,truth,diagonal,test_loss,epochs\n"
        "inc,inc,kmeans,1,0.25,17\n"
        "inc,qrt,graph,0,0.5,300\n");
  CHECK(experiment_to_csv({}) == "input,output,truth,diagonal,test_loss,epochs\n");
}

TEST_CASE("network json round trip is bitwise") {
  const Network net = random_network(3, 4, 7);
  const std::string text = network_to_json(net);
  const Network back = network_from_json(text);
  CHECK(networks_identical(net, back));

  try {
    network_from_json("not json");
    FAIL("expected io_error");
  } catch (const Error& err) {
    CHECK(err.code() == errc::io_error);
  }
  try {
    network_from_json("{\"input\": 2}");
    FAIL("expected io_error");
  } catch (const Error& err) {
    CHECK(err.code() == errc::io_error);
  }
  // Tamper with the first-layer shape: one row too few.
  nlohmann::json j = nlohmann::json::parse(text);
  j["w1"].erase(0);
  try {
    network_from_json(j.dump());
    FAIL("expected dimension_mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == errc::dimension_mismatch);
  }
}

TEST_CASE("train report json has the expected keys") {
  Matrix x;
  std::vector<double> y;
  separable_toy(x, y);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 9;
  const TrainResult result = train(x, y, cfg);
  const nlohmann::json j = nlohmann::json::parse(train_report_to_json(result.report));
  CHECK(j.at("seed").get<std::uint64_t>() == 9);
  CHECK(j.at("epochs").get<std::size_t>() == result.report.epochs);
  CHECK(j.at("best_epoch").get<std::size_t>() == result.report.best_epoch);
  CHECK(j.at("test_loss").get<double>() == result.report.test_loss);
  CHECK(j.at("train_losses").get<std::vector<double>>() == result.report.train_losses);
  CHECK(j.at("validation_losses").get<std::vector<double>>() ==
        result.report.validation_losses);
}

TEST_CASE("random initialization is seed-deterministic") {
  const Network a = random_network(4, 6, 21);
  const Network b = random_network(4, 6, 21);
  const Network c = random_network(4, 6, 22);
  CHECK(networks_identical(a, b));
  CHECK_FALSE(networks_identical(a, c));
  for (const double v : a.b1) CHECK(v == 0.0);
  CHECK(a.b2 == 0.0);
}
