#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dg/matrix.hpp"

namespace dg {

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

// Feedforward network with one hidden layer: `input` linear inputs, `hidden`
// rectified-linear units (max(0, z)), and a single sigmoid output, so every
// prediction lies in (0, 1).
struct Network {
  std::size_t input = 0;
  std::size_t hidden = 0;
  Matrix w1;               // hidden x input
  std::vector<double> b1;  // hidden biases
  std::vector<double> w2;  // output weights, one per hidden unit
  double b2 = 0.0;         // output bias
};

// All parameters zero. Forward evaluation of any input gives sigmoid(0) = 0.5.
Network make_network(std::size_t input, std::size_t hidden = 20);

// Random initialization scaled to the fan-in of each layer: hidden weights
// are N(0, 2/input) (the rectifier-friendly scale), output weights
// N(0, 1/hidden), biases zero. Deterministic in (input, hidden, seed).
Network random_network(std::size_t input, std::size_t hidden, std::uint64_t seed);

// u_hidden = max(0, w1 x + b1); y = 1/(1 + exp(-(w2 . u_hidden + b2))).
// Throws dimension_mismatch when x does not have `input` entries.
double forward(const Network& net, const std::vector<double>& x);

// Per-pair error ||y - z||_2 (scalar outputs: |y - z|), and its mean over a
// set of (input, target) rows. The mean requires matching row counts.
double loss(double y, double z);
double cumulative_loss(const Network& net, const Matrix& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Gradients and training
// ---------------------------------------------------------------------------

// Training optimizes the smooth squared error (y - target)^2 per sample; the
// reported metric stays the l2 loss above.
double sample_objective(const Network& net, const std::vector<double>& x, double target);

// Gradient of the squared-error objective in every parameter, laid out like
// the Network fields. The rectifier uses subgradient 0 at the kink.
struct Gradients {
  Matrix w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};
Gradients backprop(const Network& net, const std::vector<double>& x, double target);

struct TrainConfig {
  std::size_t hidden = 20;
  std::size_t epochs = 1000;  // hard cap
  std::size_t batch = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;    // first-moment decay
  double beta2 = 0.999;  // second-moment decay
  double epsilon = 1e-8;
  // Stop after this many epochs without a strict validation improvement.
  std::size_t patience = 50;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::vector<double> train_losses;       // cumulative l2 loss per epoch
  std::vector<double> validation_losses;  // same, on the validation split
  double test_loss = 0.0;                 // best network on the test split
  std::uint64_t seed = 0;
  std::size_t epochs = 0;      // epochs actually run
  std::size_t best_epoch = 0;  // 1-based epoch of the best validation loss
};

struct TrainResult {
  Network net;  // parameters of the best validation epoch
  TrainReport report;
};

// Minibatch gradient descent with adaptive moment estimates on a seeded
// 35/35/30 train/validation/test split of the rows. The best-on-validation
// parameters are kept; training stops at the epoch cap or when validation
// stalls for `patience` epochs. Deterministic in (net, x, y, cfg): a fixed
// seed reproduces the report bitwise. Throws empty_training_set when fewer
// than three rows are given (each split needs one), dimension_mismatch on
// shape conflicts, and no_convergence if parameters leave the finite range.
TrainResult train(const Network& start, const Matrix& x, const std::vector<double>& y,
                  const TrainConfig& cfg);

// Same, starting from random_network(x.cols(), cfg.hidden, derived seed).
TrainResult train(const Matrix& x, const std::vector<double>& y, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Cross-evaluation and serialization
// ---------------------------------------------------------------------------

// One labeled input matrix (tag names how the vectors were built).
struct ExperimentInput {
  std::string tag;
  Matrix x;
};
// One labeled target vector: tag names the input family whose clustering
// produced it, truth names the clustering rule.
struct ExperimentOutput {
  std::string tag;
  std::string truth;
  std::vector<double> y;
};
struct ExperimentCell {
  std::string input_tag;
  std::string output_tag;
  std::string truth;
  bool diagonal = false;  // input and output built from the same family
  double test_loss = 0.0;
  std::size_t epochs = 0;
};

// Trains one network per (input, output) pairing and reports the test loss
// of each cell; the diagonal flag marks cells whose input and output tags
// coincide. All inputs must agree on the row count and every output must
// have one target per row.
std::vector<ExperimentCell> evaluate_experiment(const std::vector<ExperimentInput>& inputs,
                                                const std::vector<ExperimentOutput>& outputs,
                                                const TrainConfig& cfg);

// Header "input,output,truth,diagonal,test_loss,epochs", one line per cell.
std::string experiment_to_csv(const std::vector<ExperimentCell>& cells);

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);
std::string train_report_to_json(const TrainReport& report);

}  // namespace dg
