#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dg/ann.hpp"
#include "dg/error.hpp"
#include "dg/io.hpp"
#include "dg/rng.hpp"

namespace dg {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_network(const Network& net, const char* op) {
  require(net.input >= 1 && net.hidden >= 1, errc::bad_value, op,
          "network widths must be at least 1");
  require(net.w1.rows() == net.hidden && net.w1.cols() == net.input &&
              net.b1.size() == net.hidden && net.w2.size() == net.hidden,
          errc::dimension_mismatch, op, "network parameter shapes disagree with its widths");
}

// Forward pass keeping the hidden activations for reuse by the backward pass.
struct ForwardTrace {
  std::vector<double> hidden;  // post-rectifier activations
  double output = 0.0;
};

ForwardTrace forward_trace(const Network& net, const double* x) {
  ForwardTrace t;
  t.hidden.resize(net.hidden);
  for (std::size_t j = 0; j < net.hidden; ++j) {
    double z = net.b1[j];
    for (std::size_t i = 0; i < net.input; ++i) z += net.w1(j, i) * x[i];
    t.hidden[j] = z > 0.0 ? z : 0.0;
  }
  double z2 = net.b2;
  for (std::size_t j = 0; j < net.hidden; ++j) z2 += net.w2[j] * t.hidden[j];
  t.output = sigmoid(z2);
  return t;
}

Gradients zero_gradients(const Network& net) {
  Gradients g;
  g.w1 = Matrix(net.hidden, net.input);
  g.b1.assign(net.hidden, 0.0);
  g.w2.assign(net.hidden, 0.0);
  g.b2 = 0.0;
  return g;
}

// Adds the squared-error gradient of one sample into `g`.
void accumulate_gradient(const Network& net, const double* x, double target, Gradients& g) {
  const ForwardTrace t = forward_trace(net, x);
  const double y = t.output;
  // d/dz2 of (y - target)^2 with y = sigmoid(z2).
  const double dz2 = 2.0 * (y - target) * y * (1.0 - y);
  g.b2 += dz2;
  for (std::size_t j = 0; j < net.hidden; ++j) {
    g.w2[j] += dz2 * t.hidden[j];
    if (t.hidden[j] <= 0.0) continue;  // rectifier gate closed
    const double dz1 = dz2 * net.w2[j];
    g.b1[j] += dz1;
    for (std::size_t i = 0; i < net.input; ++i) g.w1(j, i) += dz1 * x[i];
  }
}

bool all_finite(const Network& net) {
  for (const double v : net.w1.values())
    if (!std::isfinite(v)) return false;
  for (const double v : net.b1)
    if (!std::isfinite(v)) return false;
  for (const double v : net.w2)
    if (!std::isfinite(v)) return false;
  return std::isfinite(net.b2);
}

void fisher_yates(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

Network make_network(std::size_t input, std::size_t hidden) {
  const char* op = "make_network";
  require(input >= 1 && hidden >= 1, errc::bad_value, op, "widths must be at least 1");
  Network net;
  net.input = input;
  net.hidden = hidden;
  net.w1 = Matrix(hidden, input);
  net.b1.assign(hidden, 0.0);
  net.w2.assign(hidden, 0.0);
  net.b2 = 0.0;
  return net;
}

Network random_network(std::size_t input, std::size_t hidden, std::uint64_t seed) {
  Network net = make_network(input, hidden);
  Rng rng(seed);
  const double s1 = std::sqrt(2.0 / static_cast<double>(input));
  for (std::size_t j = 0; j < hidden; ++j)
    for (std::size_t i = 0; i < input; ++i) net.w1(j, i) = s1 * rng.normal();
  const double s2 = std::sqrt(1.0 / static_cast<double>(hidden));
  for (std::size_t j = 0; j < hidden; ++j) net.w2[j] = s2 * rng.normal();
  return net;
}

double forward(const Network& net, const std::vector<double>& x) {
  const char* op = "forward";
  check_network(net, op);
  require(x.size() == net.input, errc::dimension_mismatch, op,
          "input has " + std::to_string(x.size()) + " entries, network expects " +
              std::to_string(net.input));
  return forward_trace(net, x.data()).output;
}

double loss(double y, double z) { return std::fabs(y - z); }

double cumulative_loss(const Network& net, const Matrix& x, const std::vector<double>& y) {
  const char* op = "cumulative_loss";
  check_network(net, op);
  require(x.rows() == y.size(), errc::dimension_mismatch, op,
          "row count and target count disagree");
  require(x.cols() == net.input, errc::dimension_mismatch, op,
          "column count disagrees with the network input width");
  if (x.rows() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r)
    sum += loss(forward_trace(net, x.data() + r * x.cols()).output, y[r]);
  return sum / static_cast<double>(x.rows());
}

double sample_objective(const Network& net, const std::vector<double>& x, double target) {
  const double y = forward(net, x);
  return (y - target) * (y - target);
}

Gradients backprop(const Network& net, const std::vector<double>& x, double target) {
  const char* op = "backprop";
  check_network(net, op);
  require(x.size() == net.input, errc::dimension_mismatch, op,
          "input size disagrees with the network");
  Gradients g = zero_gradients(net);
  accumulate_gradient(net, x.data(), target, g);
  return g;
}

namespace {

struct AdamState {
  Gradients m;
  Gradients v;
  std::size_t t = 0;
};

void adam_step(double& p, double& m, double& v, double g, const TrainConfig& cfg,
               double bias1, double bias2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
  p -= cfg.learning_rate * (m / bias1) / (std::sqrt(v / bias2) + cfg.epsilon);
}

void adam_update(Network& net, const Gradients& g, AdamState& st, const TrainConfig& cfg) {
  ++st.t;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  for (std::size_t j = 0; j < net.hidden; ++j) {
    for (std::size_t i = 0; i < net.input; ++i)
      adam_step(net.w1(j, i), st.m.w1(j, i), st.v.w1(j, i), g.w1(j, i), cfg, bias1, bias2);
    adam_step(net.b1[j], st.m.b1[j], st.v.b1[j], g.b1[j], cfg, bias1, bias2);
    adam_step(net.w2[j], st.m.w2[j], st.v.w2[j], g.w2[j], cfg, bias1, bias2);
  }
  adam_step(net.b2, st.m.b2, st.v.b2, g.b2, cfg, bias1, bias2);
}

double split_loss(const Network& net, const Matrix& x, const std::vector<double>& y,
                  const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const std::size_t r : rows)
    sum += loss(forward_trace(net, x.data() + r * x.cols()).output, y[r]);
  return sum / static_cast<double>(rows.size());
}

}  // namespace

TrainResult train(const Network& start, const Matrix& x, const std::vector<double>& y,
                  const TrainConfig& cfg) {
  const char* op = "train";
  check_network(start, op);
  require(x.rows() == y.size(), errc::dimension_mismatch, op,
          "row count and target count disagree");
  require(x.cols() == start.input, errc::dimension_mismatch, op,
          "column count disagrees with the network input width");
  require(x.rows() >= 3, errc::empty_training_set, op,
          "need at least three rows to give every split one");
  require(cfg.batch >= 1 && cfg.epochs >= 1, errc::bad_value, op,
          "batch size and epoch cap must be at least 1");

  const std::size_t s = x.rows();
  std::vector<std::size_t> order(s);
  for (std::size_t i = 0; i < s; ++i) order[i] = i;
  Rng shuffle_rng = Rng(cfg.seed).split(0);
  fisher_yates(order, shuffle_rng);

  const std::size_t n_train = std::max<std::size_t>(1, s * 35 / 100);
  const std::size_t n_val = n_train;
  const std::vector<std::size_t> train_rows(order.begin(),
                                            order.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<std::size_t> val_rows(
      order.begin() + static_cast<std::ptrdiff_t>(n_train),
      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  const std::vector<std::size_t> test_rows(
      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());

  Network net = start;
  AdamState st;
  st.m = zero_gradients(net);
  st.v = zero_gradients(net);

  TrainResult out;
  out.report.seed = cfg.seed;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  const std::size_t patience = std::max<std::size_t>(1, cfg.patience);
  std::vector<std::size_t> epoch_order = train_rows;
  const Rng epoch_master = Rng(cfg.seed).split(1);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng epoch_rng = epoch_master.split(epoch);
    fisher_yates(epoch_order, epoch_rng);

    for (std::size_t begin = 0; begin < epoch_order.size(); begin += cfg.batch) {
      const std::size_t end = std::min(begin + cfg.batch, epoch_order.size());
      Gradients g = zero_gradients(net);
      for (std::size_t k = begin; k < end; ++k)
        accumulate_gradient(net, x.data() + epoch_order[k] * x.cols(), y[epoch_order[k]], g);
      const double scale = 1.0 / static_cast<double>(end - begin);
      double* w1 = g.w1.data();
      for (std::size_t i = 0; i < g.w1.rows() * g.w1.cols(); ++i) w1[i] *= scale;
      for (double& v : g.b1) v *= scale;
      for (double& v : g.w2) v *= scale;
      g.b2 *= scale;
      adam_update(net, g, st, cfg);
    }

    require(all_finite(net), errc::no_convergence, op,
            "parameters became non-finite during epoch " + std::to_string(epoch));

    out.report.train_losses.push_back(split_loss(net, x, y, train_rows));
    const double val = split_loss(net, x, y, val_rows);
    out.report.validation_losses.push_back(val);
    out.report.epochs = epoch;

    if (val < best_val) {
      best_val = val;
      out.net = net;
      out.report.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= patience) {
      break;
    }
  }

  out.report.test_loss = split_loss(out.net, x, y, test_rows);
  return out;
}

TrainResult train(const Matrix& x, const std::vector<double>& y, const TrainConfig& cfg) {
  require(x.cols() >= 1, errc::dimension_mismatch, "train",
          "training rows need at least one feature");
  const Network start = random_network(x.cols(), cfg.hidden, Rng(cfg.seed).split(2).seed());
  return train(start, x, y, cfg);
}

std::vector<ExperimentCell> evaluate_experiment(const std::vector<ExperimentInput>& inputs,
                                                const std::vector<ExperimentOutput>& outputs,
                                                const TrainConfig& cfg) {
  const char* op = "evaluate_experiment";
  require(!inputs.empty() && !outputs.empty(), errc::empty_input, op,
          "need at least one input family and one output family");
  const std::size_t rows = inputs.front().x.rows();
  for (const ExperimentInput& in : inputs)
    require(in.x.rows() == rows, errc::dimension_mismatch, op,
            "input family '" + in.tag + "' disagrees on the row count");
  for (const ExperimentOutput& outp : outputs)
    require(outp.y.size() == rows, errc::dimension_mismatch, op,
            "output family '" + outp.tag + "' disagrees on the row count");

  std::vector<ExperimentCell> cells;
  cells.reserve(inputs.size() * outputs.size());
  for (const ExperimentInput& in : inputs)
    for (const ExperimentOutput& outp : outputs) {
      const TrainResult tr = train(in.x, outp.y, cfg);
      ExperimentCell cell;
      cell.input_tag = in.tag;
      cell.output_tag = outp.tag;
      cell.truth = outp.truth;
      cell.diagonal = in.tag == outp.tag;
      cell.test_loss = tr.report.test_loss;
      cell.epochs = tr.report.epochs;
      cells.push_back(std::move(cell));
    }
  return cells;
}

std::string experiment_to_csv(const std::vector<ExperimentCell>& cells) {
  std::string out = "input,output,truth,diagonal,test_loss,epochs\n";
  for (const ExperimentCell& c : cells) {
    out += c.input_tag;
    out += ',';
    out += c.output_tag;
    out += ',';
    out += c.truth;
    out += ',';
    out += c.diagonal ? '1' : '0';
    out += ',';
    out += format_double(c.test_loss);
    out += ',';
    out += std::to_string(c.epochs);
    out += '\n';
  }
  return out;
}

std::string network_to_json(const Network& net) {
  nlohmann::json j;
  j["input"] = net.input;
  j["hidden"] = net.hidden;
  std::vector<std::vector<double>> w1(net.hidden, std::vector<double>(net.input));
  for (std::size_t r = 0; r < net.hidden; ++r)
    for (std::size_t c = 0; c < net.input; ++c) w1[r][c] = net.w1(r, c);
  j["w1"] = w1;
  j["b1"] = net.b1;
  j["w2"] = net.w2;
  j["b2"] = net.b2;
  return j.dump(2) + "\n";
}

Network network_from_json(const std::string& text) {
  const char* op = "network_from_json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::io_error, op, std::string("cannot parse network: ") + e.what());
  }
  try {
    Network net = make_network(j.at("input").get<std::size_t>(),
                               j.at("hidden").get<std::size_t>());
    const auto& w1 = j.at("w1");
    require(w1.size() == net.hidden, errc::dimension_mismatch, op, "w1 row count disagrees");
    for (std::size_t r = 0; r < net.hidden; ++r) {
      require(w1.at(r).size() == net.input, errc::dimension_mismatch, op,
              "w1 column count disagrees");
      for (std::size_t c = 0; c < net.input; ++c) net.w1(r, c) = w1.at(r).at(c).get<double>();
    }
    net.b1 = j.at("b1").get<std::vector<double>>();
    net.w2 = j.at("w2").get<std::vector<double>>();
    net.b2 = j.at("b2").get<double>();
    require(net.b1.size() == net.hidden && net.w2.size() == net.hidden,
            errc::dimension_mismatch, op, "bias or output weight count disagrees");
    return net;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::io_error, op, std::string("network fields missing or mistyped: ") + e.what());
  }
}

std::string train_report_to_json(const TrainReport& report) {
  nlohmann::json j;
  j["best_epoch"] = report.best_epoch;
  j["epochs"] = report.epochs;
  j["seed"] = report.seed;
  j["test_loss"] = report.test_loss;
  j["train_losses"] = report.train_losses;
  j["validation_losses"] = report.validation_losses;
  return j.dump(2) + "\n";
}

}  // namespace dg
