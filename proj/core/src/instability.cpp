#include "dg/instability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dg/error.hpp"
#include "dg/io.hpp"
#include "dg/rng.hpp"

namespace dg {

namespace {

// A trial that keeps hitting D_min == 0 after this many fresh substreams is
// reported as an error instead of looping forever.
constexpr std::size_t kMaxResamplesPerTrial = 1000;

double draw(Rng& rng, Distribution d) {
  switch (d) {
    case Distribution::uniform01: return rng.uniform01();
    case Distribution::standard_normal: return rng.normal();
    case Distribution::exponential1: return rng.exponential();
  }
  fail(errc::bad_value, "instability.draw", "unknown distribution");
}

double power_of_squared(double sq, double p) {
  if (p == 2.0) return sq;
  return std::pow(sq, 0.5 * p);
}

void check_config(const InstabilityConfig& cfg, const char* op) {
  require(cfg.ell >= 2, errc::bad_value, op, "need at least two reference points");
  require(cfg.trials >= 1, errc::bad_value, op, "need at least one trial");
  require(cfg.p > 0.0, errc::bad_value, op, "distance exponent must be positive");
}

// One contrast sample at dimension n, or a negative value when D_min == 0.
double trial_epsilon(Rng rng, std::size_t n, const InstabilityConfig& cfg) {
  std::vector<double> z(n);
  for (double& v : z) v = draw(rng, cfg.distribution);
  double min_sq = 0.0, max_sq = 0.0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < cfg.ell; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = draw(rng, cfg.distribution) - z[j];
      sq += d * d;
    }
    if (i == 0) {
      min_sq = max_sq = sq;
    } else {
      min_sq = std::min(min_sq, sq);
      max_sq = std::max(max_sq, sq);
    }
  }
  if (min_sq == 0.0) return -1.0;
  return power_of_squared(max_sq, cfg.p) / power_of_squared(min_sq, cfg.p) - 1.0;
}

}  // namespace

const char* distribution_name(Distribution d) {
  switch (d) {
    case Distribution::uniform01: return "uniform01";
    case Distribution::standard_normal: return "standard_normal";
    case Distribution::exponential1: return "exponential1";
  }
  return "unknown";
}

Distribution distribution_from_name(const std::string& name) {
  if (name == "uniform01") return Distribution::uniform01;
  if (name == "standard_normal") return Distribution::standard_normal;
  if (name == "exponential1") return Distribution::exponential1;
  fail(errc::bad_value, "instability.distribution_from_name",
       "unknown distribution '" + name + "'");
}

double lp_power_distance(const std::vector<double>& a, const std::vector<double>& b, double p) {
  const char* op = "instability.lp_power_distance";
  require(a.size() == b.size(), errc::dimension_mismatch, op,
          "points have different dimensions");
  require(p > 0.0, errc::bad_value, op, "distance exponent must be positive");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return power_of_squared(sq, p);
}

double epsilon_from_points(const std::vector<double>& z, const Matrix& xs, double p) {
  const char* op = "instability.epsilon_from_points";
  require(xs.rows() >= 2, errc::bad_value, op, "need at least two reference points");
  require(xs.cols() == z.size(), errc::dimension_mismatch, op,
          "reference points live in a different dimension than the query");
  std::vector<double> x(z.size());
  double dmin = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    for (std::size_t j = 0; j < z.size(); ++j) x[j] = xs(i, j);
    const double d = lp_power_distance(z, x, p);
    if (i == 0) {
      dmin = dmax = d;
    } else {
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
  }
  require(dmin > 0.0, errc::degenerate_sample, op,
          "query coincides with a reference point (D_min = 0)");
  return dmax / dmin - 1.0;
}

double sample_quantile(std::vector<double> values, double q) {
  const char* op = "instability.sample_quantile";
  require(!values.empty(), errc::empty_input, op, "no samples");
  require(q >= 0.0 && q <= 1.0, errc::bad_value, op, "quantile must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<InstabilityRow> run_instability(const InstabilityConfig& cfg) {
  const char* op = "instability.run";
  check_config(cfg, op);
  for (std::size_t n : cfg.dims) {
    require(n >= 1, errc::bad_value, op, "dimensions must be positive");
  }

  const Rng master(cfg.seed);
  std::vector<InstabilityRow> rows;
  rows.reserve(cfg.dims.size());
  for (std::size_t idx = 0; idx < cfg.dims.size(); ++idx) {
    const std::size_t n = cfg.dims[idx];
    const Rng per_dim = master.split(idx);
    InstabilityRow row;
    row.n = n;
    std::vector<double> eps;
    eps.reserve(cfg.trials);
    // Substream per (trial, resample attempt), so trials are independent of
    // each other and of evaluation order.
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const Rng per_trial = per_dim.split(t);
      double value = -1.0;
      std::size_t attempt = 0;
      for (; attempt <= kMaxResamplesPerTrial; ++attempt) {
        value = trial_epsilon(per_trial.split(attempt), n, cfg);
        if (value >= 0.0) break;
        ++row.degenerate_trials;
      }
      require(value >= 0.0, errc::degenerate_sample, op,
              "trial kept sampling coincident points");
      eps.push_back(value);
    }
    row.mean_eps = std::accumulate(eps.begin(), eps.end(), 0.0) /
                   static_cast<double>(eps.size());
    row.median_eps = sample_quantile(eps, 0.5);
    row.q25 = sample_quantile(eps, 0.25);
    row.q75 = sample_quantile(eps, 0.75);
    rows.push_back(row);
  }
  return rows;
}

double relative_variance(const InstabilityConfig& cfg, std::size_t n) {
  const char* op = "instability.relative_variance";
  check_config(cfg, op);
  require(n >= 1, errc::bad_value, op, "dimension must be positive");
  const Rng base = Rng(cfg.seed).split(n);
  std::vector<double> w(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng rng = base.split(t);
    double sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = draw(rng, cfg.distribution);
      const double x = draw(rng, cfg.distribution);
      const double d = z - x;
      sq += d * d;
    }
    w[t] = power_of_squared(sq, cfg.p);
  }
  return relative_variance_of_samples(w);
}

double relative_variance_of_samples(const std::vector<double>& w) {
  require(!w.empty(), errc::empty_input, "instability.relative_variance_of_samples",
          "no samples");
  if (w.size() == 1) return 0.0;
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  if (*lo == *hi) return 0.0;
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) /
                      static_cast<double>(w.size());
  if (mean == 0.0) return 0.0;
  double ss = 0.0;
  for (double v : w) {
    const double r = v / mean - 1.0;
    ss += r * r;
  }
  return ss / static_cast<double>(w.size() - 1);
}

std::string instability_to_csv(const InstabilityConfig& cfg,
                               const std::vector<InstabilityRow>& rows) {
  std::string out = "n,distribution,p,trials,median_eps,mean_eps,q25,q75,seed\n";
  for (const InstabilityRow& r : rows) {
    out += std::to_string(r.n) + "," + distribution_name(cfg.distribution) + "," +
           format_double(cfg.p) + "," + std::to_string(cfg.trials) + "," +
           format_double(r.median_eps) + "," + format_double(r.mean_eps) + "," +
           format_double(r.q25) + "," + format_double(r.q75) + "," +
           std::to_string(cfg.seed) + "\n";
  }
  return out;
}

}  // namespace dg
