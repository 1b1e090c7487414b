#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dg/matrix.hpp"

namespace dg {

// Stock coordinate distributions for the Monte Carlo experiments.
enum class Distribution { uniform01, standard_normal, exponential1 };

const char* distribution_name(Distribution d);
// Inverse of distribution_name; throws errc::bad_value on unknown names.
Distribution distribution_from_name(const std::string& name);

// One experiment: for each dimension n in dims, repeatedly sample a query
// point Z and ell reference points X_1..X_ell with i.i.d. coordinates, take
// the smallest and largest value of ||Z - X_i||_2^p, and record the contrast
//   epsilon = D_max / D_min - 1.
struct InstabilityConfig {
  std::vector<std::size_t> dims;
  std::size_t ell = 10;
  std::size_t trials = 1000;
  Distribution distribution = Distribution::uniform01;
  double p = 2.0;
  std::uint64_t seed = 0;
};

struct InstabilityRow {
  std::size_t n = 0;
  double median_eps = 0.0;
  double mean_eps = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  // Trials rejected because D_min was exactly zero; each was resampled.
  std::size_t degenerate_trials = 0;
};

// ||a - b||_2 raised to the power p.
double lp_power_distance(const std::vector<double>& a, const std::vector<double>& b, double p);

// Contrast D_max / D_min - 1 for an explicit query point and reference rows.
// Throws errc::degenerate_sample when D_min is exactly zero.
double epsilon_from_points(const std::vector<double>& z, const Matrix& xs, double p);

// Quantile with linear interpolation between order statistics: at fraction q
// the value is x[(N-1)q] of the sorted sample, interpolating fractional
// indices. q must lie in [0, 1]; the sample must be nonempty.
double sample_quantile(std::vector<double> values, double q);

// Runs the experiment once per dimension. Trials draw from per-trial
// substreams of the seed, so results do not depend on evaluation order;
// degenerate trials are resampled under a fresh substream and counted.
// Requires ell >= 2, trials >= 1, p > 0, and every dimension >= 1.
std::vector<InstabilityRow> run_instability(const InstabilityConfig& cfg);

// Sample estimate of Var(W / E W) for W = ||Z - X||_2^p at dimension n,
// using cfg.trials independent (Z, X) pairs. This is the relative-spread
// quantity whose decay with n drives the instability theorem.
double relative_variance(const InstabilityConfig& cfg, std::size_t n);

// The same estimate from explicit samples of W: unbiased variance of
// w / mean(w). Constant samples (including all-zero) give exactly 0; a
// single sample gives 0.
double relative_variance_of_samples(const std::vector<double>& w);

// CSV with header n,distribution,p,trials,median_eps,mean_eps,q25,q75,seed
// and one row per dimension.
std::string instability_to_csv(const InstabilityConfig& cfg,
                               const std::vector<InstabilityRow>& rows);

}  // namespace dg
