#include "dg/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "dg/error.hpp"
#include "dg/linalg.hpp"
#include "dg/rng.hpp"

namespace dg {

namespace {

// Gains smaller than this are treated as zero when deciding whether a greedy
// merge still improves modularity.
constexpr double kGainTol = 1e-12;

double sq_dist_row(const Matrix& x, std::size_t i, const std::vector<double>& c) {
  double s = 0.0;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    const double d = x(i, f) - c[f];
    s += d * d;
  }
  return s;
}

Clustering singleton_clustering(std::size_t n) {
  Clustering c;
  c.k = n;
  c.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.assignment[i] = i;
  return c;
}

// Relabels cluster ids by first appearance over item order, so ids are a
// dense range [0, k).
Clustering compress_labels(const std::vector<std::size_t>& raw) {
  Clustering c;
  std::vector<std::size_t> remap(raw.size(), std::numeric_limits<std::size_t>::max());
  c.assignment.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::size_t& slot = remap[raw[i]];
    if (slot == std::numeric_limits<std::size_t>::max()) slot = c.k++;
    c.assignment[i] = slot;
  }
  return c;
}

// Modularity from per-vertex labels in [0, k): sum over clusters of
// e_c / m - (d_c / (2m))^2. Callers guarantee m > 0.
double modularity_from_labels(const WeightedGraph& g, const std::vector<std::size_t>& label,
                              std::size_t k, double m) {
  std::vector<double> intra(k, 0.0);
  std::vector<double> deg(k, 0.0);
  for (const Edge& e : g.edges()) {
    deg[label[e.u]] += e.w;
    deg[label[e.v]] += e.w;
    if (label[e.u] == label[e.v]) intra[label[e.u]] += e.w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double frac = deg[c] / (2.0 * m);
    q += intra[c] / m - frac * frac;
  }
  return q;
}

}  // namespace

void check_clustering(const Clustering& c, std::size_t items, const char* op) {
  require(c.assignment.size() == items, errc::dimension_mismatch, op,
          "clustering covers " + std::to_string(c.assignment.size()) + " items, expected " +
              std::to_string(items));
  std::vector<bool> seen(c.k, false);
  for (std::size_t id : c.assignment) {
    require(id < c.k, errc::bad_label_range, op,
            "cluster id " + std::to_string(id) + " out of range [0, " + std::to_string(c.k) + ")");
    seen[id] = true;
  }
  for (std::size_t id = 0; id < c.k; ++id) {
    require(seen[id], errc::bad_label_range, op, "cluster " + std::to_string(id) + " is empty");
  }
}

std::vector<std::size_t> cluster_sizes(const Clustering& c) {
  std::vector<std::size_t> sizes(c.k, 0);
  for (std::size_t id : c.assignment) {
    if (id < sizes.size()) ++sizes[id];
  }
  return sizes;
}

std::string clustering_to_json(const Clustering& c) {
  nlohmann::json j;
  j["k"] = c.k;
  j["assignment"] = c.assignment;
  return j.dump(2) + "\n";
}

KmeansResult kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  const char* op = "cluster.kmeans";
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  require(n > 0 && dim > 0, errc::empty_input, op, "point matrix is empty");
  require(k >= 1, errc::bad_value, op, "need at least one cluster");
  require(k <= n, errc::bad_value, op,
          "asked for " + std::to_string(k) + " clusters from " + std::to_string(n) + " points");
  require(max_iter >= 1, errc::bad_value, op, "max_iter must be positive");

  // Farthest-point seeding: random first center, then repeatedly the point
  // with the largest squared distance to its nearest already-chosen center.
  Rng rng(seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  auto row_of = [&x, dim](std::size_t i) {
    std::vector<double> r(dim);
    for (std::size_t f = 0; f < dim; ++f) r[f] = x(i, f);
    return r;
  };
  centers.push_back(row_of(rng.below(n)));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist_row(x, i, centers.back()));
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        far = i;
      }
    }
    centers.push_back(row_of(far));
  }

  KmeansResult out;
  out.clustering.k = k;
  std::vector<std::size_t>& assign = out.clustering.assignment;
  assign.assign(n, 0);
  std::vector<std::size_t> prev;
  std::vector<double> dist_own(n, 0.0);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter + 1;
    // Assignment pass: a point moves only when another centroid is strictly
    // closer than its current one (smallest id among equally close movers),
    // so exact ties cannot make the loop oscillate.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = assign[i];
      double best_d = sq_dist_row(x, i, centers[best]);
      for (std::size_t c = 0; c < k; ++c) {
        if (c == best) continue;
        const double d = sq_dist_row(x, i, centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
      dist_own[i] = best_d;
      objective += best_d;
    }
    out.objective = objective;
    out.objective_trace.push_back(objective);
    if (assign == prev) break;
    prev = assign;

    // Update pass: centroids become cluster means.
    std::vector<std::size_t> count(k, 0);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[assign[i]];
      for (std::size_t f = 0; f < dim; ++f) centers[assign[i]][f] += x(i, f);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;
      for (double& v : centers[c]) v /= static_cast<double>(count[c]);
    }
    // Any cluster that emptied out steals the point farthest from its own
    // centroid (only from clusters that can spare one), which can only lower
    // the objective: the stolen point's cost drops to zero.
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (count[assign[i]] < 2) continue;
        if (dist_own[i] > far_d) {
          far_d = dist_own[i];
          far = i;
        }
      }
      require(far < n, errc::bad_value, op, "cannot populate empty cluster");
      const std::size_t donor = assign[far];
      --count[donor];
      assign[far] = c;
      count[c] = 1;
      centers[c] = row_of(far);
      dist_own[far] = 0.0;
      // Recompute the donor centroid as the mean of its remaining members.
      std::fill(centers[donor].begin(), centers[donor].end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] != donor) continue;
        for (std::size_t f = 0; f < dim; ++f) centers[donor][f] += x(i, f);
      }
      for (double& v : centers[donor]) v /= static_cast<double>(count[donor]);
      prev.clear();  // force another assignment pass
    }
  }

  out.centroids = Matrix(k, dim);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t f = 0; f < dim; ++f) out.centroids(c, f) = centers[c][f];
  }
  check_clustering(out.clustering, n, op);
  return out;
}

SpectralBisection spectral_bisect(const WeightedGraph& g) {
  const char* op = "cluster.spectral_bisect";
  const std::size_t n = g.vertex_count();
  require(n >= 2, errc::empty_input, op, "need at least two vertices to bisect");
  require(g.connected(), errc::disconnected, op, "graph must be connected");

  const SpectralDecomposition sd = jacobi_eig(laplacian(g));
  SpectralBisection out;
  out.fiedler_value = sd.eigenvalues[1];
  out.fiedler_vector.resize(n);
  const double scale = std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) out.fiedler_vector[i] = scale * sd.eigenvectors(i, 1);

  // Round each entry to the nearest of {-1, +1}; exact zeros go to whichever
  // side is currently smaller.
  std::vector<int> side(n, 0);
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.fiedler_vector[i] > 0.0) {
      side[i] = 1;
      ++pos;
    } else if (out.fiedler_vector[i] < 0.0) {
      side[i] = -1;
      ++neg;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (side[i] != 0) continue;
    if (pos < neg) {
      side[i] = 1;
      ++pos;
    } else {
      side[i] = -1;
      ++neg;
    }
  }
  // Rebalance: repeatedly move the smallest-magnitude entry of the larger
  // side until the sizes differ by at most one.
  while (pos + 1 < neg || neg + 1 < pos) {
    const int from = pos > neg ? 1 : -1;
    std::size_t move = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (side[i] != from) continue;
      const double mag = std::fabs(out.fiedler_vector[i]);
      if (mag < best) {
        best = mag;
        move = i;
      }
    }
    side[move] = -from;
    if (from == 1) {
      --pos;
      ++neg;
    } else {
      --neg;
      ++pos;
    }
  }

  out.clustering.k = 2;
  out.clustering.assignment.resize(n);
  const int zero_side = side[0];
  for (std::size_t i = 0; i < n; ++i) {
    out.clustering.assignment[i] = side[i] == zero_side ? 0 : 1;
  }
  check_clustering(out.clustering, n, op);
  return out;
}

double modularity_value(const WeightedGraph& g, const Clustering& c) {
  const char* op = "cluster.modularity_value";
  check_clustering(c, g.vertex_count(), op);
  double m = 0.0;
  for (const Edge& e : g.edges()) m += e.w;
  require(m > 0.0, errc::empty_graph, op, "modularity needs positive total edge weight");
  return modularity_from_labels(g, c.assignment, c.k, m);
}

Clustering greedy_modularity(const WeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  double m = 0.0;
  for (const Edge& e : g.edges()) m += e.w;
  // Without edge weight there is no merge with positive gain.
  if (n == 0 || m <= 0.0) return singleton_clustering(n);

  // Clusters are labeled by their smallest member vertex; inactive labels are
  // marked by a negative degree sum.
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  std::vector<double> deg(n, 0.0);
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i;
  for (const Edge& e : g.edges()) {
    w[e.u][e.v] += e.w;
    w[e.v][e.u] += e.w;
    deg[e.u] += e.w;
    deg[e.v] += e.w;
  }
  std::vector<bool> active(n, true);

  while (true) {
    // Best merge: largest gain w_ab / m - d_a d_b / (2 m^2); scanning in
    // ascending (a, b) with a strict comparison keeps the lexicographically
    // smallest pair on ties.
    double best_gain = kGainTol;
    std::size_t best_a = n, best_b = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        const double gain = w[a][b] / m - deg[a] * deg[b] / (2.0 * m * m);
        if (gain > best_gain) {
          best_gain = gain;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a == n) break;
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == best_b) label[i] = best_a;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == best_a || c == best_b) continue;
      w[best_a][c] += w[best_b][c];
      w[c][best_a] = w[best_a][c];
    }
    deg[best_a] += deg[best_b];
    active[best_b] = false;
  }
  return compress_labels(label);
}

Clustering modularity_exact_tiny(const WeightedGraph& g) {
  const char* op = "cluster.modularity_exact_tiny";
  const std::size_t n = g.vertex_count();
  require(n <= 10, errc::too_large, op,
          "exhaustive search is limited to 10 vertices, got " + std::to_string(n));
  double m = 0.0;
  for (const Edge& e : g.edges()) m += e.w;
  if (n == 0 || m <= 0.0) return singleton_clustering(n);

  // Enumerate set partitions as restricted growth strings: a[0] = 0 and
  // a[i] <= 1 + max(a[0..i-1]). Labels are dense and first-appearance
  // ordered by construction.
  std::vector<std::size_t> a(n, 0);
  std::vector<std::size_t> cap(n, 0);  // cap[i] = max over a[0..i-1]
  Clustering best;
  double best_q = -std::numeric_limits<double>::infinity();
  while (true) {
    const std::size_t k = std::max(cap[n - 1], a[n - 1]) + 1;
    const double q = modularity_from_labels(g, a, k, m);
    if (q > best_q) {
      best_q = q;
      best.assignment = a;
      best.k = k;
    }
    // Successor: increment the rightmost digit still below its ceiling and
    // zero everything after it.
    std::size_t i = n - 1;
    while (i > 0 && a[i] > cap[i]) --i;
    if (i == 0) return best;
    ++a[i];
    const std::size_t lead = std::max(cap[i], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      cap[j] = lead;
    }
  }
}

}  // namespace dg
