#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dg/graphs.hpp"
#include "dg/matrix.hpp"

namespace dg {

// A hard partition of n items into k clusters. assignment[i] is the cluster
// id of item i; ids lie in [0, k) and every id in that range is used by at
// least one item.
struct Clustering {
  std::vector<std::size_t> assignment;
  std::size_t k = 0;
};

// Validates the Clustering invariants against an item count; throws
// errc::bad_label_range / errc::dimension_mismatch on violation.
void check_clustering(const Clustering& c, std::size_t items, const char* op);

// Cluster sizes indexed by cluster id.
std::vector<std::size_t> cluster_sizes(const Clustering& c);

// '{"k": ..., "assignment": [...]}' with stable key order.
std::string clustering_to_json(const Clustering& c);

struct KmeansResult {
  Clustering clustering;
  // Sum over points of squared Euclidean distance to the assigned centroid.
  double objective = 0.0;
  // Objective value recorded after each assignment pass, in order. The
  // sequence is non-increasing.
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  // Final centroids, one row per cluster.
  Matrix centroids;
};

// Lloyd's algorithm on the rows of x with farthest-point seeding: the first
// center is a row chosen by the seeded generator, each further center is the
// row farthest (in squared distance) from the centers chosen so far. A point
// changes cluster only when another centroid is strictly closer. Clusters
// that empty out during an update are re-seeded with the point currently
// farthest from its own centroid. Stops at an assignment fixpoint or after
// max_iter passes. Deterministic given (x, k, seed).
// Requires 1 <= k <= rows(x); throws errc::empty_input / errc::bad_value.
KmeansResult kmeans(const Matrix& x, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 200);

struct SpectralBisection {
  Clustering clustering;  // k = 2
  // Second-smallest eigenvalue of the graph Laplacian.
  double fiedler_value = 0.0;
  // Its eigenvector, scaled so the squared norm equals the vertex count.
  std::vector<double> fiedler_vector;
};

// Two-way partition from the sign pattern of the Fiedler vector. Entries are
// rounded to the nearest of {-1, +1}; exact zeros and, if needed, the
// smallest-magnitude entries of the larger side are moved so the two part
// sizes differ by at most one. Cluster 0 is the side containing vertex 0.
// Requires a connected graph with at least two vertices; throws
// errc::disconnected / errc::empty_input.
SpectralBisection spectral_bisect(const WeightedGraph& g);

// Modularity of a partition: sum over clusters of
//   (intra-cluster weight) / m  -  ((cluster weighted degree) / (2 m))^2
// with m the total edge weight. The degree term includes each vertex's own
// expected self-pair, so an all-singleton partition of a graph with edges
// scores negative, not zero. Throws errc::empty_graph when m == 0.
double modularity_value(const WeightedGraph& g, const Clustering& c);

// Agglomerative modularity maximization: start from singletons and repeatedly
// apply the merge with the largest positive modularity gain
//   delta = w_ab / m - d_a d_b / (2 m^2),
// breaking ties toward the lexicographically smallest pair of cluster
// representatives; stop when no merge has positive gain. A graph with zero
// total edge weight keeps every vertex a singleton. Cluster ids are
// renumbered by first appearance over vertex order.
Clustering greedy_modularity(const WeightedGraph& g);

// Exhaustive modularity maximization over all set partitions, enumerated as
// restricted growth strings; ties keep the first optimum in enumeration
// order. Only for graphs with at most 10 vertices (throws errc::too_large).
// Zero total edge weight yields singletons, as for greedy_modularity.
Clustering modularity_exact_tiny(const WeightedGraph& g);

}  // namespace dg
