#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dg/matrix.hpp"

namespace dg {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double w = 0.0;
};

// Simple undirected graph with nonnegative edge weights. Edges are normalized
// to u < v; loops, duplicate pairs, out-of-range endpoints, and negative or
// non-finite weights are rejected. Immutable after construction.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool connected() const;
  double max_weight() const;  // 0 when there are no edges

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

// Symmetric distance matrix where only some entries are specified. The
// diagonal is always known and zero.
class PartialDistanceMatrix {
 public:
  explicit PartialDistanceMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  double value(std::size_t i, std::size_t j) const { return value_(i, j); }
  bool known(std::size_t i, std::size_t j) const { return known_[i * n_ + j] != 0; }
  const Matrix& values() const { return value_; }

  // Marks the pair {i,j} known with the given distance, symmetrically.
  void set(std::size_t i, std::size_t j, double d);
  std::size_t known_pair_count() const;  // off-diagonal pairs i<j

 private:
  std::size_t n_;
  Matrix value_;
  std::vector<char> known_;
};

// Shortest-path metric completion. Every missing entry becomes the weighted
// shortest-path distance; disconnected input is an error.
Matrix floyd_warshall_complete(const WeightedGraph& g);
Matrix floyd_warshall_complete(const PartialDistanceMatrix& pdm);

Matrix adjacency(const WeightedGraph& g);
std::vector<double> degrees(const WeightedGraph& g);
Matrix laplacian(const WeightedGraph& g);

PartialDistanceMatrix partial_from_graph(const WeightedGraph& g);

// Records-by-features table where individual cells may be missing.
struct DataTable {
  std::size_t records = 0;
  std::size_t features = 0;
  std::vector<std::optional<double>> cells;  // row-major, records * features

  std::optional<double> cell(std::size_t r, std::size_t f) const {
    return cells[r * features + f];
  }
};

using FeatureDistance = std::function<double(double, double)>;

// Distance graph of a table: vertices are records; an edge {r,s} exists iff
// every feature is defined on both records, weighted by the sum of
// per-feature distances. Distances must be symmetric and nonnegative.
// An empty function list applies |a−b| to every feature.
WeightedGraph table_to_distance_graph(const DataTable& table,
                                      const std::vector<FeatureDistance>& feature_distances = {});

// Text formats. Edge list: first line "n m", then m lines "u v w". JSON:
// {"n":…, "edges":[[u,v,w],…]}. Both round-trip bit-exactly through the
// writer. read_graph/write_graph dispatch on the ".json" extension.
WeightedGraph parse_graph_edge_list(const std::string& text, const std::string& origin);
std::string graph_to_edge_list(const WeightedGraph& g);
WeightedGraph parse_graph_json(const std::string& text, const std::string& origin);
std::string graph_to_json(const WeightedGraph& g);
WeightedGraph read_graph(const std::filesystem::path& path);
void write_graph(const std::filesystem::path& path, const WeightedGraph& g);

}  // namespace dg
