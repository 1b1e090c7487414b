#include "dg/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "dg/error.hpp"
#include "dg/io.hpp"

namespace dg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs the all-pairs shortest-path recurrence in place; entries start at
// direct distances (kInf when unknown) with a zero diagonal.
void floyd_warshall_in_place(Matrix& d, const char* op) {
  const std::size_t n = d.rows();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + d(k, j);
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      require(d(i, j) != kInf, errc::disconnected, op,
              "no path between " + std::to_string(i) + " and " + std::to_string(j));
}

}  // namespace

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n) {
  const char* op = "graphs.WeightedGraph";
  std::set<std::pair<std::size_t, std::size_t>> seen;
  edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
    require(e.u != e.v, errc::bad_value, op, "loop at vertex " + std::to_string(e.u));
    require(e.v < n, errc::bad_value, op,
            "edge endpoint " + std::to_string(e.v) + " out of range for n=" + std::to_string(n));
    require(std::isfinite(e.w) && e.w >= 0.0, errc::bad_value, op,
            "edge weight must be finite and nonnegative");
    require(seen.emplace(e.u, e.v).second, errc::bad_value, op,
            "duplicate edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "}");
    edges_.push_back(e);
  }
}

bool WeightedGraph::connected() const {
  if (n_ == 0) return true;
  std::vector<std::vector<std::size_t>> adj(n_);
  for (const Edge& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(n_, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n_;
}

double WeightedGraph::max_weight() const {
  double m = 0.0;
  for (const Edge& e : edges_) m = std::max(m, e.w);
  return m;
}

PartialDistanceMatrix::PartialDistanceMatrix(std::size_t n)
    : n_(n), value_(n, n), known_(n * n, 0) {
  for (std::size_t i = 0; i < n; ++i) known_[i * n + i] = 1;
}

void PartialDistanceMatrix::set(std::size_t i, std::size_t j, double d) {
  const char* op = "graphs.PartialDistanceMatrix.set";
  require(i < n_ && j < n_, errc::bad_value, op, "index out of range");
  require(std::isfinite(d) && d >= 0.0, errc::bad_value, op,
          "distance must be finite and nonnegative");
  require(i != j || d == 0.0, errc::bad_diagonal, op, "diagonal entries must stay zero");
  value_(i, j) = value_(j, i) = d;
  known_[i * n_ + j] = known_[j * n_ + i] = 1;
}

std::size_t PartialDistanceMatrix::known_pair_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (known(i, j)) ++c;
  return c;
}

Matrix floyd_warshall_complete(const WeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  Matrix d(n, n, kInf);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const Edge& e : g.edges()) {
    d(e.u, e.v) = std::min(d(e.u, e.v), e.w);
    d(e.v, e.u) = d(e.u, e.v);
  }
  floyd_warshall_in_place(d, "graphs.floyd_warshall_complete");
  return d;
}

Matrix floyd_warshall_complete(const PartialDistanceMatrix& pdm) {
  const std::size_t n = pdm.size();
  Matrix d(n, n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pdm.known(i, j)) d(i, j) = d(j, i) = pdm.value(i, j);
    }
  }
  floyd_warshall_in_place(d, "graphs.floyd_warshall_complete");
  return d;
}

Matrix adjacency(const WeightedGraph& g) {
  Matrix a(g.vertex_count(), g.vertex_count());
  for (const Edge& e : g.edges()) a(e.u, e.v) = a(e.v, e.u) = e.w;
  return a;
}

std::vector<double> degrees(const WeightedGraph& g) {
  std::vector<double> deg(g.vertex_count(), 0.0);
  for (const Edge& e : g.edges()) {
    deg[e.u] += e.w;
    deg[e.v] += e.w;
  }
  return deg;
}

Matrix laplacian(const WeightedGraph& g) {
  Matrix l = -1.0 * adjacency(g);
  const std::vector<double> deg = degrees(g);
  for (std::size_t i = 0; i < g.vertex_count(); ++i) l(i, i) = deg[i];
  return l;
}

PartialDistanceMatrix partial_from_graph(const WeightedGraph& g) {
  PartialDistanceMatrix pdm(g.vertex_count());
  for (const Edge& e : g.edges()) pdm.set(e.u, e.v, e.w);
  return pdm;
}

WeightedGraph table_to_distance_graph(const DataTable& table,
                                      const std::vector<FeatureDistance>& feature_distances) {
  const char* op = "graphs.table_to_distance_graph";
  require(table.cells.size() == table.records * table.features, errc::dimension_mismatch, op,
          "cell storage does not match records*features");
  require(feature_distances.empty() || feature_distances.size() == table.features,
          errc::dimension_mismatch, op, "need one distance per feature (or none for |a-b|)");

  const auto dist = [&](std::size_t f, double a, double b) {
    return feature_distances.empty() ? std::fabs(a - b) : feature_distances[f](a, b);
  };

  std::vector<char> complete(table.records, 1);
  for (std::size_t r = 0; r < table.records; ++r)
    for (std::size_t f = 0; f < table.features; ++f)
      if (!table.cell(r, f).has_value()) complete[r] = 0;

  std::vector<Edge> edges;
  for (std::size_t r = 0; r < table.records; ++r) {
    if (!complete[r]) continue;
    for (std::size_t s = r + 1; s < table.records; ++s) {
      if (!complete[s]) continue;
      double w = 0.0;
      for (std::size_t f = 0; f < table.features; ++f)
        w += dist(f, *table.cell(r, f), *table.cell(s, f));
      require(std::isfinite(w) && w >= 0.0, errc::bad_value, op,
              "feature distances must produce finite nonnegative sums");
      edges.push_back({r, s, w});
    }
  }
  return WeightedGraph(table.records, std::move(edges));
}

WeightedGraph parse_graph_edge_list(const std::string& text, const std::string& origin) {
  const char* op = "graphs.read_edge_list";
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ls >> tok) fields.push_back(tok);
    rows.push_back(std::move(fields));
  }
  require(!rows.empty(), errc::empty_input, op, origin + ": empty file");
  require(rows.front().size() == 2, errc::bad_value, op,
          origin + ": header must be \"n m\"");
  const auto parse_count = [&](const std::string& t) {
    const double v = parse_double(t, op);
    require(v >= 0.0 && v == std::floor(v), errc::bad_value, op,
            origin + ": counts must be nonnegative integers");
    return static_cast<std::size_t>(v);
  };
  const std::size_t n = parse_count(rows.front()[0]);
  const std::size_t m = parse_count(rows.front()[1]);
  require(rows.size() == m + 1, errc::bad_value, op,
          origin + ": expected " + std::to_string(m) + " edge lines, found " +
              std::to_string(rows.size() - 1));
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    require(rows[i].size() == 3, errc::bad_value, op,
            origin + ": edge line " + std::to_string(i + 1) + " must be \"u v w\"");
    edges.push_back({parse_count(rows[i][0]), parse_count(rows[i][1]),
                     parse_double(rows[i][2], op)});
  }
  return WeightedGraph(n, std::move(edges));
}

std::string graph_to_edge_list(const WeightedGraph& g) {
  std::string out = std::to_string(g.vertex_count()) + " " + std::to_string(g.edge_count()) + "\n";
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u) + " " + std::to_string(e.v) + " " + format_double(e.w) + "\n";
  }
  return out;
}

WeightedGraph parse_graph_json(const std::string& text, const std::string& origin) {
  const char* op = "graphs.read_json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(errc::bad_value, op, origin + ": " + e.what());
  }
  require(j.is_object() && j.contains("n") && j.contains("edges"), errc::bad_value, op,
          origin + ": expected {\"n\":…, \"edges\":[[u,v,w],…]}");
  require(j["n"].is_number_unsigned(), errc::bad_value, op, origin + ": n must be unsigned");
  std::vector<Edge> edges;
  for (const auto& item : j["edges"]) {
    require(item.is_array() && item.size() == 3, errc::bad_value, op,
            origin + ": each edge must be [u,v,w]");
    require(item[0].is_number_unsigned() && item[1].is_number_unsigned() &&
                item[2].is_number(),
            errc::bad_value, op, origin + ": edge fields must be numeric");
    edges.push_back({item[0].get<std::size_t>(), item[1].get<std::size_t>(),
                     item[2].get<double>()});
  }
  return WeightedGraph(j["n"].get<std::size_t>(), std::move(edges));
}

std::string graph_to_json(const WeightedGraph& g) {
  nlohmann::json j;
  j["n"] = g.vertex_count();
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges()) j["edges"].push_back({e.u, e.v, e.w});
  return j.dump(2) + "\n";
}

WeightedGraph read_graph(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".json") return parse_graph_json(text, path.string());
  return parse_graph_edge_list(text, path.string());
}

void write_graph(const std::filesystem::path& path, const WeightedGraph& g) {
  if (path.extension() == ".json") {
    write_text_file_atomic(path, graph_to_json(g));
  } else {
    write_text_file_atomic(path, graph_to_edge_list(g));
  }
}

}  // namespace dg
