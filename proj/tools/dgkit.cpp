// dgkit: command-line surface wiring the library into reproducible, seeded
// experiments. Every artifact write is atomic, and an identical command line
// with an identical --seed produces bitwise-identical artifact files.
//
// Exit codes: 0 success, 1 usage error, 2 data error (bad files or invariant
// violations), 3 numerical failure (non-convergence and kin).
#include <CLI11.hpp>

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dg/ann.hpp"
#include "dg/cluster.hpp"
#include "dg/conic.hpp"
#include "dg/dimred.hpp"
#include "dg/embed.hpp"
#include "dg/error.hpp"
#include "dg/graphs.hpp"
#include "dg/instability.hpp"
#include "dg/io.hpp"
#include "dg/linalg.hpp"
#include "dg/matrix.hpp"
#include "dg/realize.hpp"
#include "dg/rng.hpp"
#include "dg/textgraph.hpp"

namespace {

using json = nlohmann::json;
using namespace dg;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

struct UsageError {
  std::string message;
};

void need(bool cond, const std::string& message) {
  if (!cond) throw UsageError{message};
}

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  std::string format = "csv";  // csv | json: form of the stdout summary and,
                               // where a module declares both, the artifact
  bool quiet = false;
  std::size_t jobs = 1;
};

std::uint64_t require_seed(const GlobalOpts& g, const char* what) {
  need(g.seed.has_value(), std::string(what) + " is stochastic: --seed is required");
  return *g.seed;
}

void emit(const GlobalOpts& g, const json& summary, const std::string& human) {
  if (g.quiet) return;
  if (g.format == "json") {
    std::cout << summary.dump(2) << "\n";
  } else {
    std::cout << human << "\n";
  }
}

std::vector<std::string> comma_list(const std::string& value, const char* flag) {
  std::vector<std::string> out;
  for (const std::string& piece : split(value, ',')) {
    const std::string t = trim(piece);
    need(!t.empty(), std::string(flag) + " has an empty entry");
    out.push_back(t);
  }
  need(!out.empty(), std::string(flag) + " must not be empty");
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      need(out[i] != out[j], std::string(flag) + " repeats '" + out[i] + "'");
  return out;
}

std::vector<std::size_t> size_list(const std::string& value, const char* flag) {
  std::vector<std::size_t> out;
  for (const std::string& piece : comma_list(value, flag)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(piece, &pos);
    } catch (const std::exception&) {
      throw UsageError{std::string(flag) + ": '" + piece + "' is not a count"};
    }
    need(pos == piece.size(), std::string(flag) + ": '" + piece + "' is not a count");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// A method table row: flag value, one-line formula description.
struct MethodDoc {
  const char* name;
  const char* text;
};

// Usage-validates a --method value against the documented set before any
// input file is touched, so a bad method name is always exit 1.
void check_method(const std::string& chosen, const std::vector<MethodDoc>& docs,
                  const char* subcommand) {
  need(!chosen.empty(), std::string(subcommand) + " needs --method");
  for (const MethodDoc& d : docs)
    if (chosen == d.name) return;
  std::string known;
  for (const MethodDoc& d : docs) {
    if (!known.empty()) known += " | ";
    known += d.name;
  }
  throw UsageError{"unknown " + std::string(subcommand) + " method '" + chosen + "' (" +
                   known + ")"};
}

// Prints the formula each method implements; `chosen` empty prints them all.
// Returns true when the describe path handled the invocation.
bool describe(bool flag, const std::vector<MethodDoc>& docs, const std::string& chosen,
              const char* subcommand) {
  if (!flag) return false;
  bool found = chosen.empty();
  for (const MethodDoc& d : docs) {
    if (!chosen.empty() && chosen != d.name) continue;
    found = true;
    std::cout << subcommand << " " << d.name << ": " << d.text << "\n";
  }
  need(found, std::string("unknown method '") + chosen + "' for " + subcommand);
  return true;
}

// ---------------------------------------------------------------------------
// realize
// ---------------------------------------------------------------------------

const std::vector<MethodDoc>& realize_docs() {
  static const std::vector<MethodDoc> docs = {
      {"uie",
       "x_u = row u of the shortest-path-completed distance matrix D; max-norm distances "
       "reproduce D exactly: max_k |x_uk - x_vk| = D(u,v)"},
      {"mds",
       "B = -1/2 J (D∘D) J with J = I - (1/n)11^T; eigendecompose B, zero the negative "
       "eigenvalues, x = P sqrt(Lambda), truncated to K columns when --dim is given"},
      {"pca",
       "full classical scaling first, then the K leading principal components of the "
       "realization (eigenvectors of X X^T with the largest eigenvalues)"},
      {"isomap",
       "build the sparsest connected proximity graph over the scaled coordinates, complete "
       "it by shortest paths, classical scaling to K"},
      {"qrt",
       "minimize f(x) = sum over edges (||x_u - x_v||^2 - d_uv^2)^2 by multistart gradient "
       "descent with backtracking line search"},
      {"sdp",
       "relax the Gram matrix X: maximize sum over edges (X_uu + X_vv - 2 X_uv) - gamma tr(X) "
       "subject to X_uu + X_vv - 2 X_uv <= d_uv^2 and X PSD; factor X into K columns"},
      {"ddp-primal",
       "inner linear approximation of the PSD cone by diagonal dominance: sum_j T_ij <= X_ii "
       "with |X_ij| <= T_ij, solved as a linear program over the edge objective"},
      {"ddp-dual",
       "outer linear approximation from the dual-cone generators e_i and e_i +/- e_j: "
       "X_ii >= 0 and X_ii + X_jj +/- 2 X_ij >= 0 with equality edge constraints"},
      {"barvinok",
       "factor the SDP solution X = T T^t, draw y with i.i.d. standard normal entries "
       "(n x K), start from T y, refine with the quartic descent"},
  };
  return docs;
}

struct RealizeOpts {
  std::string method;
  std::string in;
  std::string out;
  std::size_t dim = 0;  // 0 = not given
  std::size_t restarts = 0;  // 0 = method default
  std::size_t max_iter = 0;  // 0 = method default
  double tol = 0.0;          // 0 = method default
  double gamma = 0.01;
  bool describe = false;
};

Matrix truncate_columns(const Matrix& x, std::size_t k) {
  Matrix out(x.rows(), k);
  const std::size_t copy = std::min(k, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < copy; ++j) out(i, j) = x(i, j);
  return out;
}

int run_realize(const RealizeOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, realize_docs(), o.method, "realize")) return 0;
  check_method(o.method, realize_docs(), "realize");
  need(!o.in.empty(), "realize needs --in (graph file)");
  need(!o.out.empty(), "realize needs --out (realization CSV)");

  const WeightedGraph graph = read_graph(o.in);
  const std::size_t n = graph.vertex_count();
  Matrix x;
  json extra;

  if (o.method == "uie") {
    const Embedding e = frechet_embed(graph);
    x = o.dim > 0 ? truncate_columns(e.points, o.dim) : e.points;
  } else if (o.method == "mds") {
    const MdsResult r = classic_mds(partial_from_graph(graph),
                                    o.dim > 0 ? std::optional<std::size_t>(o.dim)
                                              : std::nullopt);
    x = r.points;
    extra["spectrum"] = json::parse(spectrum_to_json(r.spectrum));
  } else if (o.method == "pca") {
    need(o.dim > 0, "realize --method pca needs --dim");
    x = pca_reduce(classic_mds(partial_from_graph(graph)).points, o.dim);
  } else if (o.method == "isomap") {
    need(o.dim > 0, "realize --method isomap needs --dim");
    x = isomap(classic_mds(partial_from_graph(graph)).points, o.dim);
  } else if (o.method == "qrt") {
    need(o.dim > 0, "realize --method qrt needs --dim");
    DescentConfig cfg;
    cfg.seed = require_seed(g, "realize --method qrt");
    cfg.restarts = o.restarts > 0 ? o.restarts : 10;
    if (o.max_iter > 0) cfg.max_iterations = o.max_iter;
    if (o.tol > 0) cfg.gradient_tolerance = o.tol;
    const RealizeResult r = solve_quartic(graph, o.dim, cfg);
    x = r.x;
    extra["report"] = json::parse(realize_report_to_json(r.report));
  } else if (o.method == "sdp" || o.method == "barvinok") {
    const SdpProblem problem = dgp_sdp(graph, DgpSdpObjective::mixed, o.gamma);
    const SdpResult r = admm_sdp_solve(problem, o.tol > 0 ? o.tol : 1e-7,
                                       o.max_iter > 0 ? o.max_iter : 20000);
    extra["sdp"] = json::parse(sdp_result_to_json(r));
    if (o.method == "sdp") {
      x = realization_from_gram(r.x, o.dim > 0 ? std::optional<std::size_t>(o.dim)
                                               : std::nullopt);
    } else {
      need(o.dim > 0, "realize --method barvinok needs --dim");
      const std::uint64_t seed = require_seed(g, "realize --method barvinok");
      const Matrix start = barvinok_naive(r.x, o.dim, seed);
      DescentConfig cfg;
      cfg.seed = seed;
      cfg.restarts = o.restarts > 0 ? o.restarts : 1;
      const RealizeResult refined = solve_quartic(graph, o.dim, cfg, start);
      x = refined.x;
      extra["report"] = json::parse(realize_report_to_json(refined.report));
    }
  } else if (o.method == "ddp-primal" || o.method == "ddp-dual") {
    const DdpResult r =
        o.method == "ddp-primal" ? ddp_primal_solve(graph) : ddp_dual_solve(graph);
    x = realization_from_gram(r.x, o.dim > 0 ? std::optional<std::size_t>(o.dim)
                                             : std::nullopt);
    extra["ddp"] = json::parse(ddp_result_to_json(r));
  } else {
    throw UsageError{"unknown realize method '" + o.method + "'"};
  }

  write_matrix_csv(o.out, x);
  json summary;
  summary["command"] = "realize";
  summary["method"] = o.method;
  summary["vertices"] = n;
  summary["rows"] = x.rows();
  summary["cols"] = x.cols();
  summary["artifact"] = o.out;
  for (auto& [key, value] : extra.items()) summary[key] = std::move(value);
  emit(g, summary,
       "realize " + o.method + ": " + std::to_string(n) + " vertices -> " +
           std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " in " + o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

const std::vector<MethodDoc>& reduce_docs() {
  static const std::vector<MethodDoc> docs = {
      {"pca",
       "keep the K eigenvectors of X X^T with the largest eigenvalues; K from --dim, or else "
       "the smallest K whose eigenvalues explain the --residual fraction of the variance"},
      {"rp",
       "random projection: k = ceil(C ln(s) / eps^2) rows (or --dim), entries i.i.d. "
       "N(0, 1/k) kept with probability --density and rescaled by 1/sqrt(density); y = T x"},
  };
  return docs;
}

struct ReduceOpts {
  std::string method;
  std::string in;
  std::string out;
  std::size_t dim = 0;
  double residual = 0.999;
  double eps = 0.2;
  double c = 1.8;
  double density = 1.0;
  bool describe = false;
};

int run_reduce(const ReduceOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, reduce_docs(), o.method, "reduce")) return 0;
  check_method(o.method, reduce_docs(), "reduce");
  need(!o.in.empty(), "reduce needs --in (matrix CSV)");
  need(!o.out.empty(), "reduce needs --out (matrix CSV)");

  const Matrix x = read_matrix_csv(o.in);
  Matrix y;
  json extra;

  if (o.method == "pca") {
    const std::size_t k = o.dim > 0 ? o.dim : pca_residual_dimension(x, o.residual);
    y = pca_reduce(x, k);
    extra["dim"] = k;
  } else if (o.method == "rp") {
    const std::uint64_t seed = require_seed(g, "reduce --method rp");
    need(o.eps > 0.0 && o.eps < 1.0, "reduce --eps must lie in (0, 1)");
    const std::size_t k = o.dim > 0 ? o.dim : jll_dimension(x.rows(), {o.eps, o.c});
    const RandomProjection rp = make_rp(x.cols(), k, o.density, seed);
    y = apply_rp(rp, x);
    const std::size_t pairs = x.rows() * (x.rows() - 1) / 2;
    const std::size_t cap = pairs <= 20000 ? 0 : 20000;
    const JllReport audit = jll_distortion(x, y, o.eps, cap, seed);
    extra["dim"] = k;
    extra["distortion"] = json::parse(jll_report_to_json(audit));
  } else {
    throw UsageError{"unknown reduce method '" + o.method + "'"};
  }

  write_matrix_csv(o.out, y);
  json summary;
  summary["command"] = "reduce";
  summary["method"] = o.method;
  summary["rows"] = y.rows();
  summary["cols"] = y.cols();
  summary["artifact"] = o.out;
  for (auto& [key, value] : extra.items()) summary[key] = std::move(value);
  emit(g, summary,
       "reduce " + o.method + ": " + std::to_string(x.rows()) + "x" +
           std::to_string(x.cols()) + " -> " + std::to_string(y.rows()) + "x" +
           std::to_string(y.cols()) + " in " + o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

const std::vector<MethodDoc>& cluster_docs() {
  static const std::vector<MethodDoc> docs = {
      {"kmeans",
       "Lloyd iterations on the rows of a matrix: assign each row to the nearest centroid, "
       "recenter; farthest-point seeding; the objective sum ||x_i - c(a_i)||^2 never "
       "increases"},
      {"spectral",
       "two-way split from the sign pattern of the Fiedler vector (the eigenvector of the "
       "second-smallest Laplacian eigenvalue), balanced to sizes differing by at most one"},
      {"modularity",
       "greedy agglomeration maximizing Q = sum_c (w_c/m - (d_c/(2m))^2): repeatedly apply "
       "the merge with the largest positive gain w_ab/m - d_a d_b/(2 m^2)"},
  };
  return docs;
}

struct ClusterOpts {
  std::string method;
  std::string in;
  std::string out;
  std::size_t k = 0;
  std::size_t max_iter = 200;
  bool describe = false;
};

std::string assignment_lines(const Clustering& c) {
  std::string out;
  for (const std::size_t id : c.assignment) {
    out += std::to_string(id);
    out.push_back('\n');
  }
  return out;
}

int run_cluster(const ClusterOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, cluster_docs(), o.method, "cluster")) return 0;
  check_method(o.method, cluster_docs(), "cluster");
  need(!o.in.empty(), "cluster needs --in");
  need(!o.out.empty(), "cluster needs --out");

  Clustering clustering;
  json extra;
  std::string human;

  if (o.method == "kmeans") {
    const std::uint64_t seed = require_seed(g, "cluster --method kmeans");
    need(o.k >= 1, "cluster --method kmeans needs --k >= 1");
    const Matrix x = read_matrix_csv(o.in);
    const KmeansResult r = kmeans(x, o.k, seed, o.max_iter);
    clustering = r.clustering;
    extra["objective"] = r.objective;
    extra["iterations"] = r.iterations;
    human = "kmeans: k=" + std::to_string(o.k) + " objective=" + format_double(r.objective);
  } else if (o.method == "spectral") {
    need(o.k == 0 || o.k == 2, "cluster --method spectral always produces k=2");
    const WeightedGraph graph = read_graph(o.in);
    const SpectralBisection r = spectral_bisect(graph);
    clustering = r.clustering;
    extra["fiedler_value"] = r.fiedler_value;
    human = "spectral: fiedler=" + format_double(r.fiedler_value);
  } else if (o.method == "modularity") {
    need(o.k == 0, "cluster --method modularity picks k itself; drop --k");
    const WeightedGraph graph = read_graph(o.in);
    clustering = greedy_modularity(graph);
    const double q = modularity_value(graph, clustering);
    extra["modularity"] = q;
    human = "modularity: k=" + std::to_string(clustering.k) + " Q=" + format_double(q);
  } else {
    throw UsageError{"unknown cluster method '" + o.method + "'"};
  }

  if (g.format == "json") {
    write_text_file_atomic(o.out, clustering_to_json(clustering));
  } else {
    write_text_file_atomic(o.out, assignment_lines(clustering));
  }
  json summary;
  summary["command"] = "cluster";
  summary["method"] = o.method;
  summary["k"] = clustering.k;
  summary["items"] = clustering.assignment.size();
  summary["artifact"] = o.out;
  for (auto& [key, value] : extra.items()) summary[key] = std::move(value);
  emit(g, summary, human + " -> " + o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// instability
// ---------------------------------------------------------------------------

const std::vector<MethodDoc>& instability_docs() {
  static const std::vector<MethodDoc> docs = {
      {"experiment",
       "per trial draw a query Z and ell reference points X_1..X_ell with i.i.d. "
       "coordinates, set D_i = ||Z - X_i||_2^p, and record eps = D_max/D_min - 1; report "
       "median, mean, and quartiles of eps per dimension"},
  };
  return docs;
}

struct InstabilityOpts {
  std::string dims;
  std::string dist = "uniform01";
  std::size_t ell = 10;
  std::size_t trials = 1000;
  double p = 2.0;
  std::string out;
  bool describe = false;
};

int run_instability(const InstabilityOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, instability_docs(), "", "instability")) return 0;
  const std::uint64_t seed = require_seed(g, "instability");
  need(!o.dims.empty(), "instability needs --dims (comma-separated dimensions)");
  need(!o.out.empty(), "instability needs --out");
  need(o.ell >= 2, "instability needs --ell >= 2");
  need(o.trials >= 1, "instability needs --trials >= 1");
  need(o.p > 0.0, "instability needs --p > 0");

  InstabilityConfig cfg;
  cfg.dims = size_list(o.dims, "--dims");
  for (const std::size_t n : cfg.dims) need(n >= 1, "--dims entries must be >= 1");
  cfg.ell = o.ell;
  cfg.trials = o.trials;
  cfg.p = o.p;
  cfg.seed = seed;
  try {
    cfg.distribution = distribution_from_name(o.dist);
  } catch (const Error&) {
    throw UsageError{"unknown distribution '" + o.dist +
                     "' (uniform01 | standard_normal | exponential1)"};
  }

  const std::vector<InstabilityRow> rows = run_instability(cfg);

  if (g.format == "json") {
    json j;
    j["distribution"] = distribution_name(cfg.distribution);
    j["ell"] = cfg.ell;
    j["trials"] = cfg.trials;
    j["p"] = cfg.p;
    j["seed"] = cfg.seed;
    json arr = json::array();
    for (const InstabilityRow& r : rows) {
      arr.push_back({{"n", r.n},
                     {"median_eps", r.median_eps},
                     {"mean_eps", r.mean_eps},
                     {"q25", r.q25},
                     {"q75", r.q75},
                     {"degenerate_trials", r.degenerate_trials}});
    }
    j["rows"] = arr;
    write_text_file_atomic(o.out, j.dump(2) + "\n");
  } else {
    write_text_file_atomic(o.out, instability_to_csv(cfg, rows));
  }

  json summary;
  summary["command"] = "instability";
  summary["distribution"] = distribution_name(cfg.distribution);
  summary["rows"] = rows.size();
  summary["artifact"] = o.out;
  std::string human = "instability " + std::string(distribution_name(cfg.distribution)) + ":";
  for (const InstabilityRow& r : rows)
    human += " n=" + std::to_string(r.n) + " median=" + format_double(r.median_eps);
  emit(g, summary, human + " -> " + o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// rp-stats
// ---------------------------------------------------------------------------

const std::vector<MethodDoc>& rp_stats_docs() {
  static const std::vector<MethodDoc> docs = {
      {"table",
       "for each n: d = ceil(ln(n)/eps^2); report the mean diagonal and off-diagonal entry "
       "of T^t T, the spectral norms of s T T^t - I for s in {1/n, 1/d, 1}, and the Monte "
       "Carlo mean of ||Tu||^2/||u||^2 over fresh projections of a fixed unit vector"},
  };
  return docs;
}

struct RpStatsOpts {
  std::string n_grid;
  double eps = 0.2;
  std::size_t samples = 1000;
  std::string out;
  bool describe = false;
};

int run_rp_stats(const RpStatsOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, rp_stats_docs(), "", "rp-stats")) return 0;
  const std::uint64_t seed = require_seed(g, "rp-stats");
  need(!o.n_grid.empty(), "rp-stats needs --n (comma-separated source dimensions)");
  need(!o.out.empty(), "rp-stats needs --out");
  need(o.eps > 0.0 && o.eps < 1.0, "rp-stats needs --eps in (0, 1)");
  need(o.samples >= 1, "rp-stats needs --samples >= 1");

  const std::vector<std::size_t> grid = size_list(o.n_grid, "--n");
  for (const std::size_t n : grid) need(n >= 2, "--n entries must be >= 2");

  const Rng master(seed);
  std::string csv =
      "n,d,eps,samples,seed,diag_mean,offdiag_mean,norm_over_n,norm_over_d,norm_raw,"
      "norm_ratio_mean\n";
  json arr = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t n = grid[i];
    const IdentityStats st = identity_stats(n, o.eps, master.split(2 * i).seed());
    const double ratio =
        norm_preservation_stat(n, st.d, o.samples, master.split(2 * i + 1).seed());
    csv += std::to_string(st.n) + "," + std::to_string(st.d) + "," + format_double(o.eps) +
           "," + std::to_string(o.samples) + "," + std::to_string(seed) + "," +
           format_double(st.diag_mean) + "," + format_double(st.offdiag_mean) + "," +
           format_double(st.norm_TTt_over_n) + "," + format_double(st.norm_TTt_over_d) +
           "," + format_double(st.norm_TTt_raw) + "," + format_double(ratio) + "\n";
    arr.push_back({{"n", st.n},
                   {"d", st.d},
                   {"diag_mean", st.diag_mean},
                   {"offdiag_mean", st.offdiag_mean},
                   {"norm_over_n", st.norm_TTt_over_n},
                   {"norm_over_d", st.norm_TTt_over_d},
                   {"norm_raw", st.norm_TTt_raw},
                   {"norm_ratio_mean", ratio}});
  }

  if (g.format == "json") {
    json j;
    j["eps"] = o.eps;
    j["samples"] = o.samples;
    j["seed"] = seed;
    j["rows"] = arr;
    write_text_file_atomic(o.out, j.dump(2) + "\n");
  } else {
    write_text_file_atomic(o.out, csv);
  }

  json summary;
  summary["command"] = "rp-stats";
  summary["rows"] = grid.size();
  summary["artifact"] = o.out;
  emit(g, summary,
       "rp-stats: " + std::to_string(grid.size()) + " dimension(s) -> " + o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// nlp
// ---------------------------------------------------------------------------

const std::vector<MethodDoc>& nlp_docs() {
  static const std::vector<MethodDoc> docs = {
      {"pipeline",
       "clean the text; sigma picks the sentence set (small = sentences sharing an n-gram "
       "with another sentence, large = all cleaned sentences); mu turns each sentence into "
       "a vector (inc = n-gram incidence row; uie/qrt/sdp = a realization of the sentence's "
       "graph of words, stacked column-major and zero-padded); rho reduces the stacked "
       "matrix (pca or random projection); the ground truth labels come from k-means on the "
       "reduced vectors or from the modularity communities of the sentence graph, encoded "
       "on the grid {0, 1/(h-1), ..., 1}; one network is trained per (input family, output "
       "family x truth) pairing and the test losses form the cross-table"},
  };
  return docs;
}

struct NlpOpts {
  std::string corpus;
  std::string sigma = "small";
  std::string mu = "inc,uie,qrt,sdp";
  std::string rho = "pca";
  std::string truth = "kmeans,graph";
  std::size_t clusters = 3;
  std::size_t dim = 10;
  std::size_t epochs = 500;
  std::size_t batch = 4;
  std::size_t hidden = 20;
  std::size_t patience = 50;
  double lr = 1e-2;
  std::size_t restarts = 3;
  std::size_t realize_iters = 2000;
  double sdp_tol = 1e-6;
  std::size_t sdp_iters = 2000;
  std::string out;
  bool describe = false;
};

struct NlpFamily {
  std::string tag;
  VectorMethod method = VectorMethod::inc;
  ReductionMethod reduction = ReductionMethod::pca;
  std::size_t gidx = 0;  // stable stream index over the full method grid
  Matrix x;
  std::vector<std::vector<double>> y_by_truth;  // parallel to the truth list
};

int run_nlp(const NlpOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, nlp_docs(), "", "nlp")) return 0;
  const std::uint64_t seed = require_seed(g, "nlp");
  need(!o.corpus.empty(), "nlp needs --corpus");
  need(!o.out.empty(), "nlp needs --out");
  need(o.sigma == "small" || o.sigma == "large", "--sigma must be small or large");
  need(o.epochs >= 1 && o.batch >= 1, "--epochs and --batch must be >= 1");

  std::vector<VectorMethod> methods;
  for (const std::string& name : comma_list(o.mu, "--mu")) {
    try {
      methods.push_back(vector_method_from_name(name));
    } catch (const Error&) {
      throw UsageError{"unknown --mu entry '" + name + "' (inc | uie | qrt | sdp)"};
    }
  }
  std::vector<ReductionMethod> reductions;
  for (const std::string& name : comma_list(o.rho, "--rho")) {
    try {
      reductions.push_back(reduction_method_from_name(name));
    } catch (const Error&) {
      throw UsageError{"unknown --rho entry '" + name + "' (pca | rp)"};
    }
  }
  std::vector<GroundTruth> truths;
  std::vector<std::string> truth_names;
  for (const std::string& name : comma_list(o.truth, "--truth")) {
    if (name == "kmeans") {
      truths.push_back(GroundTruth::kmeans);
    } else if (name == "graph" || name == "sentence_graph") {
      truths.push_back(GroundTruth::sentence_graph);
    } else {
      throw UsageError{"unknown --truth entry '" + name + "' (kmeans | graph)"};
    }
    truth_names.push_back(name == "sentence_graph" ? "graph" : name);
  }

  const std::string raw = read_text_file(o.corpus);
  const Corpus cleaned = clean_and_split(raw, 3);
  const Corpus corpus = o.sigma == "small" ? small_sentence_set(cleaned) : cleaned;

  const Rng master(seed);
  std::vector<NlpFamily> families;
  for (const VectorMethod m : methods) {
    for (const ReductionMethod r : reductions) {
      NlpFamily fam;
      fam.method = m;
      fam.reduction = r;
      fam.tag = vector_method_name(m) + ":" + reduction_method_name(r);
      fam.gidx = static_cast<std::size_t>(m) * 2 + static_cast<std::size_t>(r);
      TrainingSetConfig tc;
      tc.method = m;
      tc.reduction = r;
      tc.realization_dim = o.dim;
      tc.clusters = o.clusters;
      tc.realize_restarts = o.restarts;
      tc.realize_max_iterations = o.realize_iters;
      tc.sdp_tolerance = o.sdp_tol;
      tc.sdp_max_iterations = o.sdp_iters;
      tc.sigma_tag = o.sigma;
      tc.seed = master.split(fam.gidx).seed();
      for (std::size_t t = 0; t < truths.size(); ++t) {
        tc.truth = truths[t];
        TrainingSet ts = build_training_set(corpus, tc);
        if (t == 0) fam.x = std::move(ts.x);
        fam.y_by_truth.push_back(std::move(ts.y));
      }
      families.push_back(std::move(fam));
    }
  }

  // One cell per (input family, output family, truth); the cell seed depends
  // only on the stable grid indices, never on list order or thread timing.
  struct Cell {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t truth = 0;
  };
  std::vector<Cell> plan;
  for (std::size_t i = 0; i < families.size(); ++i)
    for (std::size_t j = 0; j < families.size(); ++j)
      for (std::size_t t = 0; t < truths.size(); ++t) plan.push_back({i, j, t});

  std::vector<ExperimentCell> cells(plan.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= plan.size()) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        const Cell& c = plan[idx];
        const NlpFamily& in = families[c.in];
        const NlpFamily& out = families[c.out];
        TrainConfig cfg;
        cfg.hidden = o.hidden;
        cfg.epochs = o.epochs;
        cfg.batch = o.batch;
        cfg.learning_rate = o.lr;
        cfg.patience = o.patience;
        cfg.seed =
            master.split(100 + in.gidx * 16 + out.gidx * 2 + c.truth).seed();
        const TrainResult r = train(in.x, out.y_by_truth[c.truth], cfg);
        ExperimentCell& cell = cells[idx];
        cell.input_tag = in.tag;
        cell.output_tag = out.tag;
        cell.truth = truth_names[c.truth];
        cell.diagonal = in.tag == out.tag;
        cell.test_loss = r.report.test_loss;
        cell.epochs = r.report.epochs;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const std::size_t threads = std::min(g.jobs, plan.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  write_text_file_atomic(o.out, experiment_to_csv(cells));

  json summary;
  summary["command"] = "nlp";
  summary["sentences"] = corpus.sentences.size();
  json tags = json::array();
  for (const NlpFamily& fam : families) tags.push_back(fam.tag);
  summary["families"] = tags;
  summary["truths"] = truth_names;
  summary["cells"] = cells.size();
  summary["artifact"] = o.out;
  emit(g, summary,
       "nlp: " + std::to_string(corpus.sentences.size()) + " sentences, " +
           std::to_string(families.size()) + " families, " + std::to_string(cells.size()) +
           " cells -> " + o.out);
  return 0;
}

// ---------------------------------------------------------------------------
// ann-train / ann-eval
// ---------------------------------------------------------------------------

const std::vector<MethodDoc>& ann_train_docs() {
  static const std::vector<MethodDoc> docs = {
      {"network",
       "one rectified hidden layer and a sigmoid output; minibatch backpropagation with "
       "adaptive moment estimates on a seeded 35/35/30 train/validation/test split; the "
       "best-on-validation parameters are kept and scored on the test split"},
  };
  return docs;
}

const std::vector<MethodDoc>& ann_eval_docs() {
  static const std::vector<MethodDoc> docs = {
      {"loss", "mean over rows of |y(x_i) - y_i| for a stored network"},
  };
  return docs;
}

struct AnnTrainOpts {
  std::string in_x;
  std::string in_y;
  std::string out;
  std::string report;
  std::size_t hidden = 20;
  std::size_t epochs = 1000;
  std::size_t batch = 32;
  std::size_t patience = 50;
  double lr = 1e-3;
  bool describe = false;
};

std::vector<double> read_target_column(const std::string& path, const char* op) {
  const Matrix m = read_matrix_csv(path);
  require(m.cols() == 1, errc::bad_value, op,
          "target file must have exactly one column, got " + std::to_string(m.cols()));
  std::vector<double> y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = m(i, 0);
  return y;
}

int run_ann_train(const AnnTrainOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, ann_train_docs(), "", "ann-train")) return 0;
  const std::uint64_t seed = require_seed(g, "ann-train");
  need(!o.in_x.empty(), "ann-train needs --in-x (feature CSV)");
  need(!o.in_y.empty(), "ann-train needs --in-y (single-column target CSV)");
  need(!o.out.empty(), "ann-train needs --out (network JSON)");
  need(o.epochs >= 1 && o.batch >= 1, "--epochs and --batch must be >= 1");

  const Matrix x = read_matrix_csv(o.in_x);
  const std::vector<double> y = read_target_column(o.in_y, "cli.ann_train");

  TrainConfig cfg;
  cfg.hidden = o.hidden;
  cfg.epochs = o.epochs;
  cfg.batch = o.batch;
  cfg.learning_rate = o.lr;
  cfg.patience = o.patience;
  cfg.seed = seed;
  const TrainResult r = train(x, y, cfg);

  write_text_file_atomic(o.out, network_to_json(r.net));
  if (!o.report.empty()) write_text_file_atomic(o.report, train_report_to_json(r.report));

  json summary;
  summary["command"] = "ann-train";
  summary["rows"] = x.rows();
  summary["test_loss"] = r.report.test_loss;
  summary["epochs"] = r.report.epochs;
  summary["best_epoch"] = r.report.best_epoch;
  summary["artifact"] = o.out;
  emit(g, summary,
       "ann-train: test loss " + format_double(r.report.test_loss) + " after " +
           std::to_string(r.report.epochs) + " epoch(s) -> " + o.out);
  return 0;
}

struct AnnEvalOpts {
  std::string net;
  std::string in_x;
  std::string in_y;
  std::string out;
  bool describe = false;
};

int run_ann_eval(const AnnEvalOpts& o, const GlobalOpts& g) {
  if (describe(o.describe, ann_eval_docs(), "", "ann-eval")) return 0;
  need(!o.net.empty(), "ann-eval needs --net (network JSON)");
  need(!o.in_x.empty(), "ann-eval needs --in-x (feature CSV)");
  need(!o.in_y.empty(), "ann-eval needs --in-y (single-column target CSV)");

  const Network net = network_from_json(read_text_file(o.net));
  const Matrix x = read_matrix_csv(o.in_x);
  const std::vector<double> y = read_target_column(o.in_y, "cli.ann_eval");
  const double value = cumulative_loss(net, x, y);

  json summary;
  summary["command"] = "ann-eval";
  summary["rows"] = x.rows();
  summary["cumulative_loss"] = value;
  if (!o.out.empty()) {
    json artifact;
    artifact["cumulative_loss"] = value;
    artifact["rows"] = x.rows();
    write_text_file_atomic(o.out, artifact.dump(2) + "\n");
    summary["artifact"] = o.out;
  }
  emit(g, summary, "ann-eval: cumulative loss " + format_double(value));
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// main
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"dgkit: seeded distance-geometry experiments on weighted graphs"};
  app.require_subcommand(0, 1);

  GlobalOpts g;
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value,
                     "random seed; required by every stochastic subcommand or method");
  app.add_option("--format", g.format, "summary/artifact form where both exist (csv | json)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--quiet", g.quiet, "suppress the stdout summary");
  app.add_option("--jobs", g.jobs,
                 "worker threads across independent trainings (nlp only); results do not "
                 "depend on the thread count")
      ->check(CLI::PositiveNumber);
  bool describe_all = false;
  app.add_flag("--describe", describe_all, "print the formula every method implements");

  RealizeOpts ro;
  CLI::App* realize =
      app.add_subcommand("realize", "realize a weighted graph as points in R^K");
  realize->add_option("--method", ro.method,
                      "uie | mds | pca | isomap | qrt | sdp | ddp-primal | ddp-dual | "
                      "barvinok");
  realize->add_option("--dim", ro.dim, "target dimension K");
  realize->add_option("--in", ro.in, "graph file (edge list, or JSON with .json)");
  realize->add_option("--out", ro.out, "realization CSV, one row per vertex");
  realize->add_option("--restarts", ro.restarts, "descent restarts (qrt 10, barvinok 1)");
  realize->add_option("--max-iter", ro.max_iter,
                      "iteration cap (descent 5000, semidefinite solver 20000)");
  realize->add_option("--tol", ro.tol, "solver tolerance (semidefinite solver 1e-7)");
  realize->add_option("--gamma", ro.gamma, "trace weight of the sdp objective");
  realize->add_flag("--describe", ro.describe, "print the formulas and exit");

  ReduceOpts uo;
  CLI::App* reduce = app.add_subcommand("reduce", "reduce the columns of a matrix");
  reduce->add_option("--method", uo.method, "pca | rp");
  reduce->add_option("--in", uo.in, "matrix CSV");
  reduce->add_option("--out", uo.out, "matrix CSV");
  reduce->add_option("--dim", uo.dim, "target dimension (overrides --eps/--residual)");
  reduce->add_option("--residual", uo.residual, "variance fraction kept by pca");
  reduce->add_option("--eps", uo.eps, "distortion target of the projection rule");
  reduce->add_option("--c", uo.c, "constant in the target-dimension rule");
  reduce->add_option("--density", uo.density, "fraction of projection entries kept");
  reduce->add_flag("--describe", uo.describe, "print the formulas and exit");

  ClusterOpts co;
  CLI::App* cluster = app.add_subcommand("cluster", "partition rows or graph vertices");
  cluster->add_option("--method", co.method, "kmeans | spectral | modularity");
  cluster->add_option("--in", co.in, "matrix CSV (kmeans) or graph file (others)");
  cluster->add_option("--out", co.out, "assignment artifact (csv lines or json)");
  cluster->add_option("--k", co.k, "cluster count (kmeans only)");
  cluster->add_option("--max-iter", co.max_iter, "assignment-pass cap for kmeans");
  cluster->add_flag("--describe", co.describe, "print the formulas and exit");

  InstabilityOpts io_;
  CLI::App* instability =
      app.add_subcommand("instability", "nearest-vs-farthest contrast experiment");
  instability->add_option("--dims", io_.dims, "comma-separated dimensions, e.g. 10,100,1000");
  instability->add_option("--dist", io_.dist,
                          "uniform01 | standard_normal | exponential1");
  instability->add_option("--ell", io_.ell, "reference points per trial");
  instability->add_option("--trials", io_.trials, "trials per dimension");
  instability->add_option("--p", io_.p, "distance exponent");
  instability->add_option("--out", io_.out, "table artifact (csv or json)");
  instability->add_flag("--describe", io_.describe, "print the formula and exit");

  RpStatsOpts so;
  CLI::App* rp_stats =
      app.add_subcommand("rp-stats", "random-projection identity and norm statistics");
  rp_stats->add_option("--n", so.n_grid, "comma-separated source dimensions");
  rp_stats->add_option("--eps", so.eps, "distortion target fixing d = ceil(ln(n)/eps^2)");
  rp_stats->add_option("--samples", so.samples, "Monte Carlo samples for the norm ratio");
  rp_stats->add_option("--out", so.out, "table artifact (csv or json)");
  rp_stats->add_flag("--describe", so.describe, "print the formula and exit");

  NlpOpts no;
  CLI::App* nlp = app.add_subcommand(
      "nlp", "text corpus -> sentence vectors -> trained networks -> loss cross-table");
  nlp->add_option("--corpus", no.corpus, "plain-text corpus file");
  nlp->add_option("--sigma", no.sigma, "sentence set: small | large");
  nlp->add_option("--mu", no.mu, "comma list of vector methods: inc | uie | qrt | sdp");
  nlp->add_option("--rho", no.rho, "comma list of reductions: pca | rp");
  nlp->add_option("--truth", no.truth, "comma list of ground truths: kmeans | graph");
  nlp->add_option("--k", no.clusters, "k-means truth cluster count (0 = auto)");
  nlp->add_option("--dim", no.dim, "realization dimension for uie/qrt/sdp");
  nlp->add_option("--epochs", no.epochs, "training epoch cap per cell");
  nlp->add_option("--batch", no.batch, "minibatch size");
  nlp->add_option("--lr", no.lr, "learning rate");
  nlp->add_option("--hidden", no.hidden, "hidden-layer width");
  nlp->add_option("--patience", no.patience, "early-stopping patience");
  nlp->add_option("--restarts", no.restarts, "quartic descent restarts per sentence");
  nlp->add_option("--realize-max-iter", no.realize_iters, "quartic descent iteration cap");
  nlp->add_option("--sdp-tol", no.sdp_tol, "semidefinite solver tolerance");
  nlp->add_option("--sdp-max-iter", no.sdp_iters, "semidefinite solver iteration cap");
  nlp->add_option("--out", no.out, "loss cross-table CSV");
  nlp->add_flag("--describe", no.describe, "print the pipeline description and exit");

  AnnTrainOpts to;
  CLI::App* ann_train = app.add_subcommand("ann-train", "train a network on CSV data");
  ann_train->add_option("--in-x", to.in_x, "feature matrix CSV");
  ann_train->add_option("--in-y", to.in_y, "single-column target CSV");
  ann_train->add_option("--out", to.out, "network JSON");
  ann_train->add_option("--report", to.report, "training report JSON (optional)");
  ann_train->add_option("--hidden", to.hidden, "hidden-layer width");
  ann_train->add_option("--epochs", to.epochs, "epoch cap");
  ann_train->add_option("--batch", to.batch, "minibatch size");
  ann_train->add_option("--lr", to.lr, "learning rate");
  ann_train->add_option("--patience", to.patience, "early-stopping patience");
  ann_train->add_flag("--describe", to.describe, "print the description and exit");

  AnnEvalOpts eo;
  CLI::App* ann_eval = app.add_subcommand("ann-eval", "score a stored network on CSV data");
  ann_eval->add_option("--net", eo.net, "network JSON");
  ann_eval->add_option("--in-x", eo.in_x, "feature matrix CSV");
  ann_eval->add_option("--in-y", eo.in_y, "single-column target CSV");
  ann_eval->add_option("--out", eo.out, "loss JSON (optional)");
  ann_eval->add_flag("--describe", eo.describe, "print the description and exit");

  for (CLI::App* sub : {realize, reduce, cluster, instability, rp_stats, nlp, ann_train,
                        ann_eval})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (realize->parsed()) return run_realize(ro, g);
    if (reduce->parsed()) return run_reduce(uo, g);
    if (cluster->parsed()) return run_cluster(co, g);
    if (instability->parsed()) return run_instability(io_, g);
    if (rp_stats->parsed()) return run_rp_stats(so, g);
    if (nlp->parsed()) return run_nlp(no, g);
    if (ann_train->parsed()) return run_ann_train(to, g);
    if (ann_eval->parsed()) return run_ann_eval(eo, g);
    if (describe_all) {
      describe(true, realize_docs(), "", "realize");
      describe(true, reduce_docs(), "", "reduce");
      describe(true, cluster_docs(), "", "cluster");
      describe(true, instability_docs(), "", "instability");
      describe(true, rp_stats_docs(), "", "rp-stats");
      describe(true, nlp_docs(), "", "nlp");
      describe(true, ann_train_docs(), "", "ann-train");
      describe(true, ann_eval_docs(), "", "ann-eval");
      return 0;
    }
    std::cerr << app.help() << std::flush;
    std::cerr << "usage error: a subcommand is required\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.message << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_data_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
