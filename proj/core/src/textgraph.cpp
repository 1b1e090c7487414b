#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dg/cluster.hpp"
#include "dg/conic.hpp"
#include "dg/dimred.hpp"
#include "dg/embed.hpp"
#include "dg/error.hpp"
#include "dg/io.hpp"
#include "dg/linalg.hpp"
#include "dg/realize.hpp"
#include "dg/rng.hpp"
#include "dg/textgraph.hpp"

namespace dg {

namespace {

using Ngram = std::vector<std::size_t>;

// All length-`order` windows of a sentence, left to right.
std::vector<Ngram> windows_of(const std::vector<std::size_t>& sentence, std::size_t order) {
  std::vector<Ngram> out;
  if (sentence.size() < order || order == 0) return out;
  for (std::size_t i = 0; i + order <= sentence.size(); ++i)
    out.emplace_back(sentence.begin() + static_cast<std::ptrdiff_t>(i),
                     sentence.begin() + static_cast<std::ptrdiff_t>(i + order));
  return out;
}

// Distinct word ids of one window, ascending.
std::vector<std::size_t> distinct_sorted(const Ngram& window) {
  std::vector<std::size_t> ids = window;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Corpus corpus_from_token_sentences(const std::vector<std::vector<std::string>>& sentences,
                                   std::size_t ngram_order) {
  Corpus corpus;
  corpus.ngram_order = ngram_order;
  std::map<std::string, std::size_t> id_of;
  for (const auto& tokens : sentences) {
    std::vector<std::size_t> ids;
    ids.reserve(tokens.size());
    for (const auto& word : tokens) {
      auto it = id_of.find(word);
      if (it == id_of.end()) {
        it = id_of.emplace(word, corpus.vocabulary.size()).first;
        corpus.vocabulary.push_back(word);
      }
      ids.push_back(it->second);
    }
    corpus.sentences.push_back(std::move(ids));
  }
  return corpus;
}

}  // namespace

Corpus clean_and_split(const std::string& raw, std::size_t ngram_order) {
  const char* op = "clean_and_split";
  require(ngram_order >= 1, errc::bad_value, op, "n-gram order must be at least 1");

  std::vector<std::vector<std::string>> kept;
  std::vector<std::string> tokens;
  std::string token;

  auto flush_token = [&] {
    if (token.size() >= 2 && !is_stopword(token)) tokens.push_back(token);
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (tokens.size() >= ngram_order) kept.push_back(tokens);
    tokens.clear();
  };

  for (const char raw_c : raw) {
    const unsigned char u = static_cast<unsigned char>(raw_c);
    const char c = static_cast<char>(std::tolower(u));
    if ((c >= 'a' && c <= 'z') || c == '\'') {
      token.push_back(c);
    } else if (c == '.' || c == '?' || c == '!' || c == ';') {
      flush_sentence();
    } else {
      flush_token();
    }
  }
  flush_sentence();  // text need not end with a terminator

  require(!kept.empty(), errc::empty_corpus, op,
          "no sentence with at least " + std::to_string(ngram_order) +
              " words survived cleaning");
  return corpus_from_token_sentences(kept, ngram_order);
}

Corpus small_sentence_set(const Corpus& corpus) {
  const char* op = "small_sentence_set";
  // How many sentences contain each n-gram (each sentence counted once).
  std::map<Ngram, std::size_t> sentences_with;
  std::vector<std::vector<Ngram>> per_sentence(corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    std::vector<Ngram> distinct = windows_of(corpus.sentences[i], corpus.ngram_order);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (const Ngram& g : distinct) ++sentences_with[g];
    per_sentence[i] = std::move(distinct);
  }

  std::vector<std::vector<std::string>> kept;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    const bool shared = std::any_of(per_sentence[i].begin(), per_sentence[i].end(),
                                    [&](const Ngram& g) { return sentences_with[g] >= 2; });
    if (!shared) continue;
    std::vector<std::string> tokens;
    tokens.reserve(corpus.sentences[i].size());
    for (const std::size_t id : corpus.sentences[i]) tokens.push_back(corpus.vocabulary.at(id));
    kept.push_back(std::move(tokens));
  }
  require(!kept.empty(), errc::empty_corpus, op, "no sentence shares an n-gram with another");
  return corpus_from_token_sentences(kept, corpus.ngram_order);
}

Matrix incidence_vectors(const Corpus& corpus) {
  std::map<Ngram, std::size_t> column_of;
  std::vector<std::vector<std::size_t>> hits(corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    for (const Ngram& g : windows_of(corpus.sentences[i], corpus.ngram_order)) {
      auto it = column_of.find(g);
      if (it == column_of.end()) it = column_of.emplace(g, column_of.size()).first;
      hits[i].push_back(it->second);
    }
  }
  Matrix x(corpus.sentences.size(), column_of.size());
  for (std::size_t i = 0; i < hits.size(); ++i)
    for (const std::size_t c : hits[i]) x(i, c) = 1.0;
  return x;
}

GraphIncidence graph_incidence_vectors(const WeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  GraphIncidence out;
  out.vertex_vectors = Matrix(n, n);
  out.edge_vector.assign(n * (n - 1) / 2, 0.0);
  // Slot of pair {i,j}, i<j, in lexicographic order.
  auto slot = [n](std::size_t i, std::size_t j) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  };
  for (const Edge& e : g.edges()) {
    out.vertex_vectors(e.u, e.v) = e.w;
    out.vertex_vectors(e.v, e.u) = e.w;
    const auto [i, j] = std::minmax(e.u, e.v);
    out.edge_vector[slot(i, j)] = e.w;
  }
  return out;
}

WeightedGraph graph_of_words(const std::vector<std::size_t>& sentence, std::size_t order) {
  const char* op = "graph_of_words";
  require(order >= 1, errc::bad_value, op, "n-gram order must be at least 1");
  require(sentence.size() >= order, errc::too_short, op,
          "sentence has " + std::to_string(sentence.size()) + " words, need " +
              std::to_string(order));

  std::map<std::size_t, std::size_t> vertex_of;  // word id -> local vertex
  std::size_t vertices = 0;
  for (const std::size_t id : sentence)
    if (vertex_of.emplace(id, vertices).second) ++vertices;

  std::map<std::pair<std::size_t, std::size_t>, double> weight;
  for (const Ngram& window : windows_of(sentence, order)) {
    const std::vector<std::size_t> ids = distinct_sorted(window);
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        auto [u, v] = std::minmax(vertex_of.at(ids[a]), vertex_of.at(ids[b]));
        weight[{u, v}] += 1.0;
      }
  }

  std::vector<Edge> edges;
  edges.reserve(weight.size());
  for (const auto& [pair, w] : weight) edges.push_back({pair.first, pair.second, w});
  return WeightedGraph(vertices, edges);
}

WeightedGraph sentence_graph(const Corpus& corpus) {
  const char* op = "sentence_graph";
  const std::size_t s = corpus.sentences.size();
  require(s >= 2, errc::empty_input, op, "need at least two sentences");

  // Whole-text graph of words: c_uv counts the windows (from any sentence)
  // containing both u and v; repeated words are contracted because word ids
  // are global.
  std::map<std::pair<std::size_t, std::size_t>, double> c;
  for (const auto& sentence : corpus.sentences)
    for (const Ngram& window : windows_of(sentence, corpus.ngram_order)) {
      const std::vector<std::size_t> ids = distinct_sorted(window);
      for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b) c[{ids[a], ids[b]}] += 1.0;
    }

  // Which sentences contain each word.
  std::vector<std::vector<std::size_t>> containing(corpus.vocabulary.size());
  for (std::size_t i = 0; i < s; ++i) {
    std::vector<std::size_t> ids = corpus.sentences[i];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (const std::size_t id : ids) containing[id].push_back(i);
  }

  // For every word pair {u,v} with c_uv > 0, add c_uv to every sentence pair
  // {s,t}, s != t, with u in one sentence and v in the other. The stamp map
  // makes each word pair contribute at most once per sentence pair, even
  // when both sentences contain both words.
  std::map<std::pair<std::size_t, std::size_t>, double> w;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> stamp;
  std::size_t word_edge = 0;
  for (const auto& [pair, cuv] : c) {
    ++word_edge;
    for (const std::size_t a : containing[pair.first])
      for (const std::size_t b : containing[pair.second]) {
        if (a == b) continue;
        const auto key = std::minmax(a, b);
        auto [it, fresh] = stamp.emplace(key, word_edge);
        if (!fresh) {
          if (it->second == word_edge) continue;
          it->second = word_edge;
        }
        w[key] += cuv;
      }
  }

  std::vector<Edge> edges;
  edges.reserve(w.size());
  for (const auto& [pair, weight] : w) edges.push_back({pair.first, pair.second, weight});
  return WeightedGraph(s, edges);
}

Matrix stack_and_pad(const std::vector<Matrix>& realizations) {
  const char* op = "stack_and_pad";
  require(!realizations.empty(), errc::empty_input, op, "no realizations to stack");
  const std::size_t k = realizations.front().cols();
  std::size_t width = 0;
  for (const Matrix& r : realizations) {
    require(r.cols() == k, errc::mixed_k, op,
            "realizations mix " + std::to_string(k) + " and " + std::to_string(r.cols()) +
                " columns");
    width = std::max(width, r.rows() * k);
  }
  Matrix out(realizations.size(), width);
  for (std::size_t i = 0; i < realizations.size(); ++i) {
    const Matrix& r = realizations[i];
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t p = 0; p < r.rows(); ++p) out(i, c * r.rows() + p) = r(p, c);
  }
  return out;
}

std::vector<double> encode_labels(const std::vector<std::size_t>& assignment, std::size_t h) {
  const char* op = "encode_labels";
  require(h >= 2, errc::bad_label_range, op, "need at least two label values");
  std::vector<double> y;
  y.reserve(assignment.size());
  for (const std::size_t id : assignment) {
    require(id < h, errc::bad_label_range, op,
            "label " + std::to_string(id) + " outside [0, " + std::to_string(h) + ")");
    y.push_back(static_cast<double>(id) / static_cast<double>(h - 1));
  }
  return y;
}

std::string vector_method_name(VectorMethod m) {
  switch (m) {
    case VectorMethod::inc: return "inc";
    case VectorMethod::uie: return "uie";
    case VectorMethod::qrt: return "qrt";
    case VectorMethod::sdp: return "sdp";
  }
  fail(errc::bad_value, "vector_method_name", "unknown method");
}

std::string reduction_method_name(ReductionMethod r) {
  switch (r) {
    case ReductionMethod::pca: return "pca";
    case ReductionMethod::rp: return "rp";
  }
  fail(errc::bad_value, "reduction_method_name", "unknown reduction");
}

std::string ground_truth_name(GroundTruth t) {
  switch (t) {
    case GroundTruth::kmeans: return "kmeans";
    case GroundTruth::sentence_graph: return "sentence_graph";
  }
  fail(errc::bad_value, "ground_truth_name", "unknown ground truth");
}

VectorMethod vector_method_from_name(const std::string& name) {
  if (name == "inc") return VectorMethod::inc;
  if (name == "uie") return VectorMethod::uie;
  if (name == "qrt") return VectorMethod::qrt;
  if (name == "sdp") return VectorMethod::sdp;
  fail(errc::bad_value, "vector_method_from_name",
       "unknown method '" + name + "' (expected inc, uie, qrt or sdp)");
}

ReductionMethod reduction_method_from_name(const std::string& name) {
  if (name == "pca") return ReductionMethod::pca;
  if (name == "rp") return ReductionMethod::rp;
  fail(errc::bad_value, "reduction_method_from_name",
       "unknown reduction '" + name + "' (expected pca or rp)");
}

GroundTruth ground_truth_from_name(const std::string& name) {
  if (name == "kmeans") return GroundTruth::kmeans;
  if (name == "sentence_graph") return GroundTruth::sentence_graph;
  fail(errc::bad_value, "ground_truth_from_name",
       "unknown ground truth '" + name + "' (expected kmeans or sentence_graph)");
}

namespace {

// Realization of one sentence's graph of words as a p x K matrix.
Matrix realize_sentence(const WeightedGraph& g, const TrainingSetConfig& cfg,
                        std::uint64_t seed) {
  const std::size_t k = cfg.realization_dim;
  switch (cfg.method) {
    case VectorMethod::uie: {
      // Max-norm isometric rows live in p dimensions; keep the first K
      // coordinates (extra columns stay zero when p < K).
      const Matrix points = frechet_embed(g).points;
      Matrix out(points.rows(), k);
      for (std::size_t r = 0; r < points.rows(); ++r)
        for (std::size_t c = 0; c < std::min(k, points.cols()); ++c) out(r, c) = points(r, c);
      return out;
    }
    case VectorMethod::qrt: {
      DescentConfig dc;
      dc.max_iterations = cfg.realize_max_iterations;
      dc.restarts = cfg.realize_restarts;
      dc.seed = seed;
      return solve_quartic(g, k, dc).x;
    }
    case VectorMethod::sdp: {
      // The inequality-constrained relaxation stays feasible even when the
      // co-occurrence weights violate metric inequalities; the realization
      // is the Gram factor truncated to K columns.
      const SdpProblem problem = dgp_sdp(g, DgpSdpObjective::mixed);
      const SdpResult res = admm_sdp_solve(problem, cfg.sdp_tolerance, cfg.sdp_max_iterations);
      return realization_from_gram(res.x, k);
    }
    case VectorMethod::inc: break;  // handled by the caller
  }
  fail(errc::bad_value, "realize_sentence", "method has no per-sentence realization");
}

}  // namespace

Matrix method_vectors(const Corpus& corpus, const TrainingSetConfig& cfg) {
  if (cfg.method == VectorMethod::inc) return incidence_vectors(corpus);
  require(cfg.realization_dim >= 1, errc::bad_value, "method_vectors",
          "realization dimension must be at least 1");
  const Rng realize_rng = Rng(cfg.seed).split(0);
  std::vector<Matrix> realizations;
  realizations.reserve(corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    const WeightedGraph g = graph_of_words(corpus.sentences[i], corpus.ngram_order);
    realizations.push_back(realize_sentence(g, cfg, realize_rng.split(i).seed()));
  }
  return stack_and_pad(realizations);
}

namespace {

// The smallest k in 2..8 whose k-means clusters all have at least two
// members; falls back to k = 2. Never asks for more clusters than points.
Clustering auto_kmeans_truth(const Matrix& x, std::uint64_t seed) {
  const std::size_t top = std::min<std::size_t>(8, x.rows());
  Clustering fallback;
  for (std::size_t k = 2; k <= top; ++k) {
    Clustering c = kmeans(x, k, seed).clustering;
    if (k == 2) fallback = c;
    const std::vector<std::size_t> sizes = cluster_sizes(c);
    if (*std::min_element(sizes.begin(), sizes.end()) >= 2) return c;
  }
  return fallback;
}

}  // namespace

TrainingSet build_training_set(const Corpus& corpus, const TrainingSetConfig& cfg) {
  const char* op = "build_training_set";
  const Matrix stacked = method_vectors(corpus, cfg);
  const Rng master(cfg.seed);

  Matrix x;
  switch (cfg.reduction) {
    case ReductionMethod::pca: {
      const std::size_t k = pca_residual_dimension(stacked, cfg.pca_residual);
      x = pca_reduce(stacked, k);
      break;
    }
    case ReductionMethod::rp: {
      const std::size_t k = jll_dimension(stacked.rows(), {cfg.rp_epsilon, cfg.rp_c});
      const RandomProjection rp = make_rp(stacked.cols(), k, 1.0, master.split(1).seed());
      x = apply_rp(rp, stacked);
      break;
    }
  }

  Clustering truth;
  switch (cfg.truth) {
    case GroundTruth::kmeans: {
      const std::uint64_t seed = master.split(2).seed();
      truth = cfg.clusters == 0 ? auto_kmeans_truth(x, seed)
                                : kmeans(x, cfg.clusters, seed).clustering;
      break;
    }
    case GroundTruth::sentence_graph: {
      truth = greedy_modularity(sentence_graph(corpus));
      require(truth.k >= 2, errc::bad_label_range, op,
              "sentence-graph communities collapsed to a single cluster; labels need h >= 2");
      break;
    }
  }

  TrainingSet ts;
  ts.x = std::move(x);
  ts.y = encode_labels(truth.assignment, truth.k);
  ts.sigma = cfg.sigma_tag;
  ts.mu = vector_method_name(cfg.method);
  ts.rho = reduction_method_name(cfg.reduction);
  ts.clusters = truth.k;
  ts.seed = cfg.seed;
  return ts;
}

std::string training_set_provenance_json(const TrainingSet& ts) {
  nlohmann::json j;
  j["clusters"] = ts.clusters;
  j["cols"] = ts.x.cols();
  j["mu"] = ts.mu;
  j["rho"] = ts.rho;
  j["rows"] = ts.x.rows();
  j["seed"] = ts.seed;
  j["sigma"] = ts.sigma;
  return j.dump(2) + "\n";
}

void write_training_set(const TrainingSet& ts, const std::filesystem::path& x_csv,
                        const std::filesystem::path& y_csv,
                        const std::filesystem::path& provenance_json) {
  write_matrix_csv(x_csv, ts.x);
  Matrix y(ts.y.size(), 1);
  for (std::size_t i = 0; i < ts.y.size(); ++i) y(i, 0) = ts.y[i];
  write_matrix_csv(y_csv, y);
  write_text_file_atomic(provenance_json, training_set_provenance_json(ts));
}

}  // namespace dg
