#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dg/graphs.hpp"
#include "dg/matrix.hpp"

namespace dg {

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

// A cleaned text: sentences as sequences of dense word ids. Ids index
// `vocabulary`, assigned by first appearance scanning retained sentences in
// order. Every retained sentence has at least `ngram_order` words, so every
// sentence owns at least one n-gram window.
struct Corpus {
  std::vector<std::vector<std::size_t>> sentences;
  std::vector<std::string> vocabulary;
  std::size_t ngram_order = 3;
};

// The built-in stopword list (sorted, lowercase) and its version tag. The
// list ships with the library so the same input text always cleans to the
// same corpus, release after release; any edit to the list must bump the
// version.
const std::vector<std::string>& stopword_list();
const char* stopword_list_version();
bool is_stopword(const std::string& word);

// Deterministic cleaning: lowercase the text, split sentences on [.?!;],
// tokenize each sentence into maximal [a-z']+ runs, drop stopwords and
// tokens shorter than two characters, then keep only sentences with at
// least ngram_order surviving words. Throws empty_corpus when nothing
// survives.
Corpus clean_and_split(const std::string& raw, std::size_t ngram_order = 3);

// The "small" sentence set: sentences containing at least one n-gram that
// occurs in two or more sentences (an n-gram repeated inside a single
// sentence does not count as shared). The result is a fresh corpus with a
// re-densified vocabulary. Throws empty_corpus when no sentence qualifies.
Corpus small_sentence_set(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Incidence vectors
// ---------------------------------------------------------------------------

// One 0/1 row per sentence over the corpus n-gram dictionary. The dictionary
// orders distinct n-grams by first appearance (sentences in order, windows
// left to right).
Matrix incidence_vectors(const Corpus& corpus);

// Two classical ways to present a weighted graph as vectors: row u lists the
// weights to every vertex (0 where there is no edge), and the edge vector
// lists the weight of every unordered pair {i,j}, i<j, in lexicographic
// order (n(n-1)/2 slots, 0 for non-edges).
struct GraphIncidence {
  Matrix vertex_vectors;            // n x n
  std::vector<double> edge_vector;  // n(n-1)/2
};
GraphIncidence graph_incidence_vectors(const WeightedGraph& g);

// ---------------------------------------------------------------------------
// Graphs from text
// ---------------------------------------------------------------------------

// Graph of words of one sentence: vertices are the distinct word ids, and
// the weight of {u,v} counts the sliding n-gram windows (length `order`)
// containing both u and v. Loops are never created; a window containing a
// repeated word contributes once per distinct pair. Throws too_short when
// the sentence has fewer than `order` words.
WeightedGraph graph_of_words(const std::vector<std::size_t>& sentence, std::size_t order);

// Graph over sentences. First build the whole-text graph of words (windows
// of every sentence pooled, repeated words contracted): c_uv counts all
// windows containing both u and v. Sentences s != t are adjacent iff some
// word pair {u,v} with c_uv > 0 has u in one sentence and v in the other;
// the edge weight sums c_uv over every such pair, each pair counted once
// per sentence pair. Word pairs inside a single sentence never create a
// loop. Throws empty_input when the corpus has fewer than two sentences.
WeightedGraph sentence_graph(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Training-set assembly
// ---------------------------------------------------------------------------

// Stack each p_i x K realization into one row by columns (all of column 1,
// then all of column 2, ...), zero-padded on the right to the widest row
// n^ = max p_i * K. Row i depends only on realization i. Throws mixed_k
// when the realizations disagree on K and empty_input on an empty list.
Matrix stack_and_pad(const std::vector<Matrix>& realizations);

// Map cluster ids {0..h-1} onto the uniform grid {0, 1/(h-1), ..., 1}. The
// map is injective and exactly onto the grid. Throws bad_label_range when
// h < 2 or an id falls outside {0..h-1}.
std::vector<double> encode_labels(const std::vector<std::size_t>& assignment, std::size_t h);

// How a sentence becomes a vector: n-gram incidence row, or a realization
// of its graph of words (max-norm isometric embedding truncated to K
// columns, quartic-merit descent, or the semidefinite relaxation's Gram
// factor).
enum class VectorMethod { inc, uie, qrt, sdp };
// How the stacked matrix is reduced: principal components or a random
// projection.
enum class ReductionMethod { pca, rp };
// Where the labels come from: k-means on the reduced vectors, or greedy
// modularity communities of the sentence graph.
enum class GroundTruth { kmeans, sentence_graph };

std::string vector_method_name(VectorMethod m);
std::string reduction_method_name(ReductionMethod r);
std::string ground_truth_name(GroundTruth t);
VectorMethod vector_method_from_name(const std::string& name);
ReductionMethod reduction_method_from_name(const std::string& name);
GroundTruth ground_truth_from_name(const std::string& name);

struct TrainingSetConfig {
  VectorMethod method = VectorMethod::inc;
  ReductionMethod reduction = ReductionMethod::pca;
  GroundTruth truth = GroundTruth::kmeans;
  std::size_t realization_dim = 10;  // K for uie/qrt/sdp
  // Cluster count for k-means ground truth; 0 picks the smallest k in 2..8
  // whose clusters all have at least two members (falling back to 2).
  std::size_t clusters = 3;
  double rp_epsilon = 0.15;  // random-projection distortion target
  double rp_c = 1.8;         // constant in the target-dimension rule
  double pca_residual = 0.999;  // variance fraction kept by pca
  std::size_t realize_restarts = 3;        // quartic descent restarts
  std::size_t realize_max_iterations = 2000;
  double sdp_tolerance = 1e-6;
  std::size_t sdp_max_iterations = 2000;
  std::uint64_t seed = 0;
  std::string sigma_tag = "small";  // sentence-set tag recorded in provenance
};

struct TrainingSet {
  Matrix x;               // one row per sentence
  std::vector<double> y;  // targets on the {j/(h-1)} grid
  std::string sigma;      // sentence-set tag
  std::string mu;         // vector-method tag
  std::string rho;        // reduction tag
  std::size_t clusters = 0;  // h
  std::uint64_t seed = 0;
};

// The stacked, padded, not-yet-reduced matrix for the chosen method: n-gram
// incidence rows for inc, otherwise one realization of each sentence's
// graph of words.
Matrix method_vectors(const Corpus& corpus, const TrainingSetConfig& cfg);

// Full pipeline: method vectors, reduction, ground-truth clustering, label
// encoding. Deterministic in (corpus, cfg).
TrainingSet build_training_set(const Corpus& corpus, const TrainingSetConfig& cfg);

std::string training_set_provenance_json(const TrainingSet& ts);

// On-disk layout: X and Y as CSV, provenance as a JSON sidecar. All three
// writes are atomic (temp file + rename).
void write_training_set(const TrainingSet& ts, const std::filesystem::path& x_csv,
                        const std::filesystem::path& y_csv,
                        const std::filesystem::path& provenance_json);

}  // namespace dg
