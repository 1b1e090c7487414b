// Text cleaning, n-gram incidence, graphs of words, the sentence graph, and
// training-set assembly, checked against hand-enumerated windows and counts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dg/dimred.hpp"
#include "dg/error.hpp"
#include "dg/graphs.hpp"
#include "dg/io.hpp"
#include "dg/matrix.hpp"
#include "dg/textgraph.hpp"

using namespace dg;

namespace {

std::string fixture_text(const char* name) {
  return read_text_file(std::string(DGKIT_FIXTURE_DIR) + "/corpus/" + name);
}

std::vector<std::string> sentence_words(const Corpus& corpus, std::size_t i) {
  std::vector<std::string> words;
  for (const std::size_t id : corpus.sentences.at(i)) words.push_back(corpus.vocabulary.at(id));
  return words;
}

bool vocabulary_has(const Corpus& corpus, const std::string& word) {
  return std::find(corpus.vocabulary.begin(), corpus.vocabulary.end(), word) !=
         corpus.vocabulary.end();
}

// Weight of {u,v}, or 0 when absent.
double edge_weight(const WeightedGraph& g, std::size_t u, std::size_t v) {
  for (const Edge& e : g.edges())
    if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) return e.w;
  return 0.0;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.values() == b.values();
}

// The five-sentence miniature used by the pipeline tests: two ship sentences
// sharing a trigram, a third ship sentence, and two grape sentences, with
// disjoint vocabularies between the two themes.
Corpus mini_corpus() {
  return clean_and_split(
      "Silver ships sailed stormy seas. Silver ships sailed northern seas. "
      "Brave sailors rowed silver ships. Purple grapes filled wooden crates. "
      "Farmers crushed purple grapes slowly.",
      3);
}

}  // namespace

TEST_CASE("stopword list is sorted, versioned, and queryable") {
  const auto& words = stopword_list();
  CHECK(std::is_sorted(words.begin(), words.end()));
  CHECK(std::adjacent_find(words.begin(), words.end()) == words.end());
  CHECK(std::string(stopword_list_version()) == "1");
  CHECK(is_stopword("the"));
  CHECK(is_stopword("don't"));
  CHECK_FALSE(is_stopword("cat"));
  CHECK_FALSE(is_stopword("mountain"));
}

TEST_CASE("clean_and_split separates sentences on terminators") {
  const Corpus c = clean_and_split("The cat sat. A dog ran!", 2);
  REQUIRE(c.sentences.size() == 2);
  CHECK(sentence_words(c, 0) == std::vector<std::string>{"cat", "sat"});
  CHECK(sentence_words(c, 1) == std::vector<std::string>{"dog", "ran"});
  CHECK(c.vocabulary == std::vector<std::string>{"cat", "sat", "dog", "ran"});
  CHECK(c.ngram_order == 2);

  // With three-word windows both sentences fall below the minimum length.
  CHECK_THROWS_AS(clean_and_split("The cat sat. A dog ran!", 3), Error);
}

TEST_CASE("clean_and_split drops stopword-only sentences and short tokens") {
  const Corpus c = clean_and_split("It was here. Copper kettles whistle loudly.", 3);
  REQUIRE(c.sentences.size() == 1);
  CHECK(sentence_words(c, 0) ==
        std::vector<std::string>{"copper", "kettles", "whistle", "loudly"});

  // Case folding, punctuation as separators, repeated words sharing one id.
  const Corpus d = clean_and_split("A CAT, a big-cat, sat!", 2);
  REQUIRE(d.sentences.size() == 1);
  CHECK(d.sentences[0] == std::vector<std::size_t>{0, 1, 0, 2});
  CHECK(d.vocabulary == std::vector<std::string>{"cat", "big", "sat"});

  // Apostrophes stay inside tokens; a one-token sentence dies at order 2.
  const Corpus e = clean_and_split("Rover's bone isn't gone. What a day.", 2);
  REQUIRE(e.sentences.size() == 1);
  CHECK(sentence_words(e, 0) == std::vector<std::string>{"rover's", "bone", "gone"});
}

TEST_CASE("clean_and_split failure modes and determinism") {
  try {
    clean_and_split("", 3);
    FAIL("expected empty_corpus");
  } catch (const Error& err) {
    CHECK(err.code() == errc::empty_corpus);
  }
  CHECK_THROWS_AS(clean_and_split("the and or of", 3), Error);
  CHECK_THROWS_AS(clean_and_split("proper words here", 0), Error);

  const std::string text = fixture_text("field_notes.txt");
  const Corpus a = clean_and_split(text, 3);
  const Corpus b = clean_and_split(text, 3);
  CHECK(a.sentences == b.sentences);
  CHECK(a.vocabulary == b.vocabulary);
}

TEST_CASE("small_sentence_set keeps sentences sharing an n-gram") {
  const Corpus c = clean_and_split(
      "Red fox jumped over the wall. Red fox jumped again and again. "
      "Green turtles sleep all day long.",
      3);
  REQUIRE(c.sentences.size() == 3);
  const Corpus small = small_sentence_set(c);
  REQUIRE(small.sentences.size() == 2);
  CHECK(sentence_words(small, 0) == std::vector<std::string>{"red", "fox", "jumped", "wall"});
  CHECK(sentence_words(small, 1) == std::vector<std::string>{"red", "fox", "jumped"});
  CHECK(small.vocabulary == std::vector<std::string>{"red", "fox", "jumped", "wall"});

  // No sentence shares a trigram with another: nothing survives.
  const Corpus lonely = clean_and_split(
      "Orange comets streak skyward tonight. Quiet lanterns float downstream.", 3);
  try {
    small_sentence_set(lonely);
    FAIL("expected empty_corpus");
  } catch (const Error& err) {
    CHECK(err.code() == errc::empty_corpus);
  }
}

TEST_CASE("bundled corpus cleans to 36 sentences and filters to 30") {
  const Corpus full = clean_and_split(fixture_text("field_notes.txt"), 3);
  CHECK(full.sentences.size() == 36);
  for (const auto& s : full.sentences) CHECK(s.size() >= 3);

  const Corpus small = small_sentence_set(full);
  CHECK(small.sentences.size() == 30);
  // The six sentences without a repeated trigram lose their private words.
  for (const char* gone : {"hawk", "lake", "cellist", "trumpet", "honey", "yeast"})
    CHECK_FALSE(vocabulary_has(small, gone));
  for (const char* kept : {"river", "violin", "oven"}) CHECK(vocabulary_has(small, kept));
}

TEST_CASE("incidence_vectors marks n-gram membership per sentence") {
  // One sentence of exactly three words owns exactly one trigram.
  const Corpus single = clean_and_split("Dogs chase cats.", 3);
  const Matrix one = incidence_vectors(single);
  REQUIRE(one.rows() == 1);
  REQUIRE(one.cols() == 1);
  CHECK(one(0, 0) == 1.0);

  // Shared trigram lands in the same column for both sentences.
  const Corpus c = clean_and_split(
      "Red fox jumped over the wall. Red fox jumped again and again.", 3);
  const Matrix x = incidence_vectors(c);
  REQUIRE(x.rows() == 2);
  REQUIRE(x.cols() == 2);  // (red,fox,jumped) and (fox,jumped,wall)
  CHECK(x(0, 0) == 1.0);
  CHECK(x(0, 1) == 1.0);
  CHECK(x(1, 0) == 1.0);
  CHECK(x(1, 1) == 0.0);

  // A window repeated inside one sentence still yields a 0/1 entry.
  const Corpus rep = clean_and_split("Big dog big dog big.", 2);
  const Matrix y = incidence_vectors(rep);
  REQUIRE(y.rows() == 1);
  REQUIRE(y.cols() == 2);  // (big,dog) and (dog,big)
  CHECK(y(0, 0) == 1.0);
  CHECK(y(0, 1) == 1.0);
}

TEST_CASE("graph_incidence_vectors lists weights by vertex and by pair") {
  const GraphIncidence two = graph_incidence_vectors(WeightedGraph(2, {{0, 1, 5.0}}));
  REQUIRE(two.vertex_vectors.rows() == 2);
  CHECK(two.vertex_vectors(0, 0) == 0.0);
  CHECK(two.vertex_vectors(0, 1) == 5.0);
  CHECK(two.vertex_vectors(1, 0) == 5.0);
  CHECK(two.vertex_vectors(1, 1) == 0.0);
  CHECK(two.edge_vector == std::vector<double>{5.0});

  const GraphIncidence tri =
      graph_incidence_vectors(WeightedGraph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}));
  CHECK(tri.edge_vector == std::vector<double>{1.0, 1.0, 1.0});

  // Path 0-1-2: pair (0,2) is absent, slot order is (0,1),(0,2),(1,2).
  const GraphIncidence path =
      graph_incidence_vectors(WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
  CHECK(path.edge_vector == std::vector<double>{1.0, 0.0, 1.0});
  CHECK(path.vertex_vectors(1, 0) == 1.0);
  CHECK(path.vertex_vectors(1, 1) == 0.0);
  CHECK(path.vertex_vectors(1, 2) == 1.0);
  CHECK(path.vertex_vectors(0, 2) == 0.0);

  const GraphIncidence lone = graph_incidence_vectors(WeightedGraph(1, {}));
  CHECK(lone.vertex_vectors.rows() == 1);
  CHECK(lone.vertex_vectors(0, 0) == 0.0);
  CHECK(lone.edge_vector.empty());
}

TEST_CASE("graph_of_words counts windows containing both endpoints") {
  // Three words, one window: the unit triangle.
  const WeightedGraph tri = graph_of_words({0, 1, 2}, 3);
  CHECK(tri.vertex_count() == 3);
  CHECK(tri.edge_count() == 3);
  for (const Edge& e : tri.edges()) CHECK(e.w == 1.0);

  // Bigrams (a,b),(b,a),(a,b): one edge of weight 3.
  const WeightedGraph rep = graph_of_words({0, 1, 0, 1}, 2);
  CHECK(rep.vertex_count() == 2);
  CHECK(rep.edge_count() == 1);
  CHECK(edge_weight(rep, 0, 1) == 3.0);

  // Two trigrams of "a b c d" share the middle pair {b,c}.
  const WeightedGraph four = graph_of_words({0, 1, 2, 3}, 3);
  CHECK(four.vertex_count() == 4);
  CHECK(four.edge_count() == 5);
  CHECK(edge_weight(four, 1, 2) == 2.0);
  CHECK(edge_weight(four, 0, 1) == 1.0);
  CHECK(edge_weight(four, 0, 2) == 1.0);
  CHECK(edge_weight(four, 1, 3) == 1.0);
  CHECK(edge_weight(four, 2, 3) == 1.0);
  CHECK(edge_weight(four, 0, 3) == 0.0);

  // A repeated word inside one window contributes once, and never a loop.
  const WeightedGraph echo = graph_of_words({0, 1, 0}, 3);
  CHECK(echo.vertex_count() == 2);
  CHECK(echo.edge_count() == 1);
  CHECK(edge_weight(echo, 0, 1) == 1.0);

  // Vertices numbered by first appearance, independent of word-id values.
  const WeightedGraph relabel = graph_of_words({5, 3, 5, 3, 7}, 2);
  CHECK(relabel.vertex_count() == 3);
  CHECK(edge_weight(relabel, 0, 1) == 3.0);  // 5 and 3
  CHECK(edge_weight(relabel, 1, 2) == 1.0);  // 3 and 7
  CHECK(edge_weight(relabel, 0, 2) == 0.0);

  // Windows of one word generate no pairs.
  const WeightedGraph dust = graph_of_words({4, 4, 9}, 1);
  CHECK(dust.vertex_count() == 2);
  CHECK(dust.edge_count() == 0);

  try {
    graph_of_words({0, 1}, 3);
    FAIL("expected too_short");
  } catch (const Error& err) {
    CHECK(err.code() == errc::too_short);
  }
}

TEST_CASE("sentence_graph weights match hand enumeration") {
  // Sentences [a b c], [c d], [a d] with bigram windows. Whole-text pair
  // counts: ab=1, bc=1, cd=1, ad=1. Hand-derived sentence weights:
  // w(0,1)=3 (bc, cd, ad), w(0,2)=3 (ab, cd, ad), w(1,2)=2 (cd, ad).
  Corpus c;
  c.ngram_order = 2;
  c.vocabulary = {"a", "b", "c", "d"};
  c.sentences = {{0, 1, 2}, {2, 3}, {0, 3}};
  const WeightedGraph g = sentence_graph(c);
  CHECK(g.vertex_count() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(edge_weight(g, 0, 1) == 3.0);
  CHECK(edge_weight(g, 0, 2) == 3.0);
  CHECK(edge_weight(g, 1, 2) == 2.0);
}

TEST_CASE("sentence_graph counts each word pair once per sentence pair") {
  // Sentences [a b c] and [a b d]: both contain a and b, so the pair {a,b}
  // (count 2 over the text) must enter w(0,1) once, not twice. With the
  // cross pairs {b,c} via c in s0 / b in s1 and {a? d} pairs: bd=1 with b in
  // s0, d in s1, and bc=1 with c in s0, b in s1, plus ad? a d never share a
  // window in s0; in s1 windows (a,b),(b,d) give ab and bd only.
  // Pair counts: ab=2, bc=1, bd=1. w(0,1) = 2 + 1 + 1 = 4.
  Corpus c;
  c.ngram_order = 2;
  c.vocabulary = {"a", "b", "c", "d"};
  c.sentences = {{0, 1, 2}, {0, 1, 3}};
  const WeightedGraph g = sentence_graph(c);
  CHECK(g.edge_count() == 1);
  CHECK(edge_weight(g, 0, 1) == 4.0);
}

TEST_CASE("sentence_graph trivia: identical, disjoint, too few") {
  // Two identical three-word sentences: three pairs, each counted twice
  // across the text, all satisfied: weight 6.
  Corpus twin;
  twin.ngram_order = 3;
  twin.vocabulary = {"x", "y", "z"};
  twin.sentences = {{0, 1, 2}, {0, 1, 2}};
  const WeightedGraph g = sentence_graph(twin);
  CHECK(g.edge_count() == 1);
  CHECK(edge_weight(g, 0, 1) == 6.0);

  Corpus apart;
  apart.ngram_order = 3;
  apart.vocabulary = {"a", "b", "c", "d", "e", "f"};
  apart.sentences = {{0, 1, 2}, {3, 4, 5}};
  CHECK(sentence_graph(apart).edge_count() == 0);

  Corpus one;
  one.ngram_order = 3;
  one.vocabulary = {"a", "b", "c"};
  one.sentences = {{0, 1, 2}};
  try {
    sentence_graph(one);
    FAIL("expected empty_input");
  } catch (const Error& err) {
    CHECK(err.code() == errc::empty_input);
  }
}

TEST_CASE("sentence_graph on the bundled corpus stays within topics") {
  const Corpus small = small_sentence_set(clean_and_split(fixture_text("field_notes.txt"), 3));
  REQUIRE(small.sentences.size() == 30);
  const WeightedGraph g = sentence_graph(small);
  CHECK(g.vertex_count() == 30);
  CHECK(g.edge_count() > 0);
  // Sentences 0-9 are about the mountains, 10-19 about music, 20-29 about
  // bread; the topics share no vocabulary, so no edge crosses a boundary.
  std::set<std::size_t> blocks_with_edges;
  for (const Edge& e : g.edges()) {
    CHECK(e.u / 10 == e.v / 10);
    blocks_with_edges.insert(e.u / 10);
  }
  CHECK(blocks_with_edges == std::set<std::size_t>{0, 1, 2});

  const WeightedGraph again = sentence_graph(small);
  CHECK(g.edge_count() == again.edge_count());
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    CHECK(g.edges()[i].u == again.edges()[i].u);
    CHECK(g.edges()[i].v == again.edges()[i].v);
    CHECK(g.edges()[i].w == again.edges()[i].w);
  }
}

TEST_CASE("stack_and_pad lays realizations out column by column") {
  Matrix r(2, 2);
  r(0, 0) = 1.0;
  r(0, 1) = 2.0;
  r(1, 0) = 3.0;
  r(1, 1) = 4.0;
  const Matrix x = stack_and_pad({r});
  REQUIRE(x.rows() == 1);
  REQUIRE(x.cols() == 4);
  CHECK(x(0, 0) == 1.0);
  CHECK(x(0, 1) == 3.0);
  CHECK(x(0, 2) == 2.0);
  CHECK(x(0, 3) == 4.0);

  // A shorter realization pads with trailing zeros up to the widest row.
  Matrix s(3, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) s(i, j) = 10.0 * static_cast<double>(i) + static_cast<double>(j);
  const Matrix both = stack_and_pad({r, s});
  REQUIRE(both.rows() == 2);
  REQUIRE(both.cols() == 6);
  CHECK(both(0, 0) == 1.0);
  CHECK(both(0, 1) == 3.0);
  CHECK(both(0, 2) == 2.0);
  CHECK(both(0, 3) == 4.0);
  CHECK(both(0, 4) == 0.0);
  CHECK(both(0, 5) == 0.0);
  CHECK(both(1, 0) == 0.0);   // column 0 of s: 0, 10, 20
  CHECK(both(1, 1) == 10.0);
  CHECK(both(1, 2) == 20.0);
  CHECK(both(1, 3) == 1.0);   // column 1 of s: 1, 11, 21
  CHECK(both(1, 4) == 11.0);
  CHECK(both(1, 5) == 21.0);
}

TEST_CASE("stack_and_pad row i depends only on realization i") {
  std::vector<Matrix> rs;
  for (std::size_t m = 0; m < 3; ++m) {
    Matrix r(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        r(i, j) = static_cast<double>(100 * m + 10 * i + j);
    rs.push_back(r);
  }
  const Matrix x = stack_and_pad(rs);
  const Matrix p = stack_and_pad({rs[2], rs[0], rs[1]});
  for (std::size_t j = 0; j < x.cols(); ++j) {
    CHECK(x(0, j) == p(1, j));
    CHECK(x(1, j) == p(2, j));
    CHECK(x(2, j) == p(0, j));
  }

  try {
    stack_and_pad({Matrix(2, 2), Matrix(2, 3)});
    FAIL("expected mixed_k");
  } catch (const Error& err) {
    CHECK(err.code() == errc::mixed_k);
  }
  CHECK_THROWS_AS(stack_and_pad({}), Error);
}

TEST_CASE("encode_labels maps ids onto the uniform grid") {
  CHECK(encode_labels({0, 1}, 2) == std::vector<double>{0.0, 1.0});
  CHECK(encode_labels({0, 1, 2}, 3) == std::vector<double>{0.0, 0.5, 1.0});

  const std::vector<double> grid = encode_labels({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 11);
  for (std::size_t j = 0; j <= 10; ++j)
    CHECK(grid[j] == static_cast<double>(j) / 10.0);
  CHECK(std::set<double>(grid.begin(), grid.end()).size() == 11);  // injective
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);

  for (auto bad : {std::pair<std::vector<std::size_t>, std::size_t>{{0, 2}, 2},
                   {{0}, 1},
                   {{0}, 0}}) {
    try {
      encode_labels(bad.first, bad.second);
      FAIL("expected bad_label_range");
    } catch (const Error& err) {
      CHECK(err.code() == errc::bad_label_range);
    }
  }
}

TEST_CASE("method, reduction, and ground-truth names round-trip") {
  for (auto m : {VectorMethod::inc, VectorMethod::uie, VectorMethod::qrt, VectorMethod::sdp})
    CHECK(vector_method_from_name(vector_method_name(m)) == m);
  for (auto r : {ReductionMethod::pca, ReductionMethod::rp})
    CHECK(reduction_method_from_name(reduction_method_name(r)) == r);
  for (auto t : {GroundTruth::kmeans, GroundTruth::sentence_graph})
    CHECK(ground_truth_from_name(ground_truth_name(t)) == t);
  CHECK(vector_method_name(VectorMethod::inc) == "inc");
  CHECK(reduction_method_name(ReductionMethod::rp) == "rp");
  CHECK(ground_truth_name(GroundTruth::sentence_graph) == "sentence_graph");
  CHECK_THROWS_AS(vector_method_from_name("mds"), Error);
  CHECK_THROWS_AS(reduction_method_from_name("isomap"), Error);
  CHECK_THROWS_AS(ground_truth_from_name("oracle"), Error);
}

TEST_CASE("method_vectors: incidence bypasses realization") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::inc;
  CHECK(same_matrix(method_vectors(c, cfg), incidence_vectors(c)));
}

TEST_CASE("method_vectors: max-norm rows truncate or pad to K columns") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::uie;
  cfg.realization_dim = 4;
  const Matrix x = method_vectors(c, cfg);
  REQUIRE(x.rows() == 5);
  // Every sentence has five distinct words, so every row holds a 5x4
  // realization: 20 columns, no padding.
  CHECK(x.cols() == 20);

  // Three distinct words with K=5: columns 3 and 4 of each realization are
  // zero padding, i.e. row entries 9..14.
  const Corpus tiny = clean_and_split("Dogs chase cats. Dogs chase cats.", 3);
  TrainingSetConfig wide;
  wide.method = VectorMethod::uie;
  wide.realization_dim = 5;
  const Matrix y = method_vectors(tiny, wide);
  REQUIRE(y.rows() == 2);
  REQUIRE(y.cols() == 15);
  for (std::size_t i = 0; i < 2; ++i) {
    double head = 0.0;
    for (std::size_t j = 0; j < 9; ++j) head += std::fabs(y(i, j));
    CHECK(head > 0.0);
    for (std::size_t j = 9; j < 15; ++j) CHECK(y(i, j) == 0.0);
  }
}

TEST_CASE("method_vectors: descent and relaxation realizations are deterministic") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::qrt;
  cfg.realization_dim = 3;
  cfg.realize_restarts = 1;
  cfg.realize_max_iterations = 200;
  cfg.seed = 7;
  const Matrix a = method_vectors(c, cfg);
  REQUIRE(a.rows() == 5);
  for (const double v : a.values()) CHECK(std::isfinite(v));
  CHECK(same_matrix(a, method_vectors(c, cfg)));

  TrainingSetConfig other = cfg;
  other.seed = 8;
  CHECK_FALSE(same_matrix(a, method_vectors(c, other)));

  TrainingSetConfig sdp = cfg;
  sdp.method = VectorMethod::sdp;
  sdp.sdp_max_iterations = 500;
  const Matrix b = method_vectors(c, sdp);
  REQUIRE(b.rows() == 5);
  for (const double v : b.values()) CHECK(std::isfinite(v));
  CHECK(same_matrix(b, method_vectors(c, sdp)));
}

TEST_CASE("build_training_set assembles X, Y, and provenance") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::inc;
  cfg.reduction = ReductionMethod::pca;
  cfg.truth = GroundTruth::kmeans;
  cfg.clusters = 2;
  cfg.seed = 11;
  cfg.sigma_tag = "mini";
  const TrainingSet ts = build_training_set(c, cfg);
  REQUIRE(ts.x.rows() == 5);
  REQUIRE(ts.y.size() == 5);
  CHECK(ts.clusters == 2);
  for (const double v : ts.y) CHECK((v == 0.0 || v == 1.0));
  CHECK(std::set<double>(ts.y.begin(), ts.y.end()).size() == 2);  // both ids used
  CHECK(ts.sigma == "mini");
  CHECK(ts.mu == "inc");
  CHECK(ts.rho == "pca");
  CHECK(ts.seed == 11);

  const TrainingSet again = build_training_set(c, cfg);
  CHECK(same_matrix(ts.x, again.x));
  CHECK(ts.y == again.y);

  const nlohmann::json j = nlohmann::json::parse(training_set_provenance_json(ts));
  CHECK(j.at("sigma") == "mini");
  CHECK(j.at("mu") == "inc");
  CHECK(j.at("rho") == "pca");
  CHECK(j.at("clusters") == 2);
  CHECK(j.at("rows") == 5);
  CHECK(j.at("cols") == ts.x.cols());
  CHECK(j.at("seed") == 11);
  CHECK(training_set_provenance_json(ts).back() == '\n');
}

TEST_CASE("build_training_set: random projection hits the target dimension") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::inc;
  cfg.reduction = ReductionMethod::rp;
  cfg.clusters = 2;
  cfg.seed = 3;
  const TrainingSet ts = build_training_set(c, cfg);
  // ceil(1.8 * ln 5 / 0.15^2) = ceil(128.76) = 129.
  CHECK(ts.x.cols() == 129);
  CHECK(ts.x.cols() == jll_dimension(5, {0.15, 1.8}));
  CHECK(ts.rho == "rp");

  TrainingSetConfig reseeded = cfg;
  reseeded.seed = 4;
  CHECK_FALSE(same_matrix(ts.x, build_training_set(c, reseeded).x));
}

TEST_CASE("build_training_set: sentence-graph communities label the themes") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::uie;
  cfg.realization_dim = 4;
  cfg.reduction = ReductionMethod::pca;
  cfg.truth = GroundTruth::sentence_graph;
  const TrainingSet ts = build_training_set(c, cfg);
  REQUIRE(ts.clusters >= 2);
  REQUIRE(ts.y.size() == 5);
  for (const double v : ts.y) {
    const double scaled = v * static_cast<double>(ts.clusters - 1);
    CHECK(scaled == std::floor(scaled));  // exactly on the grid
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // The ship sentences (0,1,2) and grape sentences (3,4) live in different
  // components of the sentence graph, so their labels must differ.
  CHECK(ts.y[0] == ts.y[1]);
  CHECK(ts.y[0] == ts.y[2]);
  CHECK(ts.y[3] == ts.y[4]);
  CHECK(ts.y[0] != ts.y[3]);
}

TEST_CASE("build_training_set: automatic cluster count picks smallest viable k") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::inc;
  cfg.reduction = ReductionMethod::pca;
  cfg.clusters = 0;
  const TrainingSet ts = build_training_set(c, cfg);
  // Auto selection never returns fewer than two clusters and all clusters
  // keep >= 2 members when such a k exists; with 5 points k is 2.
  CHECK(ts.clusters == 2);
}

TEST_CASE("training sets round-trip through files") {
  const Corpus c = mini_corpus();
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::inc;
  cfg.reduction = ReductionMethod::pca;
  cfg.clusters = 2;
  cfg.seed = 5;
  const TrainingSet ts = build_training_set(c, cfg);

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "dgkit_textgraph_test";
  std::filesystem::create_directories(dir);
  const auto x_path = dir / "x.csv";
  const auto y_path = dir / "y.csv";
  const auto j_path = dir / "meta.json";
  write_training_set(ts, x_path, y_path, j_path);

  const Matrix x = read_matrix_csv(x_path);
  CHECK(same_matrix(x, ts.x));
  const Matrix y = read_matrix_csv(y_path);
  REQUIRE(y.rows() == ts.y.size());
  REQUIRE(y.cols() == 1);
  for (std::size_t i = 0; i < ts.y.size(); ++i) CHECK(y(i, 0) == ts.y[i]);
  const nlohmann::json j = nlohmann::json::parse(read_text_file(j_path));
  CHECK(j.at("mu") == "inc");
  std::filesystem::remove_all(dir);
}

TEST_CASE("full pipeline over the bundled corpus") {
  const Corpus small = small_sentence_set(clean_and_split(fixture_text("field_notes.txt"), 3));
  TrainingSetConfig cfg;
  cfg.method = VectorMethod::inc;
  cfg.reduction = ReductionMethod::rp;
  cfg.truth = GroundTruth::kmeans;
  cfg.clusters = 3;
  cfg.seed = 42;
  const TrainingSet ts = build_training_set(small, cfg);
  REQUIRE(ts.x.rows() == 30);
  REQUIRE(ts.y.size() == 30);
  CHECK(ts.clusters == 3);
  for (const double v : ts.y) CHECK((v == 0.0 || v == 0.5 || v == 1.0));
  for (const double v : ts.x.values()) CHECK(std::isfinite(v));

  TrainingSetConfig graph_cfg = cfg;
  graph_cfg.truth = GroundTruth::sentence_graph;
  const TrainingSet gt = build_training_set(small, graph_cfg);
  // Three disconnected topic blocks can never merge, so at least three
  // communities emerge.
  CHECK(gt.clusters >= 3);
  REQUIRE(gt.y.size() == 30);
}
