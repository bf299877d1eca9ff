#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "bidep/model.hpp"
#include "bidep/rng.hpp"
#include "bidep/trainer.hpp"
#include "test_util.hpp"

using namespace bidep;
using bidep::test::make_sentence;

namespace {

std::vector<Sentence> tiny_corpus() {
  return {
      make_sentence({"dog", "chases", "cat"}, {"NN", "VB", "NN"}, {2, 0, 2},
                    {"sub", "top", "obj"}),
      make_sentence({"cat", "chases", "dog"}, {"NN", "VB", "NN"}, {2, 0, 2},
                    {"sub", "top", "obj"}),
  };
}

Model small_model(Direction directions = Direction::kBoth,
                  std::uint64_t seed = 3) {
  ModelConfig config;
  config.hidden = 4;
  config.directions = directions;
  Model model = make_model(config, build_vocab(tiny_corpus(), config.channels));
  init_params(model.params, seed);
  return model;
}

std::vector<TokenIds> random_tokens(const Model& model, Rng& rng,
                                    std::size_t n) {
  std::vector<TokenIds> tokens(n);
  const auto forms = model.vocab.table(Channel::kForm).size();
  const auto tags = model.vocab.table(Channel::kFpos).size();
  for (auto& t : tokens) {
    t.form = static_cast<int>(rng.uniform_int(forms));
    t.fpos = static_cast<int>(rng.uniform_int(tags));
  }
  return tokens;
}

}  // namespace

TEST_CASE("direction names round-trip") {
  for (Direction d :
       {Direction::kBoth, Direction::kLeftToRight, Direction::kRightToLeft})
    CHECK(direction_from_name(direction_name(d)) == d);
  CHECK_THROWS_AS(direction_from_name("sideways"), std::invalid_argument);
}

TEST_CASE("the parameter registry holds every tensor with the right shape") {
  const Model model = small_model();
  const std::size_t d = 4, p = 4, e = 8;
  const std::size_t labels = model.vocab.relation_count();

  const std::vector<std::string> gru_suffixes{
      "in_update", "rec_update", "bias_update", "in_reset", "rec_reset",
      "bias_reset", "in_cand",   "rec_cand",    "bias_cand"};
  std::size_t expected = 0;
  const auto expect_matrix = [&](const std::string& name, std::size_t rows,
                                 std::size_t cols) {
    ++expected;
    REQUIRE_MESSAGE(model.params.has(name), name);
    const NamedTensor& t = model.params.tensor(name);
    CHECK_MESSAGE(t.is_matrix, name);
    CHECK_MESSAGE(t.mat.rows == rows, name);
    CHECK_MESSAGE(t.mat.cols == cols, name);
  };
  const auto expect_vector = [&](const std::string& name, std::size_t dim,
                                 bool is_bias) {
    ++expected;
    REQUIRE_MESSAGE(model.params.has(name), name);
    const NamedTensor& t = model.params.tensor(name);
    CHECK_MESSAGE(!t.is_matrix, name);
    CHECK_MESSAGE(t.vec.dim() == dim, name);
    CHECK_MESSAGE(t.is_bias == is_bias, name);
  };

  expect_matrix("emb.form", p, model.vocab.table(Channel::kForm).size());
  expect_matrix("emb.fpos", p, model.vocab.table(Channel::kFpos).size());
  expect_matrix("proj.weight", d, p);
  expect_vector("proj.bias", d, true);
  for (const std::string base : {"mem.fwd", "mem.bwd"})
    for (const auto& suffix : gru_suffixes) {
      const std::string name = base + "." + suffix;
      if (suffix.rfind("bias", 0) == 0) {
        expect_vector(name, d, true);
      } else {
        expect_matrix(name, d, suffix.rfind("in_", 0) == 0 ? d : d);
      }
    }
  for (const std::string base : {"query.fwd", "query.bwd"}) {
    for (const auto& suffix : gru_suffixes) {
      const std::string name = base + ".gru." + suffix;
      if (suffix.rfind("bias", 0) == 0) {
        expect_vector(name, d, true);
      } else {
        expect_matrix(name, d, suffix.rfind("in_", 0) == 0 ? e + d : d);
      }
    }
    expect_matrix(base + ".attn.mem_proj", d, e);
    expect_matrix(base + ".attn.query_proj", d, d);
    expect_vector(base + ".attn.score", d, false);
  }
  expect_matrix("rel.soft_weight", labels, 2 * e);
  expect_matrix("rel.query_weight", labels, 2 * d);
  expect_vector("rel.bias", labels, true);

  CHECK(model.params.tensors().size() == expected);
}

TEST_CASE("single-direction configs still allocate both directions") {
  const Model model = small_model(Direction::kLeftToRight);
  CHECK(model.params.has("query.bwd.gru.in_update"));
  CHECK(model.params.has("query.bwd.attn.score"));
  CHECK(model.config.has_forward());
  CHECK_FALSE(model.config.has_backward());
}

TEST_CASE("model construction validates its inputs") {
  ModelConfig config;
  config.hidden = 0;
  CHECK_THROWS_AS(make_model(config, build_vocab(tiny_corpus(),
                                                 {Channel::kForm,
                                                  Channel::kFpos})),
                  std::invalid_argument);
  ModelConfig lemma_config;
  lemma_config.channels = {Channel::kLemma};
  CHECK_THROWS_AS(make_model(lemma_config,
                             build_vocab(tiny_corpus(), {Channel::kForm})),
                  std::invalid_argument);
}

TEST_CASE("every attention row and relation row is a distribution") {
  const Model model = small_model();
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(6);
    const SentenceGraph graph =
        build_sentence_graph(model, random_tokens(model, rng, n));
    for (const bool backward : {false, true}) {
      const RealMatrix attn = attention_matrix(graph, backward);
      REQUIRE(attn.rows == n);
      REQUIRE(attn.cols == n + 1);
      for (std::size_t t = 0; t < n; ++t) {
        Real total = 0;
        for (std::size_t j = 0; j <= n; ++j) {
          CHECK(attn.at(t, j) >= 0.0);
          total += attn.at(t, j);
        }
        CHECK(std::abs(total - 1.0) < 1e-10);
      }
    }
    for (const NodeId row : graph.rel_probs) {
      const RealVector& probs = graph.tape.value(row);
      REQUIRE(probs.dim() == model.vocab.relation_count());
      Real total = 0;
      for (std::size_t i = 0; i < probs.dim(); ++i) total += probs[i];
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("score evaluations count 2n(n+1) with both directions") {
  const Model model = small_model();
  Rng rng(5);
  for (const std::size_t n : {1, 2, 5, 8}) {
    const SentenceGraph graph =
        build_sentence_graph(model, random_tokens(model, rng, n));
    CHECK(graph.score_evals == 2 * n * (n + 1));
  }
}

TEST_CASE("a disabled direction halves the score evaluations") {
  const Model model = small_model(Direction::kRightToLeft);
  Rng rng(6);
  const SentenceGraph graph =
      build_sentence_graph(model, random_tokens(model, rng, 5));
  CHECK(graph.score_evals == 5 * 6);
  CHECK(graph.fwd.attn.empty());
  CHECK(graph.bwd.attn.size() == 5);
  CHECK_THROWS_AS(attention_matrix(graph, false), std::logic_error);
  const RealMatrix attn = attention_matrix(graph, true);
  CHECK(attn.rows == 5);
  // Relation rows still exist, fed by zero vectors on the disabled side.
  CHECK(graph.rel_probs.size() == 5);
}

TEST_CASE("gradient accumulation adds across sentences and scatters columns") {
  const Model model = small_model();
  Rng rng(8);
  const auto tokens = random_tokens(model, rng, 3);
  SentenceGraph graph = build_sentence_graph(model, tokens);
  graph.tape.backward(graph.tape.pick_log(graph.rel_probs[0], 0));

  ParameterSet once = model.params.zeros_like();
  accumulate_gradients(graph, once);
  ParameterSet twice = model.params.zeros_like();
  accumulate_gradients(graph, twice);
  accumulate_gradients(graph, twice);

  Real magnitude = 0;
  for (std::size_t i = 0; i < once.tensors().size(); ++i) {
    const NamedTensor& a = once.tensors()[i];
    const NamedTensor& b = twice.tensors()[i];
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(b.flat()[k] == doctest::Approx(2 * a.flat()[k]).epsilon(1e-12));
      magnitude += std::abs(a.flat()[k]);
    }
  }
  CHECK(magnitude > 0);

  // Embedding gradients live only in the columns the sentence touched.
  std::set<int> used_form_columns;
  for (const auto& use : graph.columns)
    if (use.channel == Channel::kForm) used_form_columns.insert(use.id);
  const RealMatrix& form_grad = once.matrix("emb.form");
  for (std::size_t c = 0; c < form_grad.cols; ++c) {
    Real column_sum = 0;
    for (std::size_t r = 0; r < form_grad.rows; ++r)
      column_sum += std::abs(form_grad.at(r, c));
    if (used_form_columns.count(static_cast<int>(c)) == 0)
      CHECK(column_sum == 0.0);
  }
}
