#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "bidep/attention.hpp"
#include "bidep/rng.hpp"

using namespace bidep;

namespace {

struct AttnWeights {
  RealMatrix mem_proj, query_proj;
  RealVector score;

  AttnWeights(std::size_t hidden, std::size_t memory_dim)
      : mem_proj(hidden, memory_dim),
        query_proj(hidden, hidden),
        score(hidden) {}

  void randomize(Rng& rng) {
    for (auto& v : mem_proj.data) v = 0.5 * rng.gaussian();
    for (auto& v : query_proj.data) v = 0.5 * rng.gaussian();
    for (auto& v : score.data) v = 0.5 * rng.gaussian();
  }

  AttentionParams view() const { return {&mem_proj, &query_proj, &score}; }
};

struct QueryCell {
  RealMatrix in_update, rec_update, in_reset, rec_reset, in_cand, rec_cand;
  RealVector bias_update, bias_reset, bias_cand;

  QueryCell(std::size_t hidden, std::size_t input)
      : in_update(hidden, input),
        rec_update(hidden, hidden),
        in_reset(hidden, input),
        rec_reset(hidden, hidden),
        in_cand(hidden, input),
        rec_cand(hidden, hidden),
        bias_update(hidden),
        bias_reset(hidden),
        bias_cand(hidden) {}

  void randomize(Rng& rng) {
    for (RealMatrix* m : {&in_update, &rec_update, &in_reset, &rec_reset,
                          &in_cand, &rec_cand})
      for (auto& v : m->data) v = 0.4 * rng.gaussian();
    for (RealVector* b : {&bias_update, &bias_reset, &bias_cand})
      for (auto& v : b->data) v = 0.4 * rng.gaussian();
  }

  GruParams view() const {
    GruParams p;
    p.in_update = &in_update;
    p.rec_update = &rec_update;
    p.bias_update = &bias_update;
    p.in_reset = &in_reset;
    p.rec_reset = &rec_reset;
    p.bias_reset = &bias_reset;
    p.in_cand = &in_cand;
    p.rec_cand = &rec_cand;
    p.bias_cand = &bias_cand;
    return p;
  }
};

RealVector oracle_gru(const QueryCell& w, const RealVector& h,
                      const RealVector& x) {
  const auto gate = [&](const RealMatrix& wi, const RealMatrix& wr,
                        const RealVector& b) {
    RealVector pre = matvec(wi, x);
    const RealVector rec = matvec(wr, h);
    for (std::size_t i = 0; i < pre.dim(); ++i) pre[i] += rec[i] + b[i];
    return pre;
  };
  const RealVector z = sigmoid_vec(gate(w.in_update, w.rec_update, w.bias_update));
  const RealVector r = sigmoid_vec(gate(w.in_reset, w.rec_reset, w.bias_reset));
  RealVector gated = h;
  for (std::size_t i = 0; i < h.dim(); ++i) gated[i] *= r[i];
  RealVector pre = matvec(w.in_cand, x);
  const RealVector rec = matvec(w.rec_cand, gated);
  for (std::size_t i = 0; i < pre.dim(); ++i) pre[i] += rec[i] + w.bias_cand[i];
  const RealVector cand = lrel(pre);
  RealVector out(h.dim());
  for (std::size_t i = 0; i < h.dim(); ++i)
    out[i] = (1 - z[i]) * h[i] + z[i] * cand[i];
  return out;
}

RealVector oracle_attend(const AttnWeights& w,
                         const std::vector<RealVector>& memory,
                         const RealVector& q) {
  RealVector scores(memory.size());
  const RealVector dq = matvec(w.query_proj, q);
  for (std::size_t j = 0; j < memory.size(); ++j) {
    RealVector pre = matvec(w.mem_proj, memory[j]);
    for (std::size_t i = 0; i < pre.dim(); ++i) pre[i] += dq[i];
    scores[j] = dot(w.score, tanh_vec(pre));
  }
  return softmax(scores);
}

RealVector concat2(const RealVector& a, const RealVector& b) {
  RealVector out(a.dim() + b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.dim(); ++i) out[a.dim() + i] = b[i];
  return out;
}

std::vector<RealVector> random_vectors(Rng& rng, std::size_t count,
                                       std::size_t dim) {
  std::vector<RealVector> out(count, RealVector(dim));
  for (auto& v : out)
    for (auto& e : v.data) e = rng.gaussian();
  return out;
}

}  // namespace

TEST_CASE("zero weights attend uniformly") {
  AttnWeights w(3, 6);
  Rng rng(1);
  const auto memory = random_vectors(rng, 4, 6);
  Tape tape;
  std::vector<NodeId> mem_nodes;
  for (const auto& m : memory) mem_nodes.push_back(tape.input(m));
  const AttentionNodes attn = load_attention(tape, w.view(), mem_nodes);
  const NodeId probs =
      attend(tape, tape.input(RealVector(3)), attn, nullptr);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(tape.value(probs)[j] == doctest::Approx(0.25));
}

TEST_CASE("a root-only sentence attends with probability one") {
  AttnWeights w(3, 6);
  Rng rng(2);
  w.randomize(rng);
  const auto memory = random_vectors(rng, 1, 6);
  Tape tape;
  const AttentionNodes attn =
      load_attention(tape, w.view(), {tape.input(memory[0])});
  const NodeId probs = attend(
      tape, tape.input(RealVector{0.1, -0.2, 0.3}), attn, nullptr);
  REQUIRE(tape.value(probs).dim() == 1);
  CHECK(tape.value(probs)[0] == doctest::Approx(1.0));
}

TEST_CASE("attend matches the additive-scoring oracle and counts slots") {
  Rng rng(5);
  AttnWeights w(3, 6);
  w.randomize(rng);
  const auto memory = random_vectors(rng, 5, 6);
  RealVector q(3);
  for (auto& v : q.data) v = rng.gaussian();

  Tape tape;
  std::vector<NodeId> mem_nodes;
  for (const auto& m : memory) mem_nodes.push_back(tape.input(m));
  const AttentionNodes attn = load_attention(tape, w.view(), mem_nodes);
  std::uint64_t evals = 0;
  const NodeId probs = attend(tape, tape.input(q), attn, &evals);
  CHECK(evals == 5);

  const RealVector want = oracle_attend(w, memory, q);
  Real total = 0;
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(tape.value(probs)[j] == doctest::Approx(want[j]).epsilon(1e-12));
    total += tape.value(probs)[j];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("soft heads weight the memory slots by attention") {
  Rng rng(7);
  const auto memory = random_vectors(rng, 3, 4);
  const RealVector attn_probs{0.5, 0.3, 0.2};

  Tape tape;
  std::vector<NodeId> mem_nodes;
  for (const auto& m : memory) mem_nodes.push_back(tape.input(m));
  const NodeId a = tape.input(attn_probs);

  SUBCASE("including the root slot") {
    const NodeId soft = soft_head(tape, a, mem_nodes, true);
    for (std::size_t i = 0; i < 4; ++i) {
      const Real want = 0.5 * memory[0][i] + 0.3 * memory[1][i] +
                        0.2 * memory[2][i];
      CHECK(tape.value(soft)[i] == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("excluding the root drops its term without renormalizing") {
    const NodeId soft = soft_head(tape, a, mem_nodes, false);
    for (std::size_t i = 0; i < 4; ++i) {
      const Real want = 0.3 * memory[1][i] + 0.2 * memory[2][i];
      CHECK(tape.value(soft)[i] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("the query scan reproduces a step-by-step hand computation") {
  // d = 3, memory dim 6, query input dim 9.
  Rng rng(11);
  AttnWeights aw(3, 6);
  aw.randomize(rng);
  QueryCell qc(3, 9);
  qc.randomize(rng);
  const auto memory = random_vectors(rng, 4, 6);   // root + 3 tokens
  const auto embeds = random_vectors(rng, 3, 3);   // x_1..x_3

  for (const bool backward : {false, true}) {
    for (const bool feed_soft : {true, false}) {
      CAPTURE(backward);
      CAPTURE(feed_soft);
      Tape tape;
      std::vector<NodeId> mem_nodes, embed_nodes;
      for (const auto& m : memory) mem_nodes.push_back(tape.input(m));
      for (const auto& x : embeds) embed_nodes.push_back(tape.input(x));
      const GruNodes gru = load_gru(tape, qc.view());
      const AttentionNodes attn = load_attention(tape, aw.view(), mem_nodes);
      std::uint64_t evals = 0;
      const QueryRun run = run_query(tape, mem_nodes, embed_nodes, gru, attn,
                                     backward, feed_soft,
                                     /*include_root=*/true, &evals);
      CHECK(evals == 3 * 4);  // n * (n + 1) slot scores for one direction

      // Hand scan in the same order.
      RealVector h(3);
      RealVector prev_soft(6);
      for (std::size_t step = 0; step < 3; ++step) {
        const std::size_t t = backward ? 2 - step : step;
        const RealVector in =
            concat2(feed_soft ? prev_soft : RealVector(6), embeds[t]);
        h = oracle_gru(qc, h, in);
        const RealVector probs = oracle_attend(aw, memory, h);
        RealVector soft(6);
        for (std::size_t j = 0; j < 4; ++j)
          for (std::size_t i = 0; i < 6; ++i) soft[i] += probs[j] * memory[j][i];
        prev_soft = soft;

        for (std::size_t i = 0; i < 3; ++i)
          CHECK(tape.value(run.query[t])[i] ==
                doctest::Approx(h[i]).epsilon(1e-12));
        for (std::size_t j = 0; j < 4; ++j)
          CHECK(tape.value(run.attn[t])[j] ==
                doctest::Approx(probs[j]).epsilon(1e-12));
        for (std::size_t i = 0; i < 6; ++i)
          CHECK(tape.value(run.soft[t])[i] ==
                doctest::Approx(soft[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("without soft feedback the root toggle cannot reach the queries") {
  Rng rng(13);
  AttnWeights aw(3, 6);
  aw.randomize(rng);
  QueryCell qc(3, 9);
  qc.randomize(rng);
  const auto memory = random_vectors(rng, 4, 6);
  const auto embeds = random_vectors(rng, 3, 3);

  const auto scan = [&](bool include_root) {
    Tape tape;
    std::vector<NodeId> mem_nodes, embed_nodes;
    for (const auto& m : memory) mem_nodes.push_back(tape.input(m));
    for (const auto& x : embeds) embed_nodes.push_back(tape.input(x));
    const GruNodes gru = load_gru(tape, qc.view());
    const AttentionNodes attn = load_attention(tape, aw.view(), mem_nodes);
    const QueryRun run =
        run_query(tape, mem_nodes, embed_nodes, gru, attn, /*backward=*/false,
                  /*feed_soft=*/false, include_root, nullptr);
    std::vector<RealVector> attns, softs;
    for (std::size_t t = 0; t < 3; ++t) {
      attns.push_back(tape.value(run.attn[t]));
      softs.push_back(tape.value(run.soft[t]));
    }
    return std::make_pair(attns, softs);
  };

  const auto [attn_with, soft_with] = scan(true);
  const auto [attn_without, soft_without] = scan(false);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(attn_with[t][j] == attn_without[t][j]);  // identical, bit for bit
    bool soft_differs = false;
    for (std::size_t i = 0; i < 6; ++i)
      soft_differs = soft_differs || soft_with[t][i] != soft_without[t][i];
    CHECK(soft_differs);  // the soft embedding is still produced, and differs
  }
}

TEST_CASE("without soft feedback each query sees only its side of the input") {
  Rng rng(19);
  AttnWeights aw(3, 6);
  aw.randomize(rng);
  QueryCell qc(3, 9);
  qc.randomize(rng);
  const auto memory = random_vectors(rng, 5, 6);
  auto embeds = random_vectors(rng, 4, 3);

  const auto queries = [&](bool backward, const std::vector<RealVector>& xs) {
    Tape tape;
    std::vector<NodeId> mem_nodes, embed_nodes;
    for (const auto& m : memory) mem_nodes.push_back(tape.input(m));
    for (const auto& x : xs) embed_nodes.push_back(tape.input(x));
    const GruNodes gru = load_gru(tape, qc.view());
    const AttentionNodes attn = load_attention(tape, aw.view(), mem_nodes);
    const QueryRun run = run_query(tape, mem_nodes, embed_nodes, gru, attn,
                                   backward, /*feed_soft=*/false,
                                   /*include_root=*/true, nullptr);
    std::vector<RealVector> out;
    for (std::size_t t = 0; t < xs.size(); ++t)
      out.push_back(tape.value(run.query[t]));
    return out;
  };

  auto bumped = embeds;
  bumped[2][1] += 1.0;  // token 3 changes

  const auto fwd_base = queries(false, embeds);
  const auto fwd_moved = queries(false, bumped);
  CHECK(fwd_base[0].data == fwd_moved[0].data);  // q_1 precedes the change
  CHECK(fwd_base[1].data == fwd_moved[1].data);
  CHECK(fwd_base[2].data != fwd_moved[2].data);
  CHECK(fwd_base[3].data != fwd_moved[3].data);

  const auto bwd_base = queries(true, embeds);
  const auto bwd_moved = queries(true, bumped);
  CHECK(bwd_base[3].data == bwd_moved[3].data);  // q_4 follows the change
  CHECK(bwd_base[2].data != bwd_moved[2].data);
  CHECK(bwd_base[1].data != bwd_moved[1].data);
  CHECK(bwd_base[0].data != bwd_moved[0].data);
}

TEST_CASE("relation prediction matches its softmax oracle") {
  Rng rng(29);
  const std::size_t labels = 4, d = 3, e = 6;
  RealMatrix soft_w(labels, 2 * e), query_w(labels, 2 * d);
  RealVector bias(labels);
  for (auto& v : soft_w.data) v = 0.3 * rng.gaussian();
  for (auto& v : query_w.data) v = 0.3 * rng.gaussian();
  for (auto& v : bias.data) v = 0.3 * rng.gaussian();
  RelationParams params{&soft_w, &query_w, &bias};

  RealVector sf(e), sb(e), qf(d), qb(d);
  for (RealVector* v : {&sf, &sb})
    for (auto& x : v->data) x = rng.gaussian();
  for (RealVector* v : {&qf, &qb})
    for (auto& x : v->data) x = rng.gaussian();

  Tape tape;
  const RelationNodes rel = load_relation(tape, params);
  const NodeId probs =
      predict_relation(tape, rel, tape.input(sf), tape.input(sb),
                       tape.input(qf), tape.input(qb));

  RealVector logits = matvec(soft_w, concat2(sf, sb));
  const RealVector ql = matvec(query_w, concat2(qf, qb));
  for (std::size_t i = 0; i < labels; ++i) logits[i] += ql[i] + bias[i];
  const RealVector want = softmax(logits);

  Real total = 0;
  for (std::size_t i = 0; i < labels; ++i) {
    CHECK(tape.value(probs)[i] == doctest::Approx(want[i]).epsilon(1e-12));
    total += tape.value(probs)[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("missing weights are rejected") {
  Tape tape;
  CHECK_THROWS_AS(load_attention(tape, AttentionParams{}, {}),
                  std::logic_error);
  CHECK_THROWS_AS(load_relation(tape, RelationParams{}), std::logic_error);
}
