#include "bidep/attention.hpp"

#include <stdexcept>

namespace bidep {

AttentionNodes load_attention(Tape& tape, const AttentionParams& params,
                              const std::vector<NodeId>& memory) {
  if (params.mem_proj == nullptr || params.query_proj == nullptr ||
      params.score_vec == nullptr) {
    throw std::logic_error("attention is missing a weight tensor");
  }
  AttentionNodes nodes;
  nodes.mem_proj = tape.input(*params.mem_proj);
  nodes.query_proj = tape.input(*params.query_proj);
  nodes.score_vec = tape.input(*params.score_vec);
  nodes.projected.reserve(memory.size());
  for (NodeId m : memory) {
    nodes.projected.push_back(tape.matvec(nodes.mem_proj, m));
  }
  return nodes;
}

NodeId attend(Tape& tape, NodeId query, const AttentionNodes& attn,
              std::uint64_t* score_evals) {
  const NodeId projected_query = tape.matvec(attn.query_proj, query);
  std::vector<NodeId> scores;
  scores.reserve(attn.projected.size());
  for (NodeId pm : attn.projected) {
    const NodeId activated = tape.tanh(tape.add(pm, projected_query));
    scores.push_back(tape.matvec(attn.score_vec, activated));
    if (score_evals != nullptr) ++*score_evals;
  }
  return tape.softmax(tape.concat(scores));
}

NodeId soft_head(Tape& tape, NodeId attention, const std::vector<NodeId>& memory,
                 bool include_root) {
  if (include_root) {
    return tape.weighted_sum(attention, memory);
  }
  // Sum over slots 1..n with the unchanged softmax weights; the root slot's
  // probability mass simply drops out of the embedding.
  std::vector<NodeId> rest(memory.begin() + 1, memory.end());
  return tape.weighted_sum(attention, rest, 1);
}

QueryRun run_query(Tape& tape, const std::vector<NodeId>& memory,
                   const std::vector<NodeId>& token_embeds, const GruNodes& gru,
                   const AttentionNodes& attn, bool backward, bool feed_soft,
                   bool include_root, std::uint64_t* score_evals) {
  const std::size_t n = token_embeds.size();
  const std::size_t memory_dim = memory.empty() ? 0 : tape.value(memory[0]).dim();
  QueryRun run;
  run.query.resize(n);
  run.attn.resize(n);
  run.soft.resize(n);
  const NodeId zero_soft = tape.input(RealVector(memory_dim));
  const NodeId zero_state = tape.input(RealVector(gru.hidden));
  NodeId h = zero_state;
  NodeId prev_soft = zero_soft;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = backward ? n - 1 - step : step;
    const NodeId soft_in = feed_soft ? prev_soft : zero_soft;
    const NodeId input = tape.concat({soft_in, token_embeds[t]});
    h = gru_step(tape, gru, h, input);
    run.query[t] = h;
    run.attn[t] = attend(tape, h, attn, score_evals);
    run.soft[t] = soft_head(tape, run.attn[t], memory, include_root);
    prev_soft = run.soft[t];
  }
  return run;
}

RelationNodes load_relation(Tape& tape, const RelationParams& params) {
  if (params.soft_weight == nullptr || params.query_weight == nullptr ||
      params.bias == nullptr) {
    throw std::logic_error("relation classifier is missing a weight tensor");
  }
  return RelationNodes{tape.input(*params.soft_weight),
                       tape.input(*params.query_weight),
                       tape.input(*params.bias)};
}

NodeId predict_relation(Tape& tape, const RelationNodes& rel, NodeId soft_fwd,
                        NodeId soft_bwd, NodeId query_fwd, NodeId query_bwd) {
  const NodeId soft_cat = tape.concat({soft_fwd, soft_bwd});
  const NodeId query_cat = tape.concat({query_fwd, query_bwd});
  const NodeId logits = tape.add({tape.matvec(rel.soft_weight, soft_cat),
                                  tape.matvec(rel.query_weight, query_cat),
                                  rel.bias});
  return tape.softmax(logits);
}

}  // namespace bidep
