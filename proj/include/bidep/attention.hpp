// Headword attention: additive scores between a directional query state and
// every memory slot, attention-weighted soft headword embeddings, the
// left-to-right / right-to-left query scans, and the relation classifier.
#pragma once

#include <cstdint>
#include <vector>

#include "bidep/encoder.hpp"
#include "bidep/numerics.hpp"
#include "bidep/tape.hpp"

namespace bidep {

// Borrowed views of one direction's attention weights.
struct AttentionParams {
  const RealMatrix* mem_proj = nullptr;    // hidden x memory-dim
  const RealMatrix* query_proj = nullptr;  // hidden x hidden
  const RealVector* score_vec = nullptr;   // hidden
};

// Tape nodes for one direction. The projected memory slots are shared by
// every query step, so each score evaluation costs one query projection,
// one tanh and one dot product.
struct AttentionNodes {
  NodeId mem_proj, query_proj, score_vec;
  std::vector<NodeId> projected;  // mem_proj * m_j for j = 0..n
};

AttentionNodes load_attention(Tape& tape, const AttentionParams& params,
                              const std::vector<NodeId>& memory);

// Softmax over score(j) = v . tanh(C m_j + D q) for all memory slots.
// Each slot scored bumps *score_evals once.
NodeId attend(Tape& tape, NodeId query, const AttentionNodes& attn,
              std::uint64_t* score_evals);

// Attention-weighted sum of memory slots. include_root=false drops the root
// slot's term and keeps the remaining softmax weights unchanged.
NodeId soft_head(Tape& tape, NodeId attention, const std::vector<NodeId>& memory,
                 bool include_root);

struct QueryRun {
  std::vector<NodeId> query;  // q_t, index t-1
  std::vector<NodeId> attn;   // attention row for token t
  std::vector<NodeId> soft;   // soft headword embedding for token t
};

// Runs the query recurrence over tokens 1..n. The step input is the previous
// step's soft headword embedding (zero at the sequence boundary, or always
// zero when feed_soft is off) concatenated with the token embedding.
// backward=true scans right-to-left, with the neighbor at t+1.
QueryRun run_query(Tape& tape, const std::vector<NodeId>& memory,
                   const std::vector<NodeId>& token_embeds, const GruNodes& gru,
                   const AttentionNodes& attn, bool backward, bool feed_soft,
                   bool include_root, std::uint64_t* score_evals);

struct RelationParams {
  const RealMatrix* soft_weight = nullptr;   // labels x 2*memory-dim
  const RealMatrix* query_weight = nullptr;  // labels x 2*hidden
  const RealVector* bias = nullptr;          // labels
};

struct RelationNodes {
  NodeId soft_weight, query_weight, bias;
};

RelationNodes load_relation(Tape& tape, const RelationParams& params);

// softmax(U [soft_fwd; soft_bwd] + W [q_fwd; q_bwd] + b). A disabled
// direction passes zero vectors for its two slots.
NodeId predict_relation(Tape& tape, const RelationNodes& rel, NodeId soft_fwd,
                        NodeId soft_bwd, NodeId query_fwd, NodeId query_bwd);

}  // namespace bidep
