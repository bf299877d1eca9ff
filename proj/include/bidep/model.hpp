// Full parser model: parameter registry, per-sentence computation graph,
// and gradient extraction back into named tensors.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bidep/attention.hpp"
#include "bidep/embedding.hpp"
#include "bidep/encoder.hpp"
#include "bidep/numerics.hpp"
#include "bidep/params.hpp"
#include "bidep/tape.hpp"
#include "bidep/vocab.hpp"

namespace bidep {

enum class Direction { kBoth, kLeftToRight, kRightToLeft };

const char* direction_name(Direction d);
Direction direction_from_name(const std::string& name);

struct ModelConfig {
  std::size_t hidden = 64;   // d
  std::size_t additive = 0;  // additive embedding dim; 0 = same as hidden
  Direction directions = Direction::kBoth;
  bool feed_soft_head = true;
  bool soft_head_include_root = true;
  std::vector<Channel> channels{Channel::kForm, Channel::kFpos};

  std::size_t additive_dim() const { return additive == 0 ? hidden : additive; }
  std::size_t memory_dim() const { return 2 * hidden; }
  bool has_forward() const { return directions != Direction::kRightToLeft; }
  bool has_backward() const { return directions != Direction::kLeftToRight; }
};

struct Model {
  ModelConfig config;
  Vocabulary vocab;
  ParameterSet params;
};

// Allocates every tensor (both directions, all active channels) at zero.
// Tensor construction order is fixed so that initialization and archive
// payloads are reproducible.
Model make_model(const ModelConfig& config, Vocabulary vocab);

std::string embedding_param_name(Channel channel);

// Borrowed parameter views used to wire tapes and tests.
EmbeddingTables embedding_tables(const Model& model);
Projection projection_view(const ParameterSet& params);
GruParams gru_view(const ParameterSet& params, const std::string& prefix);
AttentionParams attention_view(const ParameterSet& params,
                               const std::string& prefix);
RelationParams relation_view(const ParameterSet& params);

// One sentence's computation graph and the node handles needed afterwards.
struct SentenceGraph {
  Tape tape;
  std::size_t n = 0;
  std::vector<NodeId> token_embeds;  // x_0 (root) .. x_n
  std::vector<NodeId> memory;        // m_0 .. m_n
  QueryRun fwd, bwd;                 // empty when the direction is disabled
  std::vector<NodeId> rel_probs;     // index t-1 = relation row for token t
  std::uint64_t score_evals = 0;

  std::vector<TokenEmbedder::ColumnUse> columns;
  std::vector<std::pair<std::string, NodeId>> param_nodes;
};

SentenceGraph build_sentence_graph(const Model& model,
                                   const std::vector<TokenIds>& tokens);

// Attention probabilities as an n x (n+1) matrix (row t-1 = token t).
RealMatrix attention_matrix(const SentenceGraph& graph, bool backward);

// Adds this graph's parameter gradients (set by Tape::backward) into `grads`,
// scattering embedding-column gradients to the columns the sentence touched.
void accumulate_gradients(const SentenceGraph& graph, ParameterSet& grads);

}  // namespace bidep
