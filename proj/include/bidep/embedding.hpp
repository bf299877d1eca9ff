// Token embeddings: one additive vector per input channel, summed, projected
// and passed through a leaky rectifier. Embedding columns enter the tape as
// individual vector nodes so gradients scatter back to exactly the columns a
// sentence touched.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bidep/numerics.hpp"
#include "bidep/tape.hpp"
#include "bidep/vocab.hpp"

namespace bidep {

// Borrowed views of the learnable embedding state for one model.
struct EmbeddingTables {
  // One additive-dim x vocab-size matrix per active channel; null = inactive.
  const RealMatrix* table[kNumChannels] = {nullptr, nullptr, nullptr, nullptr,
                                           nullptr};
};

struct Projection {
  const RealMatrix* weight = nullptr;  // hidden x additive
  const RealVector* bias = nullptr;    // hidden
};

// Builds token-embedding subgraphs on a tape. Columns are deduplicated per
// (channel, id) so a repeated word shares one input node and its gradient
// accumulates.
class TokenEmbedder {
 public:
  struct ColumnUse {
    Channel channel;
    int id;
    NodeId node;
  };

  TokenEmbedder(Tape& tape, const EmbeddingTables& tables,
                const Projection& proj);

  // x = lrel(W * (sum of channel columns) + b). Absent channels contribute
  // nothing; a token with no present channel embeds the zero vector.
  NodeId embed(const TokenIds& ids);

  const std::vector<ColumnUse>& used_columns() const { return used_; }
  NodeId projection_weight_node() const { return proj_weight_; }
  NodeId projection_bias_node() const { return proj_bias_; }

 private:
  NodeId column_node(Channel channel, int id);

  Tape* tape_;
  EmbeddingTables tables_;
  NodeId proj_weight_;
  NodeId proj_bias_;
  std::size_t additive_dim_;
  std::map<std::pair<int, int>, NodeId> cache_;
  std::vector<ColumnUse> used_;
};

// Overwrites columns of `form_table` with vectors from a whitespace-separated
// text file ("word v1 .. vD" per line, optional "count dim" header). Words
// outside the vocabulary are skipped, as is the unknown-word column. Returns
// the number of columns overwritten.
std::size_t load_pretrained(const std::string& path, RealMatrix& form_table,
                            const ChannelTable& form_vocab);

}  // namespace bidep
