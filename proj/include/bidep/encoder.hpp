// Gated recurrent unit with a leaky-rectifier candidate activation, and the
// bidirectional memory encoder built from a forward and a backward scan.
#pragma once

#include <vector>

#include "bidep/numerics.hpp"
#include "bidep/tape.hpp"

namespace bidep {

// Borrowed views of one recurrent cell's weights. Input weights are
// hidden x input-dim, recurrent weights hidden x hidden, biases hidden.
struct GruParams {
  const RealMatrix* in_update = nullptr;
  const RealMatrix* rec_update = nullptr;
  const RealVector* bias_update = nullptr;
  const RealMatrix* in_reset = nullptr;
  const RealMatrix* rec_reset = nullptr;
  const RealVector* bias_reset = nullptr;
  const RealMatrix* in_cand = nullptr;
  const RealMatrix* rec_cand = nullptr;
  const RealVector* bias_cand = nullptr;

  std::size_t hidden_dim() const { return rec_update->rows; }
  std::size_t input_dim() const { return in_update->cols; }
};

// Tape nodes for one cell, plus shared +1/-1 constant vectors used to form
// (1 - z) out of elementwise products and sums.
struct GruNodes {
  NodeId in_update, rec_update, bias_update;
  NodeId in_reset, rec_reset, bias_reset;
  NodeId in_cand, rec_cand, bias_cand;
  NodeId ones, neg_ones;
  std::size_t hidden = 0;
};

GruNodes load_gru(Tape& tape, const GruParams& params);

// One step: z and r are sigmoid gates, the candidate uses the leaky
// rectifier, h = (1 - z) * h_prev + z * candidate.
NodeId gru_step(Tape& tape, const GruNodes& gru, NodeId h_prev, NodeId input);

// Scans positions 0..n left-to-right and right-to-left from zero initial
// states and concatenates the two hidden states per position. inputs[0] is
// the artificial root token.
std::vector<NodeId> encode_memory(Tape& tape, const std::vector<NodeId>& inputs,
                                  const GruNodes& fwd, const GruNodes& bwd);

}  // namespace bidep
