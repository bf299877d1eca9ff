#include "bidep/encoder.hpp"

#include <stdexcept>

namespace bidep {

GruNodes load_gru(Tape& tape, const GruParams& params) {
  if (params.in_update == nullptr || params.rec_update == nullptr ||
      params.bias_update == nullptr || params.in_reset == nullptr ||
      params.rec_reset == nullptr || params.bias_reset == nullptr ||
      params.in_cand == nullptr || params.rec_cand == nullptr ||
      params.bias_cand == nullptr) {
    throw std::logic_error("recurrent cell is missing a weight tensor");
  }
  GruNodes nodes;
  nodes.hidden = params.hidden_dim();
  nodes.in_update = tape.input(*params.in_update);
  nodes.rec_update = tape.input(*params.rec_update);
  nodes.bias_update = tape.input(*params.bias_update);
  nodes.in_reset = tape.input(*params.in_reset);
  nodes.rec_reset = tape.input(*params.rec_reset);
  nodes.bias_reset = tape.input(*params.bias_reset);
  nodes.in_cand = tape.input(*params.in_cand);
  nodes.rec_cand = tape.input(*params.rec_cand);
  nodes.bias_cand = tape.input(*params.bias_cand);
  RealVector ones(nodes.hidden);
  ones.fill(Real{1});
  RealVector neg_ones(nodes.hidden);
  neg_ones.fill(Real{-1});
  nodes.ones = tape.input(std::move(ones));
  nodes.neg_ones = tape.input(std::move(neg_ones));
  return nodes;
}

NodeId gru_step(Tape& tape, const GruNodes& gru, NodeId h_prev, NodeId input) {
  const NodeId z = tape.sigmoid(tape.add(
      {tape.matvec(gru.in_update, input), tape.matvec(gru.rec_update, h_prev),
       gru.bias_update}));
  const NodeId r = tape.sigmoid(tape.add(
      {tape.matvec(gru.in_reset, input), tape.matvec(gru.rec_reset, h_prev),
       gru.bias_reset}));
  const NodeId cand = tape.lrel(tape.add(
      {tape.matvec(gru.in_cand, input),
       tape.matvec(gru.rec_cand, tape.hadamard(r, h_prev)), gru.bias_cand}));
  // (1 - z) * h_prev + z * cand
  const NodeId one_minus_z = tape.add(gru.ones, tape.hadamard(z, gru.neg_ones));
  return tape.add(tape.hadamard(one_minus_z, h_prev), tape.hadamard(z, cand));
}

std::vector<NodeId> encode_memory(Tape& tape, const std::vector<NodeId>& inputs,
                                  const GruNodes& fwd, const GruNodes& bwd) {
  if (inputs.empty()) {
    throw std::logic_error("memory encoder needs at least the root position");
  }
  const std::size_t count = inputs.size();
  std::vector<NodeId> left(count);
  NodeId h = tape.input(RealVector(fwd.hidden));
  for (std::size_t j = 0; j < count; ++j) {
    h = gru_step(tape, fwd, h, inputs[j]);
    left[j] = h;
  }
  std::vector<NodeId> right(count);
  h = tape.input(RealVector(bwd.hidden));
  for (std::size_t j = count; j-- > 0;) {
    h = gru_step(tape, bwd, h, inputs[j]);
    right[j] = h;
  }
  std::vector<NodeId> memory(count);
  for (std::size_t j = 0; j < count; ++j) {
    memory[j] = tape.concat({left[j], right[j]});
  }
  return memory;
}

}  // namespace bidep
