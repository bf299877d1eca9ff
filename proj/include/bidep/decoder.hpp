// Head decoding: combine the two directional attention distributions into
// log-scores, then pick heads greedily or as a maximum spanning arborescence.
#pragma once

#include <cstddef>
#include <vector>

#include "bidep/numerics.hpp"

namespace bidep {

// score.at(t-1, j) is the log-score of attaching token t to head j.
// Self-arcs are -infinity; everything else is finite.
struct ArcScoreMatrix {
  std::size_t n = 0;
  RealMatrix score;  // n x (n+1)
  std::size_t floored = 0;  // probabilities clamped to the 1e-300 floor

  Real at(std::size_t token, std::size_t head) const {
    return score.at(token - 1, head);
  }
};

// Elementwise log(a_fwd) + log(a_bwd) over n x (n+1) probability rows.
// Either argument (not both) may be null for a single-direction model.
ArcScoreMatrix make_arc_scores(const RealMatrix* attn_fwd,
                               const RealMatrix* attn_bwd);
ArcScoreMatrix combine_scores(const RealMatrix& attn_fwd,
                              const RealMatrix& attn_bwd);

// head[t-1] = argmax_j score (smallest j on ties). May contain cycles.
std::vector<int> greedy_decode(const ArcScoreMatrix& scores);

// Maximum-total-score spanning arborescence rooted at node 0
// (Chu-Liu-Edmonds). With single_root, exactly one arc leaves the root:
// the search reruns once per candidate root child and keeps the best total.
std::vector<int> mst_decode(const ArcScoreMatrix& scores, bool single_root);

Real tree_score(const ArcScoreMatrix& scores, const std::vector<int>& heads);

// rel[t-1] = argmax over the relation distribution (smallest id on ties).
std::vector<int> label_arcs(const std::vector<RealVector>& rel_probs);

struct ParseTree {
  std::vector<int> head;  // head[t-1] in 0..n
  std::vector<int> rel;   // relation ids, aligned with head
};

}  // namespace bidep
