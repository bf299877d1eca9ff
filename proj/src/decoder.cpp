#include "bidep/decoder.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bidep {

namespace {

constexpr Real kNegInf = -std::numeric_limits<Real>::infinity();
constexpr Real kProbFloor = 1e-300;

// One level of Chu-Liu-Edmonds on a dense score matrix. w is k x k over the
// current (super)node set with node 0 the root; w[u][v] scores arc u -> v.
// Returns heads[v] for v = 1..k-1 in this level's indexing.
std::vector<int> cle_level(const RealMatrix& w) {
  const std::size_t k = w.rows;
  std::vector<int> parent(k, -1);
  for (std::size_t v = 1; v < k; ++v) {
    Real best = kNegInf;
    int best_u = -1;
    for (std::size_t u = 0; u < k; ++u) {
      if (u == v) continue;
      if (best_u < 0 || w.at(u, v) > best) {
        best = w.at(u, v);
        best_u = static_cast<int>(u);
      }
    }
    parent[v] = best_u;
  }

  // Look for a cycle among the chosen arcs.
  std::vector<int> color(k, 0);  // 0 unseen, 1 on path, 2 done
  color[0] = 2;
  std::vector<std::size_t> cycle;
  for (std::size_t start = 1; start < k && cycle.empty(); ++start) {
    if (color[start] != 0) continue;
    std::size_t v = start;
    while (color[v] == 0) {
      color[v] = 1;
      v = static_cast<std::size_t>(parent[v]);
    }
    if (color[v] == 1) {
      std::size_t c = v;
      do {
        cycle.push_back(c);
        c = static_cast<std::size_t>(parent[c]);
      } while (c != v);
    }
    std::size_t u = start;
    while (color[u] == 1) {
      color[u] = 2;
      u = static_cast<std::size_t>(parent[u]);
    }
  }
  if (cycle.empty()) return parent;

  std::vector<bool> in_cycle(k, false);
  for (std::size_t v : cycle) in_cycle[v] = true;

  // Contract the cycle into one supernode placed last in the reduced graph.
  std::vector<std::size_t> keep;  // reduced index -> old index (non-cycle)
  std::vector<int> reduced_of(k, -1);
  for (std::size_t v = 0; v < k; ++v) {
    if (!in_cycle[v]) {
      reduced_of[v] = static_cast<int>(keep.size());
      keep.push_back(v);
    }
  }
  const std::size_t super = keep.size();
  const std::size_t rk = super + 1;
  RealMatrix rw(rk, rk);
  rw.data.assign(rw.data.size(), kNegInf);
  std::vector<int> enter_member(rk, -1);  // best cycle entry per outside node
  std::vector<int> exit_member(rk, -1);   // best cycle exit per outside node
  for (std::size_t a = 0; a < super; ++a) {
    const std::size_t u = keep[a];
    for (std::size_t b = 0; b < super; ++b) {
      if (a == b) continue;
      rw.at(a, b) = w.at(u, keep[b]);
    }
    // Arcs into the cycle are reweighted by the cycle arc they displace.
    Real best_in = kNegInf;
    int best_in_v = -1;
    Real best_out = kNegInf;
    int best_out_v = -1;
    for (std::size_t v : cycle) {
      const Real gain =
          w.at(u, v) - w.at(static_cast<std::size_t>(parent[v]), v);
      if (best_in_v < 0 || gain > best_in) {
        best_in = gain;
        best_in_v = static_cast<int>(v);
      }
      if (best_out_v < 0 || w.at(v, u) > best_out) {
        best_out = w.at(v, u);
        best_out_v = static_cast<int>(v);
      }
    }
    rw.at(a, super) = best_in;
    enter_member[a] = best_in_v;
    if (u != 0) {
      rw.at(super, a) = best_out;
      exit_member[a] = best_out_v;
    }
  }

  const std::vector<int> reduced_heads = cle_level(rw);

  std::vector<int> heads(k, -1);
  const int entry_u = reduced_heads[super];
  const std::size_t entry_member =
      static_cast<std::size_t>(enter_member[static_cast<std::size_t>(entry_u)]);
  for (std::size_t v : cycle) {
    heads[v] = parent[v];  // keep cycle arcs except the one being displaced
  }
  heads[entry_member] = static_cast<int>(keep[static_cast<std::size_t>(entry_u)]);
  for (std::size_t b = 1; b < super; ++b) {
    const int ru = reduced_heads[b];
    const std::size_t v = keep[b];
    if (static_cast<std::size_t>(ru) == super) {
      heads[v] = exit_member[b];
    } else {
      heads[v] = static_cast<int>(keep[static_cast<std::size_t>(ru)]);
    }
  }
  return heads;
}

std::vector<int> mst_once(const ArcScoreMatrix& scores, int forced_root_child) {
  const std::size_t k = scores.n + 1;
  RealMatrix w(k, k);
  w.data.assign(w.data.size(), kNegInf);
  for (std::size_t t = 1; t < k; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      if (j == t) continue;
      if (j == 0 && forced_root_child > 0 &&
          t != static_cast<std::size_t>(forced_root_child)) {
        continue;
      }
      w.at(j, t) = scores.at(t, j);
    }
  }
  std::vector<int> heads_full = cle_level(w);
  return std::vector<int>(heads_full.begin() + 1, heads_full.end());
}

}  // namespace

ArcScoreMatrix make_arc_scores(const RealMatrix* attn_fwd,
                               const RealMatrix* attn_bwd) {
  const RealMatrix* primary = attn_fwd != nullptr ? attn_fwd : attn_bwd;
  if (primary == nullptr) {
    throw std::invalid_argument("arc scores need at least one attention matrix");
  }
  const std::size_t n = primary->rows;
  if (primary->cols != n + 1) {
    throw DimensionError("attention matrix must be n x (n+1), got " +
                         shape_str(*primary));
  }
  if (attn_fwd != nullptr && attn_bwd != nullptr &&
      (attn_bwd->rows != n || attn_bwd->cols != n + 1)) {
    throw DimensionError("attention matrices disagree: " + shape_str(*attn_fwd) +
                         " vs " + shape_str(*attn_bwd));
  }
  ArcScoreMatrix out;
  out.n = n;
  out.score = RealMatrix(n, n + 1);
  for (std::size_t t = 1; t <= n; ++t) {
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == t) {
        out.score.at(t - 1, j) = kNegInf;
        continue;
      }
      Real total = 0;
      for (const RealMatrix* attn : {attn_fwd, attn_bwd}) {
        if (attn == nullptr) continue;
        Real p = attn->at(t - 1, j);
        if (p < kProbFloor) {
          p = kProbFloor;
          ++out.floored;
        }
        total += std::log(p);
      }
      out.score.at(t - 1, j) = total;
    }
  }
  return out;
}

ArcScoreMatrix combine_scores(const RealMatrix& attn_fwd,
                              const RealMatrix& attn_bwd) {
  return make_arc_scores(&attn_fwd, &attn_bwd);
}

std::vector<int> greedy_decode(const ArcScoreMatrix& scores) {
  std::vector<int> heads(scores.n);
  for (std::size_t t = 1; t <= scores.n; ++t) {
    Real best = kNegInf;
    int best_j = -1;
    for (std::size_t j = 0; j <= scores.n; ++j) {
      if (j == t) continue;
      if (best_j < 0 || scores.at(t, j) > best) {
        best = scores.at(t, j);
        best_j = static_cast<int>(j);
      }
    }
    heads[t - 1] = best_j;
  }
  return heads;
}

std::vector<int> mst_decode(const ArcScoreMatrix& scores, bool single_root) {
  if (scores.n == 0) return {};
  if (!single_root) return mst_once(scores, -1);
  std::vector<int> best_heads;
  Real best_total = kNegInf;
  for (std::size_t child = 1; child <= scores.n; ++child) {
    std::vector<int> heads = mst_once(scores, static_cast<int>(child));
    const Real total = tree_score(scores, heads);
    if (best_heads.empty() || total > best_total) {
      best_total = total;
      best_heads = std::move(heads);
    }
  }
  return best_heads;
}

Real tree_score(const ArcScoreMatrix& scores, const std::vector<int>& heads) {
  Real total = 0;
  for (std::size_t t = 1; t <= heads.size(); ++t) {
    total += scores.at(t, static_cast<std::size_t>(heads[t - 1]));
  }
  return total;
}

std::vector<int> label_arcs(const std::vector<RealVector>& rel_probs) {
  std::vector<int> rels(rel_probs.size());
  for (std::size_t i = 0; i < rel_probs.size(); ++i) {
    const RealVector& row = rel_probs[i];
    if (row.dim() == 0) throw std::invalid_argument("empty relation row");
    std::size_t best = 0;
    for (std::size_t r = 1; r < row.dim(); ++r) {
      if (row[r] > row[best]) best = r;
    }
    rels[i] = static_cast<int>(best);
  }
  return rels;
}

}  // namespace bidep
