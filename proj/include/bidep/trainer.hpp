// Joint training objective (head agreement in both directions plus relation
// cross-entropy), the agreement-bound numerics behind it, Adam, and the
// epoch loop with its halve-then-stop learning-rate schedule.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "bidep/conll.hpp"
#include "bidep/model.hpp"
#include "bidep/numerics.hpp"
#include "bidep/params.hpp"

namespace bidep {

struct TrainConfig {
  Real lr = 0.001;
  Real lr_grid_start = 0;  // grid candidates: start + k * kLrGridStep
  int lr_grid_count = 0;   // 0 disables the grid search
  Real adam_beta1 = 0.9;
  Real adam_beta2 = 0.999;
  Real adam_epsilon = 1e-8;
  int max_epochs = 50;
  std::uint64_t seed = 1;

  static constexpr Real kLrGridStep = 0.0002;
};

struct AdamState {
  explicit AdamState(const ParameterSet& params);
  std::vector<std::vector<Real>> first;   // one slab per tensor
  std::vector<std::vector<Real>> second;
  std::int64_t step = 0;
};

// Halve-then-stop learning-rate control driven by per-epoch dev
// log-likelihoods: the first drop below the previous epoch's value halves
// the rate, the second requests a stop.
class LrSchedule {
 public:
  explicit LrSchedule(Real initial_lr) : lr_(initial_lr) {}
  void observe(Real dev_ll);
  Real lr() const { return lr_; }
  bool stopped() const { return decreases_ >= 2; }

 private:
  Real lr_;
  Real prev_ = 0;
  bool have_prev_ = false;
  int decreases_ = 0;
};

// Bias-corrected Adam update over every tensor. A non-finite gradient entry
// aborts the step naming the offending parameter.
void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state,
               Real lr, const TrainConfig& config);

// Weights ~ N(0, 0.01) (std 0.1), bias vectors zero; deterministic per seed.
void init_params(ParameterSet& params, std::uint64_t seed);

// A sentence resolved against the vocabulary, ready for graph building.
struct PreparedSentence {
  std::vector<TokenIds> tokens;
  std::vector<int> heads;
  std::vector<int> rels;  // unseen gold labels map to the unknown relation
};

PreparedSentence prepare_sentence(const Sentence& sentence,
                                  const Vocabulary& vocab,
                                  std::size_t* unk_relations = nullptr);

// Appends the negated log-likelihood of the gold tree to the graph:
// -sum_t [log y_{t,rel} + log a_fwd_{t,head} + log a_bwd_{t,head}], with a
// disabled direction's term dropped.
NodeId build_loss(SentenceGraph& graph, const PreparedSentence& gold);

// The same objective computed directly from probability rows.
Real sentence_loss(const RealMatrix* attn_fwd, const RealMatrix* attn_bwd,
                   const std::vector<RealVector>& rel_probs,
                   const std::vector<int>& heads, const std::vector<int>& rels);

// --- agreement mathematics -------------------------------------------------

// Squared Hellinger distance: 0.5 * sum (sqrt(p_i) - sqrt(q_i))^2.
Real hellinger_sq(const RealVector& p, const RealVector& q);

// KL divergence with 0*log 0 = 0; +infinity when g_i > 0 and p_i = 0.
Real kl_div(const RealVector& g, const RealVector& p);

// The inequality chain linking directional disagreement to the two KL terms
// the objective minimizes:
//   H^2(p,q) <= sqrt(2) H(p,q) <= sqrt(2)(H(p,g) + H(q,g))
//           <= 2 sqrt(H^2(p,g) + H^2(q,g)) <= 2 sqrt(D(g||p) + D(g||q)).
struct BoundReport {
  Real h2_pq;          // H^2(p, q)
  Real scaled_h;       // sqrt(2) * H(p, q)
  Real h_sum;          // sqrt(2) * (H(p, g) + H(q, g))
  Real h2_sum_root;    // 2 * sqrt(H^2(p, g) + H^2(q, g))
  Real kl_bound;       // 2 * sqrt(D(g||p) + D(g||q)), may be +infinity
  bool holds;          // every link within 1e-12 slack
};

BoundReport verify_agreement_bound(const RealVector& p, const RealVector& q,
                                   const RealVector& g);

// Returns (D(g||p) + D(g||q), 2 * sum g_i log(g_i / sqrt(p_i q_i))); the two
// sides are equal for strictly positive p, q.
std::pair<Real, Real> cross_entropy_identity_check(const RealVector& g,
                                                   const RealVector& p,
                                                   const RealVector& q);

// --- epoch loop --------------------------------------------------------

struct EpochRecord {
  int epoch;
  Real dev_ll;
  Real lr;       // rate used during this epoch
  double seconds;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  Real final_lr = 0;
  std::size_t unk_relations = 0;  // gold labels that mapped to unk
};

// Per epoch: seeded shuffle, one Adam step per sentence, then dev
// log-likelihood. The learning rate halves on the first dev decrease and
// training stops on the second. Log lines go to `log_stream` when non-null.
TrainResult train(Model& model, const std::vector<Sentence>& train_set,
                  const std::vector<Sentence>& dev_set, const TrainConfig& config,
                  std::ostream* log_stream = nullptr);

// Trains one epoch per candidate rate from a copy of `init_model` and returns
// the candidate with the highest dev log-likelihood (smallest rate on ties).
Real lr_grid_search(const Model& init_model,
                    const std::vector<Sentence>& train_set,
                    const std::vector<Sentence>& dev_set,
                    const TrainConfig& config,
                    std::ostream* log_stream = nullptr);

// Sum over sentences of the gold tree's log-likelihood (the negated loss).
Real corpus_log_likelihood(const Model& model,
                           const std::vector<PreparedSentence>& sentences);

}  // namespace bidep
