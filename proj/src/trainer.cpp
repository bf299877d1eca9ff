#include "bidep/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "bidep/rng.hpp"

namespace bidep {

namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

void check_simplex_dims(const RealVector& a, const RealVector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("distributions disagree: " + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

void LrSchedule::observe(Real dev_ll) {
  if (have_prev_ && dev_ll < prev_) {
    ++decreases_;
    if (decreases_ == 1) lr_ /= 2;
  }
  prev_ = dev_ll;
  have_prev_ = true;
}

AdamState::AdamState(const ParameterSet& params) {
  first.reserve(params.tensors().size());
  second.reserve(params.tensors().size());
  for (const NamedTensor& t : params.tensors()) {
    first.emplace_back(t.size(), Real{0});
    second.emplace_back(t.size(), Real{0});
  }
}

void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state,
               Real lr, const TrainConfig& config) {
  if (params.tensors().size() != grads.tensors().size() ||
      state.first.size() != params.tensors().size()) {
    throw std::logic_error("optimizer state does not match parameters");
  }
  ++state.step;
  const Real correct1 =
      1 - std::pow(config.adam_beta1, static_cast<Real>(state.step));
  const Real correct2 =
      1 - std::pow(config.adam_beta2, static_cast<Real>(state.step));
  for (std::size_t i = 0; i < params.tensors().size(); ++i) {
    NamedTensor& p = params.tensors()[i];
    const NamedTensor& g = grads.tensors()[i];
    if (g.name != p.name || g.size() != p.size()) {
      throw std::logic_error("gradient tensor mismatch at " + p.name);
    }
    Real* pv = p.flat();
    const Real* gv = g.flat();
    std::vector<Real>& m = state.first[i];
    std::vector<Real>& v = state.second[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!std::isfinite(gv[k])) {
        throw std::runtime_error("non-finite gradient in parameter " + p.name);
      }
      m[k] = config.adam_beta1 * m[k] + (1 - config.adam_beta1) * gv[k];
      v[k] = config.adam_beta2 * v[k] + (1 - config.adam_beta2) * gv[k] * gv[k];
      const Real m_hat = m[k] / correct1;
      const Real v_hat = v[k] / correct2;
      pv[k] -= lr * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

void init_params(ParameterSet& params, std::uint64_t seed) {
  Rng rng(seed);
  for (NamedTensor& t : params.tensors()) {
    Real* data = t.flat();
    if (t.is_bias) {
      for (std::size_t k = 0; k < t.size(); ++k) data[k] = 0;
    } else {
      for (std::size_t k = 0; k < t.size(); ++k) {
        data[k] = Real{0.1} * rng.gaussian();
      }
    }
  }
}

PreparedSentence prepare_sentence(const Sentence& sentence,
                                  const Vocabulary& vocab,
                                  std::size_t* unk_relations) {
  PreparedSentence out;
  out.tokens.reserve(sentence.size());
  out.heads.reserve(sentence.size());
  out.rels.reserve(sentence.size());
  for (const Token& token : sentence.tokens) {
    out.tokens.push_back(lookup_token(vocab, token));
    out.heads.push_back(token.gold_head);
    const int rel = vocab.relation_id(token.gold_rel);
    if (rel == 0 && unk_relations != nullptr) ++*unk_relations;
    out.rels.push_back(rel);
  }
  return out;
}

NodeId build_loss(SentenceGraph& graph, const PreparedSentence& gold) {
  if (gold.tokens.size() != graph.n) {
    throw std::logic_error("gold annotation does not match graph size");
  }
  Tape& tape = graph.tape;
  std::vector<NodeId> terms;
  terms.reserve(3 * graph.n);
  for (std::size_t t = 1; t <= graph.n; ++t) {
    const std::size_t head = static_cast<std::size_t>(gold.heads[t - 1]);
    terms.push_back(tape.pick_log(graph.rel_probs[t - 1],
                                  static_cast<std::size_t>(gold.rels[t - 1])));
    if (!graph.fwd.attn.empty()) {
      terms.push_back(tape.pick_log(graph.fwd.attn[t - 1], head));
    }
    if (!graph.bwd.attn.empty()) {
      terms.push_back(tape.pick_log(graph.bwd.attn[t - 1], head));
    }
  }
  const NodeId log_likelihood = tape.add(terms);
  RealVector minus_one(1);
  minus_one[0] = -1;
  return tape.hadamard(tape.input(std::move(minus_one)), log_likelihood);
}

Real sentence_loss(const RealMatrix* attn_fwd, const RealMatrix* attn_bwd,
                   const std::vector<RealVector>& rel_probs,
                   const std::vector<int>& heads, const std::vector<int>& rels) {
  const std::size_t n = rel_probs.size();
  if (heads.size() != n || rels.size() != n) {
    throw DimensionError("gold annotation does not match model outputs");
  }
  Real total = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t head = static_cast<std::size_t>(heads[t - 1]);
    total += std::log(rel_probs[t - 1][static_cast<std::size_t>(rels[t - 1])]);
    if (attn_fwd != nullptr) total += std::log(attn_fwd->at(t - 1, head));
    if (attn_bwd != nullptr) total += std::log(attn_bwd->at(t - 1, head));
  }
  return -total;
}

Real hellinger_sq(const RealVector& p, const RealVector& q) {
  check_simplex_dims(p, q);
  Real total = 0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (p[i] < 0 || q[i] < 0) {
      throw std::invalid_argument("negative probability entry");
    }
    const Real diff = std::sqrt(p[i]) - std::sqrt(q[i]);
    total += diff * diff;
  }
  return Real{0.5} * total;
}

Real kl_div(const RealVector& g, const RealVector& p) {
  check_simplex_dims(g, p);
  Real total = 0;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    if (g[i] == 0) continue;  // 0 * log 0 = 0
    if (p[i] == 0) return kInf;
    total += g[i] * std::log(g[i] / p[i]);
  }
  return total;
}

BoundReport verify_agreement_bound(const RealVector& p, const RealVector& q,
                                   const RealVector& g) {
  constexpr Real kSlack = 1e-12;
  BoundReport report;
  report.h2_pq = hellinger_sq(p, q);
  report.scaled_h = std::sqrt(Real{2}) * std::sqrt(report.h2_pq);
  const Real h_pg = std::sqrt(hellinger_sq(p, g));
  const Real h_qg = std::sqrt(hellinger_sq(q, g));
  report.h_sum = std::sqrt(Real{2}) * (h_pg + h_qg);
  report.h2_sum_root = 2 * std::sqrt(h_pg * h_pg + h_qg * h_qg);
  report.kl_bound = 2 * std::sqrt(kl_div(g, p) + kl_div(g, q));
  report.holds = report.h2_pq <= report.scaled_h + kSlack &&
                 report.scaled_h <= report.h_sum + kSlack &&
                 report.h_sum <= report.h2_sum_root + kSlack &&
                 report.h2_sum_root <= report.kl_bound + kSlack;
  return report;
}

std::pair<Real, Real> cross_entropy_identity_check(const RealVector& g,
                                                   const RealVector& p,
                                                   const RealVector& q) {
  check_simplex_dims(g, p);
  check_simplex_dims(g, q);
  const Real kl_sum = kl_div(g, p) + kl_div(g, q);
  Real fused = 0;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    if (g[i] == 0) continue;
    fused += g[i] * std::log(g[i] / std::sqrt(p[i] * q[i]));
  }
  return {kl_sum, 2 * fused};
}

Real corpus_log_likelihood(const Model& model,
                           const std::vector<PreparedSentence>& sentences) {
  Real total = 0;
  for (const PreparedSentence& ps : sentences) {
    SentenceGraph graph = build_sentence_graph(model, ps.tokens);
    const NodeId loss = build_loss(graph, ps);
    total -= graph.tape.value(loss)[0];
  }
  return total;
}

TrainResult train(Model& model, const std::vector<Sentence>& train_set,
                  const std::vector<Sentence>& dev_set, const TrainConfig& config,
                  std::ostream* log_stream) {
  if (train_set.empty() || dev_set.empty()) {
    throw std::invalid_argument("training requires non-empty train and dev sets");
  }
  if (!(config.lr > 0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  TrainResult result;
  std::vector<PreparedSentence> train_prep;
  train_prep.reserve(train_set.size());
  for (const Sentence& s : train_set) {
    train_prep.push_back(prepare_sentence(s, model.vocab, &result.unk_relations));
  }
  std::vector<PreparedSentence> dev_prep;
  dev_prep.reserve(dev_set.size());
  for (const Sentence& s : dev_set) {
    dev_prep.push_back(prepare_sentence(s, model.vocab, &result.unk_relations));
  }

  AdamState state(model.params);
  ParameterSet grads = model.params.zeros_like();
  Rng shuffle_rng(config.seed + 0x517cc1b727220a95ULL);
  std::vector<std::size_t> order(train_prep.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  LrSchedule schedule(config.lr);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const Real lr = schedule.lr();
    const auto start = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);
    for (const std::size_t idx : order) {
      const PreparedSentence& ps = train_prep[idx];
      SentenceGraph graph = build_sentence_graph(model, ps.tokens);
      const NodeId loss = build_loss(graph, ps);
      graph.tape.backward(loss);
      grads.zero_all();
      accumulate_gradients(graph, grads);
      adam_step(model.params, grads, state, lr, config);
    }
    const Real dev_ll = corpus_log_likelihood(model, dev_prep);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.log.push_back(EpochRecord{epoch, dev_ll, lr, seconds});
    if (log_stream != nullptr) {
      (*log_stream) << "epoch=" << epoch << "\tdev_ll=" << dev_ll
                    << "\tlr=" << lr << "\tseconds=" << seconds << '\n';
    }
    if (std::isnan(dev_ll)) {
      throw std::runtime_error(
          "training diverged: dev log-likelihood is NaN at epoch " +
          std::to_string(epoch));
    }
    schedule.observe(dev_ll);
    if (schedule.stopped()) break;
  }
  result.final_lr = schedule.lr();
  return result;
}

Real lr_grid_search(const Model& init_model,
                    const std::vector<Sentence>& train_set,
                    const std::vector<Sentence>& dev_set,
                    const TrainConfig& config, std::ostream* log_stream) {
  if (config.lr_grid_count <= 0) {
    throw std::invalid_argument("learning-rate grid is empty");
  }
  Real best_lr = 0;
  Real best_ll = 0;
  bool have_best = false;
  for (int k = 0; k < config.lr_grid_count; ++k) {
    const Real candidate =
        config.lr_grid_start + static_cast<Real>(k) * TrainConfig::kLrGridStep;
    Model trial = init_model;
    TrainConfig one_epoch = config;
    one_epoch.lr = candidate;
    one_epoch.max_epochs = 1;
    const TrainResult result =
        train(trial, train_set, dev_set, one_epoch, nullptr);
    const Real dev_ll = result.log.front().dev_ll;
    if (log_stream != nullptr) {
      (*log_stream) << "grid_lr=" << candidate << "\tdev_ll=" << dev_ll << '\n';
    }
    if (!have_best || dev_ll > best_ll) {
      have_best = true;
      best_ll = dev_ll;
      best_lr = candidate;
    }
  }
  return best_lr;
}

}  // namespace bidep
