#include "bidep/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bidep/trainer.hpp"

namespace bidep {

namespace {

Sentence make_sentence(const std::vector<std::string>& forms,
                       const std::vector<std::string>& pos,
                       const std::vector<int>& heads,
                       const std::vector<std::string>& rels) {
  Sentence s;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    Token t;
    t.form = forms[i];
    t.fpos = pos[i];
    t.gold_head = heads[i];
    t.gold_rel = rels[i];
    s.tokens.push_back(std::move(t));
  }
  return s;
}

Real loss_at(const Model& model, const GradientFixture& fixture) {
  SentenceGraph graph = build_sentence_graph(model, fixture.tokens);
  PreparedSentence gold;
  gold.tokens = fixture.tokens;
  gold.heads = fixture.heads;
  gold.rels = fixture.rels;
  const NodeId loss = build_loss(graph, gold);
  return graph.tape.value(loss)[0];
}

}  // namespace

GradientFixture make_gradient_fixture(std::uint64_t seed) {
  // Every word appears twice across the corpus so none are singletons.
  const std::vector<Sentence> corpus = {
      make_sentence({"cats", "chase", "mice"}, {"N", "V", "N"}, {2, 0, 2},
                    {"sub", "top", "obj"}),
      make_sentence({"mice", "chase", "cats"}, {"N", "V", "N"}, {2, 0, 2},
                    {"sub", "top", "obj"}),
  };
  const std::vector<Channel> channels = {Channel::kForm, Channel::kFpos};
  Vocabulary vocab = build_vocab(corpus, channels);

  ModelConfig config;
  config.hidden = 4;
  config.channels = channels;
  GradientFixture fixture{make_model(config, std::move(vocab)), {}, {}, {}};
  init_params(fixture.model.params, seed);

  std::size_t unk = 0;
  const PreparedSentence prepared =
      prepare_sentence(corpus[0], fixture.model.vocab, &unk);
  fixture.tokens = prepared.tokens;
  fixture.heads = prepared.heads;
  fixture.rels = prepared.rels;
  return fixture;
}

Real max_gradient_error(GradientFixture& fixture, bool flip_sign) {
  SentenceGraph graph = build_sentence_graph(fixture.model, fixture.tokens);
  PreparedSentence gold;
  gold.tokens = fixture.tokens;
  gold.heads = fixture.heads;
  gold.rels = fixture.rels;
  const NodeId loss = build_loss(graph, gold);
  graph.tape.backward(loss);
  ParameterSet grads = fixture.model.params.zeros_like();
  accumulate_gradients(graph, grads);
  if (flip_sign) {
    Real* data = grads.tensors().front().flat();
    data[0] = -data[0] - Real{1};  // corrupt one analytic entry
  }

  // Central differences at the pinned step; entries that miss the tolerance
  // are re-probed at smaller steps, because a leaky-rectifier kink inside the
  // probe window (or rounding noise on near-zero entries) invalidates the
  // difference quotient without the analytic gradient being wrong. A genuine
  // gradient bug fails at every step size.
  constexpr Real kSteps[] = {1e-5, 1e-6, 1e-7};
  constexpr Real kAbsFloor = 1e-8;  // below finite-difference resolution
  Real worst = 0;
  for (std::size_t i = 0; i < fixture.model.params.tensors().size(); ++i) {
    NamedTensor& tensor = fixture.model.params.tensors()[i];
    const NamedTensor& grad = grads.tensors()[i];
    Real* values = tensor.flat();
    const Real* analytic = grad.flat();
    for (std::size_t k = 0; k < tensor.size(); ++k) {
      const Real saved = values[k];
      Real entry_error = 0;
      for (const Real step : kSteps) {
        values[k] = saved + step;
        const Real up = loss_at(fixture.model, fixture);
        values[k] = saved - step;
        const Real down = loss_at(fixture.model, fixture);
        values[k] = saved;
        const Real numeric = (up - down) / (2 * step);
        const Real gap = std::abs(analytic[k] - numeric);
        const Real scale = std::max(std::abs(analytic[k]), std::abs(numeric));
        entry_error = gap <= kAbsFloor ? Real{0} : gap / scale;
        if (entry_error < 1e-4) break;
      }
      worst = std::max(worst, entry_error);
    }
  }
  return worst;
}

RealVector random_simplex(Rng& rng, std::size_t dim) {
  RealVector p(dim);
  Real total = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    Real u = rng.uniform();
    while (u <= 0) u = rng.uniform();
    p[i] = -std::log(u);  // exponential draws normalize to a uniform simplex
    total += p[i];
  }
  for (std::size_t i = 0; i < dim; ++i) p[i] /= total;
  return p;
}

Real brute_force_best_tree_score(const ArcScoreMatrix& scores,
                                 bool single_root) {
  const std::size_t n = scores.n;
  Real best = -std::numeric_limits<Real>::infinity();
  std::vector<int> current(n, 0);
  bool more = true;
  while (more) {
    bool self_ok = true;
    for (std::size_t t = 1; t <= n; ++t) {
      if (current[t - 1] == static_cast<int>(t)) {
        self_ok = false;
        break;
      }
    }
    if (self_ok && is_valid_tree(current)) {
      if (!single_root || std::count(current.begin(), current.end(), 0) == 1) {
        best = std::max(best, tree_score(scores, current));
      }
    }
    // Odometer increment over head values 0..n per token.
    more = false;
    for (std::size_t t = 0; t < n; ++t) {
      if (++current[t] <= static_cast<int>(n)) {
        more = true;
        break;
      }
      current[t] = 0;
    }
  }
  return best;
}

std::vector<CheckOutcome> run_self_checks(std::uint64_t seed,
                                          bool sabotage_gradient) {
  std::vector<CheckOutcome> outcomes;

  {
    GradientFixture fixture = make_gradient_fixture(seed);
    const Real worst = max_gradient_error(fixture, sabotage_gradient);
    std::ostringstream detail;
    detail << "max relative error " << worst;
    outcomes.push_back(
        CheckOutcome{"gradient-finite-difference", worst < 1e-4, detail.str()});
  }

  {
    Rng rng(seed + 1);
    std::size_t violations = 0;
    for (int i = 0; i < 1000; ++i) {
      const std::size_t dim = 2 + rng.uniform_int(9);  // 2..10
      const RealVector p = random_simplex(rng, dim);
      const RealVector q = random_simplex(rng, dim);
      const RealVector g = random_simplex(rng, dim);
      if (!verify_agreement_bound(p, q, g).holds) ++violations;
    }
    std::ostringstream detail;
    detail << violations << " of 1000 triples violated the chain";
    outcomes.push_back(
        CheckOutcome{"agreement-bound-chain", violations == 0, detail.str()});
  }

  {
    Rng rng(seed + 2);
    Real worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const std::size_t dim = 2 + rng.uniform_int(9);
      const RealVector g = random_simplex(rng, dim);
      const RealVector p = random_simplex(rng, dim);
      const RealVector q = random_simplex(rng, dim);
      const auto [lhs, rhs] = cross_entropy_identity_check(g, p, q);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    std::ostringstream detail;
    detail << "max |lhs-rhs| " << worst;
    outcomes.push_back(
        CheckOutcome{"cross-entropy-identity", worst <= 1e-10, detail.str()});
  }

  {
    Rng rng(seed + 3);
    std::size_t mismatches = 0;
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = 1 + rng.uniform_int(6);  // 1..6
      ArcScoreMatrix scores;
      scores.n = n;
      scores.score = RealMatrix(n, n + 1);
      for (std::size_t t = 1; t <= n; ++t) {
        for (std::size_t j = 0; j <= n; ++j) {
          scores.score.at(t - 1, j) =
              j == t ? -std::numeric_limits<Real>::infinity()
                     : 2 * rng.uniform() - 1;
        }
      }
      const std::vector<int> heads = mst_decode(scores, false);
      const Real optimum = brute_force_best_tree_score(scores, false);
      if (!is_valid_tree(heads) ||
          std::abs(tree_score(scores, heads) - optimum) > 1e-9) {
        ++mismatches;
      }
    }
    std::ostringstream detail;
    detail << mismatches << " of 200 instances off the exhaustive optimum";
    outcomes.push_back(
        CheckOutcome{"mst-exhaustive-oracle", mismatches == 0, detail.str()});
  }

  return outcomes;
}

}  // namespace bidep
