#include "bidep/model.hpp"

#include <stdexcept>

namespace bidep {

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::kBoth: return "both";
    case Direction::kLeftToRight: return "l2r";
    case Direction::kRightToLeft: return "r2l";
  }
  return "?";
}

Direction direction_from_name(const std::string& name) {
  if (name == "both") return Direction::kBoth;
  if (name == "l2r") return Direction::kLeftToRight;
  if (name == "r2l") return Direction::kRightToLeft;
  throw std::invalid_argument("unknown direction '" + name +
                              "' (expected both, l2r or r2l)");
}

std::string embedding_param_name(Channel channel) {
  return std::string("emb.") + channel_name(channel);
}

namespace {

void add_gru_params(ParameterSet& params, const std::string& prefix,
                    std::size_t input_dim, std::size_t hidden) {
  params.add_matrix(prefix + ".in_update", hidden, input_dim);
  params.add_matrix(prefix + ".rec_update", hidden, hidden);
  params.add_vector(prefix + ".bias_update", hidden, /*is_bias=*/true);
  params.add_matrix(prefix + ".in_reset", hidden, input_dim);
  params.add_matrix(prefix + ".rec_reset", hidden, hidden);
  params.add_vector(prefix + ".bias_reset", hidden, /*is_bias=*/true);
  params.add_matrix(prefix + ".in_cand", hidden, input_dim);
  params.add_matrix(prefix + ".rec_cand", hidden, hidden);
  params.add_vector(prefix + ".bias_cand", hidden, /*is_bias=*/true);
}

void add_attention_params(ParameterSet& params, const std::string& prefix,
                          std::size_t hidden, std::size_t memory_dim) {
  params.add_matrix(prefix + ".mem_proj", hidden, memory_dim);
  params.add_matrix(prefix + ".query_proj", hidden, hidden);
  params.add_vector(prefix + ".score", hidden);
}

void track_gru(SentenceGraph& g, const std::string& prefix,
               const GruNodes& nodes) {
  g.param_nodes.emplace_back(prefix + ".in_update", nodes.in_update);
  g.param_nodes.emplace_back(prefix + ".rec_update", nodes.rec_update);
  g.param_nodes.emplace_back(prefix + ".bias_update", nodes.bias_update);
  g.param_nodes.emplace_back(prefix + ".in_reset", nodes.in_reset);
  g.param_nodes.emplace_back(prefix + ".rec_reset", nodes.rec_reset);
  g.param_nodes.emplace_back(prefix + ".bias_reset", nodes.bias_reset);
  g.param_nodes.emplace_back(prefix + ".in_cand", nodes.in_cand);
  g.param_nodes.emplace_back(prefix + ".rec_cand", nodes.rec_cand);
  g.param_nodes.emplace_back(prefix + ".bias_cand", nodes.bias_cand);
}

}  // namespace

Model make_model(const ModelConfig& config, Vocabulary vocab) {
  if (config.hidden == 0) {
    throw std::invalid_argument("hidden size must be at least 1");
  }
  for (Channel c : config.channels) {
    if (!vocab.is_active(c)) {
      throw std::invalid_argument(
          std::string("model channel not present in vocabulary: ") +
          channel_name(c));
    }
  }
  Model model{config, std::move(vocab), ParameterSet{}};
  const std::size_t d = config.hidden;
  const std::size_t p = config.additive_dim();
  const std::size_t e = config.memory_dim();
  ParameterSet& params = model.params;
  for (Channel c : model.config.channels) {
    params.add_matrix(embedding_param_name(c), p, model.vocab.table(c).size());
  }
  params.add_matrix("proj.weight", d, p);
  params.add_vector("proj.bias", d, /*is_bias=*/true);
  add_gru_params(params, "mem.fwd", d, d);
  add_gru_params(params, "mem.bwd", d, d);
  add_gru_params(params, "query.fwd.gru", e + d, d);
  add_attention_params(params, "query.fwd.attn", d, e);
  add_gru_params(params, "query.bwd.gru", e + d, d);
  add_attention_params(params, "query.bwd.attn", d, e);
  const std::size_t labels = model.vocab.relation_count();
  params.add_matrix("rel.soft_weight", labels, 2 * e);
  params.add_matrix("rel.query_weight", labels, 2 * d);
  params.add_vector("rel.bias", labels, /*is_bias=*/true);
  return model;
}

EmbeddingTables embedding_tables(const Model& model) {
  EmbeddingTables tables;
  for (Channel c : model.config.channels) {
    tables.table[static_cast<std::size_t>(c)] =
        &model.params.matrix(embedding_param_name(c));
  }
  return tables;
}

Projection projection_view(const ParameterSet& params) {
  return Projection{&params.matrix("proj.weight"), &params.vector("proj.bias")};
}

GruParams gru_view(const ParameterSet& params, const std::string& prefix) {
  GruParams view;
  view.in_update = &params.matrix(prefix + ".in_update");
  view.rec_update = &params.matrix(prefix + ".rec_update");
  view.bias_update = &params.vector(prefix + ".bias_update");
  view.in_reset = &params.matrix(prefix + ".in_reset");
  view.rec_reset = &params.matrix(prefix + ".rec_reset");
  view.bias_reset = &params.vector(prefix + ".bias_reset");
  view.in_cand = &params.matrix(prefix + ".in_cand");
  view.rec_cand = &params.matrix(prefix + ".rec_cand");
  view.bias_cand = &params.vector(prefix + ".bias_cand");
  return view;
}

AttentionParams attention_view(const ParameterSet& params,
                               const std::string& prefix) {
  return AttentionParams{&params.matrix(prefix + ".mem_proj"),
                         &params.matrix(prefix + ".query_proj"),
                         &params.vector(prefix + ".score")};
}

RelationParams relation_view(const ParameterSet& params) {
  return RelationParams{&params.matrix("rel.soft_weight"),
                        &params.matrix("rel.query_weight"),
                        &params.vector("rel.bias")};
}

SentenceGraph build_sentence_graph(const Model& model,
                                   const std::vector<TokenIds>& tokens) {
  SentenceGraph g;
  g.n = tokens.size();
  Tape& tape = g.tape;
  const ModelConfig& cfg = model.config;
  const ParameterSet& params = model.params;

  TokenEmbedder embedder(tape, embedding_tables(model), projection_view(params));
  g.param_nodes.emplace_back("proj.weight", embedder.projection_weight_node());
  g.param_nodes.emplace_back("proj.bias", embedder.projection_bias_node());

  g.token_embeds.resize(g.n + 1);
  g.token_embeds[0] = embedder.embed(root_token_ids(model.vocab));
  for (std::size_t t = 1; t <= g.n; ++t) {
    g.token_embeds[t] = embedder.embed(tokens[t - 1]);
  }

  const GruNodes mem_fwd = load_gru(tape, gru_view(params, "mem.fwd"));
  track_gru(g, "mem.fwd", mem_fwd);
  const GruNodes mem_bwd = load_gru(tape, gru_view(params, "mem.bwd"));
  track_gru(g, "mem.bwd", mem_bwd);
  g.memory = encode_memory(tape, g.token_embeds, mem_fwd, mem_bwd);

  const std::vector<NodeId> body(g.token_embeds.begin() + 1,
                                 g.token_embeds.end());
  if (cfg.has_forward()) {
    const GruNodes gru = load_gru(tape, gru_view(params, "query.fwd.gru"));
    track_gru(g, "query.fwd.gru", gru);
    const AttentionNodes attn =
        load_attention(tape, attention_view(params, "query.fwd.attn"), g.memory);
    g.param_nodes.emplace_back("query.fwd.attn.mem_proj", attn.mem_proj);
    g.param_nodes.emplace_back("query.fwd.attn.query_proj", attn.query_proj);
    g.param_nodes.emplace_back("query.fwd.attn.score", attn.score_vec);
    g.fwd = run_query(tape, g.memory, body, gru, attn, /*backward=*/false,
                      cfg.feed_soft_head, cfg.soft_head_include_root,
                      &g.score_evals);
  }
  if (cfg.has_backward()) {
    const GruNodes gru = load_gru(tape, gru_view(params, "query.bwd.gru"));
    track_gru(g, "query.bwd.gru", gru);
    const AttentionNodes attn =
        load_attention(tape, attention_view(params, "query.bwd.attn"), g.memory);
    g.param_nodes.emplace_back("query.bwd.attn.mem_proj", attn.mem_proj);
    g.param_nodes.emplace_back("query.bwd.attn.query_proj", attn.query_proj);
    g.param_nodes.emplace_back("query.bwd.attn.score", attn.score_vec);
    g.bwd = run_query(tape, g.memory, body, gru, attn, /*backward=*/true,
                      cfg.feed_soft_head, cfg.soft_head_include_root,
                      &g.score_evals);
  }

  const RelationNodes rel = load_relation(tape, relation_view(params));
  g.param_nodes.emplace_back("rel.soft_weight", rel.soft_weight);
  g.param_nodes.emplace_back("rel.query_weight", rel.query_weight);
  g.param_nodes.emplace_back("rel.bias", rel.bias);
  NodeId zero_soft = 0, zero_query = 0;
  if (!cfg.has_forward() || !cfg.has_backward()) {
    zero_soft = tape.input(RealVector(cfg.memory_dim()));
    zero_query = tape.input(RealVector(cfg.hidden));
  }
  g.rel_probs.reserve(g.n);
  for (std::size_t t = 1; t <= g.n; ++t) {
    const NodeId soft_f = cfg.has_forward() ? g.fwd.soft[t - 1] : zero_soft;
    const NodeId soft_b = cfg.has_backward() ? g.bwd.soft[t - 1] : zero_soft;
    const NodeId query_f = cfg.has_forward() ? g.fwd.query[t - 1] : zero_query;
    const NodeId query_b = cfg.has_backward() ? g.bwd.query[t - 1] : zero_query;
    g.rel_probs.push_back(
        predict_relation(tape, rel, soft_f, soft_b, query_f, query_b));
  }
  g.columns = embedder.used_columns();
  return g;
}

RealMatrix attention_matrix(const SentenceGraph& graph, bool backward) {
  const QueryRun& run = backward ? graph.bwd : graph.fwd;
  if (run.attn.size() != graph.n) {
    throw std::logic_error("attention requested for a disabled direction");
  }
  RealMatrix out(graph.n, graph.n + 1);
  for (std::size_t t = 0; t < graph.n; ++t) {
    const RealVector& row = graph.tape.value(run.attn[t]);
    for (std::size_t j = 0; j <= graph.n; ++j) out.at(t, j) = row[j];
  }
  return out;
}

void accumulate_gradients(const SentenceGraph& graph, ParameterSet& grads) {
  for (const auto& [name, node] : graph.param_nodes) {
    NamedTensor& target = grads.tensor(name);
    if (target.is_matrix) {
      const RealMatrix& source = graph.tape.mat_grad(node);
      if (source.rows != target.mat.rows || source.cols != target.mat.cols) {
        throw DimensionError("gradient shape mismatch for " + name);
      }
      for (std::size_t i = 0; i < source.data.size(); ++i) {
        target.mat.data[i] += source.data[i];
      }
    } else {
      const RealVector& source = graph.tape.grad(node);
      for (std::size_t i = 0; i < source.dim(); ++i) {
        target.vec[i] += source[i];
      }
    }
  }
  for (const TokenEmbedder::ColumnUse& use : graph.columns) {
    RealMatrix& table = grads.matrix(embedding_param_name(use.channel));
    const RealVector& column_grad = graph.tape.grad(use.node);
    for (std::size_t r = 0; r < column_grad.dim(); ++r) {
      table.at(r, static_cast<std::size_t>(use.id)) += column_grad[r];
    }
  }
}

}  // namespace bidep
