#include "bidep/parse_run.hpp"

#include <stdexcept>

#include "bidep/trainer.hpp"

namespace bidep {

const char* decode_mode_name(DecodeMode mode) {
  return mode == DecodeMode::kGreedy ? "greedy" : "mst";
}

DecodeMode decode_mode_from_name(const std::string& name) {
  if (name == "greedy") return DecodeMode::kGreedy;
  if (name == "mst") return DecodeMode::kMst;
  throw std::invalid_argument("unknown decode mode '" + name +
                              "' (expected greedy or mst)");
}

ParseTree parse_sentence(const Model& model, const std::vector<TokenIds>& tokens,
                         const DecodeOptions& options) {
  const SentenceGraph graph = build_sentence_graph(model, tokens);
  RealMatrix attn_fwd, attn_bwd;
  if (model.config.has_forward()) attn_fwd = attention_matrix(graph, false);
  if (model.config.has_backward()) attn_bwd = attention_matrix(graph, true);
  const ArcScoreMatrix scores =
      make_arc_scores(model.config.has_forward() ? &attn_fwd : nullptr,
                      model.config.has_backward() ? &attn_bwd : nullptr);
  ParseTree tree;
  tree.head = options.mode == DecodeMode::kGreedy
                  ? greedy_decode(scores)
                  : mst_decode(scores, options.single_root);
  std::vector<RealVector> rel_rows;
  rel_rows.reserve(graph.n);
  for (const NodeId id : graph.rel_probs) {
    rel_rows.push_back(graph.tape.value(id));
  }
  tree.rel = label_arcs(rel_rows);
  return tree;
}

std::vector<ParseTree> parse_corpus_serial(const Model& model,
                                           const std::vector<Sentence>& corpus,
                                           const DecodeOptions& options) {
  std::vector<ParseTree> trees(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    trees[i] =
        parse_sentence(model, prepare_sentence(corpus[i], model.vocab).tokens,
                       options);
  }
  return trees;
}

std::vector<ParseTree> parse_corpus(const Model& model,
                                    const std::vector<Sentence>& corpus,
                                    const DecodeOptions& options, int threads) {
  if (threads <= 1) return parse_corpus_serial(model, corpus, options);
  std::vector<ParseTree> trees(corpus.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    trees[i] =
        parse_sentence(model, prepare_sentence(corpus[i], model.vocab).tokens,
                       options);
  }
  return trees;
}

std::vector<std::vector<std::string>> relation_labels(
    const Model& model, const std::vector<ParseTree>& trees) {
  std::vector<std::vector<std::string>> labels(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    labels[i].reserve(trees[i].rel.size());
    for (const int rel : trees[i].rel) {
      labels[i].push_back(
          model.vocab.relations.id_to_string[static_cast<std::size_t>(rel)]);
    }
  }
  return labels;
}

}  // namespace bidep
