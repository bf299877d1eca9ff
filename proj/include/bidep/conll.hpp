// CoNLL-X treebank ingestion and emission, plus structural queries on gold
// trees. Files are UTF-8, tab-separated, 10 columns per token line, '_' for
// absent fields, blank line between sentences.
#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidep {

class ConllError : public std::runtime_error {
 public:
  explicit ConllError(const std::string& what) : std::runtime_error(what) {}
};

struct Token {
  std::string form;
  std::string lemma;  // empty = absent ('_')
  std::string cpos;   // empty = absent
  std::string fpos;
  std::vector<std::string> feats;  // morph atoms, possibly empty
  int gold_head = 0;               // 0 = ROOT
  std::string gold_rel;
};

struct Sentence {
  std::vector<Token> tokens;
  std::size_t size() const { return tokens.size(); }
};

std::vector<Sentence> read_conll(const std::string& path);

// Heads form a tree rooted at 0: every token reaches 0, no cycles. Multiple
// children of ROOT are accepted.
bool is_valid_tree(const std::vector<int>& heads);

// Emits CoNLL-X with the given HEAD/DEPREL columns; other columns are copied
// from the source sentences ('_' where absent).
void write_conll(const std::vector<Sentence>& sentences,
                 const std::vector<std::vector<int>>& heads,
                 const std::vector<std::vector<std::string>>& rels,
                 const std::string& path);

// 1-based indices of tokens whose gold arc is crossed by another gold arc.
// Two arcs cross when their spans strictly interleave; arcs headed by ROOT
// are drawn above everything and never participate in a crossing.
std::set<std::size_t> crossed_arcs(const Sentence& sentence);

struct CorpusSplit {
  std::vector<Sentence> train;
  std::vector<Sentence> dev;
  std::uint64_t split_seed = 0;
};

// Deterministic 5% dev holdout (rounded); requires at least 20 sentences.
CorpusSplit split_dev(const std::vector<Sentence>& sentences,
                      std::uint64_t seed);

}  // namespace bidep
